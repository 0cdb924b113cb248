#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lll/core.hpp"
#include "lll/postshatter.hpp"

namespace lll {

// E = E1 ∩ E2 with vbl(E1) ⊆ V1, vbl(E2) ⊆ V2, V1 ∩ V2 = ∅.
struct TwoSetEvent {
  EventSpec e1, e2;
};

struct TwoSetInstance {
  LLLInstance base;  // events are the conjunctions (used for deps/locality)
  std::vector<TwoSetEvent> parts;
  std::vector<char> in_v1;  // per variable

  void validate() const;  // partition and vbl containment invariants
};

// Builds the conjunction instance from parts + a variable partition.
TwoSetInstance make_two_set_instance(std::vector<VariableSpec> variables, Graph comm_graph,
                                     std::vector<TwoSetEvent> parts, std::vector<char> in_v1,
                                     double declared_p);

// All-binary instance where every event carries a testifying assoc event.
struct BinaryLowRiskInstance {
  LLLInstance base;
  void validate() const;
};

struct ShatterTrace {
  int residual_events = 0;
  std::vector<int> residual_event_ids;
  std::map<int, int> dep_component_hist;   // residual dependency component size -> count
  std::map<int, int> host_component_hist;  // G[W'] component size -> count
  int max_dep_component = 0;
  int max_host_component = 0;
  bool post_ok = true;
  PostShatterTrace post;
  // reported, not enforced
  double p = 1.0;
  int d = 0;
  bool criterion_local = false;    // p < d^-14 (two-set) / d^-22 (binary)
};

using PostSolver =
    std::function<PartialAssignment(const LLLInstance& residual, const PartialAssignment& pre,
                                    Rng& rng, PostShatterTrace* trace)>;

// Residual solvers to inject into the shattering drivers.
PostSolver make_enumeration_post_solver(int max_vars = 20);
PostSolver make_resampling_post_solver(int max_iters = -1);
PostSolver make_decomposed_post_solver(PostShatterOptions opts = {});

// Retraction bookkeeping from a binary low-risk run, for invariant checks.
struct RetractionInfo {
  PartialAssignment initial;              // Step-1 sample
  std::vector<char> unhappy;              // assoc(E) held under the sample
  std::vector<char> retracted_round1;     // per variable
  std::vector<char> retracted_round2;     // per variable
};

struct DisjointResult {
  PartialAssignment assignment;
  ShatterTrace trace;
  PartialAssignment pre;  // V1 sample
};

struct BinaryResult {
  PartialAssignment assignment;
  ShatterTrace trace;
  RetractionInfo retractions;
  PartialAssignment pre;  // psi_pre after both retraction rounds
};

// Sample V1; events whose first conjunct holds go to the post phase on their
// V2 variables; leftover V2 variables take their distribution's mode.
DisjointResult solve_disjoint(const TwoSetInstance& inst, const PostSolver& post, Rng& rng);

// Sample everything; retract around failing assoc events, then retract white
// variables around events that saw a retraction; hand the residual to post.
BinaryResult solve_binary_lowrisk(const BinaryLowRiskInstance& inst, const PostSolver& post,
                                  Rng& rng);

enum class ResidualFlavor { two_set, binary };

// Events still live under psi_pre, conditioned on it (vbl = unset variables).
// Variable table and hosts keep the base indexing.
struct Residual {
  LLLInstance instance;
  std::vector<int> event_ids;  // residual event -> base event
};
Residual residual_instance(const LLLInstance& base, const PartialAssignment& psi_pre,
                           ResidualFlavor flavor, const TwoSetInstance* two_set = nullptr,
                           const PartialAssignment* initial = nullptr);

// Residual dependency components, host-projection components, and the
// containment of each dependency component's host image in one projection
// component (an internal-consistency error if violated).
void component_stats(const LLLInstance& base, const Residual& residual,
                     const PartialAssignment& psi_pre, ShatterTrace* trace);

// Re-derivation of the two retraction rounds from the initial sample;
// returns a description of the first inconsistency, empty if sound.
std::string check_retraction_soundness(const BinaryLowRiskInstance& inst,
                                       const RetractionInfo& info,
                                       const PartialAssignment& psi_pre);

// For every event whose assoc was avoided at Step 1: psi_pre either retracts
// all its sampled-white variables or none of its sampled-black ones.
std::string check_respect_membership(const BinaryLowRiskInstance& inst,
                                     const PartialAssignment& initial,
                                     const PartialAssignment& psi_pre);

}  // namespace lll

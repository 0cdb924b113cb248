#pragma once

#include <string>
#include <vector>

#include "lll/core.hpp"
#include "lll/dyadic.hpp"
#include "lll/resample.hpp"

namespace lll {

struct Decomposition {
  struct Cluster {
    std::vector<int> nodes;
    int color = 0;  // 1-based collection index
    int radius = 0;
  };
  std::vector<Cluster> clusters;
  int colors = 0;
  int separation = 0;  // same-color clusters are > separation hops apart
  int beta = 0;        // bound on weak cluster diameter
};

// BFS ball carving with geometric growth; same-color clusters end up more
// than k hops apart. Falls back to a single cluster covering the whole
// component when the color budget runs out, which is always valid.
Decomposition decompose(const Graph& component, int k, int target_colors, uint64_t seed);

struct DecompCheck {
  bool ok = true;
  std::string detail;
};
DecompCheck verify_decomposition(const Graph& component, const Decomposition& d);

struct PostShatterOptions {
  int collections = 4;   // decomposition color budget per component
  int k_parallel = 16;   // parallel resampling instances per collection
  int exact_bound = 16;  // up to 2^exact_bound enumeration for conditionals
  long mc_trials = 1500;
  bool cap_threshold = true;  // clamp d^2 * ref at 1 so final collections pin events
  int resample_iters = 64;
  int d_override = 0;  // 0: residual dependency degree (min 2)
};

struct CollectionLLL {
  LLLInstance lll;                  // variables = the collection's unset vars (re-indexed)
  std::vector<int> var_ids;         // local variable -> base variable id
  std::vector<int> base_event_ids;  // local event -> base event id
  std::vector<double> ref_prob;     // Pr(E | phi_prev), recorded at construction
  std::vector<bool> ref_estimated;
  int d = 2;
};

// L_i: for each base event incident to the collection's unset variables, an
// event that holds on psi iff Pr(E | psi ∪ phi_prev) >= d^2 * Pr(E | phi_prev)
// (clamped at 1 when cap_threshold is set).
CollectionLLL build_collection_lll(const LLLInstance& base, const PartialAssignment& phi_prev,
                                   const std::vector<int>& collection_vars, int d,
                                   const PostShatterOptions& opts, uint64_t eval_seed);

struct PostLedgerEntry {
  int event = 0;
  int component = 0;
  int collection = 0;
  double before = 0, after = 0;
  bool exact = true;
  bool touched = false;  // some variable of the event was set this collection
  bool ok = true;        // after < d^2*before (touched) or after == before (untouched)
};

struct ClusterChoice {
  int component = 0;
  int collection = 0;
  int cluster = 0;
  int chosen_instance = -1;
  int iterations = 0;  // resampling iterations of the adopted instance
};

struct PostShatterTrace {
  std::vector<int> component_sizes;  // host-projection component sizes
  std::vector<ClusterChoice> choices;
  std::vector<PostLedgerEntry> ledger;
  int d = 2;
  bool any_estimated = false;
};

struct PostShatterResult {
  PartialAssignment assignment;
  PostShatterTrace trace;
};

// Completes every unset variable of psi, processing the network decomposition
// of each host-projection component collection by collection, with k_parallel
// resampling instances per collection and per-cluster least-index agreement.
// Throws Error("post-solver-failure") when a cluster has no correct instance.
PostShatterResult solve_postshatter(const LLLInstance& inst, const PartialAssignment& psi,
                                    Rng& rng, const PostShatterOptions& opts = {});

// Exact Markov-event check (Claim on collection LLLs): Pr(E') <= 1/d^2 for
// every event of the collection LLL. Requires dyadic distributions and an
// enumerable collection (product of domains <= 2^20).
struct MarkovCheck {
  bool pass = true;
  Dyadic worst;      // largest Pr(E')
  int worst_event = -1;
};
MarkovCheck verify_markov_claim(const LLLInstance& base, const PartialAssignment& phi_prev,
                                const std::vector<int>& collection_vars, int d);

// Exact conditional probability with dyadic weights (throws unless all
// distributions are dyadic and the unset count is enumerable).
Dyadic exact_conditional_dyadic(const LLLInstance& inst, const EventSpec& event,
                                const PartialAssignment& psi, int max_unset = 20);

}  // namespace lll

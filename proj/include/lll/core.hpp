#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lll/dyadic.hpp"
#include "lll/graph.hpp"
#include "lll/rng.hpp"

namespace lll {

// Domain values are indices into the variable's domain; kUnset is ⊥.
// Binary domains use index 0 = black, 1 = white (black < ⊥ < white
// in the monotonicity order).
using Value = int16_t;
constexpr Value kUnset = -1;
constexpr Value kBlack = 0;
constexpr Value kWhite = 1;

struct Distribution {
  std::vector<double> probs;
  // optional exact form: probs[i] = dyadic_num[i] / 2^dyadic_exp
  std::vector<uint64_t> dyadic_num;
  int dyadic_exp = 0;

  bool has_exact() const { return !dyadic_num.empty(); }
  int size() const { return static_cast<int>(probs.size()); }
  int mode() const;
  void validate() const;  // sums to 1 within 1e-12, probs >= 0

  static Distribution bernoulli_black(double p_black);
  // p_black = num / 2^exp, exact
  static Distribution dyadic_black(uint64_t num, int exp);
  static Distribution fair_binary() { return dyadic_black(1, 1); }
  static Distribution uniform_over(int k);
  static Distribution point_mass(int k, int value);
};

struct VariableSpec {
  Distribution dist;
  int host = 0;
  int domain() const { return dist.size(); }
};

enum class Monotonicity { none, increasing, decreasing };

struct LLLInstance;
struct PartialAssignment;

struct ProbResult {
  double value = 0;
  bool exact = true;
  long trials = 0;  // monte-carlo only
};

struct EventSpec {
  std::vector<int> vbl;  // ordered variable ids
  // pure predicate of the values of vbl (aligned with vbl order)
  std::function<bool(std::span<const Value>)> holds;
  int host = 0;
  std::shared_ptr<const EventSpec> assoc;  // testifying event, if any
  Monotonicity mono = Monotonicity::none;
  std::string name;  // for traces/dumps
  // Optional fast Pr(E | psi) for structured events (count thresholds and the
  // like); solvers use it beyond the exact enumeration bound.
  std::function<ProbResult(const LLLInstance&, const PartialAssignment&, long trials,
                           uint64_t seed)>
      cond_hook;
};

struct PartialAssignment {
  std::vector<Value> values;

  PartialAssignment() = default;
  explicit PartialAssignment(size_t n) : values(n, kUnset) {}
  bool is_set(int x) const { return values[x] != kUnset; }
  size_t unset_count() const;
  bool total() const { return unset_count() == 0; }
};

struct DependencyGraph {
  std::vector<std::vector<int>> adj;  // over event indices
  int max_degree = 0;                 // d
  int event_degree = 0;               // d_E = max |vbl(E)|
  int variable_degree = 0;            // d_V
};

struct LLLInstance {
  std::vector<VariableSpec> variables;
  std::vector<EventSpec> events;
  Graph comm_graph;
  // Documented analytic bound on max event probability; constructors fill it.
  double declared_p = 1.0;

  int num_vars() const { return static_cast<int>(variables.size()); }
  int num_events() const { return static_cast<int>(events.size()); }
};

struct InstanceParams {
  int d = 0;
  int d_e = 0;
  int d_v = 0;
  int nu = 0;
  int load = 0;
  double p = 1.0;
};

DependencyGraph build_dependency_graph(const LLLInstance& inst);

// vars: subset of variable ids to draw; everything else stays ⊥.
PartialAssignment sample_all(const LLLInstance& inst, const std::vector<int>& vars, Rng& rng);
PartialAssignment sample_everything(const LLLInstance& inst, Rng& rng);
int draw(const Distribution& dist, Rng& rng);

// Requires all of vbl(event) set; throws Error("precondition") otherwise.
bool evaluate(const EventSpec& event, const PartialAssignment& phi);

enum class ProbMode { exact, monte_carlo };

constexpr int kExactEnumerationBound = 24;  // max unset variables for exact mode

// Pr(event | psi): exact weighted enumeration over unset vbl variables
// (<= 2^24 combinations) or seeded monte-carlo estimate.
ProbResult conditional_prob(const LLLInstance& inst, const EventSpec& event,
                            const PartialAssignment& psi, ProbMode mode,
                            long trials = 20000, uint64_t mc_seed = 0);

// phi1 takes precedence; both-proper on the same variable is a conflict.
PartialAssignment merge(const PartialAssignment& phi1, const PartialAssignment& phi2);

// max over (E, x in vbl(E)) of dist(l(E), l(x)); throws on unreachable pairs.
int compute_locality(const LLLInstance& inst);

InstanceParams compute_params(const LLLInstance& inst);
InstanceParams compute_params(const LLLInstance& inst, const DependencyGraph& dep);

// Per-component compact ids (BFS order within each dependency component).
std::vector<int> component_ids(const DependencyGraph& dep);

std::string instance_debug_dump(const LLLInstance& inst);  // JSON

// --- common event builders ---

// holds iff #{i : values[i] == colour} `cmp` threshold, over the given vbl.
EventSpec count_event(std::vector<int> vbl, Value colour, char cmp, long long threshold,
                      std::string name = "");

}  // namespace lll

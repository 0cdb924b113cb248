#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lll/core.hpp"
#include "lll/dyadic.hpp"
#include "lll/graph.hpp"

// Exhaustive ground-truth engine over small binary universes with dyadic
// distributions. Everything here is exact; doubles never enter a comparison.
//
// Assignments are bitmasks with bit i = 1 meaning variable i is white
// (mask 0 = all black). Partial assignments are (white_mask, bot_mask) pairs
// with disjoint masks; remaining variables are black.
namespace lll::oracle {

struct Universe {
  int n = 0;
  std::vector<Dyadic> pb;  // P(x = black)
  std::vector<Dyadic> pw;  // P(x = white)

  static Universe fair(int n);
  // p_black[i] = num[i] / 2^exp
  static Universe dyadic(const std::vector<uint64_t>& num, int exp);
  Dyadic weight(uint32_t white_mask) const;
};

struct Pattern {
  uint32_t white = 0;
  uint32_t bot = 0;
  // remaining variables are black
};

struct TableEvent {
  std::string name;
  uint32_t vbl = 0;               // mask of variables the event reads
  std::vector<uint8_t> table;     // 2^n truth values, indexed by white mask
  Monotonicity declared = Monotonicity::none;

  bool holds(uint32_t white_mask) const { return table[white_mask] != 0; }
};

TableEvent tabulate(const Universe& u, uint32_t vbl_mask,
                    const std::function<bool(uint32_t)>& holds_on_white_mask,
                    std::string name, Monotonicity declared = Monotonicity::none);

// Event builders on black counts restricted to `vars` (default: all).
// "#black > t" is the sum-threshold shape; "#black < t" is the
// monotone increasing shape (avoided by sampling more).
TableEvent black_count_gt(const Universe& u, long long t, uint32_t vars_mask, std::string name = "");
TableEvent black_count_lt(const Universe& u, long long t, uint32_t vars_mask, std::string name = "");
TableEvent event_or(const Universe& u, const TableEvent& a, const TableEvent& b, std::string name = "");

Dyadic probability(const Universe& u, const TableEvent& e);
Dyadic conditional(const Universe& u, const TableEvent& e, Pattern psi);

// empty when e is contained in sup; otherwise a witness white-mask with
// e holding but sup not.
std::optional<uint32_t> containment_counterexample(const Universe& u, const TableEvent& e,
                                                   const TableEvent& sup);

// Local lattice check of the declared monotonicity tag (exact, exhaustive).
// Returns a violating pattern pair if the declaration is false.
struct MonotonicityWitness {
  Pattern lower, upper;
};
std::optional<MonotonicityWitness> check_monotone(const Universe& u, const TableEvent& e,
                                                  Monotonicity declared);

std::vector<Pattern> enumerate_respect(const Universe& u, const TableEvent& assoc);

struct RiskReport {
  Dyadic pr_assoc;
  Dyadic max_respect;
  Dyadic risk;  // max of the two
  Pattern witness;
};

// Exact Def.-4.1 risk testified by assoc. Throws Error("containment-violation")
// if assoc does not contain e and Error("size-bound") above the enumeration
// budget (|vbl(e)| <= 14; universe <= 16).
RiskReport testified_risk(const Universe& u, const TableEvent& e, const TableEvent& assoc);

struct Check {
  bool pass = true;
  std::string detail;
};

// risk(e testified by e) == Pr(e), for declared-increasing e; a failure is
// reported together with the monotonicity counterexample that explains it.
Check verify_no_risk_lemma(const Universe& u, const TableEvent& e);

// risk(#black > x testified by #black > x/2) <= Pr(#black > x/2)
Check verify_sum_threshold(const Universe& u, long long x);

// risk(e1 ∪ e2 testified by a1 ∪ a2) <= risk(e1,a1) + risk(e2,a2)
Check verify_union_risk(const Universe& u, const TableEvent& e1, const TableEvent& a1,
                        const TableEvent& e2, const TableEvent& a2);

// q-dangerous full assignments: some retraction has Pr(e | psi) > q.
TableEvent danger_event(const Universe& u, const TableEvent& e, const Dyadic& q);
Dyadic danger_prob(const Universe& u, const TableEvent& e, const Dyadic& q);
// risk(e testified by danger event) <= max(q, Pr(danger))
Check verify_danger_lemma(const Universe& u, const TableEvent& e, const Dyadic& q);

// probability that e holds on some mixture of two independent assignments
Dyadic fragility(const Universe& u, const TableEvent& e);
// risk(e) <= max(f(e)/q, q), checked via the danger-event testimony
Check verify_fragility_risk(const Universe& u, const TableEvent& e, const Dyadic& q);

// Monte Carlo check of the non-edge hitting tail: empirical
// Pr(f <= p^2 m/2) vs exp(-p m / 5|X|) + 3 standard errors.
struct TailCheck {
  double empirical = 0;
  double bound = 0;
  double stderr_3 = 0;
  long long non_edges = 0;
  bool pass = false;
};
TailCheck verify_nonedge_tail(const Graph& g_on_x, double p, long trials, Rng& rng);

// Bridge from a small all-binary dyadic LLL instance to the oracle space.
Universe universe_from_instance(const LLLInstance& inst);
TableEvent tabulate_event(const Universe& u, const EventSpec& event, std::string name = "");

// Random-case generators shared by the oracle suites.
Universe random_universe(int n, Rng& rng, int exp = 4);
// weighted black-count threshold (holds when the weighted black count is
// small): monotone increasing by construction
TableEvent random_increasing_event(const Universe& u, Rng& rng);

}  // namespace lll::oracle

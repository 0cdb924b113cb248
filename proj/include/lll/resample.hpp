#pragma once

#include <vector>

#include "lll/core.hpp"

namespace lll {

struct ResampleTrace {
  enum class Outcome { success, budget_exhausted };
  Outcome outcome = Outcome::success;
  int iterations = 0;
  std::vector<int> failing_per_iteration;  // count before each resampling step
  bool criterion_ok = true;                // e*p*d^2 < 1 held for the budget formula
  int budget = 0;
};

// Budget for the simple resampling algorithm: ~4 log|B| / log(1/(e p d^2)),
// clamped to [32, 1e6]; a flat fallback when the criterion fails.
int default_resample_budget(int num_events, double p, int d, bool* criterion_ok = nullptr);

// I = { A failing : ID(A) minimal over the closed failing neighborhood }.
// Closed, so I is nonempty whenever `failing` is and independent in dep.
std::vector<int> local_minima(const DependencyGraph& dep, const std::vector<char>& failing,
                              const std::vector<int>& ids);

struct ResampleOptions {
  int max_iters = -1;  // -1: default budget
  // start from this assignment instead of sampling (must be total if given)
  const PartialAssignment* initial = nullptr;
};

struct ResampleRun {
  PartialAssignment assignment;
  ResampleTrace trace;
};

// Alg.: sample everything, then repeatedly resample the variables of the
// locally-minimal-ID failing events until none fail or the budget runs out.
// ids must be unique within each dependency component.
ResampleRun solve_by_resampling(const LLLInstance& inst, const DependencyGraph& dep,
                    const std::vector<int>& ids, Rng& rng, const ResampleOptions& opts = {});

// convenience: builds the dependency graph and per-component ids itself
ResampleRun solve_by_resampling(const LLLInstance& inst, Rng& rng, const ResampleOptions& opts = {});

}  // namespace lll

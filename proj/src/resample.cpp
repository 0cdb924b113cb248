#include "lll/resample.hpp"

#include <algorithm>
#include <cmath>

namespace lll {

int default_resample_budget(int num_events, double p, int d, bool* criterion_ok) {
  const double epd2 = std::exp(1.0) * p * static_cast<double>(d) * static_cast<double>(d);
  const bool ok = epd2 < 1.0 && p > 0.0;
  if (criterion_ok) *criterion_ok = ok;
  double budget;
  if (ok) {
    budget = std::ceil(4.0 * std::log(std::max(2, num_events)) / std::log(1.0 / epd2));
  } else if (p == 0.0) {
    budget = 32;
  } else {
    // outside the guarantee; flat budget, caller retries with fresh seeds
    budget = 64.0 * std::ceil(std::log2(num_events + 2.0));
  }
  return static_cast<int>(std::clamp(budget, 32.0, 1e6));
}

std::vector<int> local_minima(const DependencyGraph& dep, const std::vector<char>& failing,
                              const std::vector<int>& ids) {
  std::vector<int> out;
  for (size_t e = 0; e < dep.adj.size(); ++e) {
    if (!failing[e]) continue;
    bool minimal = true;
    for (int f : dep.adj[e]) {
      if (failing[f] && ids[f] < ids[e]) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.push_back(static_cast<int>(e));
  }
  return out;
}

ResampleRun solve_by_resampling(const LLLInstance& inst, const DependencyGraph& dep,
                    const std::vector<int>& ids, Rng& rng, const ResampleOptions& opts) {
  ResampleRun res;
  bool criterion_ok = true;
  const int budget = opts.max_iters > 0
                         ? opts.max_iters
                         : default_resample_budget(inst.num_events(), inst.declared_p,
                                                   std::max(1, dep.max_degree), &criterion_ok);
  res.trace.budget = budget;
  res.trace.criterion_ok = criterion_ok;

  if (opts.initial) {
    if (!opts.initial->total()) throw Error("precondition", "initial assignment must be total");
    res.assignment = *opts.initial;
  } else {
    res.assignment = sample_everything(inst, rng);
  }

  std::vector<char> failing(inst.num_events(), 0);
  auto recompute = [&](const std::vector<int>* touched_events) {
    if (!touched_events) {
      for (int e = 0; e < inst.num_events(); ++e)
        failing[e] = evaluate(inst.events[e], res.assignment) ? 1 : 0;
      return;
    }
    for (int e : *touched_events) failing[e] = evaluate(inst.events[e], res.assignment) ? 1 : 0;
  };
  recompute(nullptr);

  // event -> events sharing a resampled variable, via variable incidence
  std::vector<std::vector<int>> incident(inst.num_vars());
  for (int e = 0; e < inst.num_events(); ++e)
    for (int x : inst.events[e].vbl) incident[x].push_back(e);

  for (int iter = 0; iter < budget; ++iter) {
    int failing_count = 0;
    for (char f : failing) failing_count += f;
    if (failing_count == 0) {
      res.trace.outcome = ResampleTrace::Outcome::success;
      res.trace.iterations = iter;
      return res;
    }
    res.trace.failing_per_iteration.push_back(failing_count);

    const std::vector<int> chosen = local_minima(dep, failing, ids);
    std::vector<int> touched;
    for (int e : chosen) {
      for (int x : inst.events[e].vbl) {
        res.assignment.values[x] = static_cast<Value>(draw(inst.variables[x].dist, rng));
        for (int f : incident[x]) touched.push_back(f);
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    recompute(&touched);
  }

  int failing_count = 0;
  for (char f : failing) failing_count += f;
  res.trace.iterations = budget;
  res.trace.outcome = failing_count == 0 ? ResampleTrace::Outcome::success
                                         : ResampleTrace::Outcome::budget_exhausted;
  return res;
}

ResampleRun solve_by_resampling(const LLLInstance& inst, Rng& rng, const ResampleOptions& opts) {
  const DependencyGraph dep = build_dependency_graph(inst);
  return solve_by_resampling(inst, dep, component_ids(dep), rng, opts);
}

}  // namespace lll

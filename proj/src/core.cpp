#include "lll/core.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include <json.hpp>

namespace lll {

int Distribution::mode() const {
  int best = 0;
  for (int i = 1; i < size(); ++i)
    if (probs[i] > probs[best]) best = i;
  return best;
}

void Distribution::validate() const {
  double sum = 0;
  for (double p : probs) {
    if (p < 0) throw Error("invalid-distribution", "negative probability");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw Error("invalid-distribution", "probabilities sum to " + std::to_string(sum));
  if (has_exact()) {
    if (dyadic_num.size() != probs.size())
      throw Error("invalid-distribution", "dyadic form size mismatch");
    uint64_t total = 0;
    for (uint64_t v : dyadic_num) total += v;
    if (total != (uint64_t{1} << dyadic_exp))
      throw Error("invalid-distribution", "dyadic numerators do not sum to 2^exp");
  }
}

Distribution Distribution::bernoulli_black(double p_black) {
  Distribution d;
  d.probs = {p_black, 1.0 - p_black};
  return d;
}

Distribution Distribution::dyadic_black(uint64_t num, int exp) {
  Distribution d;
  const double scale = std::ldexp(1.0, -exp);
  d.probs = {static_cast<double>(num) * scale,
             static_cast<double>((uint64_t{1} << exp) - num) * scale};
  d.dyadic_num = {num, (uint64_t{1} << exp) - num};
  d.dyadic_exp = exp;
  return d;
}

Distribution Distribution::uniform_over(int k) {
  Distribution d;
  d.probs.assign(k, 1.0 / k);
  if ((k & (k - 1)) == 0) {  // power of two: exact form available
    int exp = 0;
    while ((1 << exp) < k) ++exp;
    d.dyadic_num.assign(k, 1);
    d.dyadic_exp = exp;
  }
  return d;
}

Distribution Distribution::point_mass(int k, int value) {
  Distribution d;
  d.probs.assign(k, 0.0);
  d.probs[value] = 1.0;
  return d;
}

size_t PartialAssignment::unset_count() const {
  size_t c = 0;
  for (Value v : values)
    if (v == kUnset) ++c;
  return c;
}

DependencyGraph build_dependency_graph(const LLLInstance& inst) {
  DependencyGraph dep;
  const int ne = inst.num_events();
  dep.adj.assign(ne, {});
  std::vector<std::vector<int>> incident(inst.num_vars());
  for (int e = 0; e < ne; ++e) {
    dep.event_degree = std::max(dep.event_degree, static_cast<int>(inst.events[e].vbl.size()));
    for (int x : inst.events[e].vbl) incident[x].push_back(e);
  }
  for (const auto& inc : incident)
    dep.variable_degree = std::max(dep.variable_degree, static_cast<int>(inc.size()));

  std::vector<int> stamp(ne, -1);
  for (int e = 0; e < ne; ++e) {
    auto& nbrs = dep.adj[e];
    for (int x : inst.events[e].vbl) {
      for (int f : incident[x]) {
        if (f != e && stamp[f] != e) {
          stamp[f] = e;
          nbrs.push_back(f);
        }
      }
    }
    std::sort(nbrs.begin(), nbrs.end());
    dep.max_degree = std::max(dep.max_degree, static_cast<int>(nbrs.size()));
  }
  return dep;
}

int draw(const Distribution& dist, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0;
  const int k = dist.size();
  for (int i = 0; i < k; ++i) {
    acc += dist.probs[i];
    if (u < acc) return i;
  }
  return k - 1;
}

PartialAssignment sample_all(const LLLInstance& inst, const std::vector<int>& vars, Rng& rng) {
  PartialAssignment phi(inst.variables.size());
  for (int x : vars) phi.values[x] = static_cast<Value>(draw(inst.variables[x].dist, rng));
  return phi;
}

PartialAssignment sample_everything(const LLLInstance& inst, Rng& rng) {
  PartialAssignment phi(inst.variables.size());
  for (int x = 0; x < inst.num_vars(); ++x)
    phi.values[x] = static_cast<Value>(draw(inst.variables[x].dist, rng));
  return phi;
}

bool evaluate(const EventSpec& event, const PartialAssignment& phi) {
  thread_local std::vector<Value> buf;
  buf.clear();
  for (int x : event.vbl) {
    const Value v = phi.values[x];
    if (v == kUnset)
      throw Error("precondition", "evaluate: variable " + std::to_string(x) + " is unset");
    buf.push_back(v);
  }
  return event.holds(std::span<const Value>(buf));
}

namespace {

// exact enumeration over the unset variables of vbl; integer path when every
// distribution is dyadic, Neumaier-compensated doubles otherwise.
ProbResult exact_conditional(const LLLInstance& inst, const EventSpec& event,
                             const PartialAssignment& psi) {
  std::vector<int> unset;
  std::vector<Value> vals(event.vbl.size(), kUnset);
  for (size_t i = 0; i < event.vbl.size(); ++i) {
    const Value v = psi.values[event.vbl[i]];
    if (v == kUnset)
      unset.push_back(static_cast<int>(i));
    else
      vals[i] = v;
  }
  double combos = 1;
  bool all_dyadic = true;
  int total_exp = 0;
  for (int i : unset) {
    const auto& d = inst.variables[event.vbl[i]].dist;
    combos *= d.size();
    if (!d.has_exact())
      all_dyadic = false;
    else
      total_exp += d.dyadic_exp;
    if (combos > std::ldexp(1.0, kExactEnumerationBound))
      throw Error("enumeration-bound",
                  "exact conditional probability over " + std::to_string(unset.size()) +
                      " unset variables exceeds 2^" + std::to_string(kExactEnumerationBound) +
                      " combinations; use monte-carlo mode");
  }

  if (unset.empty()) {
    ProbResult r;
    r.value = event.holds(std::span<const Value>(vals)) ? 1.0 : 0.0;
    return r;
  }

  const bool integer_path = all_dyadic && total_exp + kExactEnumerationBound <= 120;
  u128 num = 0;
  double sum = 0, comp = 0;
  std::vector<int> idx(unset.size(), 0);
  for (int i : unset) vals[i] = 0;
  while (true) {
    if (event.holds(std::span<const Value>(vals))) {
      if (integer_path) {
        u128 w = 1;
        for (size_t j = 0; j < unset.size(); ++j)
          w *= inst.variables[event.vbl[unset[j]]].dist.dyadic_num[idx[j]];
        num += w;
      } else {
        double w = 1;
        for (size_t j = 0; j < unset.size(); ++j)
          w *= inst.variables[event.vbl[unset[j]]].dist.probs[idx[j]];
        // Neumaier summation
        double t = sum + w;
        comp += (std::fabs(sum) >= std::fabs(w)) ? (sum - t) + w : (w - t) + sum;
        sum = t;
      }
    }
    // odometer over the unset positions
    size_t j = 0;
    for (; j < unset.size(); ++j) {
      const int pos = unset[j];
      if (++idx[j] < inst.variables[event.vbl[pos]].dist.size()) {
        vals[pos] = static_cast<Value>(idx[j]);
        break;
      }
      idx[j] = 0;
      vals[pos] = 0;
    }
    if (j == unset.size()) break;
  }

  ProbResult r;
  if (integer_path)
    r.value = Dyadic(num, total_exp).to_double();
  else
    r.value = sum + comp;
  return r;
}

}  // namespace

ProbResult conditional_prob(const LLLInstance& inst, const EventSpec& event,
                            const PartialAssignment& psi, ProbMode mode, long trials,
                            uint64_t mc_seed) {
  if (mode == ProbMode::exact) return exact_conditional(inst, event, psi);
  Rng rng(mix_seed(mc_seed, 0x6d63));
  std::vector<Value> vals(event.vbl.size());
  long hits = 0;
  for (long t = 0; t < trials; ++t) {
    for (size_t i = 0; i < event.vbl.size(); ++i) {
      const Value v = psi.values[event.vbl[i]];
      vals[i] = (v == kUnset) ? static_cast<Value>(draw(inst.variables[event.vbl[i]].dist, rng))
                              : v;
    }
    if (event.holds(std::span<const Value>(vals))) ++hits;
  }
  ProbResult r;
  r.value = static_cast<double>(hits) / static_cast<double>(trials);
  r.exact = false;
  r.trials = trials;
  return r;
}

PartialAssignment merge(const PartialAssignment& phi1, const PartialAssignment& phi2) {
  if (phi1.values.size() != phi2.values.size())
    throw Error("merge-conflict", "assignments over different variable universes");
  PartialAssignment out(phi1.values.size());
  std::vector<int> conflicts;
  for (size_t x = 0; x < phi1.values.size(); ++x) {
    const Value a = phi1.values[x], b = phi2.values[x];
    if (a != kUnset && b != kUnset) conflicts.push_back(static_cast<int>(x));
    out.values[x] = a != kUnset ? a : b;
  }
  if (!conflicts.empty()) {
    std::string ids;
    for (int x : conflicts) ids += std::to_string(x) + " ";
    throw Error("merge-conflict", "both assignments set variables: " + ids);
  }
  return out;
}

int compute_locality(const LLLInstance& inst) {
  int nu = 0;
  for (const auto& e : inst.events) {
    if (e.vbl.empty()) continue;
    const auto dist = inst.comm_graph.bfs_distances(e.host);
    for (int x : e.vbl) {
      const int d = dist[inst.variables[x].host];
      if (d < 0)
        throw Error("unreachable-host", "variable host " +
                                            std::to_string(inst.variables[x].host) +
                                            " unreachable from event host " +
                                            std::to_string(e.host));
      nu = std::max(nu, d);
    }
  }
  return nu;
}

InstanceParams compute_params(const LLLInstance& inst, const DependencyGraph& dep) {
  InstanceParams p;
  p.d = dep.max_degree;
  p.d_e = dep.event_degree;
  p.d_v = dep.variable_degree;
  p.nu = compute_locality(inst);
  std::vector<int> load(inst.comm_graph.n, 0);
  for (const auto& v : inst.variables) ++load[v.host];
  for (const auto& e : inst.events) ++load[e.host];
  for (int l : load) p.load = std::max(p.load, l);
  p.p = inst.declared_p;
  return p;
}

InstanceParams compute_params(const LLLInstance& inst) {
  return compute_params(inst, build_dependency_graph(inst));
}

std::vector<int> component_ids(const DependencyGraph& dep) {
  const int ne = static_cast<int>(dep.adj.size());
  std::vector<int> ids(ne, -1);
  for (int s = 0; s < ne; ++s) {
    if (ids[s] >= 0) continue;
    int next = 0;
    std::deque<int> q{s};
    ids[s] = next++;
    while (!q.empty()) {
      int e = q.front();
      q.pop_front();
      for (int f : dep.adj[e])
        if (ids[f] < 0) {
          ids[f] = next++;
          q.push_back(f);
        }
    }
  }
  return ids;
}

std::string instance_debug_dump(const LLLInstance& inst) {
  nlohmann::json j;
  j["variables"] = nlohmann::json::array();
  for (int x = 0; x < inst.num_vars(); ++x) {
    const auto& v = inst.variables[x];
    nlohmann::json jv;
    jv["id"] = x;
    jv["domain"] = v.domain();
    jv["distribution"] = v.dist.probs;
    jv["host"] = v.host;
    j["variables"].push_back(jv);
  }
  j["events"] = nlohmann::json::array();
  for (int e = 0; e < inst.num_events(); ++e) {
    const auto& ev = inst.events[e];
    nlohmann::json je;
    je["id"] = e;
    je["name"] = ev.name;
    je["vbl"] = ev.vbl;
    je["host"] = ev.host;
    je["assoc"] = ev.assoc ? ev.assoc->name : "";
    je["monotonicity"] = ev.mono == Monotonicity::increasing   ? "increasing"
                         : ev.mono == Monotonicity::decreasing ? "decreasing"
                                                               : "none";
    j["events"].push_back(je);
  }
  const auto params = compute_params(inst);
  j["parameters"] = {{"p", params.p},   {"d", params.d},   {"d_E", params.d_e},
                     {"d_V", params.d_v}, {"nu", params.nu}, {"l", params.load}};
  return j.dump(2);
}

EventSpec count_event(std::vector<int> vbl, Value colour, char cmp, long long threshold,
                      std::string name) {
  EventSpec e;
  e.vbl = std::move(vbl);
  e.name = std::move(name);
  e.holds = [colour, cmp, threshold](std::span<const Value> vals) {
    long long c = 0;
    for (Value v : vals)
      if (v == colour) ++c;
    switch (cmp) {
      case '<': return c < threshold;
      case '>': return c > threshold;
      case '=': return c == threshold;
      default: throw Error("precondition", "count_event: bad comparator");
    }
  };
  // Poisson-binomial tail over the unset variables; exact up to rounding
  const std::vector<int> hook_vbl = e.vbl;
  e.cond_hook = [hook_vbl, colour, cmp, threshold](const LLLInstance& inst,
                                                   const PartialAssignment& psi, long,
                                                   uint64_t) -> ProbResult {
    long long fixed = 0;
    std::vector<double> qs;
    for (int x : hook_vbl) {
      const Value v = psi.values[x];
      if (v == kUnset)
        qs.push_back(inst.variables[x].dist.probs[colour]);
      else if (v == colour)
        ++fixed;
    }
    std::vector<double> dist(qs.size() + 1, 0.0);
    dist[0] = 1.0;
    size_t filled = 0;
    for (double q : qs) {
      ++filled;
      for (size_t i = filled; i > 0; --i) dist[i] = dist[i] * (1 - q) + dist[i - 1] * q;
      dist[0] *= 1 - q;
    }
    double acc = 0;
    for (size_t i = 0; i < dist.size(); ++i) {
      const long long c = fixed + static_cast<long long>(i);
      const bool ok = cmp == '<' ? c < threshold : cmp == '>' ? c > threshold : c == threshold;
      if (ok) acc += dist[i];
    }
    ProbResult r;
    r.value = std::min(1.0, std::max(0.0, acc));
    return r;
  };
  return e;
}

}  // namespace lll

#include "lll/shatter.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace lll {

void TwoSetInstance::validate() const {
  if (in_v1.size() != base.variables.size())
    throw Error("precondition", "partition size mismatch");
  if (parts.size() != base.events.size())
    throw Error("precondition", "per-event parts missing");
  for (size_t e = 0; e < parts.size(); ++e) {
    for (int x : parts[e].e1.vbl)
      if (!in_v1[x])
        throw Error("precondition", "event " + std::to_string(e) + " has a first conjunct outside V1");
    for (int x : parts[e].e2.vbl)
      if (in_v1[x])
        throw Error("precondition", "event " + std::to_string(e) + " has a second conjunct outside V2");
  }
}

TwoSetInstance make_two_set_instance(std::vector<VariableSpec> variables, Graph comm_graph,
                                     std::vector<TwoSetEvent> parts, std::vector<char> in_v1,
                                     double declared_p) {
  TwoSetInstance inst;
  inst.base.variables = std::move(variables);
  inst.base.comm_graph = std::move(comm_graph);
  inst.base.declared_p = declared_p;
  inst.in_v1 = std::move(in_v1);
  inst.parts = std::move(parts);
  for (const auto& pr : inst.parts) {
    EventSpec conj;
    conj.vbl = pr.e1.vbl;
    conj.vbl.insert(conj.vbl.end(), pr.e2.vbl.begin(), pr.e2.vbl.end());
    conj.host = pr.e1.host;
    conj.name = pr.e1.name;
    const size_t split = pr.e1.vbl.size();
    conj.holds = [split, h1 = pr.e1.holds, h2 = pr.e2.holds](std::span<const Value> vals) {
      return h1(vals.subspan(0, split)) && h2(vals.subspan(split));
    };
    inst.base.events.push_back(std::move(conj));
  }
  inst.validate();
  return inst;
}

void BinaryLowRiskInstance::validate() const {
  for (const auto& v : base.variables)
    if (v.domain() != 2)
      throw Error("precondition", "binary low-risk instance needs {black,white} domains");
  for (size_t e = 0; e < base.events.size(); ++e)
    if (!base.events[e].assoc)
      throw Error("precondition", "event " + std::to_string(e) + " lacks an assoc event");
}

Residual residual_instance(const LLLInstance& base, const PartialAssignment& psi_pre,
                           ResidualFlavor flavor, const TwoSetInstance* two_set,
                           const PartialAssignment* initial) {
  (void)initial;
  Residual out;
  out.instance.variables = base.variables;
  out.instance.comm_graph = base.comm_graph;
  out.instance.declared_p = base.declared_p;

  for (int e = 0; e < base.num_events(); ++e) {
    const EventSpec& ev = base.events[e];
    std::vector<int> unset, set_pos;
    for (size_t i = 0; i < ev.vbl.size(); ++i) {
      if (psi_pre.values[ev.vbl[i]] == kUnset)
        unset.push_back(static_cast<int>(i));
      else
        set_pos.push_back(static_cast<int>(i));
    }

    bool live;
    if (flavor == ResidualFlavor::two_set) {
      // live iff the first conjunct holds under the V1 sample
      if (!two_set) throw Error("precondition", "two-set residual needs the part instance");
      live = evaluate(two_set->parts[e].e1, psi_pre);
    } else {
      live = !unset.empty();
    }
    if (!live) continue;

    EventSpec cond;
    cond.host = ev.host;
    cond.mono = ev.mono;
    cond.name = ev.name + "|pre";
    for (int i : unset) cond.vbl.push_back(ev.vbl[i]);
    // bake the set values into the predicate
    std::vector<Value> fixed(ev.vbl.size(), kUnset);
    for (int i : set_pos) fixed[i] = psi_pre.values[ev.vbl[i]];
    cond.holds = [fixed, unset, base_holds = ev.holds](std::span<const Value> vals) {
      std::vector<Value> full(fixed);
      for (size_t j = 0; j < unset.size(); ++j) full[unset[j]] = vals[j];
      return base_holds(std::span<const Value>(full));
    };
    if (ev.cond_hook) {
      // compose the structured-event hook with the baked prefix; the residual
      // keeps the base variable indexing
      cond.cond_hook = [pre = psi_pre, base_hook = ev.cond_hook](
                           const LLLInstance& inst, const PartialAssignment& psi, long trials,
                           uint64_t seed) {
        PartialAssignment merged = psi;
        for (size_t x = 0; x < pre.values.size(); ++x)
          if (pre.values[x] != kUnset) merged.values[x] = pre.values[x];
        return base_hook(inst, merged, trials, seed);
      };
    }
    out.instance.events.push_back(std::move(cond));
    out.event_ids.push_back(e);
  }
  return out;
}

void component_stats(const LLLInstance& base, const Residual& residual,
                     const PartialAssignment& psi_pre, ShatterTrace* trace) {
  (void)psi_pre;  // the residual events already carry the unset variables
  const DependencyGraph dep = build_dependency_graph(residual.instance);
  // residual dep components
  const int ne = residual.instance.num_events();
  std::vector<int> comp_of(ne, -1);
  int ncomp = 0;
  for (int s = 0; s < ne; ++s) {
    if (comp_of[s] >= 0) continue;
    std::deque<int> q{s};
    comp_of[s] = ncomp;
    int size = 0;
    while (!q.empty()) {
      int e = q.front();
      q.pop_front();
      ++size;
      for (int f : dep.adj[e])
        if (comp_of[f] < 0) {
          comp_of[f] = ncomp;
          q.push_back(f);
        }
    }
    trace->dep_component_hist[size]++;
    trace->max_dep_component = std::max(trace->max_dep_component, size);
    ++ncomp;
  }

  // host projection: hosts of residual events and their unset variables,
  // padded by the locality radius
  const int nu = compute_locality(base);
  std::set<int> w;
  for (int e = 0; e < ne; ++e) {
    w.insert(residual.instance.events[e].host);
    for (int x : residual.instance.events[e].vbl) w.insert(base.variables[x].host);
  }
  std::vector<int> dist(base.comm_graph.n, -1);
  std::deque<int> q;
  for (int v : w) {
    dist[v] = 0;
    q.push_back(v);
  }
  std::vector<char> in_wp(base.comm_graph.n, 0);
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    in_wp[v] = 1;
    if (dist[v] == nu) continue;
    for (int u : base.comm_graph.adj[v])
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        q.push_back(u);
      }
  }
  std::vector<int> host_comp(base.comm_graph.n, -1);
  int nhc = 0;
  for (int s = 0; s < base.comm_graph.n; ++s) {
    if (!in_wp[s] || host_comp[s] >= 0) continue;
    std::deque<int> bfs{s};
    host_comp[s] = nhc;
    int size = 0;
    while (!bfs.empty()) {
      int v = bfs.front();
      bfs.pop_front();
      ++size;
      for (int u : base.comm_graph.adj[v])
        if (in_wp[u] && host_comp[u] < 0) {
          host_comp[u] = nhc;
          bfs.push_back(u);
        }
    }
    trace->host_component_hist[size]++;
    trace->max_host_component = std::max(trace->max_host_component, size);
    ++nhc;
  }

  // each dependency component's host image must sit inside one projection
  // component
  std::vector<int> image(ncomp, -1);
  auto note = [&](int c, int node) {
    if (image[c] < 0) image[c] = host_comp[node];
    if (image[c] != host_comp[node])
      throw Error("internal-consistency",
                  "residual dependency component split across host-projection components");
  };
  for (int e = 0; e < ne; ++e) {
    note(comp_of[e], residual.instance.events[e].host);
    for (int x : residual.instance.events[e].vbl) note(comp_of[e], base.variables[x].host);
  }
}

PostSolver make_enumeration_post_solver(int max_vars) {
  return [max_vars](const LLLInstance& residual, const PartialAssignment& pre, Rng&,
                    PostShatterTrace*) -> PartialAssignment {
    std::vector<int> vars;
    for (int e = 0; e < residual.num_events(); ++e)
      for (int x : residual.events[e].vbl) vars.push_back(x);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    if (static_cast<int>(vars.size()) > max_vars)
      throw Error("enumeration-bound", "residual too large for the enumeration post solver");
    PartialAssignment out(pre.values.size());
    std::vector<int> idx(vars.size(), 0);
    while (true) {
      for (size_t i = 0; i < vars.size(); ++i)
        out.values[vars[i]] = static_cast<Value>(idx[i]);
      bool ok = true;
      for (int e = 0; e < residual.num_events() && ok; ++e)
        if (evaluate(residual.events[e], out)) ok = false;
      if (ok) return out;
      size_t j = 0;
      for (; j < vars.size(); ++j) {
        if (++idx[j] < residual.variables[vars[j]].dist.size()) break;
        idx[j] = 0;
      }
      if (j == vars.size())
        throw Error("post-solver-failure", "no assignment avoids the residual events");
    }
  };
}

PostSolver make_resampling_post_solver(int max_iters) {
  return [max_iters](const LLLInstance& residual, const PartialAssignment& pre, Rng& rng,
                     PostShatterTrace*) -> PartialAssignment {
    // restrict to the variables residual events read
    std::vector<char> needed(residual.variables.size(), 0);
    for (const auto& e : residual.events)
      for (int x : e.vbl) needed[x] = 1;
    LLLInstance sub;
    sub.comm_graph = residual.comm_graph;
    sub.declared_p = residual.declared_p;
    std::vector<int> ids;
    std::vector<int> local_of(residual.variables.size(), -1);
    for (size_t x = 0; x < residual.variables.size(); ++x)
      if (needed[x]) {
        local_of[x] = static_cast<int>(sub.variables.size());
        sub.variables.push_back(residual.variables[x]);
        ids.push_back(static_cast<int>(x));
      }
    for (const auto& e : residual.events) {
      EventSpec le = e;
      for (int& x : le.vbl) x = local_of[x];
      sub.events.push_back(std::move(le));
    }
    ResampleOptions opts;
    opts.max_iters = max_iters;
    const ResampleRun r = solve_by_resampling(sub, rng, opts);
    if (r.trace.outcome != ResampleTrace::Outcome::success)
      throw Error("post-solver-failure", "resampling budget exhausted on the residual");
    PartialAssignment out(pre.values.size());
    for (size_t i = 0; i < ids.size(); ++i) out.values[ids[i]] = r.assignment.values[i];
    return out;
  };
}

PostSolver make_decomposed_post_solver(PostShatterOptions opts) {
  return [opts](const LLLInstance& residual, const PartialAssignment& pre, Rng& rng,
                PostShatterTrace* trace) -> PartialAssignment {
    // unset exactly the variables the residual events read
    PartialAssignment psi(pre.values.size());
    std::vector<char> needed(residual.variables.size(), 0);
    for (const auto& e : residual.events)
      for (int x : e.vbl) needed[x] = 1;
    for (size_t x = 0; x < residual.variables.size(); ++x)
      psi.values[x] = needed[x] ? kUnset : kBlack;  // placeholder for untouched vars
    const PostShatterResult r = solve_postshatter(residual, psi, rng, opts);
    if (trace) *trace = r.trace;
    PartialAssignment out(pre.values.size());
    for (size_t x = 0; x < residual.variables.size(); ++x)
      if (needed[x]) out.values[x] = r.assignment.values[x];
    return out;
  };
}

DisjointResult solve_disjoint(const TwoSetInstance& inst, const PostSolver& post, Rng& rng) {
  inst.validate();
  DisjointResult res;
  std::vector<int> v1;
  for (size_t x = 0; x < inst.in_v1.size(); ++x)
    if (inst.in_v1[x]) v1.push_back(static_cast<int>(x));
  Rng sample_rng = rng.stream(0x5a01);
  res.pre = sample_all(inst.base, v1, sample_rng);

  Residual residual = residual_instance(inst.base, res.pre, ResidualFlavor::two_set, &inst);
  res.trace.residual_events = static_cast<int>(residual.event_ids.size());
  res.trace.residual_event_ids = residual.event_ids;
  const auto params = compute_params(inst.base);
  res.trace.p = inst.base.declared_p;
  res.trace.d = params.d;
  res.trace.criterion_local =
      params.d > 0 && inst.base.declared_p < std::pow(params.d, -14.0);
  component_stats(inst.base, residual, res.pre, &res.trace);

  PartialAssignment post_part(inst.base.variables.size());
  if (!residual.instance.events.empty()) {
    Rng post_rng = rng.stream(0x5a02);
    post_part = post(residual.instance, res.pre, post_rng, &res.trace.post);
  }

  // leftover V2 variables take the distribution's mode
  PartialAssignment merged = merge(res.pre, post_part);
  for (size_t x = 0; x < merged.values.size(); ++x)
    if (merged.values[x] == kUnset)
      merged.values[x] = static_cast<Value>(inst.base.variables[x].dist.mode());
  res.assignment = std::move(merged);

  for (int e = 0; e < inst.base.num_events(); ++e) {
    if (evaluate(inst.base.events[e], res.assignment)) {
      res.trace.post_ok = false;
      throw Error("post-solver-failure",
                  "event " + std::to_string(e) + " not avoided by the final assignment");
    }
  }
  return res;
}

BinaryResult solve_binary_lowrisk(const BinaryLowRiskInstance& inst, const PostSolver& post,
                                  Rng& rng) {
  inst.validate();
  BinaryResult res;
  const LLLInstance& base = inst.base;
  Rng sample_rng = rng.stream(0xb101);
  res.retractions.initial = sample_everything(base, sample_rng);
  const PartialAssignment& phi = res.retractions.initial;

  res.retractions.unhappy.assign(base.num_events(), 0);
  res.retractions.retracted_round1.assign(base.num_vars(), 0);
  res.retractions.retracted_round2.assign(base.num_vars(), 0);

  // Retraction I: failing assoc events retract all incident variables
  for (int e = 0; e < base.num_events(); ++e) {
    if (evaluate(*base.events[e].assoc, phi)) {
      res.retractions.unhappy[e] = 1;
      for (int x : base.events[e].vbl) res.retractions.retracted_round1[x] = 1;
    }
  }
  // Retraction II: events with an unset variable retract their white variables
  for (int e = 0; e < base.num_events(); ++e) {
    bool affected = false;
    for (int x : base.events[e].vbl)
      if (res.retractions.retracted_round1[x]) affected = true;
    if (!affected) continue;
    for (int x : base.events[e].vbl)
      if (phi.values[x] == kWhite && !res.retractions.retracted_round1[x])
        res.retractions.retracted_round2[x] = 1;
  }

  res.pre = phi;
  for (int x = 0; x < base.num_vars(); ++x)
    if (res.retractions.retracted_round1[x] || res.retractions.retracted_round2[x])
      res.pre.values[x] = kUnset;

  const std::string soundness = check_retraction_soundness(inst, res.retractions, res.pre);
  if (!soundness.empty()) throw Error("internal-consistency", soundness);
  const std::string respect = check_respect_membership(inst, phi, res.pre);
  if (!respect.empty()) throw Error("internal-consistency", respect);

  Residual residual = residual_instance(base, res.pre, ResidualFlavor::binary, nullptr, &phi);
  res.trace.residual_events = static_cast<int>(residual.event_ids.size());
  res.trace.residual_event_ids = residual.event_ids;
  const auto params = compute_params(base);
  res.trace.p = base.declared_p;
  res.trace.d = params.d;
  res.trace.criterion_local = params.d > 0 && base.declared_p < std::pow(params.d, -22.0);
  component_stats(base, residual, res.pre, &res.trace);

  PartialAssignment post_part(base.variables.size());
  if (!residual.instance.events.empty()) {
    Rng post_rng = rng.stream(0xb102);
    post_part = post(residual.instance, res.pre, post_rng, &res.trace.post);
  }
  PartialAssignment merged = merge(res.pre, post_part);
  for (size_t x = 0; x < merged.values.size(); ++x)
    if (merged.values[x] == kUnset)
      merged.values[x] = static_cast<Value>(base.variables[x].dist.mode());
  res.assignment = std::move(merged);

  for (int e = 0; e < base.num_events(); ++e) {
    if (evaluate(base.events[e], res.assignment)) {
      res.trace.post_ok = false;
      throw Error("post-solver-failure",
                  "event " + std::to_string(e) + " not avoided by the final assignment");
    }
  }
  return res;
}

std::string check_retraction_soundness(const BinaryLowRiskInstance& inst,
                                       const RetractionInfo& info,
                                       const PartialAssignment& psi_pre) {
  const LLLInstance& base = inst.base;
  // independently re-derive both rounds from the initial sample
  std::vector<char> r1(base.num_vars(), 0);
  for (int e = 0; e < base.num_events(); ++e)
    if (evaluate(*base.events[e].assoc, info.initial))
      for (int x : base.events[e].vbl) r1[x] = 1;
  std::vector<char> r2(base.num_vars(), 0);
  for (int e = 0; e < base.num_events(); ++e) {
    bool affected = false;
    for (int x : base.events[e].vbl)
      if (r1[x]) affected = true;
    if (!affected) continue;
    for (int x : base.events[e].vbl)
      if (info.initial.values[x] == kWhite && !r1[x]) r2[x] = 1;
  }
  for (int x = 0; x < base.num_vars(); ++x) {
    const bool should_be_unset = r1[x] || r2[x];
    if (should_be_unset != (psi_pre.values[x] == kUnset))
      return "variable " + std::to_string(x) + " retraction state inconsistent";
    if (!should_be_unset && psi_pre.values[x] != info.initial.values[x])
      return "variable " + std::to_string(x) + " changed value without retraction";
  }
  return "";
}

std::string check_respect_membership(const BinaryLowRiskInstance& inst,
                                     const PartialAssignment& initial,
                                     const PartialAssignment& psi_pre) {
  const LLLInstance& base = inst.base;
  for (int e = 0; e < base.num_events(); ++e) {
    const EventSpec& assoc = *base.events[e].assoc;
    if (evaluate(assoc, initial)) continue;  // only avoided assocs carry the promise
    bool all_whites_retracted = true, any_black_retracted = false;
    for (int x : assoc.vbl) {
      if (initial.values[x] == kWhite && psi_pre.values[x] != kUnset)
        all_whites_retracted = false;
      if (initial.values[x] == kBlack && psi_pre.values[x] == kUnset)
        any_black_retracted = true;
    }
    if (!all_whites_retracted && any_black_retracted)
      return "event " + std::to_string(e) + ": psi_pre outside Respect(assoc)";
  }
  return "";
}

}  // namespace lll

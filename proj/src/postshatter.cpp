#include "lll/postshatter.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

namespace lll {

Decomposition decompose(const Graph& component, int k, int target_colors, uint64_t seed) {
  Decomposition out;
  out.separation = k;
  const int n = component.n;
  if (n == 0) return out;
  if (target_colors < 1) target_colors = 1;

  std::vector<char> clustered(n, 0);
  int remaining = n;
  for (int color = 1; color <= target_colors && remaining > 0; ++color) {
    std::vector<char> banned(n, 0);  // too close to an earlier cluster of this color
    while (true) {
      int center = -1;
      uint64_t best = 0;
      for (int v = 0; v < n; ++v) {
        if (clustered[v] || banned[v]) continue;
        const uint64_t h = mix_seed(seed, color, v);
        if (center < 0 || h < best) {
          center = v;
          best = h;
        }
      }
      if (center < 0) break;
      const std::vector<int> dist = component.bfs_distances(center);
      auto ball_size = [&](int r) {
        int c = 0;
        for (int v = 0; v < n; ++v)
          if (dist[v] >= 0 && dist[v] <= r) ++c;
        return c;
      };
      int r = 0;
      while (ball_size(r + k) > 2 * ball_size(r)) ++r;
      Decomposition::Cluster cl;
      cl.color = color;
      cl.radius = r;
      for (int v = 0; v < n; ++v) {
        if (dist[v] < 0 || dist[v] > r + k) continue;
        if (dist[v] <= r && !clustered[v] && !banned[v]) {
          cl.nodes.push_back(v);
          clustered[v] = 1;
          --remaining;
        }
        banned[v] = 1;
      }
      if (!cl.nodes.empty()) {
        out.beta = std::max(out.beta, 2 * cl.radius);
        out.clusters.push_back(std::move(cl));
      }
    }
    out.colors = color;
  }

  if (remaining > 0) {
    // color budget exhausted; the whole component as one cluster is always a
    // valid decomposition
    out.clusters.clear();
    Decomposition::Cluster cl;
    cl.color = 1;
    for (int v = 0; v < n; ++v) cl.nodes.push_back(v);
    // weak diameter via double BFS bound
    auto d0 = component.bfs_distances(0);
    int far = 0;
    for (int v = 0; v < n; ++v)
      if (d0[v] > d0[far]) far = v;
    auto d1 = component.bfs_distances(far);
    int ecc = 0;
    for (int v = 0; v < n; ++v) ecc = std::max(ecc, d1[v]);
    cl.radius = ecc;
    out.clusters.push_back(std::move(cl));
    out.colors = 1;
    out.beta = ecc;
  }
  return out;
}

DecompCheck verify_decomposition(const Graph& component, const Decomposition& d) {
  std::vector<int> owner(component.n, -1);
  for (size_t c = 0; c < d.clusters.size(); ++c) {
    for (int v : d.clusters[c].nodes) {
      if (owner[v] >= 0) return {false, "node " + std::to_string(v) + " in two clusters"};
      owner[v] = static_cast<int>(c);
    }
  }
  for (int v = 0; v < component.n; ++v)
    if (owner[v] < 0) return {false, "node " + std::to_string(v) + " unclustered"};
  // weak diameter
  for (const auto& cl : d.clusters) {
    for (int v : cl.nodes) {
      const auto dist = component.bfs_distances(v);
      for (int w : cl.nodes) {
        if (dist[w] < 0 || dist[w] > d.beta)
          return {false, "cluster exceeds weak diameter bound"};
      }
    }
  }
  // separation between same-color clusters
  for (size_t a = 0; a < d.clusters.size(); ++a) {
    for (size_t b = a + 1; b < d.clusters.size(); ++b) {
      if (d.clusters[a].color != d.clusters[b].color) continue;
      for (int v : d.clusters[a].nodes) {
        const auto dist = component.bfs_distances(v);
        for (int w : d.clusters[b].nodes)
          if (dist[w] >= 0 && dist[w] <= d.separation)
            return {false, "same-color clusters within separation"};
      }
    }
  }
  return {true, ""};
}

namespace {

struct CondEvaluator {
  const LLLInstance* base;
  int exact_bound;
  long mc_trials;
  uint64_t seed;

  ProbResult eval(const EventSpec& event, const PartialAssignment& psi, uint64_t tag) const {
    int unset = 0;
    double combos = 1;
    for (int x : event.vbl) {
      if (psi.values[x] == kUnset) {
        ++unset;
        combos *= base->variables[x].dist.size();
      }
    }
    if (combos <= std::ldexp(1.0, exact_bound))
      return conditional_prob(*base, event, psi, ProbMode::exact);
    if (event.cond_hook) return event.cond_hook(*base, psi, mc_trials, mix_seed(seed, tag));
    return conditional_prob(*base, event, psi, ProbMode::monte_carlo, mc_trials,
                            mix_seed(seed, tag));
  }
};

}  // namespace

CollectionLLL build_collection_lll(const LLLInstance& base, const PartialAssignment& phi_prev,
                                   const std::vector<int>& collection_vars, int d,
                                   const PostShatterOptions& opts, uint64_t eval_seed) {
  CollectionLLL out;
  out.d = std::max(2, d);
  out.var_ids = collection_vars;
  std::vector<int> local_of(base.num_vars(), -1);
  for (size_t i = 0; i < collection_vars.size(); ++i) {
    const int x = collection_vars[i];
    if (phi_prev.values[x] != kUnset)
      throw Error("precondition", "collection variable " + std::to_string(x) + " already set");
    local_of[x] = static_cast<int>(i);
    out.lll.variables.push_back(base.variables[x]);
  }
  out.lll.comm_graph = base.comm_graph;
  out.lll.declared_p = 1.0 / (static_cast<double>(out.d) * out.d);

  const CondEvaluator ev{&base, opts.exact_bound, opts.mc_trials, eval_seed};

  for (int e = 0; e < base.num_events(); ++e) {
    const EventSpec& ev_spec = base.events[e];
    std::vector<int> local_vbl, base_vbl;
    for (int x : ev_spec.vbl)
      if (local_of[x] >= 0) {
        local_vbl.push_back(local_of[x]);
        base_vbl.push_back(x);
      }
    if (local_vbl.empty()) continue;

    double combos = 1;
    for (int x : ev_spec.vbl)
      if (phi_prev.values[x] == kUnset) combos *= base.variables[x].dist.size();
    const bool exact_ref = combos <= std::ldexp(1.0, opts.exact_bound);
    const double d2 = static_cast<double>(out.d) * out.d;

    EventSpec prime;
    prime.vbl = local_vbl;
    prime.host = ev_spec.host;
    prime.name = ev_spec.name + "'";
    const EventSpec* base_event = &base.events[e];
    PartialAssignment snapshot = phi_prev;
    ProbResult ref;

    if (!exact_ref && d2 >= static_cast<double>(opts.mc_trials) && opts.cap_threshold) {
      // The clamp pins the threshold at 1 whenever the estimated reference is
      // over ~1/d^2, which Monte Carlo cannot distinguish from zero here. The
      // event then reads "E is certain given psi", decided by a sampled
      // search for one avoiding completion; it exits after the first hit.
      const CondEvaluator ref_ev{&base, opts.exact_bound, std::min<long>(opts.mc_trials, 300),
                                 eval_seed};
      ref = ref_ev.eval(ev_spec, phi_prev, static_cast<uint64_t>(e));
      const long trials = opts.mc_trials;
      const uint64_t seed = mix_seed(eval_seed, 0xce27, static_cast<uint64_t>(e));
      prime.holds = [base_pointer = &base, base_event, snapshot, base_vbl, trials,
                     seed](std::span<const Value> vals) -> bool {
        PartialAssignment merged = snapshot;
        uint64_t tag = 0x707269;
        for (size_t i = 0; i < base_vbl.size(); ++i) {
          merged.values[base_vbl[i]] = vals[i];
          tag = mix_seed(tag, static_cast<uint64_t>(vals[i]) + 1);
        }
        thread_local std::vector<Value> buf;
        thread_local std::vector<int> unset_pos;
        buf.clear();
        unset_pos.clear();
        for (size_t i = 0; i < base_event->vbl.size(); ++i) {
          const Value v = merged.values[base_event->vbl[i]];
          buf.push_back(v);
          if (v == kUnset) unset_pos.push_back(static_cast<int>(i));
        }
        if (unset_pos.empty()) return base_event->holds(std::span<const Value>(buf));
        Rng rng(mix_seed(seed, tag));
        for (long t = 0; t < trials; ++t) {
          for (int i : unset_pos)
            buf[i] = static_cast<Value>(
                draw(base_pointer->variables[base_event->vbl[i]].dist, rng));
          if (!base_event->holds(std::span<const Value>(buf))) return false;
        }
        return true;  // no avoiding completion found: treat E as certain
      };
    } else {
      ref = ev.eval(ev_spec, phi_prev, static_cast<uint64_t>(e));
      double threshold = d2 * ref.value;
      if (opts.cap_threshold) threshold = std::min(threshold, 1.0);
      const double ref_value = ref.value;
      prime.holds = [ev, base_event, snapshot, base_vbl, threshold,
                     ref_value](std::span<const Value> vals) -> bool {
        PartialAssignment merged = snapshot;
        uint64_t tag = 0x707269;
        for (size_t i = 0; i < base_vbl.size(); ++i) {
          merged.values[base_vbl[i]] = vals[i];
          tag = mix_seed(tag, static_cast<uint64_t>(vals[i]) + 1);
        }
        const ProbResult cur = ev.eval(*base_event, merged, tag);
        if (ref_value <= 0.0) return cur.value > 0.0;
        return cur.value >= threshold;
      };
    }
    out.lll.events.push_back(std::move(prime));
    out.base_event_ids.push_back(e);
    out.ref_prob.push_back(ref.value);
    out.ref_estimated.push_back(!ref.exact);
  }
  return out;
}

namespace {

// host-projection components: nodes with unset variables or incident events,
// padded by the locality radius
std::vector<std::vector<int>> host_components(const LLLInstance& inst,
                                              const PartialAssignment& psi, int nu) {
  std::set<int> w;
  for (int x = 0; x < inst.num_vars(); ++x)
    if (psi.values[x] == kUnset) w.insert(inst.variables[x].host);
  for (const auto& e : inst.events) {
    for (int x : e.vbl)
      if (psi.values[x] == kUnset) {
        w.insert(e.host);
        break;
      }
  }
  // multi-source BFS to depth nu
  std::vector<int> dist(inst.comm_graph.n, -1);
  std::deque<int> q;
  for (int v : w) {
    dist[v] = 0;
    q.push_back(v);
  }
  std::vector<char> in_wp(inst.comm_graph.n, 0);
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    in_wp[v] = 1;
    if (dist[v] == nu) continue;
    for (int u : inst.comm_graph.adj[v])
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        q.push_back(u);
      }
  }
  // components of the induced subgraph
  std::vector<std::vector<int>> comps;
  std::vector<char> seen(inst.comm_graph.n, 0);
  for (int s = 0; s < inst.comm_graph.n; ++s) {
    if (!in_wp[s] || seen[s]) continue;
    std::vector<int> comp;
    std::deque<int> bfs{s};
    seen[s] = 1;
    while (!bfs.empty()) {
      int v = bfs.front();
      bfs.pop_front();
      comp.push_back(v);
      for (int u : inst.comm_graph.adj[v])
        if (in_wp[u] && !seen[u]) {
          seen[u] = 1;
          bfs.push_back(u);
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

int residual_dependency_degree(const LLLInstance& inst, const PartialAssignment& psi) {
  std::vector<std::vector<int>> incident(inst.num_vars());
  std::vector<int> active;
  for (int e = 0; e < inst.num_events(); ++e) {
    bool any_unset = false;
    for (int x : inst.events[e].vbl)
      if (psi.values[x] == kUnset) {
        incident[x].push_back(e);
        any_unset = true;
      }
    if (any_unset) active.push_back(e);
  }
  std::vector<int> stamp(inst.num_events(), -1);
  int d = 0;
  for (int e : active) {
    int deg = 0;
    for (int x : inst.events[e].vbl) {
      if (psi.values[x] != kUnset) continue;
      for (int f : incident[x])
        if (f != e && stamp[f] != e) {
          stamp[f] = e;
          ++deg;
        }
    }
    d = std::max(d, deg);
  }
  return d;
}

}  // namespace

PostShatterResult solve_postshatter(const LLLInstance& inst, const PartialAssignment& psi,
                                    Rng& rng, const PostShatterOptions& opts) {
  PostShatterResult res;
  res.assignment = psi;
  if (psi.total()) return res;

  const int nu = compute_locality(inst);
  const int d = opts.d_override > 0 ? opts.d_override
                                    : std::max(2, residual_dependency_degree(inst, psi));
  res.trace.d = d;
  const auto comps = host_components(inst, psi, nu);
  for (const auto& c : comps) res.trace.component_sizes.push_back(static_cast<int>(c.size()));

  for (size_t ci = 0; ci < comps.size(); ++ci) {
    const auto& comp_nodes = comps[ci];
    std::vector<int> node_local(inst.comm_graph.n, -1);
    for (size_t i = 0; i < comp_nodes.size(); ++i) node_local[comp_nodes[i]] = static_cast<int>(i);
    const Graph comp_graph = inst.comm_graph.induced(comp_nodes);
    const Decomposition decomp =
        decompose(comp_graph, 2 * nu, opts.collections, mix_seed(rng.seed(), 0xdec0, ci));

    // events whose conditional we track in this component; on big residuals
    // only the enumerable ones go into the ledger (estimated entries are
    // recorded, never asserted, so tracking thousands of them buys nothing)
    std::vector<int> comp_events;
    for (int e = 0; e < inst.num_events(); ++e) {
      if (node_local[inst.events[e].host] < 0) continue;
      bool any_unset = false;
      for (int x : inst.events[e].vbl)
        if (res.assignment.values[x] == kUnset) {
          any_unset = true;
          break;
        }
      if (!any_unset) continue;
      comp_events.push_back(e);
    }
    if (comp_events.size() > 64) {
      std::vector<int> enumerable;
      for (int e : comp_events) {
        double combos = 1;
        for (int x : inst.events[e].vbl)
          if (res.assignment.values[x] == kUnset) combos *= inst.variables[x].dist.size();
        if (combos <= std::ldexp(1.0, opts.exact_bound)) enumerable.push_back(e);
        if (enumerable.size() >= 64) break;
      }
      comp_events = std::move(enumerable);
      res.trace.any_estimated = true;
    }

    const CondEvaluator ledger_ev{&inst, opts.exact_bound, opts.mc_trials,
                                  mix_seed(rng.seed(), 0x6c64, ci)};
    std::map<int, std::pair<double, bool>> prev_prob;  // event -> (Pr, exact)
    for (int e : comp_events) {
      const ProbResult r = ledger_ev.eval(inst.events[e], res.assignment,
                                          mix_seed(0, static_cast<uint64_t>(e)));
      prev_prob[e] = {r.value, r.exact};
    }

    for (int color = 1; color <= decomp.colors; ++color) {
      std::vector<int> collection_vars;
      std::vector<int> cluster_of_node(inst.comm_graph.n, -1);
      for (size_t cl = 0; cl < decomp.clusters.size(); ++cl) {
        if (decomp.clusters[cl].color != color) continue;
        for (int local : decomp.clusters[cl].nodes)
          cluster_of_node[comp_nodes[local]] = static_cast<int>(cl);
      }
      for (int x = 0; x < inst.num_vars(); ++x)
        if (res.assignment.values[x] == kUnset && cluster_of_node[inst.variables[x].host] >= 0)
          collection_vars.push_back(x);
      if (collection_vars.empty()) continue;

      CollectionLLL li = build_collection_lll(inst, res.assignment, collection_vars, d, opts,
                                              mix_seed(rng.seed(), 0xe5a1, ci, color));

      // per-cluster id assignment; same-color clusters share no events, so
      // ids unique within a cluster are unique within dependency components
      std::vector<int> cluster_of_event(li.lll.num_events(), -1);
      for (int le = 0; le < li.lll.num_events(); ++le) {
        int cl = -1;
        for (int lx : li.lll.events[le].vbl) {
          const int c = cluster_of_node[inst.variables[li.var_ids[lx]].host];
          if (cl < 0) cl = c;
          if (c != cl)
            throw Error("internal-consistency",
                        "collection event spans two same-color clusters; separation too small");
        }
        cluster_of_event[le] = cl;
      }
      std::vector<int> ids(li.lll.num_events(), 0);
      {
        std::map<int, int> next_in_cluster;
        for (int le = 0; le < li.lll.num_events(); ++le)
          ids[le] = next_in_cluster[cluster_of_event[le]]++;
      }

      const DependencyGraph li_dep = build_dependency_graph(li.lll);
      std::vector<ResampleRun> runs;
      runs.reserve(opts.k_parallel);
      for (int j = 0; j < opts.k_parallel; ++j) {
        Rng sub = rng.stream(mix_seed(0xc95, ci, color, j));
        ResampleOptions copts;
        copts.max_iters = opts.resample_iters;
        runs.push_back(solve_by_resampling(li.lll, li_dep, ids, sub, copts));
      }

      // per-cluster least correct instance
      std::set<int> color_clusters;
      for (int le = 0; le < li.lll.num_events(); ++le) color_clusters.insert(cluster_of_event[le]);
      for (int lx = 0; lx < li.lll.num_vars(); ++lx)
        color_clusters.insert(cluster_of_node[inst.variables[li.var_ids[lx]].host]);

      std::map<int, int> choice;
      for (int cl : color_clusters) {
        int chosen = -1;
        std::vector<int> failing_counts;
        for (int j = 0; j < opts.k_parallel && chosen < 0; ++j) {
          int fails = 0;
          for (int le = 0; le < li.lll.num_events(); ++le) {
            if (cluster_of_event[le] != cl) continue;
            if (evaluate(li.lll.events[le], runs[j].assignment)) ++fails;
          }
          if (fails == 0)
            chosen = j;
          else
            failing_counts.push_back(fails);
        }
        if (chosen < 0) {
          std::string counts;
          for (int f : failing_counts) counts += std::to_string(f) + " ";
          throw Error("post-solver-failure",
                      "cluster " + std::to_string(cl) + " of component " + std::to_string(ci) +
                          " has no correct instance; per-instance failing events: " + counts);
        }
        choice[cl] = chosen;
        res.trace.choices.push_back(
            {static_cast<int>(ci), color, cl, chosen, runs[chosen].trace.iterations});
      }

      // adopt the chosen assignments cluster by cluster
      for (int lx = 0; lx < li.lll.num_vars(); ++lx) {
        const int x = li.var_ids[lx];
        const int cl = cluster_of_node[inst.variables[x].host];
        res.assignment.values[x] = runs[choice[cl]].assignment.values[lx];
      }

      // instance-choice soundness: adopted values still avoid the cluster's
      // collection events (their variables lie inside the cluster)
      for (int le = 0; le < li.lll.num_events(); ++le) {
        PartialAssignment local(li.lll.num_vars());
        for (int lx = 0; lx < li.lll.num_vars(); ++lx)
          local.values[lx] = res.assignment.values[li.var_ids[lx]];
        if (evaluate(li.lll.events[le], local))
          throw Error("internal-consistency", "adopted assignment violates a collection event");
      }

      // bound ledger for the component's events
      std::vector<char> in_collection(inst.num_vars(), 0);
      for (int cx : collection_vars) in_collection[cx] = 1;
      for (int e : comp_events) {
        const auto [before, before_exact] = prev_prob[e];
        const ProbResult after = ledger_ev.eval(
            inst.events[e], res.assignment,
            mix_seed(static_cast<uint64_t>(color), static_cast<uint64_t>(e)));
        bool touched = false;
        for (int x : inst.events[e].vbl)
          if (in_collection[x]) touched = true;
        PostLedgerEntry entry;
        entry.event = e;
        entry.component = static_cast<int>(ci);
        entry.collection = color;
        entry.before = before;
        entry.after = after.value;
        entry.exact = before_exact && after.exact;
        entry.touched = touched;
        if (entry.exact) {
          entry.ok = touched ? (after.value < static_cast<double>(d) * d * before ||
                                (before == 0.0 && after.value == 0.0))
                             : (after.value == before);
        } else {
          res.trace.any_estimated = true;
          entry.ok = true;  // estimated values are recorded, not asserted
        }
        res.trace.ledger.push_back(entry);
        prev_prob[e] = {after.value, after.exact};
      }
    }
  }

  if (!res.assignment.total())
    throw Error("internal-consistency", "post-shattering left unset variables");
  return res;
}

Dyadic exact_conditional_dyadic(const LLLInstance& inst, const EventSpec& event,
                                const PartialAssignment& psi, int max_unset) {
  std::vector<int> unset;
  std::vector<Value> vals(event.vbl.size(), kUnset);
  for (size_t i = 0; i < event.vbl.size(); ++i) {
    const Value v = psi.values[event.vbl[i]];
    if (v == kUnset)
      unset.push_back(static_cast<int>(i));
    else
      vals[i] = v;
  }
  if (static_cast<int>(unset.size()) > max_unset)
    throw Error("enumeration-bound", "too many unset variables for exact dyadic conditional");
  for (int i : unset)
    if (!inst.variables[event.vbl[i]].dist.has_exact())
      throw Error("precondition", "exact dyadic conditional needs dyadic distributions");

  Dyadic sum;
  std::vector<int> idx(unset.size(), 0);
  for (int i : unset) vals[i] = 0;
  while (true) {
    if (event.holds(std::span<const Value>(vals))) {
      Dyadic w = Dyadic::one();
      for (size_t j = 0; j < unset.size(); ++j) {
        const auto& dist = inst.variables[event.vbl[unset[j]]].dist;
        w = w * Dyadic(dist.dyadic_num[idx[j]], dist.dyadic_exp);
      }
      sum = sum + w;
    }
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
  return sum;
}

MarkovCheck verify_markov_claim(const LLLInstance& base, const PartialAssignment& phi_prev,
                                const std::vector<int>& collection_vars, int d) {
  PostShatterOptions opts;
  opts.exact_bound = 20;
  opts.cap_threshold = false;  // the claim is about the uncapped threshold
  CollectionLLL li = build_collection_lll(base, phi_prev, collection_vars, d, opts, 0);

  double combos = 1;
  for (const auto& v : li.lll.variables) combos *= v.dist.size();
  if (combos > std::ldexp(1.0, 20))
    throw Error("enumeration-bound", "collection too large for the exact Markov check");

  MarkovCheck out;
  const int dd = li.d;
  for (int le = 0; le < li.lll.num_events(); ++le) {
    // Pr over collection assignments that E' holds: enumerate with dyadic
    // weights; the threshold test itself uses exact dyadic conditionals.
    const int e = li.base_event_ids[le];
    const Dyadic ref = exact_conditional_dyadic(base, base.events[e], phi_prev);
    Dyadic pr;
    std::vector<int> idx(li.lll.num_vars(), 0);
    PartialAssignment merged = phi_prev;
    while (true) {
      for (int lx = 0; lx < li.lll.num_vars(); ++lx)
        merged.values[li.var_ids[lx]] = static_cast<Value>(idx[lx]);
      const Dyadic cond = exact_conditional_dyadic(base, base.events[e], merged);
      const bool holds = ref.is_zero() ? !cond.is_zero()
                                       : !(cond < ref.times(static_cast<uint64_t>(dd) * dd));
      if (holds) {
        Dyadic w = Dyadic::one();
        for (int lx = 0; lx < li.lll.num_vars(); ++lx) {
          const auto& dist = li.lll.variables[lx].dist;
          if (!dist.has_exact())
            throw Error("precondition", "Markov check needs dyadic distributions");
          w = w * Dyadic(dist.dyadic_num[idx[lx]], dist.dyadic_exp);
        }
        pr = pr + w;
      }
      int j = 0;
      for (; j < li.lll.num_vars(); ++j) {
        if (++idx[j] < li.lll.variables[j].dist.size()) break;
        idx[j] = 0;
      }
      if (j == li.lll.num_vars()) break;
    }
    // Pr(E') <= 1/d^2  <=>  Pr(E') * d^2 <= 1
    if (out.worst_event < 0 || out.worst < pr) {
      out.worst = pr;
      out.worst_event = e;
    }
    if (Dyadic::one() < pr.times(static_cast<uint64_t>(dd) * dd)) out.pass = false;
  }
  return out;
}

}  // namespace lll

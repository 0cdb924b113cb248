#include "lll/problems.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <set>

namespace lll::problems {

namespace {

double binom_tail_below(int n, double q, double t) {
  // Pr(Bin(n, q) < t)
  double pmf = std::pow(1 - q, n), acc = 0;
  for (int i = 0; i < n + 1; ++i) {
    if (i < t) acc += pmf;
    pmf *= (static_cast<double>(n - i) / (i + 1)) * (q / (1 - q));
  }
  return std::min(1.0, acc);
}

double binom_tail_above(int n, double q, double t) {
  // Pr(Bin(n, q) > t)
  double pmf = std::pow(1 - q, n), acc = 0;
  for (int i = 0; i < n + 1; ++i) {
    if (i > t) acc += pmf;
    pmf *= (static_cast<double>(n - i) / (i + 1)) * (q / (1 - q));
  }
  return std::min(1.0, acc);
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<char> membership(int n, const std::vector<int>& nodes) {
  std::vector<char> m(n, 0);
  for (int v : nodes) m[v] = 1;
  return m;
}

}  // namespace

// ---------- sinkless orientation ----------

std::vector<char> split_edges_balanced(const Graph& g,
                                       const std::vector<std::pair<int, int>>& edges) {
  // Euler walk over the multigraph plus a virtual node absorbing odd degrees;
  // alternating labels along each circuit leave every node within one of an
  // even split.
  const int virt = g.n;
  std::vector<std::vector<std::pair<int, int>>> adj(g.n + 1);  // (edge id, other end)
  for (size_t i = 0; i < edges.size(); ++i) {
    adj[edges[i].first].push_back({static_cast<int>(i), edges[i].second});
    adj[edges[i].second].push_back({static_cast<int>(i), edges[i].first});
  }
  int next_virtual = static_cast<int>(edges.size());
  for (int v = 0; v < g.n; ++v) {
    if (adj[v].size() % 2 == 1) {
      adj[v].push_back({next_virtual, virt});
      adj[virt].push_back({next_virtual, v});
      ++next_virtual;
    }
  }
  std::vector<char> used(next_virtual, 0);
  std::vector<char> label(edges.size(), 0);
  std::vector<size_t> cursor(g.n + 1, 0);
  for (int start = 0; start <= g.n; ++start) {
    while (cursor[start] < adj[start].size() && used[adj[start][cursor[start]].first])
      ++cursor[start];
    if (cursor[start] == adj[start].size()) continue;
    // Hierholzer
    std::vector<int> stack{start};
    std::vector<int> circuit;  // edge ids in traversal order
    std::vector<int> edge_stack;
    while (!stack.empty()) {
      int v = stack.back();
      while (cursor[v] < adj[v].size() && used[adj[v][cursor[v]].first]) ++cursor[v];
      if (cursor[v] == adj[v].size()) {
        stack.pop_back();
        if (!edge_stack.empty()) {
          circuit.push_back(edge_stack.back());
          edge_stack.pop_back();
        }
      } else {
        auto [eid, w] = adj[v][cursor[v]];
        used[eid] = 1;
        stack.push_back(w);
        edge_stack.push_back(eid);
      }
    }
    for (size_t pos = 0; pos < circuit.size(); ++pos) {
      const int eid = circuit[pos];
      if (eid < static_cast<int>(edges.size())) label[eid] = pos % 2;
    }
  }
  return label;
}

SinklessInstance sinkless_orientation_lll(const Graph& g, const std::vector<char>* split) {
  SinklessInstance si;
  for (int v = 0; v < g.n; ++v) {
    if (g.degree(v) == 0)
      throw Error("infeasible-event", "node " + std::to_string(v) + " has degree 0");
    for (int w : g.adj[v])
      if (v < w) si.edge_of_var.push_back({v, w});
  }
  std::sort(si.edge_of_var.begin(), si.edge_of_var.end());

  std::vector<char> labels = split ? *split : split_edges_balanced(g, si.edge_of_var);
  if (labels.size() != si.edge_of_var.size())
    throw Error("precondition", "split size must match edge count");

  std::vector<VariableSpec> vars(si.edge_of_var.size());
  std::vector<char> in_v1(vars.size());
  for (size_t i = 0; i < vars.size(); ++i) {
    vars[i].dist = Distribution::fair_binary();
    vars[i].host = si.edge_of_var[i].first;
    in_v1[i] = labels[i] == 0 ? 1 : 0;
  }

  // per-node incident edge lists split by label
  std::vector<std::vector<int>> inc1(g.n), inc2(g.n);
  for (size_t i = 0; i < vars.size(); ++i) {
    auto [u, v] = si.edge_of_var[i];
    (in_v1[i] ? inc1[u] : inc2[u]).push_back(static_cast<int>(i));
    (in_v1[i] ? inc1[v] : inc2[v]).push_back(static_cast<int>(i));
  }

  double worst_p = 0;
  std::vector<TwoSetEvent> parts;
  auto no_out_event = [&](int node, const std::vector<int>& inc) {
    EventSpec e;
    e.vbl = inc;
    e.host = node;
    e.name = "no_out_" + std::to_string(node);
    // black orients an edge toward its smaller endpoint
    std::vector<char> is_smaller(inc.size());
    for (size_t i = 0; i < inc.size(); ++i) is_smaller[i] = si.edge_of_var[inc[i]].first == node;
    e.holds = [is_smaller](std::span<const Value> vals) {
      for (size_t i = 0; i < vals.size(); ++i) {
        const bool out = is_smaller[i] ? vals[i] == kWhite : vals[i] == kBlack;
        if (out) return false;
      }
      return true;
    };
    return e;
  };
  for (int v = 0; v < g.n; ++v) {
    TwoSetEvent te;
    te.e1 = no_out_event(v, inc1[v]);
    te.e2 = no_out_event(v, inc2[v]);
    parts.push_back(std::move(te));
    worst_p = std::max(worst_p,
                       std::pow(0.5, static_cast<double>(std::min(inc1[v].size(), inc2[v].size()))));
  }
  si.inst = make_two_set_instance(std::move(vars), g, std::move(parts), std::move(in_v1), worst_p);
  return si;
}

std::vector<int> orientation_out_degrees(const Graph& g, const SinklessInstance& si,
                                         const PartialAssignment& phi) {
  std::vector<int> out(g.n, 0);
  for (size_t i = 0; i < si.edge_of_var.size(); ++i) {
    auto [u, v] = si.edge_of_var[i];
    if (phi.values[i] == kUnset) throw Error("precondition", "orientation incomplete");
    // black points toward the smaller endpoint: u <- v
    if (phi.values[i] == kBlack)
      ++out[v];
    else
      ++out[u];
  }
  return out;
}

// ---------- degree-bounded subgraph ----------

DegreeBounded degree_bounded_lll(const Graph& g, int k) {
  DegreeBounded db;
  db.k = k;
  db.q = static_cast<double>(k) / g.max_degree;
  LLLInstance& base = db.inst.base;
  base.comm_graph = g;
  base.variables.resize(g.n);
  for (int v = 0; v < g.n; ++v) {
    base.variables[v].dist = Distribution::bernoulli_black(db.q);
    base.variables[v].host = v;
  }
  double p = 0;
  for (int v = 0; v < g.n; ++v) {
    const std::vector<int>& nb = g.adj[v];
    // E_min: fewer than k/3 sampled neighbors; monotone increasing, testifies
    // its own risk. c < k/3 over integers is c < ceil(k/3).
    EventSpec emin = count_event(nb, kBlack, '<', (k + 2) / 3, "min_" + std::to_string(v));
    emin.host = v;
    emin.mono = Monotonicity::increasing;
    emin.assoc = std::make_shared<EventSpec>(emin);
    // E_max: more than 4k sampled neighbors; assoc tightens the bound to 2k
    EventSpec emax = count_event(nb, kBlack, '>', 4LL * k, "max_" + std::to_string(v));
    emax.host = v;
    emax.mono = Monotonicity::decreasing;
    EventSpec assoc_max = count_event(nb, kBlack, '>', 2LL * k, "assoc_max_" + std::to_string(v));
    assoc_max.host = v;
    assoc_max.mono = Monotonicity::decreasing;
    emax.assoc = std::make_shared<EventSpec>(std::move(assoc_max));
    base.events.push_back(std::move(emin));
    base.events.push_back(std::move(emax));
    const int d = g.degree(v);
    p = std::max(p, binom_tail_below(d, db.q, k / 3.0));
    p = std::max(p, binom_tail_above(d, db.q, 2.0 * k));
  }
  base.declared_p = p;
  db.inst.validate();
  return db;
}

std::vector<int> black_nodes(const PartialAssignment& phi, int n) {
  std::vector<int> s;
  for (int v = 0; v < n; ++v)
    if (phi.values[v] == kBlack) s.push_back(v);
  return s;
}

// ---------- DSS ----------

DssOutcome dss_sample(const Graph& g, const std::vector<int>& x_set,
                      const std::vector<int>& y_set, const DssParams& params,
                      const PostSolver& post, Rng& rng) {
  DssOutcome out;
  const double delta = g.max_degree;
  std::string offenders;
  int offender_count = 0;
  for (int v : x_set) {
    const long long ne = non_edges_in_set(g, v, y_set);
    if (static_cast<double>(ne) < params.alpha * delta * delta) {
      if (offender_count < 8) offenders += std::to_string(v) + " ";
      ++offender_count;
    }
  }
  if (offender_count > 0)
    throw Error("precondition", "nodes with fewer than alpha*Delta^2 non-edges in N(v) ∩ Y: " +
                                    offenders + "(" + std::to_string(offender_count) + " total)");

  out.mu_formula = (600.0 / params.alpha) * std::log(std::max(2.0, delta)) *
                 std::log(std::max(2.0, std::log(std::max(2.0, static_cast<double>(g.n)))));
  out.mu = params.mu_override > 0 ? params.mu_override : out.mu_formula;
  out.sample_p = std::min(1.0, out.mu / delta);
  out.degree_bound = static_cast<long long>(4 * out.mu);
  out.nonedge_bound = static_cast<long long>(std::ceil(params.alpha * out.mu * out.mu / 2));

  BinaryLowRiskInstance blri;
  LLLInstance& base = blri.base;
  base.comm_graph = g;
  std::vector<int> var_of(g.n, -1);
  for (int w : sorted_unique(y_set)) {
    var_of[w] = static_cast<int>(base.variables.size());
    VariableSpec vs;
    vs.dist = Distribution::bernoulli_black(out.sample_p);
    vs.host = w;
    base.variables.push_back(vs);
  }

  const double mu = out.mu;
  const double alpha = params.alpha;
  double p = 0;
  for (int v : x_set) {
    std::vector<int> vbl;
    std::vector<int> nodes;
    for (int w : g.adj[v])
      if (var_of[w] >= 0) {
        vbl.push_back(var_of[w]);
        nodes.push_back(w);
      }
    // E_d: more than 4mu sampled neighbors (assoc at 2mu)
    EventSpec ed = count_event(vbl, kBlack, '>', out.degree_bound, "deg_" + std::to_string(v));
    ed.host = v;
    ed.mono = Monotonicity::decreasing;
    EventSpec ad = count_event(vbl, kBlack, '>', static_cast<long long>(2 * mu),
                               "assoc_deg_" + std::to_string(v));
    ad.host = v;
    ad.mono = Monotonicity::decreasing;
    ed.assoc = std::make_shared<EventSpec>(std::move(ad));
    base.events.push_back(std::move(ed));

    // E_zeta: fewer than alpha*mu^2/2 non-edges among the sampled neighbors;
    // monotone increasing, assoc is itself
    std::vector<std::pair<int, int>> pairs;  // indices into vbl
    for (size_t i = 0; i < nodes.size(); ++i)
      for (size_t j = i + 1; j < nodes.size(); ++j)
        if (!g.has_edge(nodes[i], nodes[j])) pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
    const double thres = alpha * mu * mu / 2;
    EventSpec ez;
    ez.vbl = vbl;
    ez.host = v;
    ez.mono = Monotonicity::increasing;
    ez.name = "zeta_" + std::to_string(v);
    ez.holds = [pairs, thres](std::span<const Value> vals) {
      long long cnt = 0;
      for (auto [i, j] : pairs)
        if (vals[i] == kBlack && vals[j] == kBlack) ++cnt;
      return static_cast<double>(cnt) < thres;
    };
    // Monte Carlo over the unset variables only, with the settled pair count
    // folded in once per call.
    const std::vector<int> hook_vbl = vbl;
    ez.cond_hook = [pairs, thres, hook_vbl](const LLLInstance& inst,
                                            const PartialAssignment& psi, long trials,
                                            uint64_t seed) -> ProbResult {
      std::vector<int> state(hook_vbl.size());  // 0 black, 1 white, 2 unset
      std::vector<int> unset;
      for (size_t i = 0; i < hook_vbl.size(); ++i) {
        const Value x = psi.values[hook_vbl[i]];
        state[i] = x == kUnset ? 2 : x == kBlack ? 0 : 1;
        if (state[i] == 2) unset.push_back(static_cast<int>(i));
      }
      long long base_cnt = 0;
      std::vector<std::pair<int, int>> alive;  // at least one unset, none white
      for (auto [i, j] : pairs) {
        if (state[i] == 1 || state[j] == 1) continue;
        if (state[i] == 0 && state[j] == 0)
          ++base_cnt;
        else
          alive.push_back({i, j});
      }
      if (alive.empty()) {
        ProbResult r;
        r.value = static_cast<double>(base_cnt) < thres ? 1.0 : 0.0;
        return r;
      }
      Rng rng(mix_seed(seed, 0x7e7a));
      std::vector<char> black(hook_vbl.size(), 0);
      long hits = 0;
      for (long t = 0; t < trials; ++t) {
        for (int i : unset)
          black[i] = rng.bernoulli(inst.variables[hook_vbl[i]].dist.probs[kBlack]) ? 1 : 0;
        long long cnt = base_cnt;
        for (auto [i, j] : alive)
          if ((state[i] == 0 || black[i]) && (state[j] == 0 || black[j])) ++cnt;
        if (static_cast<double>(cnt) < thres) ++hits;
      }
      ProbResult r;
      r.value = static_cast<double>(hits) / static_cast<double>(trials);
      r.exact = false;
      r.trials = trials;
      return r;
    };
    ez.assoc = std::make_shared<EventSpec>(ez);
    base.events.push_back(std::move(ez));

    const int dv = static_cast<int>(vbl.size());
    p = std::max(p, binom_tail_above(dv, out.sample_p, 2 * mu));
    p = std::max(p, std::exp(-out.sample_p * static_cast<double>(pairs.size()) /
                             (5.0 * std::max(1, dv))));
  }
  base.declared_p = std::min(1.0, p);
  blri.validate();

  const BinaryResult run = solve_binary_lowrisk(blri, post, rng);
  out.trace = run.trace;
  for (int w = 0; w < g.n; ++w)
    if (var_of[w] >= 0 && run.assignment.values[var_of[w]] == kBlack) out.s.push_back(w);

  // independent re-scan of both guarantees
  for (int v : x_set) {
    std::vector<int> sv;
    for (int w : g.adj[v])
      if (var_of[w] >= 0 && run.assignment.values[var_of[w]] == kBlack) sv.push_back(w);
    if (static_cast<long long>(sv.size()) > out.degree_bound)
      throw Error("internal-consistency", "DSS degree bound violated at node " + std::to_string(v));
    if (non_edges_in_set(g, v, sv) < static_cast<long long>(std::ceil(alpha * mu * mu / 2)))
      throw Error("internal-consistency", "DSS non-edge bound violated at node " + std::to_string(v));
  }
  return out;
}

// ---------- coloring ----------

ColoringState ColoringState::with_full_palettes(const Graph& g, int chi) {
  ColoringState st;
  st.color_space = chi;
  st.color.assign(g.n, 0);
  std::vector<int> full(chi);
  for (int c = 0; c < chi; ++c) full[c] = c + 1;
  st.palette.assign(g.n, full);
  return st;
}

void ColoringState::assign(const Graph& g, int v, int c) {
  if (color[v] != 0) throw Error("precondition", "node already colored");
  for (int w : g.adj[v])
    if (color[w] == c)
      throw Error("internal-consistency", "improper assignment at edge " + std::to_string(v) +
                                              "-" + std::to_string(w));
  color[v] = c;
  for (int w : g.adj[v]) {
    auto& pw = palette[w];
    const auto it = std::lower_bound(pw.begin(), pw.end(), c);
    if (it != pw.end() && *it == c) pw.erase(it);
  }
}

std::optional<std::pair<int, int>> improper_edge(const Graph& g, const std::vector<int>& color) {
  for (int v = 0; v < g.n; ++v)
    for (int w : g.adj[v])
      if (v < w && color[v] != 0 && color[v] == color[w]) return std::make_pair(v, w);
  return std::nullopt;
}

int count_colors_used(const std::vector<int>& color) {
  std::set<int> used;
  for (int c : color)
    if (c != 0) used.insert(c);
  return static_cast<int>(used.size());
}

long long slack_gain_of(const Graph& g, int v, const std::vector<int>& color, int lo, int hi) {
  std::map<int, int> cnt;
  for (int w : g.adj[v]) {
    const int c = color[w];
    if (c == 0 || c < lo || (hi > 0 && c > hi)) continue;
    ++cnt[c];
  }
  long long gain = 0;
  for (auto [c, k] : cnt) gain += k - 1;
  return gain;
}

bool try_color(const Graph& g, ColoringState& st, int v, int c_v,
               const std::vector<std::pair<int, int>>& neighbor_candidates) {
  const auto& pv = st.palette[v];
  if (!std::binary_search(pv.begin(), pv.end(), c_v))
    throw Error("precondition", "candidate color not in the palette of node " + std::to_string(v));
  for (auto [w, c] : neighbor_candidates)
    if (c == c_v && g.has_edge(v, w)) return false;
  st.assign(g, v, c_v);
  return true;
}

SlackReport slack_generation(const Graph& g, const std::vector<int>& s, ColoringState& st,
                             Rng& rng, const SlackGenOptions& opts) {
  const int lo = opts.palette_lo;
  const int hi = opts.palette_hi > 0 ? opts.palette_hi : st.color_space;
  const int chi = hi - lo + 1;
  const std::vector<char> in_s = membership(g.n, s);

  for (int round = 0; round < opts.rounds; ++round) {
    Rng rr = rng.stream(0x51ac, round);
    std::vector<int> cand(g.n, 0);
    for (int v : s) {
      if (st.colored(v) || !rr.bernoulli(opts.activation)) continue;
      // candidate u.a.r. from the available part of the palette
      const auto& pv = st.palette[v];
      const auto begin = std::lower_bound(pv.begin(), pv.end(), lo);
      const auto end = std::upper_bound(pv.begin(), pv.end(), hi);
      const auto count = static_cast<size_t>(end - begin);
      if (count == 0) continue;
      cand[v] = *(begin + rr.below(count));
    }
    std::vector<int> winners;
    for (int v : s) {
      if (cand[v] == 0) continue;
      bool ok = true;
      for (int w : g.adj[v])
        if (cand[w] == cand[v]) ok = false;
      if (ok) winners.push_back(v);
    }
    for (int v : winners) st.assign(g, v, cand[v]);
  }

  SlackReport rep;
  rep.chi = chi;
  long long max_sdeg = 1;
  for (int v = 0; v < g.n; ++v) {
    long long d = 0;
    for (int w : g.adj[v])
      if (in_s[w]) ++d;
    max_sdeg = std::max(max_sdeg, d);
  }
  rep.c_prime = static_cast<double>(chi) / static_cast<double>(max_sdeg);
  std::vector<int> s_nodes(s);
  for (int v = 0; v < g.n; ++v) {
    bool any = false;
    for (int w : g.adj[v])
      if (in_s[w]) any = true;
    if (!any) continue;
    SlackNodeReport nr;
    nr.node = v;
    nr.non_edges = non_edges_in_set(g, v, s_nodes);
    nr.threshold = std::exp(-3.0 / rep.c_prime) * static_cast<double>(nr.non_edges) / (500.0 * chi);
    nr.gain = slack_gain_of(g, v, st.color, lo, hi);
    rep.per_node.push_back(nr);
  }
  return rep;
}

namespace {

// Deterministic multi-round coloring replay over a node set: per round,
// active uncolored nodes draw a candidate from the remaining part palette and
// keep it unless some neighbor in the replay set drew the same color.
// vals: per node per round (act, colour index) as produced by the variable
// layout of slack_gen_two_sets.
struct ReplayScope {
  std::vector<int> nodes;                    // replay set (sorted)
  std::vector<std::vector<int>> adj;         // within the set, local indices
  int rounds = 0;
  int lo = 0, chi = 0;                       // palette part
};

std::vector<int> replay_colors(const ReplayScope& sc, const std::vector<int>& permanent_excluded,
                               std::span<const Value> vals) {
  // vals layout: node-major, per node 2*rounds values
  const int r2 = 2 * sc.rounds;
  std::vector<int> color(sc.nodes.size(), 0);
  std::vector<std::vector<char>> removed(sc.nodes.size());  // palette bitmap per node
  for (size_t i = 0; i < sc.nodes.size(); ++i) removed[i].assign(sc.chi, 0);
  // colors already held by outside neighbors (permanent_excluded is a bitmap
  // per local node x chi)
  for (size_t i = 0; i < sc.nodes.size(); ++i)
    if (!permanent_excluded.empty())
      for (int c = 0; c < sc.chi; ++c)
        if (permanent_excluded[i * sc.chi + c]) removed[i][c] = 1;

  std::vector<int> cand(sc.nodes.size());
  for (int r = 0; r < sc.rounds; ++r) {
    std::fill(cand.begin(), cand.end(), -1);
    for (size_t i = 0; i < sc.nodes.size(); ++i) {
      if (color[i] != 0) continue;
      if (vals[i * r2 + 2 * r] != kBlack) continue;  // inactive this round
      // available palette slots
      int avail = 0;
      for (int c = 0; c < sc.chi; ++c)
        if (!removed[i][c]) ++avail;
      if (avail == 0) continue;
      int pick = static_cast<int>(vals[i * r2 + 2 * r + 1]) % avail;
      for (int c = 0; c < sc.chi; ++c) {
        if (removed[i][c]) continue;
        if (pick-- == 0) {
          cand[i] = c;
          break;
        }
      }
    }
    for (size_t i = 0; i < sc.nodes.size(); ++i) {
      if (cand[i] < 0) continue;
      bool ok = true;
      for (int j : sc.adj[i])
        if (cand[j] == cand[i]) ok = false;
      if (!ok) continue;
      color[i] = sc.lo + cand[i];
    }
    for (size_t i = 0; i < sc.nodes.size(); ++i) {
      if (color[i] == 0) continue;
      const int c = color[i] - sc.lo;
      removed[i][c] = 1;
      for (int j : sc.adj[i]) removed[j][c] = 1;
    }
  }
  return color;
}

}  // namespace

SlackTwoSetsResult slack_gen_two_sets(const Graph& g, const std::vector<int>& w_set,
                                      const std::vector<int>& s1, const std::vector<int>& s2,
                                      ColoringState& st, const PostSolver& post, Rng& rng,
                                      const SlackTwoSetsOptions& opts) {
  SlackTwoSetsResult res;
  const int chi = opts.chi;
  if (chi <= 0) throw Error("precondition", "slack_gen_two_sets needs a palette size");
  const int lo1 = opts.lo1;
  const int lo2 = opts.lo2 > 0 ? opts.lo2 : lo1 + chi;
  const std::vector<char> in_s1 = membership(g.n, s1);
  const std::vector<char> in_s2 = membership(g.n, s2);
  for (int v : s2)
    if (in_s1[v]) throw Error("precondition", "S1 and S2 intersect at node " + std::to_string(v));

  const std::vector<int> w_sorted = sorted_unique(w_set);
  long long max_sdeg = 0;
  for (int v = 0; v < g.n; ++v) {
    if (!(in_s1[v] || in_s2[v] || std::binary_search(w_sorted.begin(), w_sorted.end(), v)))
      continue;
    long long d1 = 0, d2 = 0;
    for (int w : g.adj[v]) {
      d1 += in_s1[w];
      d2 += in_s2[w];
    }
    max_sdeg = std::max({max_sdeg, d1, d2});
  }
  res.max_s_degree = max_sdeg;
  if (opts.min_nonedges > 0) {
    for (int v : w_set) {
      for (const auto* side : {&s1, &s2}) {
        if (non_edges_in_set(g, v, *side) < opts.min_nonedges)
          throw Error("precondition", "node " + std::to_string(v) +
                                          " lacks the required non-edges in a slack set");
      }
    }
  }

  // phase 1: color S1 within palette part 1
  SlackGenOptions sg;
  sg.activation = opts.activation;
  sg.rounds = opts.rounds;
  sg.palette_lo = lo1;
  sg.palette_hi = lo1 + chi - 1;
  Rng phase1 = rng.stream(0x2501);
  slack_generation(g, s1, st, phase1, sg);

  std::vector<int> failing;
  for (int v : w_set) {
    if (st.colored(v)) continue;
    if (slack_gain_of(g, v, st.color, lo1, lo1 + chi - 1) < opts.threshold) failing.push_back(v);
  }
  // a flood of deficiencies means the first phase was mis-parameterized;
  // repairing them one by one would be slower than a fresh attempt
  if (failing.size() > std::max<size_t>(8, w_set.size() / 8))
    throw Error("post-solver-failure",
                "stage one left " + std::to_string(failing.size()) + " slack-deficient nodes");

  // residual instance over the S2 variables: per S2 node per round an
  // activation flag and a colour index
  const int rounds = opts.rounds;
  LLLInstance residual;
  residual.comm_graph = g;
  std::vector<int> s2_sorted = sorted_unique(s2);
  std::vector<int> var_base(g.n, -1);
  for (int v : s2_sorted) {
    var_base[v] = static_cast<int>(residual.variables.size());
    for (int r = 0; r < rounds; ++r) {
      VariableSpec act;
      act.dist = Distribution::bernoulli_black(opts.activation);
      act.host = v;
      residual.variables.push_back(act);
      VariableSpec col;
      col.dist = Distribution::uniform_over(chi);
      col.host = v;
      residual.variables.push_back(col);
    }
  }

  auto ball2_s2 = [&](int v) {
    std::set<int> ball;
    if (in_s2[v]) ball.insert(v);
    for (int w : g.adj[v]) {
      if (in_s2[w]) ball.insert(w);
      for (int u : g.adj[w])
        if (in_s2[u]) ball.insert(u);
    }
    return std::vector<int>(ball.begin(), ball.end());
  };

  for (int v : failing) {
    const std::vector<int> scope_nodes = ball2_s2(v);
    ReplayScope sc;
    sc.nodes = scope_nodes;
    sc.rounds = rounds;
    sc.lo = lo2;
    sc.chi = chi;
    std::vector<int> local(g.n, -1);
    for (size_t i = 0; i < scope_nodes.size(); ++i) local[scope_nodes[i]] = static_cast<int>(i);
    sc.adj.resize(scope_nodes.size());
    for (size_t i = 0; i < scope_nodes.size(); ++i)
      for (int w : g.adj[scope_nodes[i]])
        if (local[w] >= 0) sc.adj[i].push_back(local[w]);
    // palette exclusions from already-colored outside neighbors (part 2 is
    // untouched so far, so this is empty, but kept for robustness)
    std::vector<int> excluded(scope_nodes.size() * chi, 0);
    for (size_t i = 0; i < scope_nodes.size(); ++i)
      for (int w : g.adj[scope_nodes[i]]) {
        const int c = st.color[w];
        if (c >= lo2 && c < lo2 + chi) excluded[i * chi + (c - lo2)] = 1;
      }
    std::vector<int> nbr_local;  // local ids of v's neighbors in the scope
    for (int w : g.adj[v])
      if (local[w] >= 0) nbr_local.push_back(local[w]);
    const int self_local = in_s2[v] ? local[v] : -1;

    EventSpec ev;
    ev.host = v;
    ev.name = "slack2_" + std::to_string(v);
    for (int u : scope_nodes)
      for (int r = 0; r < 2 * rounds; ++r) ev.vbl.push_back(var_base[u] + r);
    const long long threshold = opts.threshold;
    const int lo2c = lo2;
    ev.holds = [sc, excluded, nbr_local, self_local, threshold, lo2c,
                chi](std::span<const Value> vals) {
      const std::vector<int> colors = replay_colors(sc, excluded, vals);
      if (self_local >= 0 && colors[self_local] != 0) return false;  // v colored itself
      std::map<int, int> cnt;
      for (int j : nbr_local)
        if (colors[j] != 0) ++cnt[colors[j]];
      long long gain = 0;
      for (auto [c, k] : cnt) gain += k - 1;
      (void)lo2c;
      (void)chi;
      return gain < threshold;
    };
    residual.events.push_back(std::move(ev));
  }
  residual.declared_p = 0.5;  // recorded; the repair regime is outside the guarantees

  res.trace.residual_events = static_cast<int>(failing.size());
  res.trace.residual_event_ids = failing;
  if (!residual.events.empty()) {
    Residual rwrap;
    rwrap.instance = residual;
    rwrap.event_ids = failing;
    PartialAssignment empty_pre(residual.variables.size());
    component_stats(residual, rwrap, empty_pre, &res.trace);

    ReplayScope global;
    global.nodes = s2_sorted;
    global.rounds = rounds;
    global.lo = lo2;
    global.chi = chi;
    std::vector<int> local(g.n, -1);
    for (size_t i = 0; i < s2_sorted.size(); ++i) local[s2_sorted[i]] = static_cast<int>(i);
    global.adj.resize(s2_sorted.size());
    for (size_t i = 0; i < s2_sorted.size(); ++i)
      for (int w : g.adj[s2_sorted[i]])
        if (local[w] >= 0) global.adj[i].push_back(local[w]);
    std::vector<int> excluded(s2_sorted.size() * chi, 0);
    for (size_t i = 0; i < s2_sorted.size(); ++i)
      for (int w : g.adj[s2_sorted[i]]) {
        const int c = st.color[w];
        if (c >= lo2 && c < lo2 + chi) excluded[i * chi + (c - lo2)] = 1;
      }

    // The per-event predicates replay only the event's own 2-ball, so the
    // committed outcome is the one global replay over all repaired variables.
    // Rare boundary disagreements between the two are caught here and retried
    // with a fresh post-solver seed before giving up on the stage.
    bool committed = false;
    for (int inner = 0; inner < 4 && !committed; ++inner) {
      Rng post_rng = rng.stream(0x2502, inner);
      const PartialAssignment solved = post(residual, empty_pre, post_rng, &res.trace.post);
      std::vector<Value> vals(s2_sorted.size() * 2 * rounds, kWhite);  // inactive default
      for (size_t i = 0; i < s2_sorted.size(); ++i) {
        const int vb = var_base[s2_sorted[i]];
        for (int r = 0; r < 2 * rounds; ++r) {
          const Value x = solved.values[vb + r];
          vals[i * 2 * rounds + r] = x != kUnset ? x : (r % 2 == 1 ? Value{0} : kWhite);
        }
      }
      const std::vector<int> colors =
          replay_colors(global, excluded, std::span<const Value>(vals));
      bool all_ok = true;
      for (int v : failing) {
        if (st.colored(v)) continue;
        if (in_s2[v] && colors[local[v]] != 0) continue;  // repair colored v itself
        std::map<int, int> cnt;
        for (int w : g.adj[v]) {
          int c = st.color[w];
          if (c == 0 && local[w] >= 0) c = colors[local[w]];
          if (c >= lo2 && c < lo2 + chi) ++cnt[c];
        }
        long long gain2 = 0;
        for (auto [c, k] : cnt) gain2 += k - 1;
        if (gain2 < opts.threshold) {
          all_ok = false;
          break;
        }
      }
      if (!all_ok) continue;
      for (size_t i = 0; i < s2_sorted.size(); ++i)
        if (colors[i] != 0) st.assign(g, s2_sorted[i], colors[i]);
      committed = true;
    }
    if (!committed)
      throw Error("post-solver-failure", "repaired slack did not survive the global replay");
  }

  // final verification: every W node is colored or got its slack from a set
  for (int v : w_set) {
    if (st.colored(v)) continue;
    const long long g1 = slack_gain_of(g, v, st.color, lo1, lo1 + chi - 1);
    const long long g2 = slack_gain_of(g, v, st.color, lo2, lo2 + chi - 1);
    if (g1 < opts.threshold && g2 < opts.threshold)
      throw Error("post-solver-failure",
                  "node " + std::to_string(v) + " below the slack threshold in both sets");
  }

  res.report.chi = chi;
  res.report.c_prime = static_cast<double>(chi) / static_cast<double>(std::max(1LL, max_sdeg));
  for (int v : w_set) {
    SlackNodeReport nr;
    nr.node = v;
    nr.non_edges = std::min(non_edges_in_set(g, v, s1), non_edges_in_set(g, v, s2));
    nr.threshold = std::exp(-3.0 / res.report.c_prime) * static_cast<double>(nr.non_edges) /
                   (500.0 * chi);
    nr.gain = slack_gain_of(g, v, st.color, lo1, lo1 + chi - 1) +
              slack_gain_of(g, v, st.color, lo2, lo2 + chi - 1);
    res.report.per_node.push_back(nr);
  }
  return res;
}

void greedy_d1lc(const Graph& g, ColoringState& st, Rng& rng, const D1lcOptions& opts) {
  // precondition: palette exceeds uncolored degree
  std::string deficient;
  int bad = 0;
  for (int v = 0; v < g.n; ++v) {
    if (st.colored(v)) continue;
    int ud = 0;
    for (int w : g.adj[v])
      if (!st.colored(w)) ++ud;
    if (static_cast<int>(st.palette[v].size()) <= ud) {
      if (bad < 10) deficient += std::to_string(v) + " ";
      ++bad;
    }
  }
  if (bad > 0)
    throw Error("precondition", "slack-deficient nodes: " + deficient + "(" +
                                    std::to_string(bad) + " total)");

  for (int round = 0; round < opts.sync_rounds; ++round) {
    Rng rr = rng.stream(0xd11c, round);
    std::vector<int> cand(g.n, 0);
    bool any = false;
    for (int v = 0; v < g.n; ++v) {
      if (st.colored(v) || st.palette[v].empty()) continue;
      cand[v] = st.palette[v][rr.below(st.palette[v].size())];
      any = true;
    }
    if (!any) break;
    std::vector<int> winners;
    for (int v = 0; v < g.n; ++v) {
      if (cand[v] == 0) continue;
      bool ok = true;
      for (int w : g.adj[v])
        if (cand[w] == cand[v]) ok = false;
      if (ok) winners.push_back(v);
    }
    for (int v : winners) st.assign(g, v, cand[v]);
  }
  // sequential sweep for stragglers; the slack invariant keeps palettes
  // nonempty
  for (int v = 0; v < g.n; ++v) {
    if (st.colored(v)) continue;
    if (st.palette[v].empty())
      throw Error("internal-consistency", "palette exhausted at node " + std::to_string(v));
    st.assign(g, v, st.palette[v].front());
  }
}

PartitionResult partition_vertices(const Graph& g, int k, double eps, Rng& rng, int max_sweeps) {
  PartitionResult pr;
  pr.cls.resize(g.n);
  Rng init = rng.stream(0x9a57);
  for (int v = 0; v < g.n; ++v) pr.cls[v] = static_cast<int>(init.below(k));
  const double margin = eps * g.max_degree / k;

  std::vector<std::vector<int>> cnt(g.n, std::vector<int>(k, 0));
  for (int v = 0; v < g.n; ++v)
    for (int w : g.adj[v]) ++cnt[v][pr.cls[w]];

  auto node_penalty = [&](int v) {
    double pen = 0;
    const double target = static_cast<double>(g.degree(v)) / k;
    for (int i = 0; i < k; ++i) {
      const double excess = std::fabs(cnt[v][i] - target) - margin;
      if (excess > 0) pen += excess * excess;
    }
    return pen;
  };

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    pr.sweeps = sweep;
    double total = 0;
    for (int v = 0; v < g.n; ++v) total += node_penalty(v);
    if (total == 0) return pr;

    Rng order_rng = rng.stream(0x9a58, sweep);
    std::vector<int> order(g.n);
    for (int v = 0; v < g.n; ++v) order[v] = v;
    for (int i = g.n - 1; i > 0; --i) std::swap(order[i], order[order_rng.below(i + 1)]);

    for (int u : order) {
      const int from = pr.cls[u];
      double base = 0;
      for (int w : g.adj[u]) base += node_penalty(w);
      int best = from;
      double best_delta = 0;
      for (int to = 0; to < k; ++to) {
        if (to == from) continue;
        for (int w : g.adj[u]) {
          --cnt[w][from];
          ++cnt[w][to];
        }
        double now = 0;
        for (int w : g.adj[u]) now += node_penalty(w);
        const double delta = now - base;
        if (delta < best_delta) {
          best_delta = delta;
          best = to;
        }
        for (int w : g.adj[u]) {
          ++cnt[w][from];
          --cnt[w][to];
        }
      }
      if (best != from) {
        for (int w : g.adj[u]) {
          --cnt[w][from];
          ++cnt[w][best];
        }
        pr.cls[u] = best;
      }
    }
  }

  // report the worst offender
  double worst = 0;
  int worst_v = 0, worst_i = 0;
  for (int v = 0; v < g.n; ++v) {
    const double target = static_cast<double>(g.degree(v)) / k;
    for (int i = 0; i < k; ++i) {
      const double excess = std::fabs(cnt[v][i] - target) - margin;
      if (excess > worst) {
        worst = excess;
        worst_v = v;
        worst_i = i;
      }
    }
  }
  if (worst > 0)
    throw Error("budget-exhausted", "partition discrepancy not met; worst (node " +
                                        std::to_string(worst_v) + ", class " +
                                        std::to_string(worst_i) + ") deviates by " +
                                        std::to_string(worst));
  return pr;
}

namespace {

std::vector<int> high_degree_nodes(const Graph& g, int delta_prime) {
  std::vector<int> d;
  for (int v = 0; v < g.n; ++v)
    if (g.degree(v) >= delta_prime) d.push_back(v);
  return d;
}

}  // namespace

PipelineResult color_sparse(const Graph& g, double eps, const PipelineOverrides& ov, Rng& rng) {
  PipelineResult out;
  // precondition: local sparsity
  const double target = eps * eps * g.max_degree;
  for (int v = 0; v < g.n; ++v)
    if (local_sparsity(g, v).value() < target)
      throw Error("precondition", "node " + std::to_string(v) + " has sparsity below eps^2*Delta");

  const double x_formula =
      std::log(std::max(2.0, static_cast<double>(g.max_degree))) *
      std::log(std::max(2.0, std::log(std::max(2.0, static_cast<double>(g.n))))) / 6.0;
  const int x = ov.x > 0 ? ov.x : std::max(1, static_cast<int>(x_formula));
  const int delta_prime = g.max_degree - x;
  if (delta_prime < 1) throw Error("infeasible-parameters", "x override leaves no colors");
  out.stages.push_back({"colors", 0, true, x_formula, static_cast<double>(x), "x (colors saved)"});

  const std::vector<int> d_set = high_degree_nodes(g, delta_prime);

  for (int attempt = 0; attempt < ov.stage_retries; ++attempt) {
    Rng at = rng.stream(0xc0105, attempt);
    ColoringState st = ColoringState::with_full_palettes(g, delta_prime);
    try {
      if (d_set.empty()) {
        out.stages.push_back({"slack", attempt, true, 0, 0, "no high-degree nodes"});
      } else if (g.max_degree >= 100.0 * std::log10(std::max(2.0, static_cast<double>(g.n))) || g.max_degree <= 8) {
        // high-degree branch: one slack generation pass over the whole graph
        std::vector<int> everyone(g.n);
        for (int v = 0; v < g.n; ++v) everyone[v] = v;
        SlackGenOptions sg;
        sg.activation = ov.activation;
        sg.rounds = ov.slack_rounds;
        Rng srng = at.stream(1);
        slack_generation(g, everyone, st, srng, sg);
        out.stages.push_back({"slack-direct", attempt, true, 1.0 / 20, ov.activation,
                              g.max_degree <= 8 ? "small-degree branch" : "high-degree branch"});
        for (int v : d_set)
          if (!st.colored(v) && slack_gain_of(g, v, st.color) < g.degree(v) + 1 - delta_prime)
            throw Error("post-solver-failure", "slack short at node " + std::to_string(v));
      } else {
        // mid branch: two sparsity-preserving sets, then two-set slack
        DssParams dp1;
        dp1.alpha = eps * eps / 2;
        dp1.mu_override = ov.mu;
        std::vector<int> everyone(g.n);
        for (int v = 0; v < g.n; ++v) everyone[v] = v;
        Rng dss_rng1 = at.stream(2);
        const auto post = make_decomposed_post_solver();
        const DssOutcome s1 = dss_sample(g, d_set, everyone, dp1, post, dss_rng1);
        out.stages.push_back({"dss-1", attempt, true, s1.mu_formula, s1.mu, ""});

        std::vector<char> in_s1 = membership(g.n, s1.s);
        std::vector<int> rest;
        for (int v = 0; v < g.n; ++v)
          if (!in_s1[v]) rest.push_back(v);
        DssParams dp2;
        dp2.alpha = eps * eps / 4;
        dp2.mu_override = ov.mu;
        Rng dss_rng2 = at.stream(3);
        const DssOutcome s2 = dss_sample(g, d_set, rest, dp2, post, dss_rng2);
        out.stages.push_back({"dss-2", attempt, true, s2.mu_formula, s2.mu, ""});

        SlackTwoSetsOptions so;
        so.chi = std::max(6, std::min(delta_prime / 2, static_cast<int>(s1.mu / 2)));
        so.threshold = x + 1;
        so.rounds = ov.slack_rounds;
        so.activation = ov.activation;
        Rng slack_rng = at.stream(4);
        slack_gen_two_sets(g, d_set, s1.s, s2.s, st, make_resampling_post_solver(64), slack_rng, so);
        out.stages.push_back({"slack-two-sets", attempt, true, 1.0 / 20, ov.activation, ""});
      }
      Rng d1 = at.stream(5);
      greedy_d1lc(g, st, d1);
      out.stages.push_back({"d1lc", attempt, true, 0, 0, ""});
      if (auto e = improper_edge(g, st.color))
        throw Error("internal-consistency", "improper edge " + std::to_string(e->first) + "-" +
                                                std::to_string(e->second));
      out.state = std::move(st);
      out.colors_used = count_colors_used(out.state.color);
      out.proper = true;
      return out;
    } catch (const Error& err) {
      out.stages.push_back({"retry", attempt, false, 0, 0, err.what()});
    }
  }
  throw Error("budget-exhausted", "sparse coloring pipeline failed after retries");
}

PipelineResult color_triangle_free(const Graph& g, const PipelineOverrides& ov, Rng& rng) {
  PipelineResult out;
  if (const auto tri = find_triangle(g); !tri.empty())
    throw Error("precondition", "graph has a triangle: " + std::to_string(tri[0]) + " " +
                                    std::to_string(tri[1]) + " " + std::to_string(tri[2]));

  const double gamma_formula = 1.0 - 1e-7;
  const double gamma = ov.gamma > 0 ? ov.gamma : gamma_formula;
  const int delta_prime = static_cast<int>(std::floor(gamma * g.max_degree));
  out.stages.push_back({"colors", 0, true, gamma_formula, gamma, "gamma (color fraction)"});
  if (delta_prime < 1) throw Error("infeasible-parameters", "gamma leaves no colors");

  const std::vector<int> d_set = high_degree_nodes(g, delta_prime);
  const int deficit = g.max_degree + 1 - delta_prime;

  const double eps4 = std::pow(ov.eps, 4.0);
  const double k_formula = 2.0 * eps4 * g.max_degree /
                         std::max(1.0, std::log(std::max(2.0, static_cast<double>(g.max_degree))) *
                                           std::pow(std::log(std::max(2.0, std::log(std::max(
                                                        2.0, static_cast<double>(g.n))))),
                                                    2.0));
  int k = ov.classes > 0 ? ov.classes : std::max(2, static_cast<int>(k_formula));
  if (k % 2 == 1) ++k;

  for (int attempt = 0; attempt < ov.stage_retries; ++attempt) {
    Rng at = rng.stream(0xc07f, attempt);
    ColoringState st = ColoringState::with_full_palettes(g, delta_prime);
    try {
      if (d_set.empty()) {
        out.stages.push_back({"slack", attempt, true, 0, 0, "no high-degree nodes"});
      } else if (g.max_degree >= 100.0 * std::log10(std::max(2.0, static_cast<double>(g.n))) || g.max_degree <= 8) {
        std::vector<int> everyone(g.n);
        for (int v = 0; v < g.n; ++v) everyone[v] = v;
        SlackGenOptions sg;
        sg.activation = ov.activation;
        sg.rounds = ov.slack_rounds;
        Rng srng = at.stream(1);
        slack_generation(g, everyone, st, srng, sg);
        out.stages.push_back({"slack-direct", attempt, true, 1.0 / 20, ov.activation,
                              g.max_degree <= 8 ? "small-degree branch" : "high-degree branch"});
        for (int v : d_set)
          if (!st.colored(v) && slack_gain_of(g, v, st.color) < g.degree(v) + 1 - delta_prime)
            throw Error("post-solver-failure", "slack short at node " + std::to_string(v));
      } else {
        Rng prng = at.stream(2);
        const PartitionResult part = partition_vertices(g, k, ov.eps, prng);
        out.stages.push_back({"partition", attempt, true, k_formula, static_cast<double>(k), ""});
        const int chi = delta_prime / k;
        if (chi < 2) throw Error("infeasible-parameters", "too many classes for the palette");
        std::vector<std::vector<int>> classes(k);
        for (int v = 0; v < g.n; ++v) classes[part.cls[v]].push_back(v);
        const long long pair_threshold =
            (deficit + k / 2 - 1) / (k / 2);  // per-pair slack target
        for (int j = 0; j < k / 2; ++j) {
          SlackTwoSetsOptions so;
          so.chi = chi;
          so.lo1 = 2 * j * chi + 1;
          so.lo2 = (2 * j + 1) * chi + 1;
          so.threshold = pair_threshold;
          so.rounds = ov.slack_rounds;
          so.activation = ov.activation;
          Rng slack_rng = at.stream(3, j);
          std::vector<int> w_pair;
          for (int v : d_set)
            if (!st.colored(v)) w_pair.push_back(v);
          slack_gen_two_sets(g, w_pair, classes[2 * j], classes[2 * j + 1], st,
                             make_resampling_post_solver(64), slack_rng, so);
        }
        out.stages.push_back({"slack-pairs", attempt, true, 1.0 / 20, ov.activation, ""});
      }
      Rng d1 = at.stream(4);
      greedy_d1lc(g, st, d1);
      out.stages.push_back({"d1lc", attempt, true, 0, 0, ""});
      if (auto e = improper_edge(g, st.color))
        throw Error("internal-consistency", "improper edge " + std::to_string(e->first) + "-" +
                                                std::to_string(e->second));
      out.state = std::move(st);
      out.colors_used = count_colors_used(out.state.color);
      out.proper = true;
      return out;
    } catch (const Error& err) {
      out.stages.push_back({"retry", attempt, false, 0, 0, err.what()});
    }
  }
  throw Error("budget-exhausted", "triangle-free coloring pipeline failed after retries");
}

// ---------- splitting problems ----------

int brute_force_matching(const Graph& g, const std::vector<int>& nodes) {
  // exact maximum matching by branching on the lowest-index covered vertex
  std::vector<int> local(g.n, -1);
  for (size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> adj(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i)
    for (int w : g.adj[nodes[i]])
      if (local[w] > static_cast<int>(i)) adj[i].push_back(local[w]);
  std::vector<char> used(nodes.size(), 0);
  std::function<int(int)> rec = [&](int v) -> int {
    while (v < static_cast<int>(nodes.size()) && used[v]) ++v;
    if (v >= static_cast<int>(nodes.size())) return 0;
    used[v] = 1;
    int best = rec(v + 1);  // leave v unmatched
    for (int w : adj[v]) {
      if (used[w]) continue;
      used[w] = 1;
      best = std::max(best, 1 + rec(v + 1));
      used[w] = 0;
    }
    used[v] = 0;
    return best;
  };
  return rec(0);
}

SplittingInstance build_splitting_lll(SplitKind kind, const Graph& g, const std::vector<int>& t_set,
                                      long long min_stat) {
  SplittingInstance si;
  si.kind = kind;
  LLLInstance& base = si.inst.base;
  base.comm_graph = g;

  const std::vector<int> domain_nodes =
      kind == SplitKind::vertex_subset ? sorted_unique(t_set) : [&] {
        std::vector<int> all(g.n);
        for (int v = 0; v < g.n; ++v) all[v] = v;
        return all;
      }();
  std::vector<int> var_of(g.n, -1);
  for (int v : domain_nodes) {
    var_of[v] = static_cast<int>(base.variables.size());
    VariableSpec vs;
    vs.dist = Distribution::fair_binary();
    vs.host = v;
    base.variables.push_back(vs);
  }

  double worst = 0;
  for (int v = 0; v < g.n; ++v) {
    std::vector<int> vbl, nodes;
    for (int w : g.adj[v])
      if (var_of[w] >= 0) {
        vbl.push_back(var_of[w]);
        nodes.push_back(w);
      }
    long long stat = 0;
    std::vector<std::pair<int, int>> pairs;  // index pairs into vbl
    switch (kind) {
      case SplitKind::vertex_subset:
        stat = static_cast<long long>(vbl.size());
        break;
      case SplitKind::sparsity:
      case SplitKind::density: {
        for (size_t i = 0; i < nodes.size(); ++i)
          for (size_t j = i + 1; j < nodes.size(); ++j) {
            const bool edge = g.has_edge(nodes[i], nodes[j]);
            if ((kind == SplitKind::sparsity) != edge)
              pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
          }
        stat = static_cast<long long>(pairs.size());
        break;
      }
      case SplitKind::matching: {
        // a fixed maximal matching within the neighborhood
        std::vector<char> taken(nodes.size(), 0);
        for (size_t i = 0; i < nodes.size(); ++i) {
          if (taken[i]) continue;
          for (size_t j = i + 1; j < nodes.size(); ++j) {
            if (taken[j] || !g.has_edge(nodes[i], nodes[j])) continue;
            taken[i] = taken[j] = 1;
            pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
            break;
          }
        }
        stat = static_cast<long long>(pairs.size());
        break;
      }
    }
    if (stat < min_stat) continue;

    EventSpec ev, assoc;
    ev.vbl = vbl;
    ev.host = v;
    assoc.vbl = vbl;
    assoc.host = v;
    switch (kind) {
      case SplitKind::vertex_subset: {
        // some part degree below d_T/4 (assoc: below d_T/3)
        ev.name = "deg_split_" + std::to_string(v);
        ev.holds = [stat](std::span<const Value> vals) {
          long long b = 0;
          for (Value x : vals)
            if (x == kBlack) ++b;
          const long long w = static_cast<long long>(vals.size()) - b;
          return 4 * b < stat || 4 * w < stat;
        };
        assoc.name = ev.name + "_assoc";
        assoc.holds = [stat](std::span<const Value> vals) {
          long long b = 0;
          for (Value x : vals)
            if (x == kBlack) ++b;
          const long long w = static_cast<long long>(vals.size()) - b;
          return 3 * b < stat || 3 * w < stat;
        };
        break;
      }
      case SplitKind::sparsity:
      case SplitKind::density: {
        // some part keeps fewer than stat/16 of the pairs (assoc: stat/6)
        ev.name = (kind == SplitKind::sparsity ? "sparsity_" : "density_") + std::to_string(v);
        ev.holds = [pairs, stat](std::span<const Value> vals) {
          long long c1 = 0, c2 = 0;
          for (auto [i, j] : pairs) {
            if (vals[i] == kBlack && vals[j] == kBlack) ++c1;
            if (vals[i] == kWhite && vals[j] == kWhite) ++c2;
          }
          return 16 * c1 < stat || 16 * c2 < stat;
        };
        assoc.name = ev.name + "_assoc";
        assoc.holds = [pairs, stat](std::span<const Value> vals) {
          long long c1 = 0, c2 = 0;
          for (auto [i, j] : pairs) {
            if (vals[i] == kBlack && vals[j] == kBlack) ++c1;
            if (vals[i] == kWhite && vals[j] == kWhite) ++c2;
          }
          return 6 * c1 < stat || 6 * c2 < stat;
        };
        break;
      }
      case SplitKind::matching: {
        // some part keeps fewer than stat/32 matching edges (assoc: stat/8)
        ev.name = "matching_" + std::to_string(v);
        ev.holds = [pairs, stat](std::span<const Value> vals) {
          long long c1 = 0, c2 = 0;
          for (auto [i, j] : pairs) {
            if (vals[i] == kBlack && vals[j] == kBlack) ++c1;
            if (vals[i] == kWhite && vals[j] == kWhite) ++c2;
          }
          return 32 * c1 < stat || 32 * c2 < stat;
        };
        assoc.name = ev.name + "_assoc";
        assoc.holds = [pairs, stat](std::span<const Value> vals) {
          long long c1 = 0, c2 = 0;
          for (auto [i, j] : pairs) {
            if (vals[i] == kBlack && vals[j] == kBlack) ++c1;
            if (vals[i] == kWhite && vals[j] == kWhite) ++c2;
          }
          return 8 * c1 < stat || 8 * c2 < stat;
        };
        break;
      }
    }
    ev.assoc = std::make_shared<EventSpec>(std::move(assoc));
    base.events.push_back(std::move(ev));
    si.event_node.push_back(v);
    si.scan_value.push_back(stat);
    worst = std::max(worst, std::exp(-static_cast<double>(stat) / 32.0));
  }
  if (base.events.empty())
    throw Error("precondition", "no node satisfies the splitting hypothesis");
  si.declared_risk = worst;
  base.declared_p = worst;
  si.inst.validate();
  return si;
}

SplitScan scan_split(const SplittingInstance& si, const Graph& g, const PartialAssignment& phi) {
  for (size_t idx = 0; idx < si.event_node.size(); ++idx) {
    const int v = si.event_node[idx];
    const long long stat = si.scan_value[idx];
    // recover the two parts among v's neighbors with variables
    std::vector<int> p1, p2;
    const EventSpec& ev = si.inst.base.events[idx];  // one event per node
    for (size_t i = 0; i < ev.vbl.size(); ++i) {
      const int w = si.inst.base.variables[ev.vbl[i]].host;
      (phi.values[ev.vbl[i]] == kBlack ? p1 : p2).push_back(w);
    }
    switch (si.kind) {
      case SplitKind::vertex_subset: {
        const long long b = static_cast<long long>(p1.size());
        const long long w = static_cast<long long>(p2.size());
        if (4 * b < stat || 4 * w < stat || 4 * b > 3 * stat || 4 * w > 3 * stat)
          return {false, "class degree out of range at node " + std::to_string(v)};
        break;
      }
      case SplitKind::sparsity:
      case SplitKind::density: {
        auto count_pairs = [&](const std::vector<int>& part) {
          long long c = 0;
          for (size_t i = 0; i < part.size(); ++i)
            for (size_t j = i + 1; j < part.size(); ++j) {
              const bool edge = g.has_edge(part[i], part[j]);
              const bool both_v = g.has_edge(v, part[i]) && g.has_edge(v, part[j]);
              if (both_v && ((si.kind == SplitKind::sparsity) != edge)) ++c;
            }
          return c;
        };
        if (16 * count_pairs(p1) < stat || 16 * count_pairs(p2) < stat)
          return {false, "pair count out of range at node " + std::to_string(v)};
        break;
      }
      case SplitKind::matching: {
        auto part_nodes = [&](const std::vector<int>& part) {
          std::vector<int> in_nv;
          for (int w : part)
            if (g.has_edge(v, w)) in_nv.push_back(w);
          return in_nv;
        };
        const long long need = (stat + 63) / 64;
        if (brute_force_matching(g, part_nodes(p1)) < need ||
            brute_force_matching(g, part_nodes(p2)) < need)
          return {false, "matching too small at node " + std::to_string(v)};
        break;
      }
    }
  }
  return {true, ""};
}

}  // namespace lll::problems

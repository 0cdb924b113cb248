// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fail. Everything is seeded; tolerances are pinned in code.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "lll/experiment.hpp"
#include "lll/postshatter.hpp"
#include "lll/problems.hpp"
#include "lll/risk.hpp"
#include "lll/shatter.hpp"

using namespace lll;

namespace {

int g_failures = 0;

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
}

Graph gen_graph(GraphGenSpec::Family f, int n, int d, uint64_t seed, double eps = 0.5) {
  GraphGenSpec s;
  s.family = f;
  s.n = n;
  s.degree = d;
  s.seed = seed;
  s.epsilon = eps;
  return generate(s);
}

// ---------------------------------------------------------------- criterion 1
void criterion_risk_oracle() {
  using namespace oracle;
  const double t0 = now_s();
  int checked = 0, failed = 0;
  std::string first_failure;

  auto tally = [&](const Check& c, const std::string& what) {
    ++checked;
    if (!c.pass) {
      ++failed;
      if (first_failure.empty()) first_failure = what + ": " + c.detail;
    }
  };

  // No Risk Lemma with equality: 500+ randomized monotone increasing events
  Rng rng(0xAC1);
  for (int i = 0; i < 500; ++i) {
    Rng cr = rng.stream(1, i);
    const int n = 4 + static_cast<int>(cr.below(9));  // 4..12
    Universe u = random_universe(n, cr);
    tally(verify_no_risk_lemma(u, random_increasing_event(u, cr)), "no-risk #" + std::to_string(i));
  }
  for (int i = 0; i < 8; ++i) {  // a few larger universes
    Rng cr = rng.stream(2, i);
    const int n = 13 + static_cast<int>(cr.below(2));  // 13..14
    Universe u = random_universe(n, cr);
    tally(verify_no_risk_lemma(u, random_increasing_event(u, cr)),
          "no-risk-large #" + std::to_string(i));
  }

  // sum-threshold lemma: all n <= 12, x <= n, fair and biased
  for (int n = 1; n <= 12; ++n) {
    const Universe fair = Universe::fair(n);
    const Universe biased = Universe::dyadic(std::vector<uint64_t>(n, 3), 4);
    for (long long x = 1; x <= n; ++x) {
      tally(verify_sum_threshold(fair, x), "sum-threshold fair n=" + std::to_string(n));
      tally(verify_sum_threshold(biased, x), "sum-threshold biased n=" + std::to_string(n));
    }
  }

  // union subadditivity: 200+ random pairs of testified events
  for (int i = 0; i < 200; ++i) {
    Rng cr = rng.stream(3, i);
    const int n = 4 + static_cast<int>(cr.below(6));  // 4..9
    Universe u = random_universe(n, cr);
    if (i % 2 == 0) {
      TableEvent e1 = random_increasing_event(u, cr);
      TableEvent e2 = random_increasing_event(u, cr);
      tally(verify_union_risk(u, e1, e1, e2, e2), "union #" + std::to_string(i));
    } else {
      const uint32_t all = (1u << n) - 1;
      const long long x1 = 1 + static_cast<long long>(cr.below(n));
      TableEvent e1 = black_count_gt(u, x1, all);
      TableEvent a1 = black_count_gt(u, x1 / 2, all);
      TableEvent e2 = random_increasing_event(u, cr);
      tally(verify_union_risk(u, e1, a1, e2, e2), "union #" + std::to_string(i));
    }
  }

  // danger and fragility lemmas: 120 (event, q) cases each
  for (int i = 0; i < 20; ++i) {
    Rng cr = rng.stream(4, i);
    const int n = 4 + static_cast<int>(cr.below(5));  // 4..8
    Universe u = random_universe(n, cr);
    TableEvent e = i % 2 == 0 ? random_increasing_event(u, cr)
                              : black_count_gt(u, static_cast<long long>(cr.below(n)),
                                               (1u << n) - 1);
    for (int j = 1; j <= 6; ++j) {
      tally(verify_danger_lemma(u, e, Dyadic(1, j)),
            "danger #" + std::to_string(i) + " q=2^-" + std::to_string(j));
      tally(verify_fragility_risk(u, e, Dyadic(1, j)),
            "fragility #" + std::to_string(i) + " q=2^-" + std::to_string(j));
    }
  }

  const double secs = now_s() - t0;
  report(1, "risk-calculus oracle suite (exact)", failed == 0 && secs <= 600,
         std::to_string(checked) + " cases, " + std::to_string(failed) + " failures, " +
             std::to_string(static_cast<int>(secs)) + "s" +
             (first_failure.empty() ? "" : "; first: " + first_failure));
}

// ---------------------------------------------------------------- criterion 2
void criterion_markov_events() {
  const double t0 = now_s();
  int checked = 0, failed = 0;
  Rng rng(0xAC2);
  for (int trial = 0; trial < 210; ++trial) {
    Rng cr = rng.stream(trial);
    const int nv = 4 + static_cast<int>(cr.below(3));  // 4..6 variables
    LLLInstance inst;
    inst.comm_graph = Graph::from_edges(1, {});
    for (int i = 0; i < nv; ++i) {
      VariableSpec v;
      v.dist = Distribution::dyadic_black(1 + cr.below(15), 4);
      inst.variables.push_back(v);
    }
    std::vector<int> vbl;
    for (int i = 0; i < nv; ++i)
      if (cr.below(3) > 0) vbl.push_back(i);
    if (vbl.size() < 2) vbl = {0, 1};
    inst.events.push_back(count_event(vbl, kBlack, '>',
                                      static_cast<long long>(cr.below(vbl.size())), "e"));
    PartialAssignment prev(nv);
    std::vector<int> collection;
    for (int i = 0; i < nv; ++i) {
      const int roll = static_cast<int>(cr.below(3));
      if (roll == 0)
        prev.values[i] = static_cast<Value>(cr.below(2));
      else if (roll == 1)
        collection.push_back(i);
    }
    if (collection.empty()) {
      for (int i = 0; i < nv && collection.empty(); ++i)
        if (prev.values[i] == kUnset) collection.push_back(i);
      if (collection.empty()) {
        prev.values[0] = kUnset;
        collection.push_back(0);
      }
    }
    const int d = 2 + static_cast<int>(cr.below(5));  // 2..6
    ++checked;
    if (!verify_markov_claim(inst, prev, collection, d).pass) ++failed;
  }
  const double secs = now_s() - t0;
  report(2, "collection-event probability bound (exact)", failed == 0 && secs <= 120,
         std::to_string(checked) + " constructions, " + std::to_string(failed) + " violations, " +
             std::to_string(static_cast<int>(secs)) + "s");
}

// ---------------------------------------------------------------- criterion 3
void criterion_post_ledger() {
  const double t0 = now_s();
  int runs = 0, violations = 0, entries = 0;
  PostShatterOptions opts;
  opts.exact_bound = 20;
  opts.collections = 3;
  opts.k_parallel = 8;

  auto run_family = [&](const LLLInstance& inst, uint64_t seed) {
    PartialAssignment psi(inst.num_vars());
    Rng rng(seed);
    const PostShatterResult r = solve_postshatter(inst, psi, rng, opts);
    ++runs;
    const double d = r.trace.d;
    // exact per-event bound p * d^{2i} after each collection
    for (const auto& entry : r.trace.ledger) {
      ++entries;
      if (!entry.exact) {
        ++violations;
        continue;
      }
      if (!entry.ok) ++violations;
      const double bound = inst.declared_p * std::pow(d, 2.0 * entry.collection);
      if (entry.after > bound) ++violations;
    }
    for (const auto& e : inst.events)
      if (evaluate(e, r.assignment)) ++violations;
  };

  for (uint64_t seed = 1; seed <= 30; ++seed) {
    // chain instance: sliding 3-variable majority events on a 10-path
    LLLInstance inst;
    inst.comm_graph = [&] {
      std::vector<std::pair<int, int>> edges;
      for (int i = 0; i + 1 < 10; ++i) edges.push_back({i, i + 1});
      return Graph::from_edges(10, edges);
    }();
    for (int i = 0; i < 10; ++i) {
      VariableSpec v;
      v.dist = Distribution::fair_binary();
      v.host = i;
      inst.variables.push_back(v);
    }
    for (int v = 0; v + 2 < 10; v += 2)
      inst.events.push_back(count_event({v, v + 1, v + 2}, kBlack, '>', 2, "w" + std::to_string(v)));
    inst.declared_p = 0.125;
    run_family(inst, seed);
  }
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    // ring instance: neighbor events on a 12-cycle
    LLLInstance inst;
    inst.comm_graph = [&] {
      std::vector<std::pair<int, int>> edges;
      for (int i = 0; i < 12; ++i) edges.push_back({i, (i + 1) % 12});
      return Graph::from_edges(12, edges);
    }();
    for (int i = 0; i < 12; ++i) {
      VariableSpec v;
      v.dist = Distribution::fair_binary();
      v.host = i;
      inst.variables.push_back(v);
    }
    for (int v = 0; v < 12; v += 2) {
      EventSpec e = count_event({(v + 11) % 12, (v + 1) % 12}, kBlack, '<', 1, "c" + std::to_string(v));
      e.host = v;
      inst.events.push_back(std::move(e));
    }
    inst.declared_p = 0.25;
    run_family(inst, 1000 + seed);
  }

  const double secs = now_s() - t0;
  report(3, "post-shattering bound ledger (exact)", runs >= 50 && violations == 0,
         std::to_string(runs) + " runs, " + std::to_string(entries) + " ledger entries, " +
             std::to_string(violations) + " violations, " + std::to_string(static_cast<int>(secs)) +
             "s");
}

// ------------------------------------------------------------- criteria 4 + 5
void criterion_solvers_and_shattering() {
  const double t0 = now_s();
  int sinkless_ok = 0, degree_ok = 0;
  double frac_sum_sinkless = 0, frac_sum_degree = 0;
  int soft_failures = 0;
  bool union_bound_ok = true, soft_ok = true;

  const Graph g8 = gen_graph(GraphGenSpec::Family::random_regular, 2000, 8, 31);
  const auto si = problems::sinkless_orientation_lll(g8);
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(mix_seed(0xC4A, seed));
    try {
      const DisjointResult r = solve_disjoint(si.inst, make_decomposed_post_solver(), rng);
      const auto out = problems::orientation_out_degrees(g8, si, r.assignment);
      if (*std::min_element(out.begin(), out.end()) >= 1) ++sinkless_ok;
      const double frac =
          static_cast<double>(r.trace.residual_events) / si.inst.base.num_events();
      frac_sum_sinkless += frac;
      const double soft_bound =
          64.0 * std::pow(r.trace.d, 8.0) * std::log(2000.0) / std::log(std::max(2, r.trace.d));
      if (r.trace.max_dep_component > soft_bound) ++soft_failures;
    } catch (const Error&) {
    }
  }

  const Graph g96 = gen_graph(GraphGenSpec::Family::random_regular, 2000, 96, 32);
  const auto db = problems::degree_bounded_lll(g96, 16);
  double d2p_degree = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(mix_seed(0xC4B, seed));
    try {
      const BinaryResult r = solve_binary_lowrisk(db.inst, make_decomposed_post_solver(), rng);
      const auto s = problems::black_nodes(r.assignment, g96.n);
      std::vector<char> in_s(g96.n, 0);
      for (int v : s) in_s[v] = 1;
      bool ok = true;
      for (int v = 0; v < g96.n; ++v) {
        int d = 0;
        for (int w : g96.adj[v]) d += in_s[w];
        if (d < (16 + 2) / 3 || d > 64) ok = false;
      }
      if (ok) ++degree_ok;
      const double frac =
          static_cast<double>(r.trace.residual_events) / db.inst.base.num_events();
      frac_sum_degree += frac;
      d2p_degree = 5.0 * static_cast<double>(r.trace.d) * r.trace.d * r.trace.p;
      const double soft_bound =
          64.0 * std::pow(r.trace.d, 8.0) * std::log(2000.0) / std::log(std::max(2, r.trace.d));
      if (r.trace.max_dep_component > soft_bound) ++soft_failures;
    } catch (const Error&) {
    }
  }

  // the union-bound shape: average fraction entering the post phase
  if (frac_sum_sinkless / 20.0 > std::min(1.0, 5.0 * si.inst.base.declared_p)) union_bound_ok = false;
  if (frac_sum_degree / 20.0 > std::min(1.0, d2p_degree)) union_bound_ok = false;
  if (soft_failures > 2) soft_ok = false;  // <= 1 tolerated per problem family

  const double secs = now_s() - t0;
  report(4, "solver correctness end-to-end",
         sinkless_ok == 20 && degree_ok == 20 && secs <= 300,
         "sinkless " + std::to_string(sinkless_ok) + "/20, degree-bounded " +
             std::to_string(degree_ok) + "/20, " + std::to_string(static_cast<int>(secs)) + "s");
  report(5, "shattering statistics", union_bound_ok && soft_ok,
         "avg residual fraction " + std::to_string(frac_sum_degree / 20.0) +
             " vs 5*d^2*p bound; component soft-bound exceedances " +
             std::to_string(soft_failures));
}

// ---------------------------------------------------------------- criterion 6
void criterion_nonedge_tail() {
  const double t0 = now_s();
  int pass = 0, total = 0;
  std::string detail;
  struct Config {
    int x;
    double edge_prob;
    double p;
  };
  const std::vector<Config> configs = {
      {16, 0.0, 0.6}, {20, 0.0, 0.5}, {24, 0.0, 0.4}, {30, 0.0, 0.4}, {40, 0.0, 0.3},
      {20, 0.2, 0.5}, {24, 0.3, 0.5}, {30, 0.2, 0.4}, {36, 0.1, 0.3}, {40, 0.25, 0.35}};
  for (size_t i = 0; i < configs.size(); ++i) {
    const auto& c = configs[i];
    GraphGenSpec s;
    s.family = GraphGenSpec::Family::erdos_renyi;
    s.n = c.x;
    s.edge_prob = c.edge_prob;
    s.seed = 100 + i;
    const Graph g = generate(s);
    Rng rng(mix_seed(0xC6, i));
    const auto check = oracle::verify_nonedge_tail(g, c.p, 100000, rng);
    ++total;
    if (check.pass) ++pass;
    else
      detail += " cfg" + std::to_string(i) + " emp " + std::to_string(check.empirical) +
                " > bound " + std::to_string(check.bound);
  }
  const double secs = now_s() - t0;
  report(6, "non-edge hitting tail (monte carlo)", pass == total && secs <= 180,
         std::to_string(pass) + "/" + std::to_string(total) + ", " +
             std::to_string(static_cast<int>(secs)) + "s" + detail);
}

// ---------------------------------------------------------------- criterion 7
void criterion_slack_generation() {
  // Lemma-faithful single round at activation 1/20 over a 16-neighbor
  // bipartite gadget: Delta_s = 16, chi = 32, c' = 2, m = C(16,2) = 120.
  const double t0 = now_s();
  const int chi = 32;
  const long long m_bar = 120;
  const double threshold = std::exp(-1.5) * static_cast<double>(m_bar) / (500.0 * chi);
  const double bound = std::exp(-static_cast<double>(m_bar) / (60.0 * chi));

  // gadget: center 0, S = {1..16} mutually non-adjacent
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i <= 16; ++i) edges.push_back({0, i});
  const Graph g = Graph::from_edges(17, edges);
  std::vector<int> s_nodes;
  for (int i = 1; i <= 16; ++i) s_nodes.push_back(i);

  auto run_trials = [&](double activation, long trials) {
    long failing = 0;
    for (long t = 0; t < trials; ++t) {
      problems::ColoringState st = problems::ColoringState::with_full_palettes(g, chi);
      problems::SlackGenOptions opts;
      opts.activation = activation;
      Rng rng(mix_seed(0xC7, static_cast<uint64_t>(t), static_cast<uint64_t>(activation * 1e6)));
      problems::slack_generation(g, s_nodes, st, rng, opts);
      if (static_cast<double>(problems::slack_gain_of(g, 0, st.color)) < threshold) ++failing;
    }
    return static_cast<double>(failing) / static_cast<double>(trials);
  };

  const long trials = 10000;
  const double fraction = run_trials(1.0 / 20, trials);
  const double se3 = 3.0 * std::sqrt(std::max(fraction * (1 - fraction), 1.0 / trials) / trials);
  const bool pass = fraction <= bound + se3;
  // sensitivity row: the activation the fitted surrogate would need
  const double fraction_sens = run_trials(0.2, trials);

  const double secs = now_s() - t0;
  report(7, "slack generation tail surrogate (monte carlo)", pass,
         "failing fraction " + std::to_string(fraction) + " vs bound " + std::to_string(bound) +
             " + 3se " + std::to_string(se3) +
             " at the fixed activation 1/20; at activation 0.2 the fraction is " +
             std::to_string(fraction_sens) + " (recorded, not asserted); " +
             std::to_string(static_cast<int>(secs)) + "s");
}

// ---------------------------------------------------------------- criterion 8
void criterion_pipelines() {
  const double t0 = now_s();
  int tri_ok = 0, sparse_ok = 0;
  bool formula_pairs = true;

  const Graph gt = gen_graph(GraphGenSpec::Family::random_bipartite_regular, 4000, 64, 41);
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    problems::PipelineOverrides ov;
    ov.gamma = 0.9;
    ov.classes = 2;
    ov.slack_rounds = 14;
    Rng rng(mix_seed(0xC8A, seed));
    try {
      const problems::PipelineResult r = problems::color_triangle_free(gt, ov, rng);
      if (r.proper && r.colors_used <= static_cast<int>(0.9 * 64) &&
          !problems::improper_edge(gt, r.state.color))
        ++tri_ok;
      bool any_pair = false;
      for (const auto& st : r.stages)
        if (st.formula_value != st.used_value) any_pair = true;
      formula_pairs = formula_pairs && any_pair;
    } catch (const Error&) {
    }
  }

  const Graph gs = gen_graph(GraphGenSpec::Family::sparse_neighborhood, 2000, 64, 42);
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    problems::PipelineOverrides ov;
    ov.x = 4;
    ov.mu = 24;
    ov.slack_rounds = 12;
    Rng rng(mix_seed(0xC8B, seed));
    try {
      const problems::PipelineResult r = problems::color_sparse(gs, 0.5, ov, rng);
      if (r.proper && r.colors_used <= gs.max_degree - 4 &&
          !problems::improper_edge(gs, r.state.color))
        ++sparse_ok;
      bool any_pair = false;
      for (const auto& st : r.stages)
        if (st.formula_value != st.used_value) any_pair = true;
      formula_pairs = formula_pairs && any_pair;
    } catch (const Error&) {
    }
  }

  const double secs = now_s() - t0;
  report(8, "coloring pipelines (validity, scaled)",
         tri_ok >= 18 && sparse_ok >= 18 && formula_pairs,
         "triangle-free " + std::to_string(tri_ok) + "/20 at <= 57 colors, sparse " +
             std::to_string(sparse_ok) + "/20 at <= Delta-4, formula-vs-override pairs " +
             (formula_pairs ? "present" : "missing") + ", " +
             std::to_string(static_cast<int>(secs)) + "s");
}

// ---------------------------------------------------------------- criterion 9
void criterion_dss() {
  const double t0 = now_s();
  int ok = 0;
  const Graph g = gen_graph(GraphGenSpec::Family::random_bipartite_regular, 2000, 64, 51);
  std::vector<int> everyone(g.n);
  for (int v = 0; v < g.n; ++v) everyone[v] = v;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    problems::DssParams dp;
    dp.alpha = 0.25;
    dp.mu_override = 16;
    Rng rng(mix_seed(0xC9, seed));
    try {
      const problems::DssOutcome out =
          problems::dss_sample(g, everyone, everyone, dp, make_decomposed_post_solver(), rng);
      // dss_sample rescans both guarantees and throws on any violation;
      // double-check the bounds here anyway
      std::vector<char> in_s(g.n, 0);
      for (int v : out.s) in_s[v] = 1;
      bool all = true;
      for (int v = 0; v < g.n; ++v) {
        std::vector<int> sv;
        for (int w : g.adj[v])
          if (in_s[w]) sv.push_back(w);
        if (static_cast<long long>(sv.size()) > 64) all = false;
        if (non_edges_in_set(g, v, sv) < 32) all = false;
      }
      if (all) ++ok;
    } catch (const Error&) {
    }
  }
  const double secs = now_s() - t0;
  report(9, "degree-bounded sparsity-preserving sampling (scaled)", ok == 20,
         std::to_string(ok) + "/20 seeds with both guarantees, " +
             std::to_string(static_cast<int>(secs)) + "s");
}

// --------------------------------------------------------------- criterion 10
void criterion_determinism() {
  using nlohmann::json;
  const double t0 = now_s();
  int ok = 0;
  const std::vector<json> configs = {
      {{"kind", "solver-run"},
       {"problem", "sinkless"},
       {"graph", {{"family", "random-regular"}, {"n", 400}, {"degree", 8}, {"seed", 3}}},
       {"seeds", {1, 2}}},
      {{"kind", "solver-run"},
       {"problem", "degree-bounded"},
       {"graph", {{"family", "random-regular"}, {"n", 300}, {"degree", 48}, {"seed", 5}}},
       {"params", {{"k", 8}}},
       {"seeds", {1}}},
      {{"kind", "pipeline"},
       {"pipeline", "triangle-free"},
       {"graph",
        {{"family", "random-bipartite-regular"}, {"n", 600}, {"degree", 32}, {"seed", 7}}},
       {"params", {{"gamma", 0.9}, {"classes", 2}, {"slack_rounds", 10}}},
       {"seeds", {1}}},
      {{"kind", "tail-bound"},
       {"graph", {{"family", "erdos-renyi"}, {"n", 20}, {"edge_prob", 0.0}, {"seed", 1}}},
       {"params", {{"p", 0.5}, {"trials", 20000}}},
       {"seeds", {1}}},
      {{"kind", "oracle-suite"}, {"params", {{"budget", 1}}}, {"seeds", {4}}}};
  for (const auto& config : configs) {
    const json a = experiment::strip_timing(experiment::run(config));
    const json b = experiment::strip_timing(experiment::run(config));
    if (a.dump() == b.dump()) ++ok;
  }
  const double secs = now_s() - t0;
  report(10, "byte-identical reruns", ok == 5,
         std::to_string(ok) + "/5 configs, " + std::to_string(static_cast<int>(secs)) + "s");
}

}  // namespace

int main() {
  criterion_risk_oracle();
  criterion_markov_events();
  criterion_post_ledger();
  criterion_solvers_and_shattering();
  criterion_nonedge_tail();
  criterion_slack_generation();
  criterion_pipelines();
  criterion_dss();
  criterion_determinism();
  if (g_failures == 0)
    std::printf("acceptance: all criteria passed\n");
  else
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}

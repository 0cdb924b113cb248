#include "lll/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include "lll/postshatter.hpp"
#include "lll/problems.hpp"
#include "lll/resample.hpp"
#include "lll/risk.hpp"
#include "lll/shatter.hpp"

namespace lll::experiment {

namespace {

using problems::PipelineOverrides;

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void check_fields(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw Error("schema", "unknown field '" + it.key() + "' in " + where);
  }
}

GraphGenSpec::Family family_from_string(const std::string& s) {
  if (s == "random-regular") return GraphGenSpec::Family::random_regular;
  if (s == "random-bipartite-regular") return GraphGenSpec::Family::random_bipartite_regular;
  if (s == "erdos-renyi") return GraphGenSpec::Family::erdos_renyi;
  if (s == "sparse-neighborhood") return GraphGenSpec::Family::sparse_neighborhood;
  throw Error("schema", "unknown graph family " + s);
}

json trace_to_json(const ShatterTrace& t) {
  json j;
  j["residual_events"] = t.residual_events;
  j["max_dep_component"] = t.max_dep_component;
  j["max_host_component"] = t.max_host_component;
  json dep = json::object(), host = json::object();
  for (auto [size, count] : t.dep_component_hist) dep[std::to_string(size)] = count;
  for (auto [size, count] : t.host_component_hist) host[std::to_string(size)] = count;
  j["dep_component_hist"] = dep;
  j["host_component_hist"] = host;
  j["p"] = t.p;
  j["d"] = t.d;
  j["criterion_local"] = t.criterion_local;
  json choices = json::array();
  for (const auto& c : t.post.choices)
    choices.push_back({{"component", c.component},
                       {"collection", c.collection},
                       {"cluster", c.cluster},
                       {"instance", c.chosen_instance},
                       {"iterations", c.iterations}});
  j["post_choices"] = choices;
  json ledger = json::array();
  for (const auto& l : t.post.ledger)
    ledger.push_back({{"event", l.event},
                      {"collection", l.collection},
                      {"before", l.before},
                      {"after", l.after},
                      {"exact", l.exact},
                      {"ok", l.ok}});
  j["post_ledger"] = ledger;
  j["post_estimated"] = t.post.any_estimated;
  return j;
}

PostSolver post_solver_from_config(const json& params) {
  const std::string name = params.value("post_solver", "decomposed");
  if (name == "enumeration") return make_enumeration_post_solver();
  if (name == "resampling") return make_resampling_post_solver();
  if (name == "decomposed") {
    PostShatterOptions opts;
    opts.k_parallel = params.value("k_parallel", 16);
    opts.collections = params.value("collections", 4);
    opts.exact_bound = params.value("exact_bound", 16);
    return make_decomposed_post_solver(opts);
  }
  throw Error("schema", "unknown post solver " + name);
}

json run_one_seed(const json& config, uint64_t seed);

json aggregate_reports(const json& config, const std::vector<json>& per_seed,
                       const std::vector<double>& seed_ms, double total_ms) {
  json rep;
  rep["schema"] = "lll-exp-report/1";
  rep["config"] = config;
  rep["results"]["seeds"] = per_seed;
  int pass = 0;
  long long max_comp = 0;
  std::vector<int> colors;
  for (const auto& r : per_seed) {
    if (r.value("ok", false)) ++pass;
    if (r.contains("trace"))
      max_comp = std::max<long long>(max_comp, r["trace"].value("max_dep_component", 0));
    if (r.contains("colors_used")) colors.push_back(r["colors_used"].get<int>());
  }
  json agg;
  agg["pass"] = pass;
  agg["total"] = static_cast<int>(per_seed.size());
  agg["max_dep_component"] = max_comp;
  if (!colors.empty()) {
    agg["max_colors_used"] = *std::max_element(colors.begin(), colors.end());
    std::sort(colors.begin(), colors.end());
    agg["median_colors_used"] = colors[colors.size() / 2];
  }
  rep["results"]["aggregate"] = agg;
  rep["timing"]["total_ms"] = total_ms;
  rep["timing"]["per_seed_ms"] = seed_ms;
  return rep;
}

json run_solver_seed(const json& config, uint64_t seed) {
  const json params = config.value("params", json::object());
  const std::string problem = config.at("problem").get<std::string>();
  const Graph g = graph_from_config(config.at("graph"));
  const int retries = params.value("retries", 5);
  json rec;
  rec["seed"] = seed;
  for (int attempt = 0; attempt < retries; ++attempt) {
    Rng rng(mix_seed(seed, 0x50171e, attempt));
    try {
      if (problem == "sinkless") {
        const auto si = problems::sinkless_orientation_lll(g);
        const auto post = post_solver_from_config(params);
        const auto r = solve_disjoint(si.inst, post, rng);
        const auto out = problems::orientation_out_degrees(g, si, r.assignment);
        const int min_out = *std::min_element(out.begin(), out.end());
        rec["ok"] = min_out >= 1;
        rec["min_out_degree"] = min_out;
        rec["trace"] = trace_to_json(r.trace);
      } else if (problem == "degree-bounded") {
        const int k = params.value("k", 16);
        const auto db = problems::degree_bounded_lll(g, k);
        const auto post = post_solver_from_config(params);
        const auto r = solve_binary_lowrisk(db.inst, post, rng);
        const auto s = problems::black_nodes(r.assignment, g.n);
        std::vector<char> in_s(g.n, 0);
        for (int v : s) in_s[v] = 1;
        bool ok = true;
        int worst_low = g.n, worst_high = 0;
        for (int v = 0; v < g.n; ++v) {
          int d = 0;
          for (int w : g.adj[v]) d += in_s[w];
          worst_low = std::min(worst_low, d);
          worst_high = std::max(worst_high, d);
          if (3 * d < k || d > 4 * k) ok = false;
        }
        rec["ok"] = ok;
        rec["min_s_degree"] = worst_low;
        rec["max_s_degree"] = worst_high;
        rec["sample_size"] = static_cast<int>(s.size());
        rec["trace"] = trace_to_json(r.trace);
      } else if (problem == "dss") {
        problems::DssParams dp;
        dp.alpha = params.value("alpha", 0.25);
        dp.mu_override = params.value("mu", 0.0);
        std::vector<int> x_set, y_set;
        for (int v = 0; v < g.n; ++v) {
          x_set.push_back(v);
          y_set.push_back(v);
        }
        const auto post = post_solver_from_config(params);
        const auto out = problems::dss_sample(g, x_set, y_set, dp, post, rng);
        rec["ok"] = true;  // dss_sample rescans internally and throws on violation
        rec["sample_size"] = static_cast<int>(out.s.size());
        rec["mu"] = out.mu;
        rec["mu_formula"] = out.mu_formula;
        rec["trace"] = trace_to_json(out.trace);
      } else if (problem == "splitting") {
        const std::string kind_s = params.value("split_kind", "vertex-subset");
        problems::SplitKind kind = problems::SplitKind::vertex_subset;
        if (kind_s == "sparsity") kind = problems::SplitKind::sparsity;
        else if (kind_s == "density") kind = problems::SplitKind::density;
        else if (kind_s == "matching") kind = problems::SplitKind::matching;
        else if (kind_s != "vertex-subset") throw Error("schema", "unknown split kind");
        std::vector<int> t_set(g.n);
        std::iota(t_set.begin(), t_set.end(), 0);
        const auto si = problems::build_splitting_lll(kind, g, t_set,
                                                      params.value("min_stat", 8));
        const auto post = post_solver_from_config(params);
        const auto r = solve_binary_lowrisk(si.inst, post, rng);
        const auto scan = problems::scan_split(si, g, r.assignment);
        rec["ok"] = scan.ok;
        rec["scan_detail"] = scan.detail;
        rec["trace"] = trace_to_json(r.trace);
      } else {
        throw Error("schema", "unknown problem " + problem);
      }
      rec["attempts"] = attempt + 1;
      return rec;
    } catch (const Error& e) {
      rec["error"] = e.what();
      rec["attempts"] = attempt + 1;
      if (std::string(e.code()) == "schema" || std::string(e.code()) == "precondition") throw;
    }
  }
  rec["ok"] = false;
  return rec;
}

json run_pipeline_seed(const json& config, uint64_t seed) {
  const json params = config.value("params", json::object());
  const std::string pipeline = config.at("pipeline").get<std::string>();
  const Graph g = graph_from_config(config.at("graph"));
  PipelineOverrides ov;
  ov.gamma = params.value("gamma", 0.0);
  ov.x = params.value("x", 0);
  ov.mu = params.value("mu", 0.0);
  ov.classes = params.value("classes", 0);
  ov.slack_rounds = params.value("slack_rounds", 8);
  ov.activation = params.value("activation", 0.5);
  ov.eps = params.value("eps", 0.5);
  ov.stage_retries = params.value("stage_retries", 5);

  json rec;
  rec["seed"] = seed;
  Rng rng(mix_seed(seed, 0x9199));
  try {
    const problems::PipelineResult res =
        pipeline == "sparse" ? problems::color_sparse(g, params.value("eps", 0.5), ov, rng)
        : pipeline == "triangle-free"
            ? problems::color_triangle_free(g, ov, rng)
            : throw Error("schema", "unknown pipeline " + pipeline);
    rec["ok"] = res.proper;
    rec["colors_used"] = res.colors_used;
    json stages = json::array();
    for (const auto& s : res.stages)
      stages.push_back({{"stage", s.stage},
                        {"attempt", s.attempt},
                        {"ok", s.ok},
                        {"formula_value", s.formula_value},
                        {"used_value", s.used_value},
                        {"note", s.note}});
    rec["stages"] = stages;
    json colors = json::array();
    for (int c : res.state.color) colors.push_back(c);
    rec["coloring"] = colors;
  } catch (const Error& e) {
    rec["ok"] = false;
    rec["error"] = e.what();
  }
  return rec;
}

json run_tail_seed(const json& config, uint64_t seed) {
  const json params = config.value("params", json::object());
  const Graph g = graph_from_config(config.at("graph"));
  const double p = params.at("p").get<double>();
  const long trials = params.value("trials", 100000L);
  Rng rng(mix_seed(seed, 0x7a11));
  const auto check = oracle::verify_nonedge_tail(g, p, trials, rng);
  json rec;
  rec["seed"] = seed;
  rec["ok"] = check.pass;
  rec["empirical"] = check.empirical;
  rec["bound"] = check.bound;
  rec["stderr3"] = check.stderr_3;
  rec["non_edges"] = check.non_edges;
  return rec;
}

json run_one_seed(const json& config, uint64_t seed) {
  const std::string kind = config.at("kind").get<std::string>();
  if (kind == "solver-run") return run_solver_seed(config, seed);
  if (kind == "pipeline") return run_pipeline_seed(config, seed);
  if (kind == "tail-bound") return run_tail_seed(config, seed);
  if (kind == "oracle-suite") {
    json rec = oracle_suite(config.value("params", json::object()).value("budget", 1), seed);
    rec["seed"] = seed;
    return rec;
  }
  throw Error("schema", "unknown experiment kind " + kind);
}

}  // namespace

Graph graph_from_config(const json& gconf) {
  check_fields(gconf, {"family", "n", "degree", "edge_prob", "epsilon", "seed", "path"}, "graph");
  if (gconf.contains("path")) return load_edge_list_file(gconf["path"].get<std::string>());
  GraphGenSpec spec;
  spec.family = family_from_string(gconf.at("family").get<std::string>());
  spec.n = gconf.at("n").get<int>();
  spec.degree = gconf.value("degree", 0);
  spec.edge_prob = gconf.value("edge_prob", 0.0);
  spec.epsilon = gconf.value("epsilon", 0.5);
  spec.seed = gconf.value("seed", 0ULL);
  return generate(spec);
}

json run(const json& config) {
  check_fields(config,
               {"schema", "kind", "seeds", "graph", "problem", "pipeline", "params", "output",
                "csv"},
               "config");
  std::vector<uint64_t> seeds;
  if (config.contains("seeds"))
    for (const auto& s : config["seeds"]) seeds.push_back(s.get<uint64_t>());
  if (seeds.empty()) seeds.push_back(0);

  const double t0 = now_ms();
  std::vector<json> per_seed(seeds.size());
  std::vector<double> seed_ms(seeds.size(), 0);

  int threads = 1;
  if (const char* env = std::getenv("LLL_THREADS")) threads = std::max(1, std::atoi(env));
  threads = std::min<int>(threads, static_cast<int>(seeds.size()));

  std::exception_ptr first_error;
  auto worker = [&](int tid) {
    for (size_t i = tid; i < seeds.size(); i += threads) {
      const double s0 = now_ms();
      try {
        per_seed[i] = run_one_seed(config, seeds[i]);
      } catch (...) {
        if (!first_error) first_error = std::current_exception();
        return;
      }
      seed_ms[i] = now_ms() - s0;
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  json report = aggregate_reports(config, per_seed, seed_ms, now_ms() - t0);

  if (config.contains("output")) {
    std::ofstream out(config["output"].get<std::string>());
    if (!out) throw Error("io", "cannot write report");
    out << report.dump(2) << "\n";
  }
  if (config.contains("csv")) {
    std::ofstream csv(config["csv"].get<std::string>());
    if (!csv) throw Error("io", "cannot write csv");
    csv << "seed,node,value\n";
    for (const auto& r : per_seed) {
      if (!r.contains("coloring")) continue;
      const auto& colors = r["coloring"];
      for (size_t v = 0; v < colors.size(); ++v)
        csv << r["seed"].get<uint64_t>() << "," << v << "," << colors[v].get<int>() << "\n";
    }
  }
  return report;
}

json validate_output(const std::string& kind, const std::string& graph_path,
                     const std::string& artifact_path) {
  const Graph g = load_edge_list_file(graph_path);
  std::ifstream in(artifact_path);
  if (!in) throw Error("io", "cannot open " + artifact_path);
  json artifact;
  try {
    in >> artifact;
  } catch (const std::exception& e) {
    throw Error("parse", std::string("artifact: ") + e.what());
  }
  json out;
  out["kind"] = kind;
  if (kind == "coloring") {
    std::vector<int> colors(g.n, 0);
    const auto& jc = artifact.at("coloring");
    for (int v = 0; v < g.n && v < static_cast<int>(jc.size()); ++v) colors[v] = jc[v].get<int>();
    const auto bad = problems::improper_edge(g, colors);
    out["pass"] = !bad.has_value();
    if (bad) out["improper_edge"] = {bad->first, bad->second};
    out["colors_used"] = problems::count_colors_used(colors);
    if (artifact.contains("max_colors"))
      out["pass"] = out["pass"].get<bool>() &&
                    problems::count_colors_used(colors) <= artifact["max_colors"].get<int>();
  } else if (kind == "orientation") {
    std::vector<int> outdeg(g.n, 0);
    for (const auto& e : artifact.at("edges")) {
      const int u = e.at(0).get<int>(), v = e.at(1).get<int>();
      const std::string dir = e.at(2).get<std::string>();
      if (!g.has_edge(u, v)) throw Error("parse", "edge not in graph");
      ++outdeg[dir == "uv" ? u : v];
    }
    int mn = g.n ? outdeg[0] : 0;
    for (int v = 0; v < g.n; ++v) mn = std::min(mn, outdeg[v]);
    out["pass"] = mn >= 1;
    out["min_out_degree"] = mn;
  } else if (kind == "dss") {
    std::vector<int> s;
    for (const auto& v : artifact.at("s")) s.push_back(v.get<int>());
    const double mu = artifact.at("mu").get<double>();
    const double alpha = artifact.at("alpha").get<double>();
    bool pass = true;
    json offenders = json::array();
    for (const auto& vj : artifact.at("x")) {
      const int v = vj.get<int>();
      std::vector<int> sv;
      std::vector<char> in_s(g.n, 0);
      for (int w : s) in_s[w] = 1;
      for (int w : g.adj[v])
        if (in_s[w]) sv.push_back(w);
      const bool deg_ok = static_cast<double>(sv.size()) <= 4 * mu;
      const bool ne_ok =
          static_cast<double>(non_edges_in_set(g, v, sv)) >= alpha * mu * mu / 2;
      if (!deg_ok || !ne_ok) {
        pass = false;
        offenders.push_back(v);
      }
    }
    out["pass"] = pass;
    out["offenders"] = offenders;
  } else {
    throw Error("schema", "unknown artifact kind " + kind);
  }
  return out;
}

json oracle_suite(int budget, uint64_t seed) {
  using namespace oracle;
  json out;
  int pass = 0, total = 0;
  auto tally = [&](const Check& c, const std::string& name, json& bucket) {
    ++total;
    if (c.pass)
      ++pass;
    else
      bucket.push_back(name + ": " + c.detail);
  };
  json failures = json::array();

  Rng rng(mix_seed(seed, 0x04ac1e));
  const int n_cases = 40 * budget;
  for (int i = 0; i < n_cases; ++i) {
    Rng case_rng = rng.stream(1, i);
    const int n = 4 + static_cast<int>(case_rng.below(7));
    Universe u = random_universe(n, case_rng);
    TableEvent e = random_increasing_event(u, case_rng);
    tally(verify_no_risk_lemma(u, e), "no-risk case " + std::to_string(i), failures);
  }
  for (int i = 0; i < 10 * budget; ++i) {
    Rng case_rng = rng.stream(2, i);
    const int n = 4 + static_cast<int>(case_rng.below(7));
    Universe u = random_universe(n, case_rng);
    const long long x = 1 + static_cast<long long>(case_rng.below(n));
    tally(verify_sum_threshold(u, x), "sum-threshold case " + std::to_string(i), failures);
  }
  for (int i = 0; i < 10 * budget; ++i) {
    Rng case_rng = rng.stream(3, i);
    const int n = 4 + static_cast<int>(case_rng.below(5));
    Universe u = random_universe(n, case_rng);
    TableEvent e1 = random_increasing_event(u, case_rng);
    TableEvent e2 = random_increasing_event(u, case_rng);
    tally(verify_union_risk(u, e1, e1, e2, e2), "union case " + std::to_string(i), failures);
  }
  for (int i = 0; i < 6 * budget; ++i) {
    Rng case_rng = rng.stream(4, i);
    const int n = 4 + static_cast<int>(case_rng.below(4));
    Universe u = random_universe(n, case_rng);
    TableEvent e = random_increasing_event(u, case_rng);
    for (int j = 1; j <= 6; ++j) {
      tally(verify_danger_lemma(u, e, Dyadic(1, j)),
            "danger case " + std::to_string(i) + " q=2^-" + std::to_string(j), failures);
      tally(verify_fragility_risk(u, e, Dyadic(1, j)),
            "fragility case " + std::to_string(i) + " q=2^-" + std::to_string(j), failures);
    }
  }

  out["pass"] = pass;
  out["total"] = total;
  out["ok"] = pass == total;
  out["failures"] = failures;
  return out;
}

json strip_timing(json report) {
  report.erase("timing");
  return report;
}

}  // namespace lll::experiment

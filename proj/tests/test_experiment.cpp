#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "lll/experiment.hpp"
#include "lll/problems.hpp"

using namespace lll;
using nlohmann::json;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/lll_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& content) const {
    std::ofstream out(path);
    out << content;
  }
};

}  // namespace

TEST_CASE("config schema is strict") {
  json config;
  config["kind"] = "solver-run";
  config["problem"] = "sinkless";
  config["graph"] = {{"family", "random-regular"}, {"n", 50}, {"degree", 4}, {"seed", 1}};
  config["unknown_field"] = 1;
  CHECK_THROWS_WITH_AS(experiment::run(config), doctest::Contains("unknown_field"), Error);
}

TEST_CASE("oracle suite defaults to one seed and passes") {
  json config;
  config["kind"] = "oracle-suite";
  const json rep = experiment::run(config);
  CHECK(rep["results"]["seeds"].size() == 1);
  CHECK(rep["results"]["aggregate"]["pass"] == rep["results"]["aggregate"]["total"]);
}

TEST_CASE("solver-run produces per-seed validity records") {
  json config;
  config["kind"] = "solver-run";
  config["problem"] = "sinkless";
  config["graph"] = {{"family", "random-regular"}, {"n", 300}, {"degree", 8}, {"seed", 3}};
  config["seeds"] = {1, 2, 3};
  const json rep = experiment::run(config);
  CHECK(rep["results"]["seeds"].size() == 3);
  for (const auto& r : rep["results"]["seeds"]) {
    CHECK(r["ok"] == true);
    CHECK(r["min_out_degree"] >= 1);
  }
  CHECK(rep["results"]["aggregate"]["pass"] == 3);
}

TEST_CASE("reports are reproducible modulo timing") {
  json config;
  config["kind"] = "solver-run";
  config["problem"] = "degree-bounded";
  config["graph"] = {{"family", "random-regular"}, {"n", 200}, {"degree", 24}, {"seed", 5}};
  config["params"] = {{"k", 4}};
  config["seeds"] = {7, 8};
  const json a = experiment::strip_timing(experiment::run(config));
  const json b = experiment::strip_timing(experiment::run(config));
  CHECK(a == b);
  CHECK(a.dump() == b.dump());
}

TEST_CASE("validator: colorings") {
  GraphGenSpec spec;
  spec.family = GraphGenSpec::Family::random_regular;
  spec.n = 40;
  spec.degree = 4;
  spec.seed = 2;
  const Graph g = generate(spec);
  TempFile gf("graph.txt");
  {
    std::ofstream out(gf.path);
    save_edge_list(g, out);
  }
  problems::ColoringState st = problems::ColoringState::with_full_palettes(g, 5);
  Rng rng(1);
  problems::greedy_d1lc(g, st, rng);

  SUBCASE("a proper coloring passes") {
    TempFile af("coloring.json");
    json artifact;
    artifact["coloring"] = st.color;
    af.write(artifact.dump());
    const json out = experiment::validate_output("coloring", gf.path, af.path);
    CHECK(out["pass"] == true);
  }
  SUBCASE("a monochromatic edge is named") {
    auto colors = st.color;
    colors[g.adj[0][0]] = colors[0];  // break one edge
    TempFile af("bad_coloring.json");
    json artifact;
    artifact["coloring"] = colors;
    af.write(artifact.dump());
    const json out = experiment::validate_output("coloring", gf.path, af.path);
    CHECK(out["pass"] == false);
    CHECK(out.contains("improper_edge"));
  }
  SUBCASE("parse failures are structured") {
    TempFile af("broken.json");
    af.write("{not json");
    CHECK_THROWS_WITH_AS(experiment::validate_output("coloring", gf.path, af.path),
                         doctest::Contains("artifact"), Error);
  }
}

TEST_CASE("validator: orientations") {
  const Graph g = Graph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  TempFile gf("tri.txt");
  {
    std::ofstream out(gf.path);
    save_edge_list(g, out);
  }
  json good;
  good["edges"] = {{0, 1, "uv"}, {1, 2, "uv"}, {0, 2, "vu"}};  // a 3-cycle orientation
  TempFile af("orient.json");
  af.write(good.dump());
  const json rep = experiment::validate_output("orientation", gf.path, af.path);
  CHECK(rep["pass"] == true);

  json bad;
  bad["edges"] = {{0, 1, "uv"}, {1, 2, "vu"}, {0, 2, "uv"}};  // node 2 has no out-edge
  TempFile bf("orient_bad.json");
  bf.write(bad.dump());
  const json rep2 = experiment::validate_output("orientation", gf.path, bf.path);
  CHECK(rep2["pass"] == false);
}

TEST_CASE("validator: dss artifacts re-run the guarantee scan") {
  GraphGenSpec spec;
  spec.family = GraphGenSpec::Family::random_bipartite_regular;
  spec.n = 120;
  spec.degree = 16;
  spec.seed = 6;
  const Graph g = generate(spec);
  TempFile gf("dss_graph.txt");
  {
    std::ofstream out(gf.path);
    save_edge_list(g, out);
  }
  problems::DssParams dp;
  dp.alpha = 0.25;
  dp.mu_override = 8;
  std::vector<int> x, y;
  for (int v = 0; v < g.n; ++v) {
    x.push_back(v);
    y.push_back(v);
  }
  Rng rng(2);
  const auto out = problems::dss_sample(g, x, y, dp, make_decomposed_post_solver(), rng);
  TempFile af("dss.json");
  json artifact;
  artifact["s"] = out.s;
  artifact["x"] = x;
  artifact["mu"] = out.mu;
  artifact["alpha"] = dp.alpha;
  af.write(artifact.dump());
  const json rep = experiment::validate_output("dss", gf.path, af.path);
  CHECK(rep["pass"] == true);

  // an empty sample cannot meet the non-edge guarantee
  json bad = artifact;
  bad["s"] = std::vector<int>{};
  TempFile bf("dss_bad.json");
  bf.write(bad.dump());
  const json rep2 = experiment::validate_output("dss", gf.path, bf.path);
  CHECK(rep2["pass"] == false);
}

TEST_CASE("pipeline runs report stages and a coloring") {
  json config;
  config["kind"] = "pipeline";
  config["pipeline"] = "triangle-free";
  config["graph"] = {{"family", "random-bipartite-regular"}, {"n", 400}, {"degree", 24},
                     {"seed", 8}};
  config["params"] = {{"gamma", 0.9}, {"classes", 2}, {"slack_rounds", 10}};
  config["seeds"] = {1};
  const json rep = experiment::run(config);
  const auto& r = rep["results"]["seeds"][0];
  CHECK(r["ok"] == true);
  CHECK(r["colors_used"].get<int>() <= static_cast<int>(0.9 * 24));
  CHECK(!r["stages"].empty());
  bool has_formula_pair = false;
  for (const auto& s : r["stages"])
    if (s.contains("formula_value") && s["formula_value"] != s["used_value"]) has_formula_pair = true;
  CHECK(has_formula_pair);  // the formula-vs-override pair is in the report
}

TEST_CASE("tail-bound runs") {
  json config;
  config["kind"] = "tail-bound";
  config["graph"] = {{"family", "erdos-renyi"}, {"n", 20}, {"edge_prob", 0.0}, {"seed", 1}};
  config["params"] = {{"p", 0.5}, {"trials", 20000}};
  config["seeds"] = {1, 2};
  const json rep = experiment::run(config);
  for (const auto& r : rep["results"]["seeds"]) CHECK(r["ok"] == true);
}

TEST_CASE("csv output is written when requested") {
  TempFile csv("out.csv");
  json config;
  config["kind"] = "pipeline";
  config["pipeline"] = "triangle-free";
  config["graph"] = {{"family", "random-bipartite-regular"}, {"n", 200}, {"degree", 16},
                     {"seed", 9}};
  config["params"] = {{"gamma", 0.95}, {"classes", 2}, {"slack_rounds", 8}};
  config["seeds"] = {1};
  config["csv"] = csv.path;
  experiment::run(config);
  std::ifstream in(csv.path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "seed,node,value");
  std::string row;
  CHECK(static_cast<bool>(std::getline(in, row)));
}

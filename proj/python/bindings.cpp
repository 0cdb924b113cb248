#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "lll/experiment.hpp"
#include "lll/graph.hpp"
#include "lll/problems.hpp"
#include "lll/resample.hpp"
#include "lll/risk.hpp"
#include "lll/shatter.hpp"

namespace py = pybind11;
using namespace lll;

namespace {

Graph graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  return Graph::from_edges(n, edges);
}

Graph generate_graph(const std::string& family, int n, int degree, double edge_prob,
                     double epsilon, uint64_t seed) {
  GraphGenSpec spec;
  if (family == "random-regular")
    spec.family = GraphGenSpec::Family::random_regular;
  else if (family == "random-bipartite-regular")
    spec.family = GraphGenSpec::Family::random_bipartite_regular;
  else if (family == "erdos-renyi")
    spec.family = GraphGenSpec::Family::erdos_renyi;
  else if (family == "sparse-neighborhood")
    spec.family = GraphGenSpec::Family::sparse_neighborhood;
  else
    throw Error("schema", "unknown family " + family);
  spec.n = n;
  spec.degree = degree;
  spec.edge_prob = edge_prob;
  spec.epsilon = epsilon;
  spec.seed = seed;
  return generate(spec);
}

py::dict run_config(const std::string& config_json) {
  const nlohmann::json report = experiment::run(nlohmann::json::parse(config_json));
  py::module json_mod = py::module::import("json");
  return json_mod.attr("loads")(report.dump());
}

std::vector<int> solve_sinkless(const Graph& g, uint64_t seed) {
  const auto si = problems::sinkless_orientation_lll(g);
  Rng rng(seed);
  const auto r = solve_disjoint(si.inst, make_decomposed_post_solver(), rng);
  return problems::orientation_out_degrees(g, si, r.assignment);
}

std::vector<int> solve_degree_bounded(const Graph& g, int k, uint64_t seed) {
  const auto db = problems::degree_bounded_lll(g, k);
  Rng rng(seed);
  const auto r = solve_binary_lowrisk(db.inst, make_decomposed_post_solver(), rng);
  return problems::black_nodes(r.assignment, g.n);
}

std::vector<int> color_triangle_free_py(const Graph& g, double gamma, int classes,
                                        int slack_rounds, uint64_t seed) {
  problems::PipelineOverrides ov;
  ov.gamma = gamma;
  ov.classes = classes;
  ov.slack_rounds = slack_rounds;
  Rng rng(seed);
  return problems::color_triangle_free(g, ov, rng).state.color;
}

py::tuple no_risk_case(int n, uint64_t seed) {
  Rng rng(seed);
  oracle::Universe u = oracle::random_universe(n, rng);
  oracle::TableEvent e = oracle::random_increasing_event(u, rng);
  const auto check = oracle::verify_no_risk_lemma(u, e);
  const auto risk = oracle::testified_risk(u, e, e);
  return py::make_tuple(check.pass, risk.risk.to_double());
}

}  // namespace

PYBIND11_MODULE(pylll, m) {
  m.doc() = "Constructive LLL solvers, risk oracle, and coloring pipelines";

  py::class_<Graph>(m, "Graph")
      .def_readonly("n", &Graph::n)
      .def_readonly("max_degree", &Graph::max_degree)
      .def("degree", &Graph::degree)
      .def("has_edge", &Graph::has_edge)
      .def("edge_count", &Graph::edge_count)
      .def("neighbors", [](const Graph& g, int v) { return g.adj[v]; });

  m.def("graph_from_edges", &graph_from_edges, py::arg("n"), py::arg("edges"));
  m.def("generate_graph", &generate_graph, py::arg("family"), py::arg("n"),
        py::arg("degree") = 0, py::arg("edge_prob") = 0.0, py::arg("epsilon") = 0.5,
        py::arg("seed") = 0);
  m.def("non_edges_in_set", &non_edges_in_set);
  m.def("local_sparsity",
        [](const Graph& g, int v) { return local_sparsity(g, v).value(); });
  m.def("find_triangle", &find_triangle);

  m.def("solve_sinkless_out_degrees", &solve_sinkless, py::arg("graph"), py::arg("seed") = 1);
  m.def("solve_degree_bounded_sample", &solve_degree_bounded, py::arg("graph"), py::arg("k"),
        py::arg("seed") = 1);
  m.def("color_triangle_free", &color_triangle_free_py, py::arg("graph"),
        py::arg("gamma") = 0.9, py::arg("classes") = 2, py::arg("slack_rounds") = 12,
        py::arg("seed") = 1);
  m.def("no_risk_case", &no_risk_case, py::arg("n") = 8, py::arg("seed") = 0);
  m.def("run_config", &run_config, py::arg("config_json"));
}

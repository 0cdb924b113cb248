#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "lll/core.hpp"
#include "lll/risk.hpp"

using namespace lll;

namespace {

// instance over n fair binary variables, all hosted on node `host`
LLLInstance fair_instance(int n, Graph comm, std::vector<int> hosts = {}) {
  LLLInstance inst;
  inst.comm_graph = std::move(comm);
  for (int i = 0; i < n; ++i) {
    VariableSpec v;
    v.dist = Distribution::fair_binary();
    v.host = hosts.empty() ? 0 : hosts[i];
    inst.variables.push_back(v);
  }
  return inst;
}

Graph path_graph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph::from_edges(n, edges);
}

}  // namespace

TEST_CASE("dependency graph from shared variables") {
  LLLInstance inst = fair_instance(6, path_graph(1));
  inst.events.push_back(count_event({0, 1}, kBlack, '>', 0, "a"));
  inst.events.push_back(count_event({2, 3}, kBlack, '>', 0, "b"));
  inst.events.push_back(count_event({4, 5}, kBlack, '>', 0, "c"));
  SUBCASE("pairwise disjoint events give an edgeless graph") {
    const DependencyGraph dep = build_dependency_graph(inst);
    CHECK(dep.max_degree == 0);
    CHECK(dep.event_degree == 2);
    CHECK(dep.variable_degree == 1);
  }
  SUBCASE("one shared variable gives one edge") {
    inst.events.push_back(count_event({5, 0}, kBlack, '>', 0, "d"));
    const DependencyGraph dep = build_dependency_graph(inst);
    CHECK(dep.adj[3] == std::vector<int>{0, 2});
    CHECK(dep.max_degree == 2);
  }
}

TEST_CASE("sampling: point masses, empty sets, frequencies") {
  LLLInstance inst = fair_instance(3, path_graph(1));
  inst.variables[0].dist = Distribution::point_mass(2, 1);
  Rng rng(7);
  SUBCASE("point mass forces the value") {
    const auto phi = sample_all(inst, {0}, rng);
    CHECK(phi.values[0] == 1);
    CHECK(phi.values[1] == kUnset);
  }
  SUBCASE("empty subset leaves everything unset") {
    const auto phi = sample_all(inst, {}, rng);
    CHECK(phi.unset_count() == 3);
  }
  SUBCASE("empirical frequency of a 0.3 coin") {
    LLLInstance biased = fair_instance(1, path_graph(1));
    biased.variables[0].dist = Distribution::bernoulli_black(0.3);
    long blacks = 0;
    const long trials = 100000;
    for (long t = 0; t < trials; ++t)
      if (sample_all(biased, {0}, rng).values[0] == kBlack) ++blacks;
    CHECK(std::fabs(blacks / static_cast<double>(trials) - 0.3) < 0.01);
  }
}

TEST_CASE("evaluate requires all variables set") {
  LLLInstance inst = fair_instance(1, path_graph(1));
  const EventSpec e = count_event({0}, kBlack, '>', 0, "ge1black");
  PartialAssignment phi(1);
  CHECK_THROWS_WITH_AS(evaluate(e, phi), doctest::Contains("unset"), Error);
  phi.values[0] = kBlack;
  CHECK(evaluate(e, phi));
  phi.values[0] = kWhite;
  CHECK(!evaluate(e, phi));
}

TEST_CASE("strict threshold events are false at the boundary") {
  LLLInstance inst = fair_instance(8, path_graph(1));
  const EventSpec e = count_event({0, 1, 2, 3, 4, 5, 6, 7}, kBlack, '>', 4, "gt4");
  PartialAssignment phi(8);
  for (int i = 0; i < 8; ++i) phi.values[i] = i < 4 ? kBlack : kWhite;
  CHECK(!evaluate(e, phi));  // exactly 4 black
  phi.values[4] = kBlack;
  CHECK(evaluate(e, phi));
}

TEST_CASE("exact conditional probabilities") {
  LLLInstance inst = fair_instance(2, path_graph(1));
  EventSpec both = count_event({0, 1}, kBlack, '>', 1, "both");
  PartialAssignment none(2);
  CHECK(conditional_prob(inst, both, none, ProbMode::exact).value == 0.25);
  PartialAssignment one(2);
  one.values[0] = kBlack;
  CHECK(conditional_prob(inst, both, one, ProbMode::exact).value == 0.5);

  SUBCASE("matches an independent enumeration for a non-dyadic sampler") {
    // 12 neighbors sampled with probability 1/6; event: more than 8 sampled;
    // 4 variables pinned black
    LLLInstance big = fair_instance(12, path_graph(1));
    for (auto& v : big.variables) v.dist = Distribution::bernoulli_black(1.0 / 6);
    std::vector<int> vbl(12);
    for (int i = 0; i < 12; ++i) vbl[i] = i;
    const EventSpec emax = count_event(vbl, kBlack, '>', 8, "emax");
    PartialAssignment psi(12);
    for (int i = 0; i < 4; ++i) psi.values[i] = kBlack;
    // brute force over the 2^8 completions
    double expect = 0;
    for (int mask = 0; mask < 256; ++mask) {
      int blacks = 4;
      double w = 1;
      for (int i = 0; i < 8; ++i) {
        if (mask & (1 << i)) {
          ++blacks;
          w *= 1.0 / 6;
        } else {
          w *= 5.0 / 6;
        }
      }
      if (blacks > 8) expect += w;
    }
    const auto got = conditional_prob(big, emax, psi, ProbMode::exact);
    CHECK(got.exact);
    CHECK(std::fabs(got.value - expect) < 1e-12);
  }

  SUBCASE("exact dyadic path agrees with the oracle bit for bit") {
    LLLInstance small = fair_instance(10, path_graph(1));
    std::vector<int> vbl(10);
    for (int i = 0; i < 10; ++i) vbl[i] = i;
    const EventSpec e = count_event(vbl, kBlack, '<', 4, "lt4");
    PartialAssignment none10(10);
    const double solver = conditional_prob(small, e, none10, ProbMode::exact).value;
    const oracle::Universe u = oracle::universe_from_instance(small);
    const double exact = oracle::probability(u, oracle::tabulate_event(u, e)).to_double();
    CHECK(solver == exact);
  }

  SUBCASE("enumeration bound produces a structured error") {
    LLLInstance big = fair_instance(30, path_graph(1));
    std::vector<int> vbl(30);
    for (int i = 0; i < 30; ++i) vbl[i] = i;
    const EventSpec e = count_event(vbl, kBlack, '>', 20, "big");
    PartialAssignment none30(30);
    CHECK_THROWS_WITH_AS(conditional_prob(big, e, none30, ProbMode::exact),
                         doctest::Contains("monte-carlo"), Error);
    const auto mc = conditional_prob(big, e, none30, ProbMode::monte_carlo, 5000, 1);
    CHECK(!mc.exact);
    CHECK(mc.trials == 5000);
  }
}

TEST_CASE("merge semantics") {
  PartialAssignment a(3), b(3), empty(3);
  a.values[0] = kBlack;
  b.values[1] = kWhite;
  SUBCASE("merging with all-unset is the identity") {
    CHECK(merge(a, empty).values == a.values);
    CHECK(merge(empty, a).values == a.values);
  }
  SUBCASE("disjoint supports unite") {
    const auto m = merge(a, b);
    CHECK(m.values[0] == kBlack);
    CHECK(m.values[1] == kWhite);
    CHECK(m.values[2] == kUnset);
  }
  SUBCASE("double assignment is a conflict naming the variable") {
    PartialAssignment c(3);
    c.values[0] = kBlack;  // same value still conflicts
    CHECK_THROWS_WITH_AS(merge(a, c), doctest::Contains("0"), Error);
  }
}

TEST_CASE("locality and the dependent-host distance bound") {
  SUBCASE("co-hosted instance has locality zero") {
    LLLInstance inst = fair_instance(4, path_graph(3));
    inst.events.push_back(count_event({0, 1, 2, 3}, kBlack, '>', 2, "e"));
    CHECK(compute_locality(inst) == 0);
  }
  SUBCASE("event at a node with variables at its neighbors has locality one") {
    const Graph p = path_graph(5);
    LLLInstance inst = fair_instance(5, p, {0, 1, 2, 3, 4});
    EventSpec e = count_event({1, 3}, kBlack, '>', 1, "mid");
    e.host = 2;
    inst.events.push_back(e);
    CHECK(compute_locality(inst) == 1);
  }
  SUBCASE("dependent events sit within twice the locality") {
    // star communication graph, one event per leaf over {leaf, center-var}
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i <= 5; ++i) edges.push_back({0, i});
    const Graph star = Graph::from_edges(6, edges);
    LLLInstance inst = fair_instance(6, star, {0, 1, 2, 3, 4, 5});
    for (int i = 1; i <= 5; ++i) {
      EventSpec e = count_event({0, i}, kBlack, '>', 1, "leaf" + std::to_string(i));
      e.host = i;
      inst.events.push_back(e);
    }
    const int nu = compute_locality(inst);
    CHECK(nu == 1);
    const DependencyGraph dep = build_dependency_graph(inst);
    for (size_t e1 = 0; e1 < dep.adj.size(); ++e1) {
      const auto dist = star.bfs_distances(inst.events[e1].host);
      for (int e2 : dep.adj[e1]) CHECK(dist[inst.events[e2].host] <= 2 * nu);
    }
  }
  SUBCASE("unreachable hosts are an error") {
    const Graph two = Graph::from_edges(3, {{0, 1}});  // node 2 isolated
    LLLInstance inst = fair_instance(3, two, {0, 1, 2});
    EventSpec e = count_event({2}, kBlack, '>', 0, "far");
    e.host = 0;
    inst.events.push_back(e);
    CHECK_THROWS_AS(compute_locality(inst), Error);
  }
}

TEST_CASE("declared monotonicity tags verified by the oracle") {
  LLLInstance inst = fair_instance(6, path_graph(1));
  std::vector<int> vbl{0, 1, 2, 3, 4, 5};
  EventSpec inc = count_event(vbl, kBlack, '<', 3, "few");
  inc.mono = Monotonicity::increasing;
  EventSpec dec = count_event(vbl, kBlack, '>', 3, "many");
  dec.mono = Monotonicity::decreasing;
  const auto u = oracle::universe_from_instance(inst);
  CHECK(!oracle::check_monotone(u, oracle::tabulate_event(u, inc), inc.mono));
  CHECK(!oracle::check_monotone(u, oracle::tabulate_event(u, dec), dec.mono));
  EventSpec wrong = count_event(vbl, kBlack, '=', 1, "exactly1");
  wrong.mono = Monotonicity::increasing;
  CHECK(oracle::check_monotone(u, oracle::tabulate_event(u, wrong), wrong.mono).has_value());
}

TEST_CASE("instance parameters and debug dump") {
  const Graph p = path_graph(4);
  LLLInstance inst = fair_instance(4, p, {0, 1, 2, 3});
  EventSpec e1 = count_event({0, 1}, kBlack, '>', 1, "e1");
  e1.host = 0;
  EventSpec e2 = count_event({1, 2, 3}, kBlack, '>', 2, "e2");
  e2.host = 2;
  inst.events.push_back(e1);
  inst.events.push_back(e2);
  inst.declared_p = 0.25;
  const InstanceParams params = compute_params(inst);
  CHECK(params.d == 1);
  CHECK(params.d_e == 3);
  CHECK(params.d_v == 2);
  CHECK(params.nu == 1);
  CHECK(params.load == 2);
  // d >= d_V - 1 always
  CHECK(params.d >= params.d_v - 1);

  const auto dump = nlohmann::json::parse(instance_debug_dump(inst));
  CHECK(dump["variables"].size() == 4);
  CHECK(dump["events"].size() == 2);
  CHECK(dump["parameters"]["nu"] == 1);
  CHECK(dump["parameters"]["p"] == 0.25);
}

TEST_CASE("per-component ids are unique within components") {
  LLLInstance inst = fair_instance(6, path_graph(1));
  inst.events.push_back(count_event({0, 1}, kBlack, '>', 0, "a"));
  inst.events.push_back(count_event({1, 2}, kBlack, '>', 0, "b"));
  inst.events.push_back(count_event({4, 5}, kBlack, '>', 0, "c"));
  const auto dep = build_dependency_graph(inst);
  const auto ids = component_ids(dep);
  CHECK(ids[0] != ids[1]);  // same component
  CHECK(ids[2] == 0);       // own component restarts at zero
}

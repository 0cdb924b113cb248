#include "lll/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace lll {

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  Graph g;
  g.n = n;
  g.adj.assign(n, {});
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw Error("invalid-edge", "endpoint out of range: " + std::to_string(u) + " " + std::to_string(v));
    if (u == v) throw Error("invalid-edge", "self-loop at node " + std::to_string(u));
    g.adj[u].push_back(v);
    g.adj[v].push_back(u);
  }
  for (int v = 0; v < n; ++v) {
    auto& a = g.adj[v];
    std::sort(a.begin(), a.end());
    if (std::adjacent_find(a.begin(), a.end()) != a.end())
      throw Error("invalid-edge", "duplicate edge at node " + std::to_string(v));
    g.max_degree = std::max(g.max_degree, static_cast<int>(a.size()));
  }
  return g;
}

bool Graph::has_edge(int u, int v) const {
  const auto& a = adj[u];
  return std::binary_search(a.begin(), a.end(), v);
}

long long Graph::edge_count() const {
  long long s = 0;
  for (const auto& a : adj) s += static_cast<long long>(a.size());
  return s / 2;
}

Graph Graph::induced(const std::vector<int>& nodes) const {
  std::vector<int> label(n, -1);
  for (size_t i = 0; i < nodes.size(); ++i) label[nodes[i]] = static_cast<int>(i);
  std::vector<std::pair<int, int>> edges;
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (int w : adj[nodes[i]]) {
      if (label[w] > static_cast<int>(i)) edges.emplace_back(static_cast<int>(i), label[w]);
    }
  }
  return from_edges(static_cast<int>(nodes.size()), edges);
}

std::vector<int> Graph::bfs_distances(int source) const {
  std::vector<int> dist(n, -1);
  std::deque<int> q{source};
  dist[source] = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj[v]) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push_back(w);
      }
    }
  }
  return dist;
}

namespace {

// Circulant base graph randomized by an edge-switching chain: degrees are
// preserved by every switch and the edge set stays simple.
void switch_edges(std::vector<std::pair<int, int>>& edges, std::set<std::pair<int, int>>& eset,
                  Rng& rng, long switches, bool bipartite_keep_sides) {
  auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  const long attempts = switches * 3;
  long done = 0;
  for (long t = 0; t < attempts && done < switches; ++t) {
    const size_t i = rng.below(edges.size());
    const size_t j = rng.below(edges.size());
    if (i == j) continue;
    const auto [a, b] = edges[i];
    const auto [c, d] = edges[j];
    int p1, q1, p2, q2;
    if (bipartite_keep_sides || rng.below(2)) {
      // (a,b),(c,d) -> (a,d),(c,b); in the bipartite case this keeps the
      // (left,right) orientation of both pairs
      p1 = a; q1 = d; p2 = c; q2 = b;
    } else {
      // (a,b),(c,d) -> (a,c),(b,d)
      p1 = a; q1 = c; p2 = b; q2 = d;
    }
    if (p1 == q1 || p2 == q2) continue;
    const auto e1 = key(p1, q1), e2 = key(p2, q2);
    if (e1 == e2 || eset.count(e1) || eset.count(e2)) continue;
    eset.erase(key(a, b));
    eset.erase(key(c, d));
    eset.insert(e1);
    eset.insert(e2);
    edges[i] = {p1, q1};
    edges[j] = {p2, q2};
    ++done;
  }
}

Graph random_regular(int n, int d, Rng& rng) {
  if (d >= n) throw Error("infeasible-parameters", "regular graph needs degree < n");
  if ((static_cast<long long>(n) * d) % 2 != 0)
    throw Error("infeasible-parameters", "n*degree must be even for a regular graph");
  std::vector<std::pair<int, int>> edges;
  for (int j = 1; j <= d / 2; ++j)
    for (int v = 0; v < n; ++v) edges.emplace_back(v, (v + j) % n);
  if (d % 2 == 1)
    for (int v = 0; v < n / 2; ++v) edges.emplace_back(v, v + n / 2);
  std::set<std::pair<int, int>> eset;
  for (auto [a, b] : edges) eset.insert({std::min(a, b), std::max(a, b)});
  if (eset.size() != edges.size())
    throw Error("infeasible-parameters", "circulant base degenerate for these parameters");
  switch_edges(edges, eset, rng, 10L * static_cast<long>(edges.size()), false);
  return Graph::from_edges(n, edges);
}

// Bipartite circulant (left i to right (i+j) mod n/2 for j < d) randomized by
// side-preserving switches. Triangle-free by bipartiteness.
Graph random_bipartite_regular(int n, int d, Rng& rng) {
  if (n % 2 != 0) throw Error("infeasible-parameters", "bipartite regular needs even n");
  const int half = n / 2;
  if (d > half) throw Error("infeasible-parameters", "bipartite regular needs degree <= n/2");
  std::vector<std::pair<int, int>> edges;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < half; ++i) edges.emplace_back(i, half + (i + j) % half);
  std::set<std::pair<int, int>> eset(edges.begin(), edges.end());
  switch_edges(edges, eset, rng, 10L * static_cast<long>(edges.size()), true);
  return Graph::from_edges(n, edges);
}

Graph erdos_renyi(int n, double p, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) edges.emplace_back(u, v);
  return Graph::from_edges(n, edges);
}

}  // namespace

Graph generate(const GraphGenSpec& spec) {
  if (spec.n < 2) throw Error("infeasible-parameters", "need n >= 2");
  Rng rng(mix_seed(spec.seed, 0x67656e));
  switch (spec.family) {
    case GraphGenSpec::Family::random_regular:
      return random_regular(spec.n, spec.degree, rng);
    case GraphGenSpec::Family::random_bipartite_regular:
      return random_bipartite_regular(spec.n, spec.degree, rng);
    case GraphGenSpec::Family::erdos_renyi:
      return erdos_renyi(spec.n, spec.edge_prob, rng);
    case GraphGenSpec::Family::sparse_neighborhood: {
      // Union of a bipartite regular graph (very sparse neighborhoods) and a
      // thin random graph; resample until every node meets the target
      // sparsity. The target is epsilon^2 * Delta of the realized Delta.
      const int d_bip = std::max(2, (spec.degree * 4) / 5);
      for (int attempt = 0; attempt < 20; ++attempt) {
        Rng sub = rng.stream(attempt);
        Graph bip = random_bipartite_regular(spec.n, d_bip, sub);
        const double p_extra =
            std::max(0.0, static_cast<double>(spec.degree - d_bip)) / spec.n;
        std::set<std::pair<int, int>> eset;
        std::vector<std::pair<int, int>> edges;
        std::vector<int> deg(spec.n, 0);
        for (int v = 0; v < spec.n; ++v)
          for (int w : bip.adj[v])
            if (v < w) {
              eset.insert({v, w});
              edges.emplace_back(v, w);
              ++deg[v];
              ++deg[w];
            }
        // extra edges, capped so the realized max degree stays at Delta
        for (int u = 0; u < spec.n; ++u)
          for (int v = u + 1; v < spec.n; ++v) {
            if (deg[u] >= spec.degree || deg[v] >= spec.degree) continue;
            if (sub.bernoulli(p_extra) && !eset.count({u, v})) {
              edges.emplace_back(u, v);
              ++deg[u];
              ++deg[v];
            }
          }
        Graph g = Graph::from_edges(spec.n, edges);
        const double target = spec.epsilon * spec.epsilon * g.max_degree;
        bool ok = true;
        for (int v = 0; v < g.n && ok; ++v)
          if (local_sparsity(g, v).value() < target) ok = false;
        if (ok) return g;
      }
      throw Error("generation-failed", "sparse-neighborhood target not met");
    }
  }
  throw Error("infeasible-parameters", "unknown graph family");
}

long long non_edges_in_set(const Graph& g, int v, const std::vector<int>& s) {
  std::vector<int> sorted_s(s);
  std::sort(sorted_s.begin(), sorted_s.end());
  std::vector<int> t;
  std::set_intersection(g.adj[v].begin(), g.adj[v].end(), sorted_s.begin(), sorted_s.end(),
                        std::back_inserter(t));
  const long long k = static_cast<long long>(t.size());
  long long edges = 0;
  for (int u : t) {
    std::vector<int> common;
    std::set_intersection(g.adj[u].begin(), g.adj[u].end(), t.begin(), t.end(),
                          std::back_inserter(common));
    edges += static_cast<long long>(common.size());
  }
  edges /= 2;
  return k * (k - 1) / 2 - edges;
}

long long neighborhood_non_edges(const Graph& g, int v) {
  return non_edges_in_set(g, v, g.adj[v]);
}

Frac local_sparsity(const Graph& g, int v) {
  const long long delta = g.max_degree;
  if (delta < 1) throw Error("precondition", "local_sparsity needs max_degree >= 1");
  // m(N(v)): edges inside the neighborhood
  const auto& t = g.adj[v];
  long long edges = 0;
  for (int u : t) {
    std::vector<int> common;
    std::set_intersection(g.adj[u].begin(), g.adj[u].end(), t.begin(), t.end(),
                          std::back_inserter(common));
    edges += static_cast<long long>(common.size());
  }
  edges /= 2;
  return Frac{delta * (delta - 1) / 2 - edges, delta};
}

std::vector<int> find_triangle(const Graph& g) {
  for (int v = 0; v < g.n; ++v) {
    for (int u : g.adj[v]) {
      if (u < v) continue;
      // common neighbor of u and v above v closes a triangle
      std::vector<int> common;
      std::set_intersection(g.adj[u].begin(), g.adj[u].end(), g.adj[v].begin(), g.adj[v].end(),
                            std::back_inserter(common));
      if (!common.empty()) return {v, u, common.front()};
    }
  }
  return {};
}

std::vector<std::vector<int>> connected_components(const Graph& g) {
  std::vector<std::vector<int>> comps;
  std::vector<char> seen(g.n, 0);
  for (int s = 0; s < g.n; ++s) {
    if (seen[s]) continue;
    std::vector<int> comp;
    std::deque<int> q{s};
    seen[s] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      comp.push_back(v);
      for (int w : g.adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          q.push_back(w);
        }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

Graph load_edge_list(std::istream& in) {
  int n = 0;
  long long m = 0;
  if (!(in >> n >> m)) throw Error("parse", "edge list header must be 'n m'");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<size_t>(m));
  for (long long i = 0; i < m; ++i) {
    int u, v;
    if (!(in >> u >> v)) throw Error("parse", "truncated edge list");
    edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, edges);
}

void save_edge_list(const Graph& g, std::ostream& out) {
  out << g.n << ' ' << g.edge_count() << '\n';
  for (int v = 0; v < g.n; ++v)
    for (int w : g.adj[v])
      if (v < w) out << v << ' ' << w << '\n';
}

Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path);
  return load_edge_list(in);
}

void save_edge_list_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot open " + path);
  save_edge_list(g, out);
}

}  // namespace lll

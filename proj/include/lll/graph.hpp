#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lll/rng.hpp"

namespace lll {

// Structured error used across the library. `code` is a short stable slug
// (e.g. "infeasible-parameters", "merge-conflict") tests can dispatch on.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Undirected simple graph with sorted adjacency lists. Immutable after
// construction; safe to share read-only across concurrent runs.
struct Graph {
  int n = 0;
  std::vector<std::vector<int>> adj;
  int max_degree = 0;

  static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  int degree(int v) const { return static_cast<int>(adj[v].size()); }
  bool has_edge(int u, int v) const;
  long long edge_count() const;

  // induced subgraph on `nodes` with vertices relabeled 0..k-1 (in the given
  // order); returns the relabeled graph.
  Graph induced(const std::vector<int>& nodes) const;

  std::vector<int> bfs_distances(int source) const;
};

struct GraphGenSpec {
  enum class Family {
    random_regular,
    random_bipartite_regular,
    erdos_renyi,
    sparse_neighborhood,
  };
  Family family = Family::random_regular;
  int n = 0;
  int degree = 0;        // target Delta for the regular families
  double edge_prob = 0;  // erdos_renyi only
  double epsilon = 0.5;  // sparse_neighborhood: targets zeta >= epsilon^2 * Delta
  uint64_t seed = 0;
};

// Deterministic: identical spec + seed => identical edge set.
Graph generate(const GraphGenSpec& spec);

// |{ {u,w} in N(v) cap S : {u,w} not an edge }|
long long non_edges_in_set(const Graph& g, int v, const std::vector<int>& s);

// number of non-edges in G[N(v)] (S = N(v) case of the above)
long long neighborhood_non_edges(const Graph& g, int v);

// Exact rational: num/den with den = max_degree.
struct Frac {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// zeta_v = (C(Delta,2) - m(N(v))) / Delta
Frac local_sparsity(const Graph& g, int v);

// returns {u,v,w} of some triangle, or empty if triangle-free.
std::vector<int> find_triangle(const Graph& g);

std::vector<std::vector<int>> connected_components(const Graph& g);

// Edge-list text format: first line "n m", then "u v" pairs, 0-indexed.
Graph load_edge_list(std::istream& in);
void save_edge_list(const Graph& g, std::ostream& out);
Graph load_edge_list_file(const std::string& path);
void save_edge_list_file(const Graph& g, const std::string& path);

}  // namespace lll

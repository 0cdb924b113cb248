#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lll/graph.hpp"
#include "lll/shatter.hpp"

namespace lll::problems {

// ---------- sinkless orientation ----------

// One binary variable per edge; black orients the edge toward its smaller
// endpoint. Each node's event: no incident edge points away from it.
struct SinklessInstance {
  TwoSetInstance inst;
  std::vector<std::pair<int, int>> edge_of_var;  // u < v
};

// Euler-walk edge split: each node gets within one of half its edges per set.
std::vector<char> split_edges_balanced(const Graph& g,
                                       const std::vector<std::pair<int, int>>& edges);

SinklessInstance sinkless_orientation_lll(const Graph& g,
                                          const std::vector<char>* split = nullptr);

std::vector<int> orientation_out_degrees(const Graph& g, const SinklessInstance& si,
                                         const PartialAssignment& phi);

// ---------- degree-bounded subgraph sampling ----------

struct DegreeBounded {
  BinaryLowRiskInstance inst;
  int k = 0;
  double q = 0;  // sampling probability k/Delta
};

// events per node: S-degree < k/3 (assoc itself) and S-degree > 4k (assoc
// at 2k); declared p from exact binomial tails
DegreeBounded degree_bounded_lll(const Graph& g, int k);

std::vector<int> black_nodes(const PartialAssignment& phi, int n);

// ---------- degree-bounded sparsity-preserving sampling (DSS) ----------

struct DssParams {
  double alpha = 0.25;
  double mu_override = 0;  // 0: (600/alpha) log(Delta) loglog(n)
};

struct DssOutcome {
  std::vector<int> s;
  double mu = 0;
  double sample_p = 0;
  double mu_formula = 0;
  long long degree_bound = 0;     // 4 mu
  long long nonedge_bound = 0;    // ceil(alpha mu^2 / 2)
  ShatterTrace trace;
};

// throws Error("precondition") listing nodes of X whose N(v) ∩ Y carries
// fewer than alpha * Delta^2 non-edges
DssOutcome dss_sample(const Graph& g, const std::vector<int>& x_set,
                      const std::vector<int>& y_set, const DssParams& params,
                      const PostSolver& post, Rng& rng);

// ---------- coloring ----------

struct ColoringState {
  int color_space = 0;                    // valid colors are 1..color_space
  std::vector<int> color;                 // 0 = uncolored
  std::vector<std::vector<int>> palette;  // sorted ascending

  static ColoringState with_full_palettes(const Graph& g, int chi);
  bool colored(int v) const { return color[v] != 0; }
  // set permanent color and strip it from the neighbors' palettes
  void assign(const Graph& g, int v, int c);
};

std::optional<std::pair<int, int>> improper_edge(const Graph& g, const std::vector<int>& color);
int count_colors_used(const std::vector<int>& color);

// slack accounting: sum over colors c of (neighbors of v holding c - 1)+,
// optionally restricted to a color range [lo, hi]
long long slack_gain_of(const Graph& g, int v, const std::vector<int>& color, int lo = 1,
                        int hi = 0);

// Tentative coloring step for one vertex: v keeps c_v iff no neighbor's
// candidate equals it; permanent colors get stripped from neighbor palettes.
// neighbor_candidates: (neighbor, candidate colour) pairs for this round.
bool try_color(const Graph& g, ColoringState& st, int v, int c_v,
               const std::vector<std::pair<int, int>>& neighbor_candidates);

struct SlackGenOptions {
  double activation = 1.0 / 20;
  int rounds = 1;
  int palette_lo = 1;  // the process colors within [palette_lo, palette_hi]
  int palette_hi = 0;  // 0: color_space
};

struct SlackNodeReport {
  int node = 0;
  long long non_edges = 0;  // within the node's S-neighborhood
  double threshold = 0;     // e^{-3/c'} m / (500 chi)
  long long gain = 0;
};

struct SlackReport {
  std::vector<SlackNodeReport> per_node;  // nodes with at least one S-neighbor
  int chi = 0;
  double c_prime = 0;  // chi / max S-degree
};

// Random one-round coloring process on s (activation, random candidate, keep
// unless a neighbor tried the same color); rounds > 1 repeats it on the
// remaining uncolored nodes.
SlackReport slack_generation(const Graph& g, const std::vector<int>& s, ColoringState& st,
                             Rng& rng, const SlackGenOptions& opts = {});

struct SlackTwoSetsOptions {
  int chi = 0;          // per-set palette size
  int lo1 = 1, lo2 = 0; // palette starts; lo2 = 0 means lo1 + chi
  long long threshold = 1;
  int rounds = 4;
  double activation = 0.5;
  long long min_nonedges = 0;  // verified per W node per set when > 0
};

struct SlackTwoSetsResult {
  SlackReport report;  // per W node, gains split per set
  ShatterTrace trace;
  long long max_s_degree = 0;
};

// Two-phase slack generation: color S1, send W nodes without enough slack to
// a per-component repair on the S2 variables, then replay the repaired S2
// rounds globally. Guarantees per uncolored W node: slack gain >= threshold
// from one of the two sets.
SlackTwoSetsResult slack_gen_two_sets(const Graph& g, const std::vector<int>& w_set,
                                      const std::vector<int>& s1, const std::vector<int>& s2,
                                      ColoringState& st, const PostSolver& post, Rng& rng,
                                      const SlackTwoSetsOptions& opts);

struct D1lcOptions {
  int sync_rounds = 40;
};

// deg+1 list coloring: synchronized random TryColor rounds with a sequential
// greedy sweep for the stragglers. Requires palette > uncolored degree.
void greedy_d1lc(const Graph& g, ColoringState& st, Rng& rng, const D1lcOptions& opts = {});

struct PartitionResult {
  std::vector<int> cls;  // 0..k-1 per node
  int sweeps = 0;
};

// every node ends with d(v)/k ± eps*Delta/k neighbors in each class
PartitionResult partition_vertices(const Graph& g, int k, double eps, Rng& rng,
                                   int max_sweeps = 80);

struct StageRecord {
  std::string stage;
  int attempt = 0;
  bool ok = true;
  double formula_value = 0;  // the formula-derived default
  double used_value = 0;   // the override actually used
  std::string note;
};

struct PipelineOverrides {
  double gamma = 0;      // triangle-free color fraction; 0: asymptotic default
  int x = 0;             // sparse colors saved; 0: formula default
  double mu = 0;         // DSS mu override
  int classes = 0;       // triangle-free class count; 0: formula default
  int slack_rounds = 8;
  double activation = 0.5;
  double eps = 0.5;      // partition discrepancy parameter
  int stage_retries = 5;
};

struct PipelineResult {
  ColoringState state;
  std::vector<StageRecord> stages;
  int colors_used = 0;
  bool proper = false;
};

PipelineResult color_sparse(const Graph& g, double eps, const PipelineOverrides& ov, Rng& rng);
PipelineResult color_triangle_free(const Graph& g, const PipelineOverrides& ov, Rng& rng);

// ---------- splitting problems ----------

enum class SplitKind { vertex_subset, sparsity, density, matching };

struct SplittingInstance {
  BinaryLowRiskInstance inst;
  SplitKind kind{};
  std::vector<int> event_node;  // event -> node
  double declared_risk = 1.0;
  // per-node guarantee data for the independent scan
  std::vector<long long> scan_value;  // d_T(v), non-edges, edges, or matching size
};

// T: the subset being split (vertex_subset) or ignored for the whole-vertex
// kinds. min_stat: events only for nodes whose relevant statistic reaches it.
SplittingInstance build_splitting_lll(SplitKind kind, const Graph& g, const std::vector<int>& t_set,
                                      long long min_stat);

struct SplitScan {
  bool ok = true;
  std::string detail;
};
// re-derives the per-node guarantees of the solved instance from the split
SplitScan scan_split(const SplittingInstance& si, const Graph& g, const PartialAssignment& phi);

// exact maximum matching by branching, for small induced subgraphs
int brute_force_matching(const Graph& g, const std::vector<int>& nodes);

}  // namespace lll::problems

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "nngraph/neighbor_index.hpp"
#include "nngraph/point_cloud.hpp"
#include "nngraph/seed.hpp"

namespace nngraph {

struct Edge {
  VertexId u, v;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct WeightedEdge {
  VertexId u, v;
  double weight;
};

/// Immutable undirected graph in compressed adjacency form.
///
/// Every edge appears in both endpoints' neighbor lists; lists are sorted
/// ascending. No self-loops or parallel edges. Weights, if present, are stored
/// alongside each adjacency entry.
class SparseGraph {
 public:
  SparseGraph() = default;
  explicit SparseGraph(std::size_t n) : offsets_(n + 1, 0) {}

  /// Self-loops are dropped; (u,v) and (v,u) duplicates collapse.
  static SparseGraph from_edges(std::size_t n, std::vector<Edge> edges);
  /// As from_edges; a duplicated pair keeps the weight of its first occurrence.
  static SparseGraph from_weighted_edges(std::size_t n, std::vector<WeightedEdge> edges);

  std::size_t num_vertices() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return adjacency_.size() / 2; }
  bool weighted() const { return !weights_.empty(); }

  std::span<const VertexId> neighbors(std::size_t v) const {
    return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::span<const double> weights(std::size_t v) const {
    if (!weighted()) return {};
    return {weights_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(std::size_t u, std::size_t v) const;

  /// Canonical (u < v) edges in lexicographic order.
  std::vector<Edge> edges() const;

  friend bool operator==(const SparseGraph&, const SparseGraph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<VertexId> adjacency_;
  std::vector<double> weights_;
};

/// Edge list CSV: "u,v" or "u,v,weight" rows with u < v, lexicographic.
void write_edge_list_csv(const SparseGraph& graph, std::ostream& out);

// Graph families over a point cloud. All produce the undirected union of a
// directed candidate relation; randomness for vertex i derives only from
// (seed, i), so results do not depend on the thread count.

struct KnnRule {
  std::size_t k;
};
struct BernoulliRule {
  std::size_t K;
  double p;
};
struct ChooseRule {
  std::size_t k, K;
};
struct Algorithm1Rule {
  std::size_t k, K;
};
using SubsampleRule = std::variant<KnnRule, BernoulliRule, ChooseRule, Algorithm1Rule>;

/// Throws std::invalid_argument if the rule's parameters are out of range.
void validate(const SubsampleRule& rule);

SparseGraph build_knn_graph(const NeighborIndex& index, std::size_t k, unsigned threads = 1);

/// Each ordered pair (i, j), j among i's K nearest, is kept iff a per-pair
/// uniform falls below p. The uniforms depend only on (seed, i, j), so edge
/// sets are nested in p for a fixed seed.
SparseGraph build_bernoulli_graph(const NeighborIndex& index, std::size_t K, double p,
                                  const SeedSpec& seed, unsigned threads = 1);

/// Bernoulli subsampling of a precomputed K-NN table (row i's candidates are
/// i's K nearest neighbors); shares draws with build_bernoulli_graph.
SparseGraph bernoulli_subsample(const KnnTable& table, double p, const SeedSpec& seed);

/// Each vertex keeps a uniform k-subset of its K nearest neighbors.
SparseGraph build_choose_k_graph(const NeighborIndex& index, std::size_t k, std::size_t K,
                                 const SeedSpec& seed, unsigned threads = 1);

/// Edges from algorithm1_near_subset rows.
SparseGraph build_algorithm1_graph(const PointCloud& cloud, std::size_t k, std::size_t K,
                                   const SeedSpec& seed, unsigned threads = 1);

SparseGraph build_graph(const NeighborIndex& index, const SubsampleRule& rule,
                        const SeedSpec& seed, unsigned threads = 1);

/// Gaussian weights w_ij = exp(-|x_i - x_j|^2 / (sigma_i sigma_j)) on the
/// edges of `graph`, where sigma_i is the distance from i to its
/// bandwidth_rank-th nearest neighbor. Zero bandwidths (duplicate points)
/// are replaced by the smallest positive bandwidth in the cloud.
SparseGraph gaussian_affinity(const SparseGraph& graph, const PointCloud& cloud,
                              std::size_t bandwidth_rank, unsigned threads = 1);

/// Per-point bandwidths as used by gaussian_affinity.
std::vector<double> adaptive_bandwidths(const NeighborIndex& index, std::size_t bandwidth_rank,
                                        unsigned threads = 1);

}  // namespace nngraph

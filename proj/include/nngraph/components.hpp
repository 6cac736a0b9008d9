#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"

#include "nngraph/neighbor_index.hpp"
#include "nngraph/point_cloud.hpp"
#include "nngraph/sparse_graph.hpp"

namespace nngraph {

/// Union-find with union by rank and path compression.
class DisjointSetForest {
 public:
  explicit DisjointSetForest(std::size_t n);

  std::size_t find(std::size_t x);
  /// Returns true if a and b were in different sets.
  bool unite(std::size_t a, std::size_t b);
  std::size_t num_sets() const { return num_sets_; }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
  std::size_t num_sets_;
};

/// Component label per vertex, contiguous from 0 in order of first vertex.
struct ComponentLabels {
  std::vector<VertexId> label;
  std::vector<std::size_t> sizes;

  std::size_t num_components() const { return sizes.size(); }
  std::size_t num_vertices() const { return label.size(); }
  std::size_t giant_size() const;
};

ComponentLabels labels_from_forest(DisjointSetForest& forest);
ComponentLabels connected_components(const SparseGraph& graph);

/// Component diameters computed exactly by pairwise scan up to this size;
/// larger components report their bounding-box diagonal (an upper bound).
inline constexpr std::size_t kExactDiameterLimit = 2000;

struct ComponentStats {
  std::size_t num_components = 0;
  std::size_t giant_size = 0;
  double giant_fraction = 0.0;
  std::vector<double> diameters;        // Euclidean, per component label
  std::vector<bool> diameter_is_bound;  // true where the bounding-box bound was used
  bool approximate = false;

  double diameter_mean() const;
  double diameter_max() const;
};

ComponentStats component_stats(const ComponentLabels& labels, const PointCloud& cloud);

/// {num_components, giant_size, giant_fraction, diameter_mean, diameter_max, approx_flag}
nlohmann::json to_json(const ComponentStats& stats);

/// Sum over ordered pairs (i, j), j among i's k nearest, of |x_i - x_j|.
double knn_distance_sum(const NeighborIndex& index, std::size_t k, unsigned threads = 1);

/// reverse_degrees[x] = #{y : x is among y's k nearest neighbors}.
std::vector<std::size_t> reverse_degrees(const NeighborIndex& index, std::size_t k,
                                         unsigned threads = 1);
std::size_t max_reverse_degree(const NeighborIndex& index, std::size_t k, unsigned threads = 1);

/// Cone-packing constant bounding the k-NN reverse degree by c_d k in the plane
/// (six cones of opening pi/3, plus one).
inline constexpr std::size_t kPlanarDegreeConstant = 7;

}  // namespace nngraph

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "nngraph/point_cloud.hpp"
#include "nngraph/seed.hpp"

namespace nngraph {

using VertexId = std::uint32_t;

inline constexpr std::size_t kNoExclusion = std::numeric_limits<std::size_t>::max();

/// Squared Euclidean distance; with `periodic` each axis wraps on the unit torus.
/// Index and oracle both go through this function so their results agree bit for bit.
inline double squared_distance(std::span<const double> a, std::span<const double> b,
                               bool periodic) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double t = std::abs(a[i] - b[i]);
    if (periodic && t > 0.5) t = 1.0 - t;
    sum += t * t;
  }
  return sum;
}

/// Neighbors of one query, ascending by (distance, vertex id), self excluded.
struct NeighborList {
  std::size_t query_index = 0;
  std::vector<VertexId> neighbor_ids;
  std::vector<double> distances;
};

/// All-points k-NN result, row-major with `width` = min(k, n-1) entries per row.
struct KnnTable {
  std::size_t count = 0;
  std::size_t width = 0;
  std::vector<VertexId> ids;
  std::vector<double> distances;

  std::size_t rows() const { return count; }
  std::span<const VertexId> neighbors(std::size_t i) const { return {ids.data() + i * width, width}; }
  std::span<const double> row_distances(std::size_t i) const {
    return {distances.data() + i * width, width};
  }
};

/// Exact k-nearest-neighbor index over a point cloud (median-split kd-tree).
///
/// Ties in distance are broken by ascending vertex id. Read-only after
/// construction; concurrent queries are safe.
class NeighborIndex {
 public:
  NeighborIndex(PointCloud cloud, bool periodic);

  const PointCloud& cloud() const { return cloud_; }
  bool periodic() const { return periodic_; }
  std::size_t size() const { return cloud_.size(); }

  /// min(k, n-1) nearest neighbors of point `query`. Throws std::out_of_range.
  NeighborList knn(std::size_t query, std::size_t k) const;

  /// k nearest indexed points to an arbitrary location, skipping the point
  /// with id `exclude` (pass kNoExclusion to keep all).
  NeighborList knn_point(std::span<const double> location, std::size_t k,
                         std::size_t exclude = kNoExclusion) const;

  KnnTable knn_all(std::size_t k, unsigned threads = 1) const;

 private:
  struct Node {
    std::uint32_t begin, end;    // range into order_
    std::int32_t left, right;    // -1 for leaves
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  double box_distance(std::size_t node, std::span<const double> q) const;

  template <class Heap>
  void search(std::int32_t node, std::span<const double> q, std::size_t k, std::size_t exclude,
              Heap& heap) const;

  PointCloud cloud_;
  bool periodic_;
  std::vector<VertexId> order_;     // permutation of point ids, leaves are contiguous
  std::vector<double> packed_;      // coordinates in order_ sequence
  std::vector<Node> nodes_;
  std::vector<double> boxes_;       // per node: lo[dim], hi[dim]
};

/// Reference k-NN by full scan and sort, same ordering contract as NeighborIndex::knn.
NeighborList knn_oracle(const PointCloud& cloud, std::size_t query, std::size_t k, bool periodic);

/// Output of the random-subset near-neighbor search.
struct NearSubsetResult {
  std::vector<VertexId> subset;            // the m sampled members of B, ascending
  std::vector<std::vector<VertexId>> rows; // row i: nearest members of B to point i
};

/// Samples B of m = floor(k n / K) points uniformly without replacement, then
/// lists for every point its k nearest members of B. A point that is itself in
/// B never lists itself; the next-nearest member takes its place, so such rows
/// hold min(k, m-1) entries.
NearSubsetResult algorithm1_near_subset(const PointCloud& cloud, std::size_t k, std::size_t K,
                                        const SeedSpec& seed, unsigned threads = 1);

/// CSV rows "query_id,neighbor_1,...,neighbor_k".
void write_neighbor_rows_csv(const std::vector<std::vector<VertexId>>& rows, std::ostream& out);
void write_neighbor_rows_csv(const KnnTable& table, std::ostream& out);

}  // namespace nngraph

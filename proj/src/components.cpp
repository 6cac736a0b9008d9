#include "nngraph/components.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace nngraph {

DisjointSetForest::DisjointSetForest(std::size_t n) : parent_(n), rank_(n, 0), num_sets_(n) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSetForest::find(std::size_t x) {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const std::size_t next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

bool DisjointSetForest::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  --num_sets_;
  return true;
}

std::size_t ComponentLabels::giant_size() const {
  return sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
}

ComponentLabels labels_from_forest(DisjointSetForest& forest) {
  const std::size_t n = forest.size();
  constexpr auto kUnset = std::numeric_limits<VertexId>::max();
  std::vector<VertexId> root_label(n, kUnset);
  ComponentLabels out;
  out.label.resize(n);
  out.sizes.reserve(forest.num_sets());
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t root = forest.find(v);
    if (root_label[root] == kUnset) {
      root_label[root] = static_cast<VertexId>(out.sizes.size());
      out.sizes.push_back(0);
    }
    out.label[v] = root_label[root];
    ++out.sizes[root_label[root]];
  }
  return out;
}

ComponentLabels connected_components(const SparseGraph& graph) {
  DisjointSetForest forest(graph.num_vertices());
  for (std::size_t u = 0; u < graph.num_vertices(); ++u)
    for (VertexId v : graph.neighbors(u))
      if (v > u) forest.unite(u, v);
  return labels_from_forest(forest);
}

double ComponentStats::diameter_mean() const {
  if (diameters.empty()) return 0.0;
  return std::accumulate(diameters.begin(), diameters.end(), 0.0) /
         static_cast<double>(diameters.size());
}

double ComponentStats::diameter_max() const {
  return diameters.empty() ? 0.0 : *std::max_element(diameters.begin(), diameters.end());
}

ComponentStats component_stats(const ComponentLabels& labels, const PointCloud& cloud) {
  if (labels.num_vertices() != cloud.size())
    throw std::invalid_argument("labels and cloud sizes differ");
  const std::size_t n = cloud.size();
  const std::size_t dim = cloud.dim();
  const std::size_t c = labels.num_components();

  ComponentStats stats;
  stats.num_components = c;
  stats.giant_size = labels.giant_size();
  stats.giant_fraction = n == 0 ? 0.0 : static_cast<double>(stats.giant_size) / static_cast<double>(n);
  stats.diameters.assign(c, 0.0);
  stats.diameter_is_bound.assign(c, false);

  // Bucket members by label.
  std::vector<std::size_t> start(c + 1, 0);
  for (std::size_t k = 0; k < c; ++k) start[k + 1] = start[k] + labels.sizes[k];
  std::vector<std::size_t> members(n);
  {
    std::vector<std::size_t> cursor(start.begin(), start.end() - 1);
    for (std::size_t v = 0; v < n; ++v) members[cursor[labels.label[v]]++] = v;
  }

  for (std::size_t k = 0; k < c; ++k) {
    const std::span<const std::size_t> group(members.data() + start[k], labels.sizes[k]);
    if (group.size() <= 1) continue;
    if (group.size() <= kExactDiameterLimit) {
      double best = 0.0;
      for (std::size_t a = 0; a < group.size(); ++a)
        for (std::size_t b = a + 1; b < group.size(); ++b)
          best = std::max(best, squared_distance(cloud.point(group[a]), cloud.point(group[b]), false));
      stats.diameters[k] = std::sqrt(best);
    } else {
      std::vector<double> lo(dim, 1.0), hi(dim, 0.0);
      for (std::size_t v : group)
        for (std::size_t a = 0; a < dim; ++a) {
          lo[a] = std::min(lo[a], cloud.coord(v, a));
          hi[a] = std::max(hi[a], cloud.coord(v, a));
        }
      double diag = 0.0;
      for (std::size_t a = 0; a < dim; ++a) diag += (hi[a] - lo[a]) * (hi[a] - lo[a]);
      stats.diameters[k] = std::sqrt(diag);
      stats.diameter_is_bound[k] = true;
      stats.approximate = true;
    }
  }
  return stats;
}

nlohmann::json to_json(const ComponentStats& stats) {
  return {{"num_components", stats.num_components},
          {"giant_size", stats.giant_size},
          {"giant_fraction", stats.giant_fraction},
          {"diameter_mean", stats.diameter_mean()},
          {"diameter_max", stats.diameter_max()},
          {"approx_flag", stats.approximate}};
}

double knn_distance_sum(const NeighborIndex& index, std::size_t k, unsigned threads) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  const KnnTable table = index.knn_all(k, threads);
  double total = 0.0;
  for (double d : table.distances) total += d;
  return total;
}

std::vector<std::size_t> reverse_degrees(const NeighborIndex& index, std::size_t k,
                                         unsigned threads) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  const KnnTable table = index.knn_all(k, threads);
  std::vector<std::size_t> count(index.size(), 0);
  for (VertexId j : table.ids) ++count[j];
  return count;
}

std::size_t max_reverse_degree(const NeighborIndex& index, std::size_t k, unsigned threads) {
  const auto count = reverse_degrees(index, k, threads);
  return count.empty() ? 0 : *std::max_element(count.begin(), count.end());
}

}  // namespace nngraph

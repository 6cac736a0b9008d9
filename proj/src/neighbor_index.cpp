#include "nngraph/neighbor_index.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "nngraph/parallel.hpp"

namespace nngraph {

namespace {

constexpr std::uint32_t kLeafSize = 12;
// Pruning slack: box distances and point distances are computed by different
// floating point expressions, so only prune clearly farther boxes.
constexpr double kPruneSlack = 1.0 + 1e-9;

using Candidate = std::pair<double, VertexId>;  // (squared distance, id); lexicographic order

struct BoundedHeap {
  explicit BoundedHeap(std::size_t capacity) : capacity(capacity) { items.reserve(capacity); }

  bool full() const { return items.size() == capacity; }
  double worst() const { return items.front().first; }

  void offer(Candidate c) {
    if (items.size() < capacity) {
      items.push_back(c);
      std::push_heap(items.begin(), items.end());
    } else if (c < items.front()) {
      std::pop_heap(items.begin(), items.end());
      items.back() = c;
      std::push_heap(items.begin(), items.end());
    }
  }

  std::size_t capacity;
  std::vector<Candidate> items;
};

NeighborList finish(std::size_t query, std::vector<Candidate> items) {
  std::sort(items.begin(), items.end());
  NeighborList out;
  out.query_index = query;
  out.neighbor_ids.reserve(items.size());
  out.distances.reserve(items.size());
  for (const auto& [d2, id] : items) {
    out.neighbor_ids.push_back(id);
    out.distances.push_back(std::sqrt(d2));
  }
  return out;
}

}  // namespace

NeighborIndex::NeighborIndex(PointCloud cloud, bool periodic)
    : cloud_(std::move(cloud)), periodic_(periodic) {
  if (cloud_.empty()) throw std::invalid_argument("cannot index an empty point cloud");
  if (cloud_.size() > std::numeric_limits<VertexId>::max())
    throw std::invalid_argument("point cloud too large for 32-bit vertex ids");
  order_.resize(cloud_.size());
  std::iota(order_.begin(), order_.end(), VertexId{0});
  nodes_.reserve(2 * cloud_.size() / kLeafSize + 2);
  build(0, static_cast<std::uint32_t>(cloud_.size()));

  const std::size_t dim = cloud_.dim();
  packed_.resize(cloud_.coords().size());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    auto p = cloud_.point(order_[i]);
    std::copy(p.begin(), p.end(), packed_.begin() + static_cast<std::ptrdiff_t>(i * dim));
  }
}

std::int32_t NeighborIndex::build(std::uint32_t begin, std::uint32_t end) {
  const std::size_t dim = cloud_.dim();
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({begin, end, -1, -1});
  const std::size_t box_at = boxes_.size();
  boxes_.resize(box_at + 2 * dim);
  double* lo = boxes_.data() + box_at;
  double* hi = lo + dim;
  std::fill(lo, lo + dim, 1.0);
  std::fill(hi, hi + dim, 0.0);
  for (std::uint32_t i = begin; i < end; ++i) {
    auto p = cloud_.point(order_[i]);
    for (std::size_t a = 0; a < dim; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  if (end - begin <= kLeafSize) return id;

  std::size_t axis = 0;
  for (std::size_t a = 1; a < dim; ++a)
    if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
  if (hi[axis] - lo[axis] <= 0.0) return id;  // all points coincide

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](VertexId x, VertexId y) {
                     return cloud_.coord(x, axis) < cloud_.coord(y, axis);
                   });
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

double NeighborIndex::box_distance(std::size_t node, std::span<const double> q) const {
  const std::size_t dim = cloud_.dim();
  const double* lo = boxes_.data() + node * 2 * dim;
  const double* hi = lo + dim;
  double sum = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    double gap = 0.0;
    if (q[a] < lo[a]) {
      gap = lo[a] - q[a];
      if (periodic_) gap = std::min(gap, std::max(0.0, q[a] + 1.0 - hi[a]));
    } else if (q[a] > hi[a]) {
      gap = q[a] - hi[a];
      if (periodic_) gap = std::min(gap, std::max(0.0, lo[a] + 1.0 - q[a]));
    }
    sum += gap * gap;
  }
  return sum;
}

template <class Heap>
void NeighborIndex::search(std::int32_t node_id, std::span<const double> q, std::size_t k,
                           std::size_t exclude, Heap& heap) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  const std::size_t dim = cloud_.dim();
  if (node.left < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const VertexId id = order_[i];
      if (id == exclude) continue;
      const double d2 = squared_distance(q, {packed_.data() + std::size_t{i} * dim, dim}, periodic_);
      heap.offer({d2, id});
    }
    return;
  }
  double dl = box_distance(static_cast<std::size_t>(node.left), q);
  double dr = box_distance(static_cast<std::size_t>(node.right), q);
  std::int32_t first = node.left, second = node.right;
  if (dr < dl) {
    std::swap(first, second);
    std::swap(dl, dr);
  }
  if (!(heap.full() && dl > heap.worst() * kPruneSlack)) search(first, q, k, exclude, heap);
  if (!(heap.full() && dr > heap.worst() * kPruneSlack)) search(second, q, k, exclude, heap);
}

NeighborList NeighborIndex::knn_point(std::span<const double> location, std::size_t k,
                                      std::size_t exclude) const {
  if (location.size() != cloud_.dim()) throw std::invalid_argument("query dimension mismatch");
  const std::size_t available = cloud_.size() - (exclude < cloud_.size() ? 1 : 0);
  const std::size_t want = std::min(k, available);
  if (want == 0) return finish(exclude, {});
  BoundedHeap heap(want);
  search(0, location, want, exclude, heap);
  return finish(exclude, std::move(heap.items));
}

NeighborList NeighborIndex::knn(std::size_t query, std::size_t k) const {
  if (query >= cloud_.size()) throw std::out_of_range("knn query index out of range");
  auto out = knn_point(cloud_.point(query), k, query);
  out.query_index = query;
  return out;
}

KnnTable NeighborIndex::knn_all(std::size_t k, unsigned threads) const {
  const std::size_t n = cloud_.size();
  KnnTable table;
  table.count = n;
  table.width = std::min(k, n - 1);
  table.ids.resize(n * table.width);
  table.distances.resize(n * table.width);
  if (table.width == 0) return table;
  constexpr std::size_t kChunk = 256;
  parallel_for((n + kChunk - 1) / kChunk, threads, [&](std::size_t chunk) {
    const std::size_t stop = std::min(n, (chunk + 1) * kChunk);
    for (std::size_t i = chunk * kChunk; i < stop; ++i) {
      auto row = knn(i, k);
      std::copy(row.neighbor_ids.begin(), row.neighbor_ids.end(),
                table.ids.begin() + static_cast<std::ptrdiff_t>(i * table.width));
      std::copy(row.distances.begin(), row.distances.end(),
                table.distances.begin() + static_cast<std::ptrdiff_t>(i * table.width));
    }
  });
  return table;
}

NeighborList knn_oracle(const PointCloud& cloud, std::size_t query, std::size_t k, bool periodic) {
  if (query >= cloud.size()) throw std::out_of_range("knn query index out of range");
  std::vector<Candidate> all;
  all.reserve(cloud.size());
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    if (j == query) continue;
    all.emplace_back(squared_distance(cloud.point(query), cloud.point(j), periodic),
                     static_cast<VertexId>(j));
  }
  std::sort(all.begin(), all.end());
  all.resize(std::min(k, all.size()));
  return finish(query, std::move(all));
}

NearSubsetResult algorithm1_near_subset(const PointCloud& cloud, std::size_t k, std::size_t K,
                                        const SeedSpec& seed, unsigned threads) {
  const std::size_t n = cloud.size();
  if (k == 0 || k >= K || K > n)
    throw std::invalid_argument("near-subset search requires 0 < k < K <= n");
  const std::size_t m = k * n / K;
  if (m < k) throw std::invalid_argument("near-subset search requires floor(k n / K) >= k");

  Engine engine = make_engine(seed);
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_below(engine, n - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(m);
  std::sort(ids.begin(), ids.end());

  std::vector<std::size_t> local_of(n, kNoExclusion);
  for (std::size_t local = 0; local < m; ++local) local_of[ids[local]] = local;
  const NeighborIndex subset_index(cloud.subset(ids), false);

  NearSubsetResult result;
  result.subset.assign(ids.begin(), ids.end());
  result.rows.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    auto near = subset_index.knn_point(cloud.point(i), k, local_of[i]);
    auto& row = result.rows[i];
    row.reserve(near.neighbor_ids.size());
    for (VertexId local : near.neighbor_ids) row.push_back(static_cast<VertexId>(ids[local]));
  });
  return result;
}

void write_neighbor_rows_csv(const std::vector<std::vector<VertexId>>& rows, std::ostream& out) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << i;
    for (VertexId j : rows[i]) out << ',' << j;
    out << '\n';
  }
}

void write_neighbor_rows_csv(const KnnTable& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.rows(); ++i) {
    out << i;
    for (VertexId j : table.neighbors(i)) out << ',' << j;
    out << '\n';
  }
}

}  // namespace nngraph

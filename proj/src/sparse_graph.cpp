#include "nngraph/sparse_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "nngraph/format.hpp"
#include "nngraph/parallel.hpp"

namespace nngraph {

namespace {

template <class E>
void canonicalize(std::size_t n, std::vector<E>& edges) {
  std::erase_if(edges, [](const E& e) { return e.u == e.v; });
  for (auto& e : edges) {
    if (e.u >= n || e.v >= n) throw std::out_of_range("edge endpoint out of range");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::stable_sort(edges.begin(), edges.end(), [](const E& a, const E& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const E& a, const E& b) { return a.u == b.u && a.v == b.v; }),
              edges.end());
}

}  // namespace

SparseGraph SparseGraph::from_edges(std::size_t n, std::vector<Edge> edges) {
  std::vector<WeightedEdge> weighted;
  weighted.reserve(edges.size());
  for (const auto& e : edges) weighted.push_back({e.u, e.v, 1.0});
  SparseGraph g = from_weighted_edges(n, std::move(weighted));
  g.weights_.clear();
  g.weights_.shrink_to_fit();
  return g;
}

SparseGraph SparseGraph::from_weighted_edges(std::size_t n, std::vector<WeightedEdge> edges) {
  canonicalize(n, edges);
  SparseGraph g(n);
  for (const auto& e : edges) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] += g.offsets_[v];
  g.adjacency_.resize(2 * edges.size());
  g.weights_.resize(2 * edges.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Lexicographic edge order makes every adjacency list come out sorted.
  for (const auto& e : edges) {
    g.adjacency_[cursor[e.u]] = e.v;
    g.weights_[cursor[e.u]++] = e.weight;
    g.adjacency_[cursor[e.v]] = e.u;
    g.weights_[cursor[e.v]++] = e.weight;
  }
  return g;
}

bool SparseGraph::has_edge(std::size_t u, std::size_t v) const {
  auto list = neighbors(u);
  return std::binary_search(list.begin(), list.end(), static_cast<VertexId>(v));
}

std::vector<Edge> SparseGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (std::size_t u = 0; u < num_vertices(); ++u)
    for (VertexId v : neighbors(u))
      if (v > u) out.push_back({static_cast<VertexId>(u), v});
  return out;
}

void write_edge_list_csv(const SparseGraph& graph, std::ostream& out) {
  for (std::size_t u = 0; u < graph.num_vertices(); ++u) {
    auto list = graph.neighbors(u);
    auto w = graph.weights(u);
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i] <= u) continue;
      out << u << ',' << list[i];
      if (graph.weighted()) out << ',' << format_double(w[i]);
      out << '\n';
    }
  }
}

void validate(const SubsampleRule& rule) {
  std::visit(
      [](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, KnnRule>) {
          if (r.k == 0) throw std::invalid_argument("k must be at least 1");
        } else if constexpr (std::is_same_v<R, BernoulliRule>) {
          if (r.K == 0) throw std::invalid_argument("K must be at least 1");
          if (!(r.p > 0.0 && r.p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
        } else if constexpr (std::is_same_v<R, ChooseRule>) {
          if (r.k == 0 || r.K == 0) throw std::invalid_argument("k and K must be at least 1");
          if (r.k > r.K) throw std::invalid_argument("k must not exceed K");
        } else {
          if (r.k == 0 || r.k >= r.K) throw std::invalid_argument("need 0 < k < K");
        }
      },
      rule);
}

SparseGraph build_knn_graph(const NeighborIndex& index, std::size_t k, unsigned threads) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  const KnnTable table = index.knn_all(k, threads);
  std::vector<Edge> edges;
  edges.reserve(table.ids.size());
  for (std::size_t i = 0; i < table.rows(); ++i)
    for (VertexId j : table.neighbors(i)) edges.push_back({static_cast<VertexId>(i), j});
  return SparseGraph::from_edges(index.size(), std::move(edges));
}

SparseGraph build_bernoulli_graph(const NeighborIndex& index, std::size_t K, double p,
                                  const SeedSpec& seed, unsigned threads) {
  validate(BernoulliRule{K, p});
  return bernoulli_subsample(index.knn_all(K, threads), p, seed);
}

SparseGraph bernoulli_subsample(const KnnTable& table, double p, const SeedSpec& seed) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
  const std::uint64_t key = seed.derived();
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < table.rows(); ++i)
    for (VertexId j : table.neighbors(i))
      if (hashed_uniform(key, i, j) < p) edges.push_back({static_cast<VertexId>(i), j});
  return SparseGraph::from_edges(table.rows(), std::move(edges));
}

SparseGraph build_choose_k_graph(const NeighborIndex& index, std::size_t k, std::size_t K,
                                 const SeedSpec& seed, unsigned threads) {
  validate(ChooseRule{k, K});
  const KnnTable table = index.knn_all(K, threads);
  const std::uint64_t key = seed.derived();
  std::vector<Edge> edges;
  edges.reserve(table.rows() * std::min(k, table.width));
  std::vector<VertexId> pool;
  for (std::size_t i = 0; i < table.rows(); ++i) {
    auto candidates = table.neighbors(i);
    pool.assign(candidates.begin(), candidates.end());
    SplitMix64 gen(mix(key, i));
    const std::size_t take = std::min(k, pool.size());
    for (std::size_t t = 0; t < take; ++t) {
      const std::size_t pick = t + static_cast<std::size_t>(uniform_below(gen, pool.size() - t));
      std::swap(pool[t], pool[pick]);
      edges.push_back({static_cast<VertexId>(i), pool[t]});
    }
  }
  return SparseGraph::from_edges(index.size(), std::move(edges));
}

SparseGraph build_algorithm1_graph(const PointCloud& cloud, std::size_t k, std::size_t K,
                                   const SeedSpec& seed, unsigned threads) {
  const auto near = algorithm1_near_subset(cloud, k, K, seed, threads);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < near.rows.size(); ++i)
    for (VertexId j : near.rows[i]) edges.push_back({static_cast<VertexId>(i), j});
  return SparseGraph::from_edges(cloud.size(), std::move(edges));
}

SparseGraph build_graph(const NeighborIndex& index, const SubsampleRule& rule,
                        const SeedSpec& seed, unsigned threads) {
  validate(rule);
  return std::visit(
      [&](const auto& r) -> SparseGraph {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, KnnRule>) {
          return build_knn_graph(index, r.k, threads);
        } else if constexpr (std::is_same_v<R, BernoulliRule>) {
          return build_bernoulli_graph(index, r.K, r.p, seed, threads);
        } else if constexpr (std::is_same_v<R, ChooseRule>) {
          return build_choose_k_graph(index, r.k, r.K, seed, threads);
        } else {
          return build_algorithm1_graph(index.cloud(), r.k, r.K, seed, threads);
        }
      },
      rule);
}

std::vector<double> adaptive_bandwidths(const NeighborIndex& index, std::size_t bandwidth_rank,
                                        unsigned threads) {
  if (bandwidth_rank == 0) throw std::invalid_argument("bandwidth rank must be at least 1");
  const std::size_t n = index.size();
  std::vector<double> sigma(n, 0.0);
  if (n < 2) return sigma;
  parallel_for(n, threads,
               [&](std::size_t i) { sigma[i] = index.knn(i, bandwidth_rank).distances.back(); });

  double smallest_positive = std::numeric_limits<double>::infinity();
  for (double s : sigma)
    if (s > 0.0) smallest_positive = std::min(smallest_positive, s);
  if (!std::isfinite(smallest_positive))
    throw std::invalid_argument("all points coincide; Gaussian bandwidth undefined");
  for (double& s : sigma)
    if (s == 0.0) s = smallest_positive;
  return sigma;
}

SparseGraph gaussian_affinity(const SparseGraph& graph, const PointCloud& cloud,
                              std::size_t bandwidth_rank, unsigned threads) {
  if (graph.num_vertices() != cloud.size())
    throw std::invalid_argument("graph and cloud sizes differ");
  if (bandwidth_rank == 0) throw std::invalid_argument("bandwidth rank must be at least 1");
  if (cloud.size() < 2) return SparseGraph::from_weighted_edges(cloud.size(), {});
  const NeighborIndex index(cloud, false);
  const std::vector<double> sigma = adaptive_bandwidths(index, bandwidth_rank, threads);

  std::vector<WeightedEdge> weighted;
  weighted.reserve(graph.num_edges());
  for (const Edge& e : graph.edges()) {
    const double d2 = squared_distance(cloud.point(e.u), cloud.point(e.v), false);
    // Floor at the smallest normal double: weights must stay strictly positive.
    const double w = std::exp(-d2 / (sigma[e.u] * sigma[e.v]));
    weighted.push_back({e.u, e.v, std::max(w, std::numeric_limits<double>::min())});
  }
  return SparseGraph::from_weighted_edges(cloud.size(), std::move(weighted));
}

}  // namespace nngraph

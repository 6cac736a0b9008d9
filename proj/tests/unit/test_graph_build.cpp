#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"

#include "nngraph/components.hpp"
#include "nngraph/sparse_graph.hpp"

using namespace nngraph;

namespace {

bool symmetric(const SparseGraph& g) {
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    const auto nbrs = g.neighbors(v);
    if (!std::is_sorted(nbrs.begin(), nbrs.end())) return false;
    if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end()) return false;
    for (auto w : nbrs)
      if (w == v || !g.has_edge(w, v)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("sparse graph construction") {
  const auto g = SparseGraph::from_edges(4, {{0, 1}, {1, 0}, {2, 2}, {3, 1}});
  CHECK(g.num_edges() == 2);
  CHECK(g.has_edge(1, 3));
  CHECK_FALSE(g.has_edge(2, 2));
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {1, 3}});
  CHECK(symmetric(g));
  CHECK_THROWS_AS(SparseGraph::from_edges(2, {{0, 2}}), std::out_of_range);

  const auto w = SparseGraph::from_weighted_edges(3, {{2, 0, 0.5}, {0, 2, 0.9}, {1, 2, 0.25}});
  CHECK(w.num_edges() == 2);
  CHECK(w.weights(0)[0] == 0.5);

  std::ostringstream out;
  write_edge_list_csv(w, out);
  CHECK(out.str() == "0,2,0.5\n1,2,0.25\n");
}

TEST_CASE("rule validation") {
  CHECK_THROWS(validate(KnnRule{0}));
  CHECK_THROWS(validate(BernoulliRule{5, 0.0}));
  CHECK_THROWS(validate(BernoulliRule{5, 1.5}));
  CHECK_THROWS(validate(ChooseRule{3, 2}));
  CHECK_THROWS(validate(Algorithm1Rule{2, 2}));
  CHECK_NOTHROW(validate(ChooseRule{2, 7}));
}

TEST_CASE("knn graph") {
  SUBCASE("two points") {
    const NeighborIndex index(PointCloud(2, {0.1, 0.1, 0.9, 0.9}), false);
    CHECK(build_knn_graph(index, 1).num_edges() == 1);
  }
  SUBCASE("single point stays isolated") {
    const NeighborIndex index(PointCloud(2, {0.1, 0.1}), false);
    const auto g = build_knn_graph(index, 3);
    CHECK(g.num_vertices() == 1);
    CHECK(g.num_edges() == 0);
  }
  SUBCASE("k = n - 1 is complete") {
    const NeighborIndex index(sample_uniform(30, 2, {1, 0}), false);
    CHECK(build_knn_graph(index, 29).num_edges() == 30 * 29 / 2);
  }
  SUBCASE("degrees, symmetry and edge count bounds") {
    for (std::size_t k = 1; k <= 4; ++k) {
      const NeighborIndex index(sample_uniform(300, 2, {2, k}), false);
      const auto g = build_knn_graph(index, k);
      CHECK(symmetric(g));
      for (std::size_t v = 0; v < 300; ++v) CHECK(g.degree(v) >= k);
      CHECK(g.num_edges() >= 300 * k / 2);
      CHECK(g.num_edges() <= kPlanarDegreeConstant * 300 * k);
      const auto rev = reverse_degrees(index, k);
      CHECK(*std::max_element(rev.begin(), rev.end()) <= 6 * k);
    }
  }
}

TEST_CASE("bernoulli graph") {
  const auto cloud = sample_uniform(10000, 2, {3, 0});
  const NeighborIndex index(cloud, false);

  SUBCASE("p = 1 equals the knn graph") {
    CHECK(build_bernoulli_graph(index, 6, 1.0, {3, 1}) == build_knn_graph(index, 6));
  }
  SUBCASE("mean out-draws is K p") {
    const auto table = index.knn_all(20);
    const std::uint64_t key = SeedSpec{3, 2}.derived();
    double draws = 0.0;
    for (std::size_t i = 0; i < table.rows(); ++i)
      for (auto j : table.neighbors(i)) draws += hashed_uniform(key, i, j) < 0.15;
    CHECK(std::abs(draws / 10000.0 - 3.0) < 0.1);
    // The builder keeps exactly those draws.
    const auto g = build_bernoulli_graph(index, 20, 0.15, {3, 2});
    for (std::size_t i = 0; i < table.rows(); i += 97)
      for (auto j : table.neighbors(i))
        if (hashed_uniform(key, i, j) < 0.15) CHECK(g.has_edge(i, j));
  }
  SUBCASE("vanishing p leaves isolated vertices") {
    const auto g = build_bernoulli_graph(index, 10, 1e-9, {3, 3});
    CHECK(g.num_edges() <= 1);
    CHECK(connected_components(g).num_components() >= 9999);
  }
  SUBCASE("edge sets nested in p under a shared seed") {
    const SeedSpec seed{3, 4};
    SparseGraph previous = build_bernoulli_graph(index, 12, 0.05, seed);
    for (double p : {0.1, 0.3, 0.6, 0.9}) {
      const auto next = build_bernoulli_graph(index, 12, p, seed);
      for (const auto& e : previous.edges()) REQUIRE(next.has_edge(e.u, e.v));
      previous = next;
    }
  }
  SUBCASE("thread count does not matter") {
    CHECK(build_bernoulli_graph(index, 8, 0.4, {3, 5}, 1) == build_bernoulli_graph(index, 8, 0.4, {3, 5}, 3));
  }
}

TEST_CASE("choose-k graph") {
  const auto cloud = sample_uniform(3000, 2, {4, 0});
  const NeighborIndex index(cloud, false);
  CHECK_THROWS_AS(build_choose_k_graph(index, 3, 2, {4, 1}), std::invalid_argument);
  CHECK(build_choose_k_graph(index, 5, 5, {4, 1}) == build_knn_graph(index, 5));
  CHECK(build_choose_k_graph(index, 5, 5, {4, 1}) == build_bernoulli_graph(index, 5, 1.0, {4, 2}));

  const auto g = build_choose_k_graph(index, 2, 7, {4, 3});
  CHECK(symmetric(g));
  for (std::size_t v = 0; v < cloud.size(); ++v) CHECK(g.degree(v) >= 2);
  CHECK(build_choose_k_graph(index, 2, 7, {4, 3}, 4) == g);

  // Each vertex's choices lie among its 7 nearest and are near-uniform.
  const auto table = index.knn_all(7);
  std::vector<double> rank_hits(7, 0.0);
  for (std::size_t v = 0; v < cloud.size(); ++v) {
    std::size_t own = 0;
    for (std::size_t r = 0; r < 7; ++r)
      if (g.has_edge(v, table.neighbors(v)[r])) {
        ++own;
        rank_hits[r] += 1.0;
      }
    CHECK(own >= 2);
  }
  for (double h : rank_hits) CHECK(h > 3000.0 * 2.0 / 7.0 * 0.85);
}

TEST_CASE("spiral dataset under knn(2) and choose(2,7)") {
  const auto cloud = make_spiral_clusters(16000, {5, 0});
  const NeighborIndex index(cloud, false);
  const auto knn2 = connected_components(build_knn_graph(index, 2)).num_components();
  const auto chosen = connected_components(build_choose_k_graph(index, 2, 7, {5, 1})).num_components();
  CHECK(knn2 >= 100);
  CHECK(chosen <= 10);
}

TEST_CASE("algorithm 1 graph") {
  const auto cloud = sample_uniform(60, 2, {6, 0});
  SUBCASE("K = n gives a star around the two subset members") {
    const auto rows = algorithm1_near_subset(cloud, 2, 60, {6, 1});
    const auto g = build_algorithm1_graph(cloud, 2, 60, {6, 1});
    const VertexId a = rows.subset[0], b = rows.subset[1];
    for (std::size_t v = 0; v < 60; ++v) {
      if (v == a || v == b) continue;
      CHECK(g.has_edge(v, a));
      CHECK(g.has_edge(v, b));
      CHECK(g.degree(v) == 2);
    }
    CHECK(g.has_edge(a, b));
  }
  SUBCASE("edges are exactly the rows") {
    const auto rows = algorithm1_near_subset(cloud, 3, 20, {6, 2});
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < rows.rows.size(); ++i)
      for (auto j : rows.rows[i]) edges.push_back({static_cast<VertexId>(i), j});
    CHECK(build_algorithm1_graph(cloud, 3, 20, {6, 2}) == SparseGraph::from_edges(60, edges));
  }
  SUBCASE("giant component at n = 10^4") {
    const auto big = sample_uniform(10000, 2, {6, 3});
    int good = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto labels = connected_components(build_algorithm1_graph(big, 2, 100, {6, 10 + s}));
      good += labels.giant_size() >= 9000;
    }
    CHECK(good >= 18);
  }
}

TEST_CASE("gaussian affinity") {
  SUBCASE("plug-in values") {
    // Points 0,1,2 on a line; 3 coincides with 0.
    const PointCloud cloud(1, {0.2, 0.5, 0.6, 0.2});
    const NeighborIndex index(cloud, false);
    const auto sigma = adaptive_bandwidths(index, 1);
    // sigma_0 = sigma_3 = 0 (duplicates) replaced by the smallest positive, 0.1.
    CHECK(sigma[0] == doctest::Approx(0.1));
    CHECK(sigma[1] == doctest::Approx(0.1));
    const auto g = gaussian_affinity(SparseGraph::from_edges(4, {{0, 1}, {1, 2}, {0, 3}}), cloud, 1);
    CHECK(g.weighted());
    CHECK(g.weights(3)[0] == 1.0);
    CHECK(g.weights(2)[0] == doctest::Approx(std::exp(-1.0)));
    CHECK(g.weights(0)[0] == doctest::Approx(std::exp(-9.0)));
  }
  SUBCASE("all coincident rejected") {
    const PointCloud cloud(2, {0.3, 0.3, 0.3, 0.3});
    CHECK_THROWS_AS(gaussian_affinity(SparseGraph::from_edges(2, {{0, 1}}), cloud, 1), std::invalid_argument);
  }
  SUBCASE("uniform bandwidth on a grid: weight decreasing in length") {
    std::vector<double> coords;
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x) {
        coords.push_back(x / 9.0);
        coords.push_back(y / 9.0);
      }
    const PointCloud grid(2, coords);
    const NeighborIndex index(grid, false);
    const auto g = gaussian_affinity(build_knn_graph(index, 12), grid, 1);
    std::vector<std::pair<double, double>> length_weight;
    for (std::size_t v = 0; v < g.num_vertices(); ++v)
      for (std::size_t e = 0; e < g.degree(v); ++e) {
        const auto w = g.neighbors(v)[e];
        length_weight.push_back({std::sqrt(squared_distance(grid.point(v), grid.point(w), false)), g.weights(v)[e]});
        CHECK(g.weights(v)[e] > 0.0);
        CHECK(g.weights(v)[e] <= 1.0);
      }
    std::sort(length_weight.begin(), length_weight.end());
    for (std::size_t i = 1; i < length_weight.size(); ++i)
      CHECK(length_weight[i].second <= length_weight[i - 1].second * (1.0 + 1e-12));
  }
}

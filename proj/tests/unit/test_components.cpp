#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "nngraph/components.hpp"
#include "oracles.hpp"

using namespace nngraph;

TEST_CASE("disjoint set forest") {
  DisjointSetForest f(6);
  CHECK(f.num_sets() == 6);
  CHECK(f.unite(0, 1));
  CHECK(f.unite(1, 2));
  CHECK_FALSE(f.unite(0, 2));
  CHECK(f.find(0) == f.find(2));
  CHECK(f.find(f.find(2)) == f.find(2));
  CHECK(f.num_sets() == 4);
}

TEST_CASE("connected components basics") {
  const auto edgeless = SparseGraph::from_edges(7, {});
  CHECK(connected_components(edgeless).num_components() == 7);

  std::vector<Edge> all;
  for (VertexId u = 0; u < 8; ++u)
    for (VertexId v = u + 1; v < 8; ++v) all.push_back({u, v});
  CHECK(connected_components(SparseGraph::from_edges(8, all)).num_components() == 1);

  const auto labels = connected_components(SparseGraph::from_edges(5, {{3, 4}, {0, 2}}));
  CHECK(labels.label == std::vector<VertexId>{0, 1, 0, 2, 2});
  CHECK(labels.sizes == std::vector<std::size_t>{2, 1, 2});
  CHECK(labels.giant_size() == 2);
}

TEST_CASE("union-find agrees with breadth-first search") {
  std::mt19937_64 engine(1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + engine() % 50;
    const double p = std::uniform_real_distribution<double>(0.0, 0.15)(engine);
    const auto g = oracle::naive_random_graph(n, p, engine());
    const auto labels = connected_components(g);
    const auto expected = oracle::bfs_labels(g);
    REQUIRE(labels.num_vertices() == n);
    for (std::size_t v = 0; v < n; ++v) CHECK(labels.label[v] == expected[v]);
  }
}

TEST_CASE("adding edges never increases the count, removing raises it by at most one") {
  std::mt19937_64 engine(2);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 40;
    auto edges = oracle::naive_random_graph(n, 0.05, engine()).edges();
    const auto base = connected_components(SparseGraph::from_edges(n, edges)).num_components();
    if (!edges.empty()) {
      auto fewer = edges;
      fewer.erase(fewer.begin() + static_cast<long>(engine() % fewer.size()));
      const auto after = connected_components(SparseGraph::from_edges(n, fewer)).num_components();
      CHECK(after >= base);
      CHECK(after <= base + 1);
    }
    auto more = edges;
    more.push_back({static_cast<VertexId>(engine() % n), static_cast<VertexId>(engine() % n)});
    CHECK(connected_components(SparseGraph::from_edges(n, more)).num_components() <= base);
  }
}

TEST_CASE("component statistics") {
  SUBCASE("singletons and a pair") {
    const PointCloud cloud(2, {0.1, 0.1, 0.5, 0.5, 0.5, 0.8});
    const auto labels = connected_components(SparseGraph::from_edges(3, {{1, 2}}));
    const auto stats = component_stats(labels, cloud);
    CHECK(stats.num_components == 2);
    CHECK(stats.diameters[0] == 0.0);
    CHECK(stats.diameters[1] == doctest::Approx(0.3));
    CHECK(stats.giant_size == 2);
    CHECK(stats.giant_fraction == doctest::Approx(2.0 / 3.0));
    CHECK_FALSE(stats.approximate);

    const auto j = to_json(stats);
    CHECK(j["num_components"] == 2);
    CHECK(j["approx_flag"] == false);
    CHECK(j["diameter_max"].get<double>() == doctest::Approx(0.3));
  }
  SUBCASE("large components use the bounding box bound") {
    const auto cloud = sample_uniform(2500, 2, {3, 0});
    std::vector<Edge> path;
    for (VertexId v = 1; v < 2500; ++v) path.push_back({v - 1, v});
    const auto stats = component_stats(connected_components(SparseGraph::from_edges(2500, path)), cloud);
    CHECK(stats.approximate);
    CHECK(stats.diameter_is_bound[0]);
    double lo[2] = {1, 1}, hi[2] = {0, 0};
    for (std::size_t i = 0; i < 2500; ++i)
      for (int a = 0; a < 2; ++a) {
        lo[a] = std::min(lo[a], cloud.coord(i, a));
        hi[a] = std::max(hi[a], cloud.coord(i, a));
      }
    CHECK(stats.diameters[0] == doctest::Approx(std::hypot(hi[0] - lo[0], hi[1] - lo[1])));
  }
  SUBCASE("size mismatch rejected") {
    CHECK_THROWS(component_stats(connected_components(SparseGraph::from_edges(2, {})), PointCloud(1, {0.5})));
  }
}

TEST_CASE("knn distance sum") {
  CHECK(knn_distance_sum(NeighborIndex(PointCloud(2, {0.3, 0.3}), false), 2) == 0.0);
  const PointCloud corners(2, {0, 0, 0, 1, 1, 0, 1, 1});
  CHECK(knn_distance_sum(NeighborIndex(corners, false), 1) == doctest::Approx(4.0));

  std::vector<double> scaled;
  for (std::size_t n : {1000, 10000, 100000}) {
    const NeighborIndex index(sample_uniform(n, 2, {4, n}), false);
    scaled.push_back(knn_distance_sum(index, 3) / std::sqrt(static_cast<double>(n)));
  }
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  CHECK(*hi / *lo < 1.5);
}

TEST_CASE("reverse degree") {
  CHECK(max_reverse_degree(NeighborIndex(PointCloud(1, {0.1, 0.9}), false), 1) == 1);

  SUBCASE("five pairs around a center") {
    // Angles in degrees: each pair is tight, neighboring pairs are more than
    // 60 degrees apart, so every outer point has the center among its two
    // nearest neighbors.
    std::vector<double> coords{0.5, 0.5};
    for (double base : {0.0, 73.0, 144.0, 216.0, 288.0})
      for (double offset : {0.0, 10.0}) {
        const double a = (base + offset) * std::numbers::pi / 180.0;
        coords.push_back(0.5 + 0.4 * std::cos(a));
        coords.push_back(0.5 + 0.4 * std::sin(a));
      }
    const NeighborIndex index(PointCloud(2, coords), false);
    const auto rev = reverse_degrees(index, 2);
    CHECK(rev[0] == 10);
    CHECK(max_reverse_degree(index, 2) == 10);
  }

  SUBCASE("random planar clouds respect the cone bound") {
    for (std::uint64_t t = 0; t < 100; ++t) {
      const NeighborIndex index(sample_uniform(200, 2, {5, t}), false);
      for (std::size_t k = 1; k <= 3; ++k) CHECK(max_reverse_degree(index, k) <= 6 * k);
    }
  }

  SUBCASE("inserting a point changes the component count by at most c_d k") {
    for (std::uint64_t t = 0; t < 50; ++t) {
      const auto cloud = sample_uniform(301, 2, {6, t});
      std::vector<std::size_t> first(300);
      for (std::size_t i = 0; i < 300; ++i) first[i] = i;
      for (std::size_t k = 1; k <= 3; ++k) {
        const auto before = connected_components(build_knn_graph(NeighborIndex(cloud.subset(first), false), k));
        const auto after = connected_components(build_knn_graph(NeighborIndex(cloud, false), k));
        const long diff = static_cast<long>(after.num_components()) - static_cast<long>(before.num_components());
        CHECK(std::abs(diff) <= static_cast<long>(kPlanarDegreeConstant * k));
      }
    }
  }
}

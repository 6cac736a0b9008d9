#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"

#include "nngraph/components.hpp"
#include "nngraph/spectral.hpp"
#include "oracles.hpp"

using namespace nngraph;

namespace {

SparseGraph weighted_random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::vector<WeightedEdge> edges;
  for (const auto& e : oracle::naive_random_graph(n, p, seed).edges()) edges.push_back({e.u, e.v, weight(engine)});
  return SparseGraph::from_weighted_edges(n, std::move(edges));
}

Eigen::VectorXd random_vector(std::size_t n, std::mt19937_64& engine) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = g(engine);
  return v;
}

// Fraction of rows whose nearest group centroid is their own group's.
double centroid_hit_rate(const Eigen::MatrixXd& rows, const std::vector<int>& labels, int groups) {
  Eigen::MatrixXd centroid = Eigen::MatrixXd::Zero(groups, rows.cols());
  std::vector<double> count(groups, 0.0);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    centroid.row(labels[i]) += rows.row(i);
    count[labels[i]] += 1.0;
  }
  for (int g = 0; g < groups; ++g) centroid.row(g) /= count[g];
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    Eigen::Index best = 0;
    (centroid.rowwise() - rows.row(i)).rowwise().squaredNorm().minCoeff(&best);
    correct += best == labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(rows.rows());
}

}  // namespace

TEST_CASE("operator symmetry, semidefiniteness and null vectors") {
  std::mt19937_64 engine(1);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 20 + engine() % 80;
    const auto g = weighted_random_graph(n, 0.05, engine());
    for (auto mode : {LaplacianMode::unnormalized, LaplacianMode::symmetric_normalized}) {
      const LaplacianOperator op(g, mode);
      const auto u = random_vector(n, engine), v = random_vector(n, engine);
      const double a = op.apply(u).dot(v), b = u.dot(op.apply(v));
      CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
      CHECK(u.dot(op.apply(u)) >= -1e-10 * u.squaredNorm());

      const auto labels = connected_components(g);
      for (std::size_t c = 0; c < labels.num_components(); ++c) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
          if (labels.label[i] == c)
            x[static_cast<Eigen::Index>(i)] =
                mode == LaplacianMode::unnormalized ? 1.0 : std::sqrt(op.degrees()[i]);
        CHECK(op.apply(x).norm() <= 1e-12 * std::max(1.0, x.norm()));
      }
      CHECK((op.to_dense() - Eigen::MatrixXd(op.to_sparse())).norm() <= 1e-14 * std::max(1.0, op.to_dense().norm()));
    }
  }
  CHECK_THROWS(LaplacianOperator(SparseGraph::from_weighted_edges(2, {{0, 1, 0.0}}), LaplacianMode::unnormalized));
}

TEST_CASE("small spectra by hand") {
  const auto two_edges = SparseGraph::from_edges(4, {{0, 1}, {2, 3}});
  const auto dense = oracle::jacobi_eigen(LaplacianOperator(two_edges, LaplacianMode::unnormalized).to_dense());
  CHECK(dense.values[0] == doctest::Approx(0.0));
  CHECK(dense.values[1] == doctest::Approx(0.0));
  CHECK(dense.values[2] == doctest::Approx(2.0));
  CHECK(dense.values[3] == doctest::Approx(2.0));
  const auto it = smallest_eigenpairs(LaplacianOperator(two_edges, LaplacianMode::unnormalized), 4);
  for (int j = 0; j < 4; ++j) CHECK(std::abs(it.eigenvalues[j] - dense.values[j]) < 1e-8);

  const auto edge = SparseGraph::from_weighted_edges(2, {{0, 1, 0.7}});
  const auto e = smallest_eigenpairs(LaplacianOperator(edge, LaplacianMode::unnormalized), 2);
  CHECK(e.eigenvalues[1] == doctest::Approx(1.4));

  SUBCASE("an isolated vertex is a null direction of L_sym") {
    const auto g = SparseGraph::from_edges(3, {{0, 1}});
    const LaplacianOperator op(g, LaplacianMode::symmetric_normalized);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
    x[2] = 1.0;
    CHECK(op.apply(x).norm() == 0.0);
    const auto r = smallest_eigenpairs(op, 3);
    CHECK(std::abs(r.eigenvalues[0]) < 1e-8);
    CHECK(std::abs(r.eigenvalues[1]) < 1e-8);
    CHECK(r.eigenvalues[2] == doctest::Approx(2.0));
  }
  SUBCASE("complete graph") {
    for (std::size_t n : {5, 12, 40}) {
      std::vector<Edge> edges;
      for (VertexId u = 0; u < n; ++u)
        for (VertexId v = u + 1; v < n; ++v) edges.push_back({u, v});
      const auto r = smallest_eigenpairs(LaplacianOperator(SparseGraph::from_edges(n, edges), LaplacianMode::unnormalized), 2);
      CHECK(std::abs(r.eigenvalues[0]) < 1e-8);
      CHECK(r.eigenvalues[1] == doctest::Approx(static_cast<double>(n)).epsilon(1e-10));
    }
  }
}

TEST_CASE("normalized spectrum lies in [0, 2]") {
  std::mt19937_64 engine(2);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + engine() % 99;
    const auto g = weighted_random_graph(n, std::uniform_real_distribution<double>(0.0, 0.3)(engine), engine());
    const auto dense = oracle::jacobi_eigen(LaplacianOperator(g, LaplacianMode::symmetric_normalized).to_dense());
    CHECK(dense.values.front() >= -1e-10);
    CHECK(dense.values.back() <= 2.0 + 1e-10);
  }
}

TEST_CASE("zero multiplicity equals component count; iterative matches dense") {
  std::mt19937_64 engine(3);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 10 + engine() % 191;
    const double p = std::uniform_real_distribution<double>(0.2, 3.0)(engine) / static_cast<double>(n);
    const auto g = weighted_random_graph(n, p, engine());
    const LaplacianOperator op(g, LaplacianMode::symmetric_normalized);
    const std::size_t c = oracle::bfs_component_count(g);
    const auto dense = oracle::jacobi_eigen(op.to_dense());
    const auto zeros = static_cast<std::size_t>(
        std::count_if(dense.values.begin(), dense.values.end(), [](double x) { return x < 1e-8; }));
    CHECK(zeros == c);
    CHECK(zeros == connected_components(g).num_components());

    const std::size_t p_want = std::min(n, c + 2);
    for (auto method : {EigenMethod::shift_invert, EigenMethod::shifted_lanczos}) {
      const auto r = smallest_eigenpairs(op, p_want, 1e-9, 0, {3, static_cast<std::uint64_t>(t)}, method);
      for (std::size_t j = 0; j < p_want; ++j) {
        CHECK(std::abs(r.eigenvalues[j] - dense.values[j]) < 1e-8);
        CHECK(r.residuals[j] <= 1e-9);
      }
      for (std::size_t j = 0; j < c; ++j) CHECK(r.eigenvalues[j] < 1e-8);
      if (c < n) CHECK(r.eigenvalues[c] >= 1e-8);
      const Eigen::MatrixXd gram = r.eigenvectors.transpose() * r.eigenvectors;
      CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("full spectrum of a 10-vertex graph") {
  const auto g = weighted_random_graph(10, 0.4, 11);
  for (auto mode : {LaplacianMode::unnormalized, LaplacianMode::symmetric_normalized}) {
    const LaplacianOperator op(g, mode);
    const auto dense = oracle::jacobi_eigen(op.to_dense());
    const auto r = smallest_eigenpairs(op, 10);
    for (std::size_t j = 0; j < 10; ++j) CHECK(std::abs(r.eigenvalues[j] - dense.values[j]) < 1e-8);
  }
}

TEST_CASE("adding an edge never lowers the top unnormalized eigenvalue") {
  std::mt19937_64 engine(4);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 5 + engine() % 40;
    auto edges = oracle::naive_random_graph(n, 0.15, engine()).edges();
    const double before =
        oracle::jacobi_eigen(LaplacianOperator(SparseGraph::from_edges(n, edges), LaplacianMode::unnormalized).to_dense())
            .values.back();
    edges.push_back({static_cast<VertexId>(engine() % n), static_cast<VertexId>(engine() % n)});
    const double after =
        oracle::jacobi_eigen(LaplacianOperator(SparseGraph::from_edges(n, edges), LaplacianMode::unnormalized).to_dense())
            .values.back();
    CHECK(after >= before - 1e-10);
  }
}

TEST_CASE("solver argument checks and failure reporting") {
  const LaplacianOperator op(SparseGraph::from_edges(3, {{0, 1}}), LaplacianMode::unnormalized);
  CHECK_THROWS_AS(smallest_eigenpairs(op, 0), std::invalid_argument);
  CHECK_THROWS_AS(smallest_eigenpairs(op, 4), std::invalid_argument);
  CHECK_THROWS_AS(smallest_eigenpairs(op, 1, 0.0), std::invalid_argument);

  // A long path has a tightly clustered low spectrum; one block step of the
  // polynomial iteration cannot resolve it.
  std::vector<Edge> path;
  for (VertexId v = 1; v < 3000; ++v) path.push_back({v - 1, v});
  const LaplacianOperator long_path(SparseGraph::from_edges(3000, path), LaplacianMode::symmetric_normalized);
  try {
    smallest_eigenpairs(long_path, 3, 1e-10, 1, {}, EigenMethod::shifted_lanczos);
    FAIL("expected non-convergence");
  } catch (const EigenSolveError& e) {
    CHECK(e.best().eigenvalues.size() == 3);
    CHECK(e.best().residuals.size() == 3);
    CHECK(e.best().iterations == 1);
  }
  const auto ok = smallest_eigenpairs(long_path, 3, 1e-10);
  for (double r : ok.residuals) CHECK(r <= 1e-10);
}

TEST_CASE("spectral embedding") {
  SUBCASE("two separated blobs") {
    std::mt19937_64 engine(5);
    std::normal_distribution<double> g(0.0, 0.03);
    std::vector<double> coords;
    std::vector<int> labels;
    for (int i = 0; i < 400; ++i) {
      const int blob = i % 2;
      coords.push_back(std::clamp((blob ? 0.8 : 0.2) + g(engine), 0.0, 1.0));
      coords.push_back(std::clamp(0.5 + g(engine), 0.0, 1.0));
      labels.push_back(blob);
    }
    const PointCloud cloud(2, coords, labels);
    const auto emb = spectral_embed(cloud, KnnRule{6}, 6, 2, 1e-8, {5, 1});
    CHECK(centroid_hit_rate(emb.coordinates, labels, 2) == 1.0);
    for (Eigen::Index i = 0; i < emb.coordinates.rows(); ++i) CHECK(emb.coordinates.row(i).norm() == doctest::Approx(1.0));
  }
  SUBCASE("p = 1 on a connected graph gives identical rows up to sign") {
    const auto cloud = sample_uniform(300, 2, {6, 0});
    const auto emb = spectral_embed(cloud, KnnRule{10}, 5, 1, 1e-10, {6, 1});
    REQUIRE(connected_components(emb.graph).num_components() == 1);
    for (Eigen::Index i = 0; i < emb.coordinates.rows(); ++i)
      CHECK(std::abs(emb.coordinates(i, 0) * emb.coordinates(0, 0)) == doctest::Approx(1.0));
  }
  SUBCASE("spiral dataset groups separate") {
    const auto cloud = make_spiral_clusters(16000, {8, 0});
    const auto emb = spectral_embed(cloud, ChooseRule{2, 7}, 7, 5, 1e-8, {8, 1});
    for (double r : emb.eigen.residuals) CHECK(r <= 1e-8);
    CHECK(centroid_hit_rate(emb.coordinates, cloud.labels(), 5) >= 0.95);
  }
}

TEST_CASE("matrix CSV") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, -0.5, 0.1, 2.0;
  std::ostringstream out;
  write_matrix_csv(m, out);
  CHECK(out.str() == "1,-0.5\n0.10000000000000001,2\n");
}

#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "nngraph/point_cloud.hpp"
#include "nngraph/seed.hpp"
#include "nngraph/sparse_graph.hpp"

namespace nngraph {

enum class LaplacianMode {
  unnormalized,          // L = D - W
  symmetric_normalized,  // L_sym = I - D^{-1/2} W D^{-1/2}
};

/// Matrix-free graph Laplacian. Unweighted graphs use unit weights.
///
/// In normalized mode a vertex of degree zero gets D^{-1/2} = 0 and a zero
/// row, so each isolated vertex is an exact null direction.
class LaplacianOperator {
 public:
  LaplacianOperator(SparseGraph graph, LaplacianMode mode);

  std::size_t size() const { return graph_.num_vertices(); }
  LaplacianMode mode() const { return mode_; }
  const std::vector<double>& degrees() const { return degree_; }
  const SparseGraph& graph() const { return graph_; }

  /// out = L in; O(edges).
  void apply(const double* in, double* out) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

  /// An upper bound on the largest eigenvalue (2 for L_sym, 2 max degree for L).
  double spectrum_upper_bound() const;

  /// Dense copy, for small graphs.
  Eigen::MatrixXd to_dense() const;

  /// Compressed sparse copy of L + shift I.
  Eigen::SparseMatrix<double> to_sparse(double shift = 0.0) const;

 private:
  SparseGraph graph_;
  LaplacianMode mode_;
  std::vector<double> degree_;
  std::vector<double> inv_sqrt_degree_;
};

struct EigenResult {
  std::vector<double> eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;      // n x p, orthonormal columns
  std::vector<double> residuals;     // |L v - lambda v| per pair
  std::size_t iterations = 0;        // block expansion steps
};

/// Raised when the solver runs out of iterations; carries its best estimate.
class EigenSolveError : public std::runtime_error {
 public:
  EigenSolveError(const std::string& what, EigenResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const EigenResult& best() const { return best_; }

 private:
  EigenResult best_;
};

/// Default iteration budget: 50 p + 200 block steps.
inline std::size_t default_max_iterations(std::size_t p) { return 50 * p + 200; }

/// Operator whose dominant eigenvectors generate the Krylov space.
enum class EigenMethod {
  /// (L + delta I)^{-1} through a sparse LDLT factorization, delta tiny.
  /// Resolves clusters of near-zero eigenvalues, such as those of long
  /// chain-like components, in a handful of iterations.
  shift_invert,
  /// sigma I - L with sigma = spectrum_upper_bound(); matrix-free, but the
  /// iteration count grows like 1/sqrt(gap) for tightly clustered spectra.
  shifted_lanczos,
};

/// p smallest eigenpairs of L to residual |L v - lambda v| <= tol.
///
/// Thick-restarted block Lanczos with full reorthogonalization. The block is
/// wider than p, so repeated eigenvalues (one zero per connected component)
/// are resolved. Ritz pairs always come from projecting L itself.
EigenResult smallest_eigenpairs(const LaplacianOperator& op, std::size_t p, double tol = 1e-8,
                                std::size_t max_iter = 0, const SeedSpec& seed = {},
                                EigenMethod method = EigenMethod::shift_invert);

struct SpectralEmbedding {
  Eigen::MatrixXd coordinates;  // n x p, rows normalized to unit length (zero rows stay zero)
  EigenResult eigen;
  SparseGraph graph;            // weighted affinity graph the embedding came from
};

/// Graph per `rule`, Gaussian affinities with adaptive bandwidth, L_sym, its p
/// smallest eigenvectors, then row normalization.
SpectralEmbedding spectral_embed(const PointCloud& cloud, const SubsampleRule& rule,
                                 std::size_t bandwidth_rank, std::size_t p, double tol,
                                 const SeedSpec& seed, std::size_t max_iter = 0,
                                 unsigned threads = 1,
                                 EigenMethod method = EigenMethod::shift_invert);

/// Fraction of rows lying closer to their own label's centroid than to any
/// other label's. Labels must be in [0, groups).
double nearest_centroid_accuracy(const Eigen::MatrixXd& rows, const std::vector<int>& labels,
                                 int groups);

/// n rows x p columns CSV.
void write_matrix_csv(const Eigen::MatrixXd& matrix, std::ostream& out);

}  // namespace nngraph

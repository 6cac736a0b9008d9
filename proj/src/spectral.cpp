#include "nngraph/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "nngraph/format.hpp"
#include "nngraph/neighbor_index.hpp"

namespace nngraph {

LaplacianOperator::LaplacianOperator(SparseGraph graph, LaplacianMode mode)
    : graph_(std::move(graph)), mode_(mode) {
  const std::size_t n = graph_.num_vertices();
  degree_.assign(n, 0.0);
  inv_sqrt_degree_.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    if (graph_.weighted()) {
      for (double w : graph_.weights(v)) {
        if (!(w > 0.0)) throw std::invalid_argument("Laplacian needs positive edge weights");
        degree_[v] += w;
      }
    } else {
      degree_[v] = static_cast<double>(graph_.degree(v));
    }
    if (degree_[v] > 0.0) inv_sqrt_degree_[v] = 1.0 / std::sqrt(degree_[v]);
  }
}

void LaplacianOperator::apply(const double* in, double* out) const {
  const std::size_t n = size();
  const bool weighted = graph_.weighted();
  for (std::size_t i = 0; i < n; ++i) {
    const auto nbrs = graph_.neighbors(i);
    const auto wts = graph_.weights(i);
    double acc = 0.0;
    if (mode_ == LaplacianMode::unnormalized) {
      for (std::size_t e = 0; e < nbrs.size(); ++e) acc += (weighted ? wts[e] : 1.0) * in[nbrs[e]];
      out[i] = degree_[i] * in[i] - acc;
    } else {
      if (degree_[i] == 0.0) {
        out[i] = 0.0;
        continue;
      }
      for (std::size_t e = 0; e < nbrs.size(); ++e)
        acc += (weighted ? wts[e] : 1.0) * inv_sqrt_degree_[nbrs[e]] * in[nbrs[e]];
      out[i] = in[i] - inv_sqrt_degree_[i] * acc;
    }
  }
}

Eigen::VectorXd LaplacianOperator::apply(const Eigen::VectorXd& v) const {
  if (static_cast<std::size_t>(v.size()) != size()) throw std::invalid_argument("vector size mismatch");
  Eigen::VectorXd out(v.size());
  apply(v.data(), out.data());
  return out;
}

double LaplacianOperator::spectrum_upper_bound() const {
  if (mode_ == LaplacianMode::symmetric_normalized) return 2.0;
  const double max_degree = degree_.empty() ? 0.0 : *std::max_element(degree_.begin(), degree_.end());
  return 2.0 * max_degree;
}

Eigen::MatrixXd LaplacianOperator::to_dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd dense(n, n);
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    unit[j] = 1.0;
    dense.col(j) = apply(unit);
    unit[j] = 0.0;
  }
  return dense;
}

Eigen::SparseMatrix<double> LaplacianOperator::to_sparse(double shift) const {
  const std::size_t n = size();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(n + 2 * graph_.num_edges());
  const bool weighted = graph_.weighted();
  for (std::size_t i = 0; i < n; ++i) {
    const auto nbrs = graph_.neighbors(i);
    const auto wts = graph_.weights(i);
    const auto row = static_cast<Eigen::Index>(i);
    if (mode_ == LaplacianMode::unnormalized) {
      entries.emplace_back(row, row, degree_[i] + shift);
      for (std::size_t e = 0; e < nbrs.size(); ++e)
        entries.emplace_back(row, static_cast<Eigen::Index>(nbrs[e]), -(weighted ? wts[e] : 1.0));
    } else {
      entries.emplace_back(row, row, (degree_[i] > 0.0 ? 1.0 : 0.0) + shift);
      for (std::size_t e = 0; e < nbrs.size(); ++e)
        entries.emplace_back(row, static_cast<Eigen::Index>(nbrs[e]),
                             -(weighted ? wts[e] : 1.0) * inv_sqrt_degree_[i] * inv_sqrt_degree_[nbrs[e]]);
    }
  }
  Eigen::SparseMatrix<double> out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

namespace {

// Orthonormal basis V of a growing Krylov space together with L V.
class KrylovBasis {
 public:
  KrylovBasis(const LaplacianOperator& op, Eigen::Index n, Eigen::Index capacity, Engine& engine)
      : op_(op), v_(n, capacity), lv_(n, capacity), engine_(engine) {}

  Eigen::Index size() const { return cur_; }
  bool full() const { return cur_ == v_.cols() || cur_ == v_.rows(); }
  const Eigen::MatrixXd& v() const { return v_; }
  const Eigen::MatrixXd& lv() const { return lv_; }

  // Orthogonalizes w against the basis (two Gram-Schmidt passes) and appends
  // it. Directions already in the span are replaced by random vectors so the
  // block keeps its width across invariant subspaces.
  void append(Eigen::VectorXd w) {
    for (int attempt = 0; attempt < 4 && !full(); ++attempt) {
      const double original = w.norm();
      if (original > 0.0) {
        for (int pass = 0; pass < 2; ++pass) {
          const auto basis = v_.leftCols(cur_);
          w.noalias() -= basis * (basis.transpose() * w);
        }
        const double remaining = w.norm();
        if (remaining > 1e-10 * original) {
          v_.col(cur_) = w / remaining;
          op_.apply(v_.col(cur_).data(), lv_.col(cur_).data());
          ++cur_;
          return;
        }
      }
      w = random_vector();
    }
  }

  void reset(const Eigen::MatrixXd& y, const Eigen::MatrixXd& ly) {
    cur_ = y.cols();
    v_.leftCols(cur_) = y;
    lv_.leftCols(cur_) = ly;
  }

  Eigen::VectorXd random_vector() {
    Eigen::VectorXd r(v_.rows());
    for (Eigen::Index i = 0; i < r.size(); ++i) r[i] = uniform01(engine_) - 0.5;
    return r;
  }

 private:
  const LaplacianOperator& op_;
  Eigen::MatrixXd v_, lv_;
  Eigen::Index cur_ = 0;
  Engine& engine_;
};

// Maps a basis vector v (with L v) to the next Krylov direction.
class Expansion {
 public:
  Expansion(const LaplacianOperator& op, EigenMethod method) : method_(method) {
    if (method_ == EigenMethod::shifted_lanczos) {
      sigma_ = op.spectrum_upper_bound();
      return;
    }
    const double delta = 1e-10 * std::max(1.0, op.spectrum_upper_bound());
    factor_.compute(op.to_sparse(delta));
    if (factor_.info() != Eigen::Success) throw std::runtime_error("sparse factorization of L failed");
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& v, const Eigen::VectorXd& lv) const {
    if (method_ == EigenMethod::shifted_lanczos) return sigma_ * v - lv;
    return factor_.solve(v);
  }

 private:
  EigenMethod method_;
  double sigma_ = 0.0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor_;
};

}  // namespace

EigenResult smallest_eigenpairs(const LaplacianOperator& op, std::size_t p, double tol,
                                std::size_t max_iter, const SeedSpec& seed, EigenMethod method) {
  const auto n = static_cast<Eigen::Index>(op.size());
  if (p == 0 || static_cast<Eigen::Index>(p) > n)
    throw std::invalid_argument("requested eigenpair count must lie in [1, n]");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_iter == 0) max_iter = default_max_iterations(p);

  const auto want = static_cast<Eigen::Index>(p);
  const Eigen::Index block = std::min<Eigen::Index>(n, want + 3);
  const Eigen::Index capacity = std::min<Eigen::Index>(n, std::max<Eigen::Index>(want + 2 * block, 20 * block));
  const Eigen::Index keep_target =
      std::max<Eigen::Index>(want, std::min<Eigen::Index>(capacity - block, capacity / 2));

  const Expansion expand(op, method);
  Engine engine = make_engine(seed);
  KrylovBasis basis(op, n, capacity, engine);
  for (Eigen::Index j = 0; j < block; ++j) basis.append(basis.random_vector());

  std::vector<Eigen::Index> source(static_cast<std::size_t>(basis.size()));
  std::iota(source.begin(), source.end(), Eigen::Index{0});
  std::size_t iterations = 0;

  for (;;) {
    while (!basis.full() && iterations < max_iter) {
      std::vector<Eigen::VectorXd> next;
      next.reserve(source.size());
      for (Eigen::Index j : source) next.push_back(expand(basis.v().col(j), basis.lv().col(j)));
      const Eigen::Index start = basis.size();
      for (auto& w : next) {
        if (basis.full()) break;
        basis.append(std::move(w));
      }
      ++iterations;
      source.resize(static_cast<std::size_t>(basis.size() - start));
      std::iota(source.begin(), source.end(), start);
      if (source.empty()) break;
    }

    // Rayleigh-Ritz on L over the current basis; the smallest Ritz values
    // come first in Eigen's ascending order.
    const Eigen::Index m = basis.size();
    Eigen::MatrixXd h = basis.v().leftCols(m).transpose() * basis.lv().leftCols(m);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(h);
    const Eigen::Index kept = std::min(m, keep_target);
    const Eigen::MatrixXd y = basis.v().leftCols(m) * ritz.eigenvectors().leftCols(kept);
    const Eigen::MatrixXd ly = basis.lv().leftCols(m) * ritz.eigenvectors().leftCols(kept);
    std::vector<double> residual(static_cast<std::size_t>(kept));
    for (Eigen::Index j = 0; j < kept; ++j)
      residual[static_cast<std::size_t>(j)] = (ly.col(j) - ritz.eigenvalues()[j] * y.col(j)).norm();

    const bool exact = m == n;
    const bool converged =
        exact || std::all_of(residual.begin(), residual.begin() + want, [&](double r) { return r <= tol; });
    if (converged || iterations >= max_iter) {
      EigenResult result;
      result.iterations = iterations;
      result.eigenvectors = y.leftCols(want);
      for (Eigen::Index j = 0; j < want; ++j) {
        const Eigen::VectorXd lv = op.apply(Eigen::VectorXd(y.col(j)));
        const double lambda = y.col(j).dot(lv);
        result.eigenvalues.push_back(lambda);
        result.residuals.push_back((lv - lambda * y.col(j)).norm());
      }
      if (!converged) {
        throw EigenSolveError("eigensolver did not converge within " + std::to_string(max_iter) +
                                  " block iterations",
                              std::move(result));
      }
      return result;
    }

    basis.reset(y, ly);
    source.clear();
    for (Eigen::Index j = 0; j < kept && static_cast<Eigen::Index>(source.size()) < block; ++j)
      if (residual[static_cast<std::size_t>(j)] > tol) source.push_back(j);
  }
}

SpectralEmbedding spectral_embed(const PointCloud& cloud, const SubsampleRule& rule,
                                 std::size_t bandwidth_rank, std::size_t p, double tol,
                                 const SeedSpec& seed, std::size_t max_iter, unsigned threads,
                                 EigenMethod method) {
  const NeighborIndex index(cloud, false);
  SparseGraph affinity =
      gaussian_affinity(build_graph(index, rule, seed.child(0), threads), cloud, bandwidth_rank, threads);
  const LaplacianOperator op(affinity, LaplacianMode::symmetric_normalized);
  SpectralEmbedding out;
  out.eigen = smallest_eigenpairs(op, p, tol, max_iter, seed.child(1), method);
  out.coordinates = out.eigen.eigenvectors;
  for (Eigen::Index i = 0; i < out.coordinates.rows(); ++i) {
    const double norm = out.coordinates.row(i).norm();
    if (norm > 0.0) out.coordinates.row(i) /= norm;
  }
  out.graph = std::move(affinity);
  return out;
}

double nearest_centroid_accuracy(const Eigen::MatrixXd& rows, const std::vector<int>& labels,
                                 int groups) {
  if (labels.size() != static_cast<std::size_t>(rows.rows()))
    throw std::invalid_argument("one label per row required");
  if (groups <= 0 || rows.rows() == 0) return 0.0;
  Eigen::MatrixXd centroid = Eigen::MatrixXd::Zero(groups, rows.cols());
  std::vector<double> count(static_cast<std::size_t>(groups), 0.0);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const int g = labels[static_cast<std::size_t>(i)];
    if (g < 0 || g >= groups) throw std::invalid_argument("label out of range");
    centroid.row(g) += rows.row(i);
    count[static_cast<std::size_t>(g)] += 1.0;
  }
  for (int g = 0; g < groups; ++g)
    if (count[static_cast<std::size_t>(g)] > 0) centroid.row(g) /= count[static_cast<std::size_t>(g)];
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    Eigen::Index best = 0;
    (centroid.rowwise() - rows.row(i)).rowwise().squaredNorm().minCoeff(&best);
    hits += best == labels[static_cast<std::size_t>(i)];
  }
  return static_cast<double>(hits) / static_cast<double>(rows.rows());
}

void write_matrix_csv(const Eigen::MatrixXd& matrix, std::ostream& out) {
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j) out << ',';
      out << format_double(matrix(i, j));
    }
    out << '\n';
  }
}

}  // namespace nngraph

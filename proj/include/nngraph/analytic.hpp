#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace nngraph {

/// Volume of the unit ball in R^d, pi^{d/2} / Gamma(d/2 + 1).
double unit_ball_volume(unsigned d);

/// Law of the distance from a typical point of an intensity-n Poisson process
/// in R^d to its k-th nearest neighbor.
class NNDistanceLaw {
 public:
  NNDistanceLaw(unsigned k, unsigned d, double intensity);

  unsigned k() const { return k_; }
  unsigned d() const { return d_; }
  double intensity() const { return intensity_; }

  /// Expected number of points in a ball of radius r.
  double ball_mass(double r) const;

 private:
  unsigned k_;
  unsigned d_;
  double intensity_;
};

/// f_{k,d}(r) = d n^k w^k r^{kd-1} / (k-1)! * exp(-n w r^d), w = unit ball volume.
double nn_distance_pdf(const NNDistanceLaw& law, double r);

/// F_{k,d}(r) = 1 - sum_{l<k} e^{-m} m^l / l!, with m = n w r^d.
double nn_distance_cdf(const NNDistanceLaw& law, double r);

/// Gamma(k + 1/d) / (w^{1/d} (k-1)!) * n^{-1/d}.
double expected_knn_distance(const NNDistanceLaw& law);

/// P(region of the given volume holds exactly `count` points) for an
/// intensity-n Poisson process: e^{-vn} (vn)^count / count!.
double poisson_cell_probability(double volume, double intensity, unsigned count);

struct DisconnectBound {
  double bound;
  bool in_regime;  // false when p <= 10 ln(n) / n; the bound is then not claimed
};

/// e^{-pn/3} bound on the probability that G(n, p) is disconnected.
DisconnectBound er_disconnect_bound(std::size_t n, double p);

/// n^{-(k-1)(k+1)} bound on the probability that the k-out random graph is
/// disconnected. Throws std::invalid_argument for k < 2.
double ulam_disconnect_bound(std::size_t n, std::size_t k);

/// Kolmogorov-Smirnov distance sup_x |F_emp(x) - F(x)| for ascending samples.
double ks_statistic(std::span<const double> sorted_samples, const std::function<double(double)>& cdf);

}  // namespace nngraph

#include "nngraph/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nngraph {

double unit_ball_volume(unsigned d) {
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  // omega_d = (2 pi / d) omega_{d-2}, exact up to rounding for every d.
  double volume = (d % 2 == 0) ? 1.0 : 2.0;
  for (unsigned j = (d % 2 == 0) ? 2 : 3; j <= d; j += 2) volume *= 2.0 * std::numbers::pi / j;
  return volume;
}

NNDistanceLaw::NNDistanceLaw(unsigned k, unsigned d, double intensity)
    : k_(k), d_(d), intensity_(intensity) {
  if (k == 0) throw std::invalid_argument("neighbor rank must be at least 1");
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  if (!(intensity > 0.0)) throw std::invalid_argument("intensity must be positive");
}

double NNDistanceLaw::ball_mass(double r) const {
  return intensity_ * unit_ball_volume(d_) * std::pow(r, static_cast<double>(d_));
}

double nn_distance_pdf(const NNDistanceLaw& law, double r) {
  if (r < 0.0) return 0.0;
  const double k = law.k(), d = law.d();
  const double omega = unit_ball_volume(law.d());
  const double exponent = k * d - 1.0;
  if (r == 0.0) return exponent == 0.0 ? d * law.intensity() * omega : 0.0;
  const double log_density = std::log(d) + k * std::log(law.intensity() * omega) +
                             exponent * std::log(r) - std::lgamma(k) - law.ball_mass(r);
  return std::exp(log_density);
}

double nn_distance_cdf(const NNDistanceLaw& law, double r) {
  if (r <= 0.0) return 0.0;
  const double m = law.ball_mass(r);
  const unsigned k = law.k();
  if (m < static_cast<double>(k) + 1.0) {
    // Lower tail sum_{l >= k} e^{-m} m^l / l!, no cancellation.
    double term = std::exp(static_cast<double>(k) * std::log(m) - m - std::lgamma(k + 1.0));
    double sum = 0.0;
    for (unsigned l = k; term > sum * 1e-17 || l < k + 2; ++l) {
      sum += term;
      term *= m / (l + 1.0);
      if (l > k + 1000) break;
    }
    return std::min(1.0, sum);
  }
  double term = std::exp(-m);
  double upper = 0.0;
  for (unsigned l = 0; l < k; ++l) {
    upper += term;
    term *= m / (l + 1.0);
  }
  return std::max(0.0, 1.0 - upper);
}

double expected_knn_distance(const NNDistanceLaw& law) {
  const double k = law.k(), d = law.d();
  const double omega = unit_ball_volume(law.d());
  return std::exp(std::lgamma(k + 1.0 / d) - std::lgamma(k)) / std::pow(omega, 1.0 / d) /
         std::pow(law.intensity(), 1.0 / d);
}

double poisson_cell_probability(double volume, double intensity, unsigned count) {
  if (volume < 0.0 || intensity < 0.0)
    throw std::invalid_argument("volume and intensity must be non-negative");
  const double mean = volume * intensity;
  if (mean == 0.0) return count == 0 ? 1.0 : 0.0;
  return std::exp(-mean + count * std::log(mean) - std::lgamma(count + 1.0));
}

DisconnectBound er_disconnect_bound(std::size_t n, double p) {
  const double nn = static_cast<double>(n);
  const bool in_regime = n >= 2 && p > 10.0 * std::log(nn) / nn;
  return {std::exp(-p * nn / 3.0), in_regime};
}

double ulam_disconnect_bound(std::size_t n, std::size_t k) {
  if (k < 2) throw std::invalid_argument("k-out bound needs k >= 2");
  const double exponent = static_cast<double>((k - 1) * (k + 1));
  return std::pow(static_cast<double>(n), -exponent);
}

double ks_statistic(std::span<const double> sorted_samples,
                    const std::function<double(double)>& cdf) {
  if (sorted_samples.empty()) throw std::invalid_argument("KS statistic needs samples");
  if (!std::is_sorted(sorted_samples.begin(), sorted_samples.end()))
    throw std::invalid_argument("KS samples must be sorted ascending");
  const double n = static_cast<double>(sorted_samples.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
    const double f = cdf(sorted_samples[i]);
    sup = std::max({sup, (i + 1) / n - f, f - i / n});
  }
  return std::clamp(sup, 0.0, 1.0);
}

}  // namespace nngraph

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"

#include "nngraph/analytic.hpp"
#include "oracles.hpp"

using namespace nngraph;

namespace {

// Integration range for quadrature against the laws below.
double quadrature_radius(const NNDistanceLaw& law) {
  return 10.0 * std::pow(law.k() / (unit_ball_volume(law.d()) * law.intensity()), 1.0 / law.d());
}

}  // namespace

TEST_CASE("unit ball volume") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-15));
  for (unsigned d = 1; d <= 10; ++d) {
    const double expected = std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
    CHECK(std::abs(unit_ball_volume(d) - expected) <= 1e-12 * expected);
  }
  CHECK_THROWS(unit_ball_volume(0));
}

TEST_CASE("distance law pdf and cdf") {
  CHECK_THROWS(NNDistanceLaw(0, 2, 1.0));
  CHECK_THROWS(NNDistanceLaw(1, 0, 1.0));
  CHECK_THROWS(NNDistanceLaw(1, 2, 0.0));

  SUBCASE("pdf vanishes at zero when kd > 1") {
    CHECK(nn_distance_pdf(NNDistanceLaw(1, 2, 1.0), 0.0) == 0.0);
    CHECK(nn_distance_pdf(NNDistanceLaw(3, 1, 5.0), 0.0) == 0.0);
  }
  SUBCASE("k = 1, d = 2 closed form") {
    const NNDistanceLaw law(1, 2, 1.0);
    for (double r : {0.1, 0.5, 1.0, 2.0}) {
      const double expected = 2.0 * std::numbers::pi * r * std::exp(-std::numbers::pi * r * r);
      CHECK(nn_distance_pdf(law, r) == doctest::Approx(expected).epsilon(1e-13));
    }
    const double total = oracle::adaptive_simpson([&](double r) { return nn_distance_pdf(law, r); }, 0.0, 10.0, 1e-12);
    CHECK(std::abs(total - 1.0) < 1e-8);
    CHECK(std::abs(nn_distance_cdf(law, 50.0) - 1.0) < 1e-15);
  }
  SUBCASE("mass within ten typical radii") {
    const NNDistanceLaw law(3, 2, 1e4);
    const double mass = oracle::adaptive_simpson([&](double r) { return nn_distance_pdf(law, r); }, 0.0,
                                                 10.0 / std::sqrt(1e4), 1e-12);
    CHECK(mass >= 1.0 - 1e-6);
  }
  SUBCASE("cdf is the integral of the pdf, pdf the derivative of the cdf") {
    for (unsigned k = 1; k <= 5; ++k)
      for (unsigned d = 1; d <= 4; ++d) {
        const NNDistanceLaw law(k, d, 1000.0);
        const double R = quadrature_radius(law);
        CHECK(nn_distance_cdf(law, 0.0) == 0.0);
        double previous = 0.0;
        for (int i = 1; i <= 20; ++i) {
          const double r = R * i / 40.0;
          const double F = nn_distance_cdf(law, r);
          CHECK(F >= previous);
          previous = F;
          const double integral =
              oracle::adaptive_simpson([&](double s) { return nn_distance_pdf(law, s); }, 0.0, r, 1e-13);
          CHECK(std::abs(integral - F) < 1e-8);
          const double h = 1e-4 * r;
          const double derivative = (nn_distance_cdf(law, r + h) - nn_distance_cdf(law, r - h)) / (2.0 * h);
          const double f = nn_distance_pdf(law, r);
          if (f * r > 1e-3) CHECK(std::abs(derivative - f) <= 1e-5 * f);
          CHECK(f >= 0.0);
        }
        CHECK(std::abs(nn_distance_cdf(law, 100.0 * R) - 1.0) < 1e-8);
      }
  }
}

TEST_CASE("expected k-th neighbor distance") {
  const double n = 1e4;
  const double root = std::sqrt(n);
  const double listed[] = {1.0 / 2.0, 3.0 / 4.0, 15.0 / 16.0, 35.0 / 32.0, 315.0 / 256.0};
  for (unsigned k = 1; k <= 5; ++k)
    CHECK(expected_knn_distance(NNDistanceLaw(k, 2, n)) == doctest::Approx(listed[k - 1] / root).epsilon(1e-13));

  for (unsigned k = 1; k <= 10; ++k)
    for (unsigned d = 1; d <= 4; ++d) {
      const NNDistanceLaw law(k, d, 500.0);
      // Four times the usual range puts at least 40 expected points inside,
      // so the remaining mass is below e^{-40} times a modest polynomial.
      const double R = 4.0 * quadrature_radius(law);
      const double body =
          oracle::adaptive_simpson([&](double r) { return r * nn_distance_pdf(law, r); }, 0.0, R, 1e-14);
      const double tail = R * (1.0 - nn_distance_cdf(law, R));
      const double expected = expected_knn_distance(law);
      CHECK(std::abs(body + tail - expected) <= 1e-8 * expected);
    }
}

TEST_CASE("poisson cell probability") {
  CHECK(poisson_cell_probability(0.0, 100.0, 0) == 1.0);
  CHECK(poisson_cell_probability(0.0, 100.0, 1) == 0.0);
  double total = 0.0;
  for (unsigned l = 0; l < 100; ++l) total += poisson_cell_probability(0.05, 100.0, l);
  CHECK(std::abs(total - 1.0) < 1e-12);
  CHECK(poisson_cell_probability(0.05, 100.0, 2) == doctest::Approx(std::exp(-5.0) * 12.5).epsilon(1e-14));
  CHECK_THROWS(poisson_cell_probability(-1.0, 1.0, 0));
}

TEST_CASE("disconnection bounds") {
  const std::size_t n = 10000;
  const double p = 10.0 * std::log(static_cast<double>(n)) / n;
  const auto er = er_disconnect_bound(n, p * (1.0 + 1e-12));
  CHECK(er.in_regime);
  CHECK(er.bound == doctest::Approx(4.6e-14).epsilon(0.02));
  CHECK_FALSE(er_disconnect_bound(n, 3.0 / n).in_regime);
  CHECK(er_disconnect_bound(n, 0.02).bound < er_disconnect_bound(n, 0.01).bound);

  CHECK(ulam_disconnect_bound(1000, 2) == doctest::Approx(1e-9).epsilon(1e-12));
  CHECK(ulam_disconnect_bound(100, 3) == doctest::Approx(1e-16).epsilon(1e-12));
  CHECK(ulam_disconnect_bound(200, 2) < ulam_disconnect_bound(100, 2));
  CHECK_THROWS_AS(ulam_disconnect_bound(100, 1), std::invalid_argument);
}

TEST_CASE("KS statistic") {
  const auto uniform_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK_THROWS(ks_statistic(std::vector<double>{}, uniform_cdf));
  CHECK_THROWS(ks_statistic(std::vector<double>{0.5, 0.1}, uniform_cdf));

  SUBCASE("quantile samples") {
    const std::size_t n = 999;
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = (i + 1.0) / (n + 1.0);
    CHECK(ks_statistic(s, uniform_cdf) <= 1.0 / (n + 1.0) + 1e-12);
  }
  SUBCASE("wrong law") {
    const NNDistanceLaw law(1, 2, 1e4);
    std::mt19937_64 engine(4);
    std::uniform_real_distribution<double> unit(0.0, 0.02);
    std::vector<double> s(10000);
    for (auto& x : s) x = unit(engine);
    std::sort(s.begin(), s.end());
    const double stat = ks_statistic(s, [&](double r) { return nn_distance_cdf(law, r); });
    CHECK(stat > 0.1);
    CHECK(stat <= 1.0);
    CHECK(ks_statistic(s, [](double x) { return std::clamp(x / 0.02, 0.0, 1.0); }) < 0.05);
  }
}

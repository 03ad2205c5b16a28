#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "adiabat/error.hpp"
#include "adiabat/estimate.hpp"
#include "adiabat/random.hpp"

using namespace adiabat;

TEST_CASE("estimate of a small fixed sample") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const Estimate e = mc_estimate(v);
  CHECK(e.mean == doctest::Approx(2.5));
  CHECK(e.variance == doctest::Approx(5.0 / 3.0));
  CHECK(e.std_error_mean == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(e.std_dev() == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(e.n_samples == 4);
}

TEST_CASE("estimate is accurate for large offsets") {
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) v.push_back(1e9 + (i % 2 ? 1.0 : -1.0));
  const Estimate e = mc_estimate(v);
  CHECK(e.mean == doctest::Approx(1e9));
  CHECK(e.variance == doctest::Approx(1000.0 / 999.0).epsilon(1e-9));
}

TEST_CASE("jackknife errors have the Gaussian size") {
  Rng rng = make_rng(41, 0);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::vector<double> v(20000);
  for (double& x : v) x = normal(rng);
  const Estimate e = mc_estimate(v);
  CHECK(e.variance == doctest::Approx(4.0).epsilon(0.05));
  CHECK(e.std_error_mean == doctest::Approx(2.0 / std::sqrt(20000.0)).epsilon(0.05));
  // Var of the sample variance of a Gaussian is 2 sigma^4 / n.
  CHECK(e.std_error_variance == doctest::Approx(std::sqrt(2.0 * 16.0 / 20000.0)).epsilon(0.1));
}

TEST_CASE("jackknife of the mean equals the textbook standard error") {
  const std::vector<double> v{0.3, -1.2, 2.5, 0.7, 1.1, -0.4};
  const Estimate e = mc_estimate(v);
  const double jk = jackknife_error(6, [&](int i) {
    double s = 0.0;
    for (int j = 0; j < 6; ++j)
      if (j != i) s += v[j];
    return s / 5.0;
  });
  CHECK(jk == doctest::Approx(e.std_error_mean).epsilon(1e-12));
}

TEST_CASE("pairwise sum") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
  CHECK(pairwise_sum(std::vector<double>{3.0}) == 3.0);
}

TEST_CASE("covariance estimate") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> y{2.0, 4.1, 5.9, 8.2, 9.8};
  const auto c = covariance_estimate(x, y);
  const double mx = 3.0, my = (2.0 + 4.1 + 5.9 + 8.2 + 9.8) / 5.0;
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += (x[i] - mx) * (y[i] - my);
  CHECK(c.covariance == doctest::Approx(s / 4.0));
  CHECK(c.std_error > 0.0);
  CHECK(c.n_samples == 5);

  Rng rng = make_rng(42, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> a(20000), b(20000);
  for (int i = 0; i < 20000; ++i) {
    a[i] = normal(rng);
    b[i] = normal(rng);
  }
  const auto ind = covariance_estimate(a, b);
  // Independent unit normals: stderr of the covariance is 1/sqrt(n).
  CHECK(ind.std_error == doctest::Approx(1.0 / std::sqrt(20000.0)).epsilon(0.1));
  CHECK(std::abs(ind.covariance) < 4.0 * ind.std_error);
  CHECK_THROWS_AS(covariance_estimate(a, std::vector<double>{1.0}), Error);
}

TEST_CASE("autocorrelation time of an AR(1) series") {
  // x_t = rho x_{t-1} + noise has tau = (1 + rho) / (2 (1 - rho)).
  Rng rng = make_rng(43, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double rho : {0.0, 0.5, 0.9}) {
    std::vector<double> x(200000);
    double prev = 0.0;
    for (double& v : x) prev = v = rho * prev + normal(rng);
    const double expected = (1.0 + rho) / (2.0 * (1.0 - rho));
    CHECK(integrated_autocorrelation_time(x) == doctest::Approx(expected).epsilon(0.08));
  }
  CHECK(integrated_autocorrelation_time(std::vector<double>(100, 2.0)) == 0.5);
}

TEST_CASE("power-law fit recovers exponent and prefactor") {
  const std::vector<double> x{25.0, 50.0, 100.0, 200.0};
  std::vector<double> y;
  for (double b : x) y.push_back(3.0 * std::pow(b, -0.75));
  const auto f = fit_power_law(x, y);
  CHECK(f.exponent == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(f.log_prefactor == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(f.std_error == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}), Error);
  CHECK_THROWS_AS(fit_power_law(x, std::vector<double>{1.0, -2.0, 3.0, 4.0}), Error);
}

TEST_CASE("estimates need two samples") {
  CHECK_THROWS_AS(mc_estimate(std::vector<double>{1.0}), Error);
}

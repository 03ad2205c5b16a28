#include "adiabat/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "adiabat/error.hpp"

namespace adiabat {

double Estimate::std_dev() const { return std::sqrt(std::max(variance, 0.0)); }

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Estimate mc_estimate(std::span<const double> values) {
  const int n = static_cast<int>(values.size());
  require(n >= 2, ErrorCode::invalid_argument, "an estimate needs at least two samples");
  Estimate e;
  e.n_samples = n;
  e.mean = pairwise_sum(values) / n;

  std::vector<double> d(n), d2(n);
  for (int i = 0; i < n; ++i) {
    d[i] = values[i] - e.mean;
    d2[i] = d[i] * d[i];
  }
  const double s1 = pairwise_sum(d);
  const double s2 = pairwise_sum(d2);
  e.variance = (s2 - s1 * s1 / n) / (n - 1);
  e.std_error_mean = std::sqrt(std::max(e.variance, 0.0) / n);
  if (n >= 3) {
    e.std_error_variance = jackknife_error(n, [&](int i) {
      const double a = s1 - d[i], b = s2 - d2[i];
      return (b - a * a / (n - 1)) / (n - 2);
    });
  } else {
    e.std_error_variance = e.variance;
  }
  return e;
}

CovarianceEstimate covariance_estimate(std::span<const double> x, std::span<const double> y) {
  const int n = static_cast<int>(x.size());
  require(n >= 3, ErrorCode::invalid_argument, "a covariance needs at least three samples");
  require(y.size() == x.size(), ErrorCode::dimension_mismatch, "covariance inputs differ in length");
  const double mx = pairwise_sum(x) / n, my = pairwise_sum(y) / n;
  std::vector<double> dx(n), dy(n), dxy(n);
  for (int i = 0; i < n; ++i) {
    dx[i] = x[i] - mx;
    dy[i] = y[i] - my;
    dxy[i] = dx[i] * dy[i];
  }
  const double sx = pairwise_sum(dx), sy = pairwise_sum(dy), sxy = pairwise_sum(dxy);
  CovarianceEstimate out;
  out.n_samples = n;
  out.covariance = (sxy - sx * sy / n) / (n - 1);
  out.std_error = jackknife_error(n, [&](int i) {
    const double a = sx - dx[i], b = sy - dy[i], c = sxy - dxy[i];
    return (c - a * b / (n - 1)) / (n - 2);
  });
  return out;
}

double integrated_autocorrelation_time(std::span<const double> series, double window_c) {
  const std::size_t n = series.size();
  if (n < 4) return 0.5;
  double mean = pairwise_sum(series) / static_cast<double>(n);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = series[i] - mean;
  double c0 = 0.0;
  for (double v : d) c0 += v * v;
  if (c0 <= 0.0) return 0.5;
  double tau = 0.5;
  for (std::size_t t = 1; t < n / 2; ++t) {
    double ct = 0.0;
    for (std::size_t i = 0; i + t < n; ++i) ct += d[i] * d[i + t];
    tau += ct / c0;
    if (static_cast<double>(t) >= window_c * tau) break;
  }
  return std::max(tau, 0.5);
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  require(n >= 3, ErrorCode::invalid_argument, "a power-law fit needs at least three points");
  require(y.size() == n, ErrorCode::dimension_mismatch, "fit inputs differ in length");
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, ErrorCode::invalid_argument,
            "power-law fit needs positive values");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  require(sxx > 0.0, ErrorCode::invalid_argument, "power-law fit needs distinct x values");
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.log_prefactor = my - fit.exponent * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double res = ly[i] - fit.log_prefactor - fit.exponent * lx[i];
    ssr += res * res;
  }
  fit.std_error = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
  return fit;
}

}  // namespace adiabat

#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace adiabat {

/// Sample mean and variance (n - 1 normalization) with jackknife standard
/// errors.
struct Estimate {
  double mean = 0.0;
  double variance = 0.0;
  double std_error_mean = 0.0;
  double std_error_variance = 0.0;
  int n_samples = 0;

  double std_dev() const;
};

/// Requires at least two values.
Estimate mc_estimate(std::span<const double> values);

/// Pairwise summation, fixed order.
double pairwise_sum(std::span<const double> values);

struct CovarianceEstimate {
  double covariance = 0.0;
  double std_error = 0.0;
  int n_samples = 0;
};

/// Sample covariance (n - 1 normalization) with a delete-one jackknife error.
CovarianceEstimate covariance_estimate(std::span<const double> x, std::span<const double> y);

/// Delete-one jackknife standard error of a statistic. `leave_out(i)` must
/// return the statistic recomputed without sample i.
template <class LeaveOut>
double jackknife_error(int n, LeaveOut&& leave_out) {
  std::vector<double> values(n);
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    values[i] = leave_out(i);
    mean += values[i];
  }
  mean /= n;
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt((n - 1.0) / n * acc);
}

/// Integrated autocorrelation time tau = 1/2 + sum_t rho(t) with Sokal's
/// automatic window (smallest M with M >= c tau(M)). Returns 0.5 for an
/// uncorrelated or constant series.
double integrated_autocorrelation_time(std::span<const double> series, double window_c = 5.0);

struct PowerLawFit {
  double exponent = 0.0;
  double std_error = 0.0;
  double log_prefactor = 0.0;
};

/// Least squares slope of log y against log x. Needs at least three points,
/// all positive.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

}  // namespace adiabat

#include "adiabat/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "adiabat/error.hpp"

#ifdef ADIABAT_HAVE_FFTW
#include <fftw3.h>
#endif

namespace adiabat {

namespace {

void check_size(std::size_t n) {
  require(n >= 1, ErrorCode::invalid_argument, "sine transform needs at least one point");
}

}  // namespace

std::vector<double> sine_transform(std::span<const double> v) {
  check_size(v.size());
  const std::size_t n = v.size();
  const double scale = std::sqrt(2.0 / static_cast<double>(n + 1));
  const double step = std::numbers::pi / static_cast<double>(n + 1);
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      acc += v[k - 1] * std::sin(step * static_cast<double>(j * k % (2 * (n + 1))));
    out[j - 1] = scale * acc;
  }
  return out;
}

SineBasis::SineBasis(int n)
    : n_(n), scale_(std::sqrt(2.0 / (n + 1.0))), sines_(2 * static_cast<std::size_t>(n + 1)) {
  require(n >= 1, ErrorCode::invalid_argument, "sine basis size must be positive");
  const double step = std::numbers::pi / (n + 1.0);
  for (std::size_t m = 0; m < sines_.size(); ++m) sines_[m] = std::sin(step * static_cast<double>(m));
}

void SineBasis::apply(std::span<const double> in, std::span<double> out) const {
  const auto n = static_cast<std::size_t>(n_);
  require(in.size() == n && out.size() == n, ErrorCode::dimension_mismatch,
          "sine basis applied to a vector of the wrong size");
  const std::size_t period = sines_.size();
  for (std::size_t j = 1; j <= n; ++j) {
    double acc = 0.0;
    std::size_t m = j;  // (j k) mod 2(N+1), advanced incrementally
    for (std::size_t k = 0; k < n; ++k) {
      acc += in[k] * sines_[m];
      m += j;
      if (m >= period) m -= period;
    }
    out[j - 1] = scale_ * acc;
  }
}

std::shared_ptr<const SineBasis> sine_basis(int n) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const SineBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const SineBasis>(n);
  return slot;
}

bool have_fast_sine_transform() noexcept {
#ifdef ADIABAT_HAVE_FFTW
  return true;
#else
  return false;
#endif
}

std::vector<double> sine_transform_fast(std::span<const double> v) {
#ifdef ADIABAT_HAVE_FFTW
  check_size(v.size());
  const int n = static_cast<int>(v.size());
  std::vector<double> in(v.begin(), v.end());
  std::vector<double> out(v.size());
  // FFTW's planner is global state: creation and destruction share a lock,
  // execution does not need one.
  static std::mutex planner;
  fftw_plan plan;
  {
    std::lock_guard lock(planner);
    plan = fftw_plan_r2r_1d(n, in.data(), out.data(), FFTW_RODFT00, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner);
    fftw_destroy_plan(plan);
  }
  // RODFT00 computes 2 sum_j x_j sin(pi (j+1)(k+1)/(n+1)).
  const double scale = 0.5 * std::sqrt(2.0 / (n + 1.0));
  for (double& x : out) x *= scale;
  return out;
#else
  return sine_transform(v);
#endif
}

std::vector<double> frequencies(int n) {
  require(n >= 1, ErrorCode::invalid_argument, "frequencies need n >= 1");
  std::vector<double> omega(n);
  const double step = std::numbers::pi / (2.0 * (n + 1.0));
  for (int k = 1; k <= n; ++k) omega[k - 1] = 2.0 * std::sin(step * k);
  return omega;
}

ModeState to_modes(const ChainState& state) {
  require(state.p.size() == state.q.size(), ErrorCode::dimension_mismatch,
          "p and q must have the same length");
  const auto basis = sine_basis(state.size());
  ModeState m{std::vector<double>(state.p.size()), std::vector<double>(state.q.size())};
  basis->apply(state.p, m.p_hat);
  basis->apply(state.q, m.q_hat);
  return m;
}

ChainState from_modes(const ModeState& modes) {
  require(modes.p_hat.size() == modes.q_hat.size(), ErrorCode::dimension_mismatch,
          "p_hat and q_hat must have the same length");
  const auto basis = sine_basis(static_cast<int>(modes.q_hat.size()));
  ChainState s{std::vector<double>(modes.p_hat.size()), std::vector<double>(modes.q_hat.size())};
  basis->apply(modes.p_hat, s.p);
  basis->apply(modes.q_hat, s.q);
  return s;
}

std::vector<double> actions(const ModeState& modes, std::span<const double> omega) {
  require(omega.size() == modes.q_hat.size(), ErrorCode::dimension_mismatch,
          "frequency table size mismatch");
  std::vector<double> out(omega.size());
  for (std::size_t k = 0; k < omega.size(); ++k) {
    const double p = modes.p_hat[k];
    const double wq = omega[k] * modes.q_hat[k];
    out[k] = (p * p + wq * wq) / (2.0 * omega[k]);
  }
  return out;
}

std::vector<double> actions(const ChainState& state) {
  return actions(to_modes(state), frequencies(state.size()));
}

std::vector<std::complex<double>> to_complex(const ModeState& modes, std::span<const double> omega) {
  require(omega.size() == modes.q_hat.size(), ErrorCode::dimension_mismatch,
          "frequency table size mismatch");
  std::vector<std::complex<double>> xi(omega.size());
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (std::size_t k = 0; k < omega.size(); ++k)
    xi[k] = {modes.p_hat[k] * inv_sqrt2, omega[k] * modes.q_hat[k] * inv_sqrt2};
  return xi;
}

std::vector<std::complex<double>> to_complex(const ChainState& state) {
  return to_complex(to_modes(state), frequencies(state.size()));
}

}  // namespace adiabat

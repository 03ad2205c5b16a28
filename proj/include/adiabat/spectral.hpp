#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "adiabat/chain.hpp"

namespace adiabat {

/// Orthogonal, involutive sine transform of the fixed-end chain:
///   (T v)_j = sqrt(2/(N+1)) sum_k v_k sin(pi j k / (N+1)),  j, k = 1..N.
/// The same matrix maps modes to particles and back.
std::vector<double> sine_transform(std::span<const double> v);

/// Same transform through FFTW's DST-I when the build has it; otherwise
/// identical to sine_transform. Agrees with the slow path to ~1e-13.
std::vector<double> sine_transform_fast(std::span<const double> v);

bool have_fast_sine_transform() noexcept;

/// Precomputed sin(pi m/(N+1)) table for repeated transforms of one size.
class SineBasis {
 public:
  explicit SineBasis(int n);

  int size() const noexcept { return n_; }
  void apply(std::span<const double> in, std::span<double> out) const;

 private:
  int n_;
  double scale_;
  std::vector<double> sines_;  // length 2(N+1), indexed by (j k) mod 2(N+1)
};

/// Shared immutable basis for size n; safe to call from several threads.
std::shared_ptr<const SineBasis> sine_basis(int n);

/// omega_k = 2 sin(pi k / (2(N+1))), k = 1..N.
std::vector<double> frequencies(int n);

struct ModeState {
  std::vector<double> p_hat;
  std::vector<double> q_hat;
};

ModeState to_modes(const ChainState& state);
ChainState from_modes(const ModeState& modes);

/// I_k = (p_hat_k^2 + omega_k^2 q_hat_k^2) / (2 omega_k).
std::vector<double> actions(const ChainState& state);
std::vector<double> actions(const ModeState& modes, std::span<const double> omega);

/// xi_k = (p_hat_k + i omega_k q_hat_k)/sqrt(2); eta_k is its conjugate.
std::vector<std::complex<double>> to_complex(const ChainState& state);
std::vector<std::complex<double>> to_complex(const ModeState& modes, std::span<const double> omega);

}  // namespace adiabat

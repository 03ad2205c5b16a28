#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "adiabat/chain.hpp"
#include "adiabat/profiles.hpp"
#include "adiabat/spectral.hpp"

namespace adiabat {

/// Which linear relation a resonant triple satisfies.
///   sum:  k1 + k2 - k3 = 0
///   wrap: k1 + k2 + k3 = 2(N+1)
enum class TripleKind { sum, wrap };

/// Sign pattern p in 0..7 encodes tau_l = -1 when bit l of p is set.
inline constexpr int tau_sign(int pattern, int l) noexcept { return (pattern >> l) & 1 ? -1 : 1; }

/// Index of the pattern -tau.
inline constexpr int negated_pattern(int pattern) noexcept { return pattern ^ 7; }

struct ResonantTriple {
  int k1 = 0, k2 = 0, k3 = 0;  // 1-based mode indices
  TripleKind kind = TripleKind::sum;
  int weight = 0;  // 3 for sum, 1 for wrap
  // (tau.nu)/(tau.omega) over the three modes, per sign pattern.
  std::array<double, 8> ratio{};
};

/// Sign the wrap triples carry in the cubic interaction. The cosine sum over
/// bonds picks up cos(2 pi (j + 1/2)) = -1 on the wrap resonance.
inline constexpr double kind_sign(TripleKind kind) noexcept {
  return kind == TripleKind::sum ? 1.0 : -1.0;
}

/// Phi0 = sum_k nu_k I_k together with the table of resonant triples that
/// defines the cubic corrector
///
///   Phi1 = (i/12) (N+1)^{-1/2} sum_{triples, tau} w s tau1 tau2 tau3
///          (tau.nu)/(tau.omega) Xi_{tau,k},
///
/// where w is the triple weight, s its kind sign, and Xi the monomial in
/// xi (tau = +1) and eta (tau = -1). With this normalization
/// {H0, Phi1} = -{H1, Phi0} holds identically. Immutable after build.
class PacketObservable {
 public:
  /// Enumerates every ordered triple; throws Error(numerical) if any
  /// |tau.omega| < 1e-300.
  static PacketObservable build(const NuProfile& profile, int n);

  int size() const noexcept { return n_; }
  std::span<const double> nu() const noexcept { return nu_; }
  std::span<const double> g() const noexcept { return g_; }
  std::span<const double> omega() const noexcept { return omega_; }
  std::span<const ResonantTriple> triples() const noexcept { return triples_; }
  double min_denominator() const noexcept { return min_denominator_; }
  const SineBasis& basis() const noexcept { return *basis_; }

  /// Largest |ratio| over the table.
  double max_ratio() const;

  /// Copy with the real coefficient of (triple, pattern) and of its
  /// conjugate pattern multiplied by `factor`. Test hook for mutation tests.
  PacketObservable with_scaled_coefficient(std::size_t triple, int pattern, double factor) const;

 private:
  PacketObservable() = default;

  int n_ = 0;
  std::vector<double> nu_, g_, omega_;
  std::vector<ResonantTriple> triples_;
  double min_denominator_ = 0.0;
  std::shared_ptr<const SineBasis> basis_;
};

/// Prefactor i/(12 sqrt(N+1)) of the cubic sums, as its imaginary part.
double cubic_prefactor(int n) noexcept;

/// Gradient of a phase-space function in particle coordinates.
struct PhaseGradient {
  std::vector<double> dq;
  std::vector<double> dp;

  static PhaseGradient zero(int n);
  PhaseGradient& operator+=(const PhaseGradient& other);
};

/// {f, g} = sum_j (df/dq_j dg/dp_j - df/dp_j dg/dq_j).
double poisson_bracket(const PhaseGradient& grad_f, const PhaseGradient& grad_g);

double phi0(const ChainState& state, const PacketObservable& packet);

/// Real value of Phi1. Throws Error(numerical) if the imaginary residue
/// exceeds 1e-10 (1 + |Re|), which can only come from a broken table.
double phi1(const ChainState& state, const PacketObservable& packet);

struct Phi1Value {
  double real = 0.0;
  double imag = 0.0;
};
Phi1Value phi1_complex(const ChainState& state, const PacketObservable& packet);

enum class Observable { phi0, phi1, phi };

PhaseGradient grad_phi(const ChainState& state, const PacketObservable& packet, Observable which);

enum class HamiltonianPart { h0, h1, h2, total };

PhaseGradient grad_hamiltonian(const ChainState& state, const ChainParams& params,
                               HamiltonianPart part);

/// {Phi, H} with Phi = Phi0 + Phi1.
double phi_dot(const ChainState& state, const PacketObservable& packet, const ChainParams& params);

/// {Phi1, H1 + H2} + {Phi0, H2}; equal to phi_dot when the homological
/// equation holds.
double phi_dot_reduced(const ChainState& state, const PacketObservable& packet,
                       const ChainParams& params);

/// |{H0,Phi1} + {H1,Phi0}| / (1 + |{H1,Phi0}|).
double homological_residual(const ChainState& state, const PacketObservable& packet);

}  // namespace adiabat

#pragma once

#include <complex>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "adiabat/chain.hpp"
#include "adiabat/packet.hpp"
#include "adiabat/profiles.hpp"

namespace adiabat {

/// Homogeneous polynomial in the complex mode coordinates, stored as an
/// ordered sum: each term is a sequence of factors encoded as +k for xi_k
/// and -k for eta_k (k is 1-based), mapped to its coefficient. Two terms
/// that are permutations of each other are kept apart; canonical() merges
/// them when a representation-independent form is needed.
///
/// The plus-norm is computed on the representation at hand:
///   ||f||_+ = (N+1)^{(s-2)/2} max |coefficient|.
class ModePolynomial {
 public:
  using Term = std::vector<int>;

  ModePolynomial(int n, int degree);

  int size() const noexcept { return n_; }
  int degree() const noexcept { return degree_; }
  const std::map<Term, std::complex<double>>& terms() const noexcept { return terms_; }

  void add(Term term, std::complex<double> coefficient);
  ModePolynomial& operator+=(const ModePolynomial& other);

  std::complex<double> evaluate(std::span<const std::complex<double>> xi) const;

  /// Factors sorted inside every term, equal terms merged, zeros dropped.
  ModePolynomial canonical() const;

  double plus_norm() const;
  double max_abs_coefficient() const;

  /// Every term satisfies (tilde_tau . k) = 0 mod 2(N+1) for some signs.
  bool momentum_conserving() const;

 private:
  int n_;
  int degree_;
  std::map<Term, std::complex<double>> terms_;
};

/// {f, g} via {xi_k, eta_k} = i omega_k and the Leibniz rule, term by term.
ModePolynomial bracket(const ModePolynomial& f, const ModePolynomial& g,
                       std::span<const double> omega);

ModePolynomial h0_polynomial(int n);
ModePolynomial h1_polynomial(int n);
ModePolynomial phi0_polynomial(const PacketObservable& packet);
ModePolynomial phi1_polynomial(const PacketObservable& packet);

/// Observables that enter the variance bound, wrapped with their degree s
/// and plus-norm in the natural representation (the one the polynomial
/// builders above produce). Norms are closed forms, so large N is cheap.
enum class PsKind { h1, phi0, phi1 };

struct PsTestFunction {
  PsKind kind = PsKind::phi0;
  int degree = 2;
  double plus_norm = 0.0;
  std::shared_ptr<const PacketObservable> packet;

  std::string name() const;
  double operator()(const ChainState& state) const;
};

PsTestFunction make_ps_test(PsKind kind, const NuProfile& profile, int n);

}  // namespace adiabat

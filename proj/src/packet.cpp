#include "adiabat/packet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "adiabat/error.hpp"

namespace adiabat {

namespace {

using cplx = std::complex<double>;

void check_packet(const ChainState& state, const PacketObservable& packet) {
  require(state.p.size() == state.q.size(), ErrorCode::dimension_mismatch,
          "p and q must have the same length");
  require(state.size() == packet.size(), ErrorCode::dimension_mismatch,
          "packet built for N = " + std::to_string(packet.size()) + ", state has " +
              std::to_string(state.size()) + " sites");
}

ModeState modes_of(const ChainState& state, const SineBasis& basis) {
  ModeState m{std::vector<double>(state.p.size()), std::vector<double>(state.q.size())};
  basis.apply(state.p, m.p_hat);
  basis.apply(state.q, m.q_hat);
  return m;
}

// Value and/or xi/eta-derivatives of the cubic sum S = sum coef_tau Xi_tau,
// with coef_tau = w s tau1 tau2 tau3 ratio_tau (real). Phi1 = i c S with
// c = cubic_prefactor(N).
struct CubicSum {
  cplx value{};
  std::vector<cplx> d_xi;
  std::vector<cplx> d_eta;
};

CubicSum cubic_sum(std::span<const cplx> xi, std::span<const ResonantTriple> triples,
                   bool with_gradient) {
  CubicSum out;
  if (with_gradient) {
    out.d_xi.assign(xi.size(), cplx{});
    out.d_eta.assign(xi.size(), cplx{});
  }
  for (const auto& t : triples) {
    const std::array<int, 3> k{t.k1 - 1, t.k2 - 1, t.k3 - 1};
    const std::array<cplx, 3> x{xi[k[0]], xi[k[1]], xi[k[2]]};
    const std::array<cplx, 3> y{std::conj(x[0]), std::conj(x[1]), std::conj(x[2])};
    const double scale = t.weight * kind_sign(t.kind);
    for (int p = 0; p < 8; ++p) {
      const double sign = tau_sign(p, 0) * tau_sign(p, 1) * tau_sign(p, 2);
      const double coef = scale * sign * t.ratio[p];
      const cplx f0 = tau_sign(p, 0) > 0 ? x[0] : y[0];
      const cplx f1 = tau_sign(p, 1) > 0 ? x[1] : y[1];
      const cplx f2 = tau_sign(p, 2) > 0 ? x[2] : y[2];
      out.value += coef * (f0 * f1 * f2);
      if (!with_gradient) continue;
      const cplx g0 = coef * (f1 * f2), g1 = coef * (f0 * f2), g2 = coef * (f0 * f1);
      (tau_sign(p, 0) > 0 ? out.d_xi : out.d_eta)[k[0]] += g0;
      (tau_sign(p, 1) > 0 ? out.d_xi : out.d_eta)[k[1]] += g1;
      (tau_sign(p, 2) > 0 ? out.d_xi : out.d_eta)[k[2]] += g2;
    }
  }
  return out;
}

// Maps a mode-space gradient (d/dq_hat, d/dp_hat) to particle coordinates.
// The transform is symmetric and orthogonal, so the same matrix applies.
PhaseGradient to_particle(const std::vector<double>& dq_hat, const std::vector<double>& dp_hat,
                          const SineBasis& basis) {
  PhaseGradient out = PhaseGradient::zero(basis.size());
  basis.apply(dq_hat, out.dq);
  basis.apply(dp_hat, out.dp);
  return out;
}

PhaseGradient grad_phi0_impl(const ModeState& m, const PacketObservable& packet) {
  const auto n = static_cast<std::size_t>(packet.size());
  std::vector<double> dq(n), dp(n);
  for (std::size_t k = 0; k < n; ++k) {
    dp[k] = packet.g()[k] * m.p_hat[k];
    dq[k] = packet.nu()[k] * packet.omega()[k] * m.q_hat[k];
  }
  return to_particle(dq, dp, packet.basis());
}

PhaseGradient grad_phi1_impl(const ModeState& m, const PacketObservable& packet) {
  const auto omega = packet.omega();
  const auto xi = to_complex(m, omega);
  const CubicSum sum = cubic_sum(xi, packet.triples(), true);
  const double c = cubic_prefactor(packet.size());
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const auto n = static_cast<std::size_t>(packet.size());
  std::vector<double> dq(n), dp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // dPhi1/dxi = i c dS/dxi, and xi, eta = (p_hat +- i omega q_hat)/sqrt2.
    const cplx dxi = cplx(0.0, c) * sum.d_xi[k];
    const cplx deta = cplx(0.0, c) * sum.d_eta[k];
    dp[k] = ((dxi + deta) * inv_sqrt2).real();
    dq[k] = (cplx(0.0, omega[k]) * (dxi - deta) * inv_sqrt2).real();
  }
  return to_particle(dq, dp, packet.basis());
}

PhaseGradient grad_hamiltonian_impl(const ChainState& state, double a, HamiltonianPart part) {
  const int n = state.size();
  PhaseGradient out = PhaseGradient::zero(n);
  if (part == HamiltonianPart::h0 || part == HamiltonianPart::total) out.dp = state.p;
  const std::vector<double> r = bond_extensions(state.q);
  auto dv = [&](double x) {
    switch (part) {
      case HamiltonianPart::h0: return x;
      case HamiltonianPart::h1: return x * x;
      case HamiltonianPart::h2: return a * x * x * x;
      case HamiltonianPart::total: return potential_dv(x, a);
    }
    return 0.0;
  };
  // dH/dq_j = V'(r_{j-1}) - V'(r_j); particle j+1 (0-based j) sits between
  // bonds r[j] and r[j+1].
  for (int j = 0; j < n; ++j) out.dq[j] = dv(r[j]) - dv(r[j + 1]);
  return out;
}

}  // namespace

double cubic_prefactor(int n) noexcept { return 1.0 / (12.0 * std::sqrt(n + 1.0)); }

PacketObservable PacketObservable::build(const NuProfile& profile, int n) {
  require(n >= 1, ErrorCode::invalid_argument, "packet size must be >= 1");
  PacketObservable out;
  out.n_ = n;
  out.omega_ = frequencies(n);
  out.nu_.resize(n);
  out.g_.resize(n);
  for (int k = 1; k <= n; ++k) {
    const double x = static_cast<double>(k) / (n + 1);
    out.g_[k - 1] = profile.g(x);
    out.nu_[k - 1] = out.g_[k - 1] * out.omega_[k - 1];
  }
  out.basis_ = sine_basis(n);

  out.min_denominator_ = std::numeric_limits<double>::infinity();
  auto add = [&](int k1, int k2, int k3, TripleKind kind) {
    ResonantTriple t{k1, k2, k3, kind, kind == TripleKind::sum ? 3 : 1, {}};
    const std::array<int, 3> k{k1 - 1, k2 - 1, k3 - 1};
    for (int p = 0; p < 8; ++p) {
      double num = 0.0, den = 0.0;
      for (int l = 0; l < 3; ++l) {
        num += tau_sign(p, l) * out.nu_[k[l]];
        den += tau_sign(p, l) * out.omega_[k[l]];
      }
      if (std::abs(den) < 1e-300) {
        std::ostringstream msg;
        msg << "vanishing denominator for triple (" << k1 << "," << k2 << "," << k3
            << ") pattern " << p;
        fail(ErrorCode::numerical, msg.str());
      }
      out.min_denominator_ = std::min(out.min_denominator_, std::abs(den));
      t.ratio[p] = num / den;
    }
    out.triples_.push_back(t);
  };
  out.triples_.reserve(static_cast<std::size_t>(n) * (n - 1));
  for (int k1 = 1; k1 <= n; ++k1) {
    for (int k2 = 1; k2 <= n; ++k2) {
      if (k1 + k2 <= n) add(k1, k2, k1 + k2, TripleKind::sum);
      const int k3 = 2 * (n + 1) - k1 - k2;
      if (k3 >= 1 && k3 <= n) add(k1, k2, k3, TripleKind::wrap);
    }
  }
  return out;
}

double PacketObservable::max_ratio() const {
  double best = 0.0;
  for (const auto& t : triples_)
    for (double r : t.ratio) best = std::max(best, std::abs(r));
  return best;
}

PacketObservable PacketObservable::with_scaled_coefficient(std::size_t triple, int pattern,
                                                           double factor) const {
  require(triple < triples_.size(), ErrorCode::invalid_argument, "triple index out of range");
  require(pattern >= 0 && pattern < 8, ErrorCode::invalid_argument, "pattern must be in 0..7");
  PacketObservable copy = *this;
  copy.triples_[triple].ratio[pattern] *= factor;
  copy.triples_[triple].ratio[negated_pattern(pattern)] *= factor;
  return copy;
}

PhaseGradient PhaseGradient::zero(int n) {
  return PhaseGradient{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

PhaseGradient& PhaseGradient::operator+=(const PhaseGradient& other) {
  require(other.dq.size() == dq.size() && other.dp.size() == dp.size(),
          ErrorCode::dimension_mismatch, "gradient dimension mismatch");
  for (std::size_t j = 0; j < dq.size(); ++j) {
    dq[j] += other.dq[j];
    dp[j] += other.dp[j];
  }
  return *this;
}

double poisson_bracket(const PhaseGradient& f, const PhaseGradient& g) {
  require(f.dq.size() == f.dp.size() && g.dq.size() == g.dp.size() && f.dq.size() == g.dq.size(),
          ErrorCode::dimension_mismatch, "gradients must have equal dimension 2N");
  double acc = 0.0;
  for (std::size_t j = 0; j < f.dq.size(); ++j) acc += f.dq[j] * g.dp[j] - f.dp[j] * g.dq[j];
  return acc;
}

double phi0(const ChainState& state, const PacketObservable& packet) {
  check_packet(state, packet);
  const ModeState m = modes_of(state, packet.basis());
  const auto I = actions(m, packet.omega());
  double acc = 0.0;
  for (std::size_t k = 0; k < I.size(); ++k) acc += packet.nu()[k] * I[k];
  return acc;
}

Phi1Value phi1_complex(const ChainState& state, const PacketObservable& packet) {
  check_packet(state, packet);
  const ModeState m = modes_of(state, packet.basis());
  const auto xi = to_complex(m, packet.omega());
  const cplx value = cplx(0.0, cubic_prefactor(packet.size())) *
                     cubic_sum(xi, packet.triples(), false).value;
  return {value.real(), value.imag()};
}

double phi1(const ChainState& state, const PacketObservable& packet) {
  const Phi1Value v = phi1_complex(state, packet);
  if (std::abs(v.imag) > 1e-10 * (1.0 + std::abs(v.real))) {
    std::ostringstream msg;
    msg << "Phi1 has imaginary residue " << v.imag << " (real part " << v.real << ")";
    fail(ErrorCode::numerical, msg.str());
  }
  return v.real;
}

PhaseGradient grad_phi(const ChainState& state, const PacketObservable& packet, Observable which) {
  check_packet(state, packet);
  const ModeState m = modes_of(state, packet.basis());
  switch (which) {
    case Observable::phi0: return grad_phi0_impl(m, packet);
    case Observable::phi1: return grad_phi1_impl(m, packet);
    case Observable::phi: {
      PhaseGradient g = grad_phi0_impl(m, packet);
      g += grad_phi1_impl(m, packet);
      return g;
    }
  }
  return PhaseGradient::zero(packet.size());
}

PhaseGradient grad_hamiltonian(const ChainState& state, const ChainParams& params,
                               HamiltonianPart part) {
  require(state.size() == params.n && state.p.size() == state.q.size(),
          ErrorCode::dimension_mismatch, "state does not match params.n");
  return grad_hamiltonian_impl(state, params.a, part);
}

double phi_dot(const ChainState& state, const PacketObservable& packet, const ChainParams& params) {
  return poisson_bracket(grad_phi(state, packet, Observable::phi),
                         grad_hamiltonian(state, params, HamiltonianPart::total));
}

double phi_dot_reduced(const ChainState& state, const PacketObservable& packet,
                       const ChainParams& params) {
  PhaseGradient h12 = grad_hamiltonian(state, params, HamiltonianPart::h1);
  const PhaseGradient h2 = grad_hamiltonian(state, params, HamiltonianPart::h2);
  h12 += h2;
  return poisson_bracket(grad_phi(state, packet, Observable::phi1), h12) +
         poisson_bracket(grad_phi(state, packet, Observable::phi0), h2);
}

double homological_residual(const ChainState& state, const PacketObservable& packet) {
  check_packet(state, packet);
  const PhaseGradient h0 = grad_hamiltonian_impl(state, 1.0, HamiltonianPart::h0);
  const PhaseGradient h1 = grad_hamiltonian_impl(state, 1.0, HamiltonianPart::h1);
  const double lhs = poisson_bracket(h0, grad_phi(state, packet, Observable::phi1));
  const double rhs = poisson_bracket(h1, grad_phi(state, packet, Observable::phi0));
  return std::abs(lhs + rhs) / (1.0 + std::abs(rhs));
}

}  // namespace adiabat

#include "adiabat/chain.hpp"

#include <cmath>
#include <sstream>

#include "adiabat/error.hpp"

namespace adiabat {

void ChainParams::validate() const {
  require(n >= 3, ErrorCode::invalid_argument, "n must be >= 3, got " + std::to_string(n));
  require(std::isfinite(a) && a > 0.0, ErrorCode::invalid_argument, "a must be > 0");
  require(std::isfinite(beta) && beta > 0.0, ErrorCode::invalid_argument, "beta must be > 0");
}

ChainState ChainState::zero(int n) {
  require(n >= 1, ErrorCode::invalid_argument, "state size must be positive");
  return ChainState{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

bool ChainState::finite() const noexcept {
  for (double x : p)
    if (!std::isfinite(x)) return false;
  for (double x : q)
    if (!std::isfinite(x)) return false;
  return true;
}

double potential_v(double r, double a) noexcept {
  const double r2 = r * r;
  return r2 * (0.5 + r / 3.0 + 0.25 * a * r2);
}

double potential_dv(double r, double a) noexcept { return r * (1.0 + r + a * r * r); }

namespace {

void check_state(const ChainState& state, const ChainParams& params) {
  require(state.p.size() == state.q.size(), ErrorCode::dimension_mismatch,
          "p and q must have the same length");
  require(state.size() == params.n, ErrorCode::dimension_mismatch,
          "state has " + std::to_string(state.size()) + " sites, params.n = " +
              std::to_string(params.n));
}

}  // namespace

std::vector<double> bond_extensions(std::span<const double> q) {
  const std::size_t n = q.size();
  std::vector<double> r(n + 1);
  double prev = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    r[j] = q[j] - prev;
    prev = q[j];
  }
  r[n] = -prev;
  return r;
}

Energies energies(const ChainState& state, const ChainParams& params) {
  check_state(state, params);
  Energies e;
  for (double pj : state.p) e.h0 += 0.5 * pj * pj;
  for (double r : bond_extensions(state.q)) {
    const double r2 = r * r;
    e.h0 += 0.5 * r2;
    e.h1 += r2 * r / 3.0;
    e.h2 += 0.25 * params.a * r2 * r2;
  }
  return e;
}

void forces_into(std::span<const double> q, double a, Dynamics dynamics, std::span<double> out) {
  const std::size_t n = q.size();
  require(out.size() == n, ErrorCode::dimension_mismatch, "force buffer size mismatch");
  // dv_prev holds V'(r_{j-1}); r_{-1} does not exist, the first bond is r_0 = q_1.
  auto dv = [&](double r) { return dynamics == Dynamics::full ? potential_dv(r, a) : r; };
  double dv_prev = dv(q[0]);
  for (std::size_t j = 0; j < n; ++j) {
    const double next = j + 1 < n ? q[j + 1] : 0.0;
    const double dv_here = dv(next - q[j]);
    out[j] = dv_here - dv_prev;
    dv_prev = dv_here;
  }
}

std::vector<double> forces(const ChainState& state, const ChainParams& params, Dynamics dynamics) {
  check_state(state, params);
  std::vector<double> f(state.q.size());
  forces_into(state.q, params.a, dynamics, f);
  return f;
}

ChainState step_verlet(ChainState state, double dt, const ChainParams& params, Dynamics dynamics) {
  require(dt > 0.0, ErrorCode::invalid_argument, "dt must be > 0");
  check_state(state, params);
  Integrator integrator(std::move(state), dt, params, dynamics);
  integrator.advance(1);
  return integrator.state();
}

long long step_count(double dt, double t_final) {
  // Tolerates t_final/dt landing a few ulps below an integer.
  return static_cast<long long>(std::floor(t_final / dt * (1.0 + 1e-12)));
}

std::vector<Snapshot> integrate(ChainState state, double dt, double t_final, int stride,
                                const ChainParams& params, Dynamics dynamics) {
  require(dt > 0.0, ErrorCode::invalid_argument, "dt must be > 0");
  require(t_final >= 0.0, ErrorCode::invalid_argument, "t_final must be >= 0");
  require(stride >= 1, ErrorCode::invalid_argument, "stride must be >= 1");
  check_state(state, params);

  const long long total = step_count(dt, t_final);
  Integrator integrator(std::move(state), dt, params, dynamics);
  std::vector<Snapshot> out;
  out.reserve(static_cast<std::size_t>(total / stride + 1));
  out.push_back({0.0, integrator.state()});
  for (long long done = 0; done + stride <= total; done += stride) {
    integrator.advance(stride);
    out.push_back({integrator.time(), integrator.state()});
  }
  return out;
}

Integrator::Integrator(ChainState initial, double dt, const ChainParams& params, Dynamics dynamics)
    : state_(std::move(initial)), force_(state_.q.size()), dt_(dt), a_(params.a),
      dynamics_(dynamics) {
  require(dt > 0.0, ErrorCode::invalid_argument, "dt must be > 0");
  check_state(state_, params);
  forces_into(state_.q, a_, dynamics_, force_);
}

void Integrator::advance(long long steps) {
  const std::size_t n = state_.q.size();
  const double half = 0.5 * dt_;
  for (long long s = 0; s < steps; ++s) {
    for (std::size_t j = 0; j < n; ++j) {
      state_.p[j] += half * force_[j];
      state_.q[j] += dt_ * state_.p[j];
    }
    forces_into(state_.q, a_, dynamics_, force_);
    // A non-finite q_j makes force_j and then p_j non-finite, so the sum of p
    // catches blow-up in either coordinate.
    double probe = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      state_.p[j] += half * force_[j];
      probe += state_.p[j];
    }
    ++steps_;
    if (!std::isfinite(probe)) {
      std::ostringstream msg;
      msg << "non-finite state at t = " << time() << " (dt = " << dt_ << " too large?)";
      fail(ErrorCode::numerical, msg.str());
    }
  }
}

}  // namespace adiabat

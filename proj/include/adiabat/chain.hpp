#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace adiabat {

/// Physical parameters of the fixed-end FPU chain in rescaled units.
struct ChainParams {
  int n = 0;         // particle count, >= 3
  double a = 1.0;    // quartic coefficient, > 0
  double beta = 1.0; // inverse temperature, > 0

  /// Throws Error(invalid_argument) naming the offending field.
  void validate() const;
};

/// Phase-space point. The fixed ends p_0 = p_{N+1} = q_0 = q_{N+1} = 0 are
/// implicit and never stored.
struct ChainState {
  std::vector<double> p;
  std::vector<double> q;

  static ChainState zero(int n);

  int size() const noexcept { return static_cast<int>(q.size()); }
  bool finite() const noexcept;
};

/// Selects the equations of motion. `harmonic` drops the cubic and quartic
/// force terms; it exists so tests can compare against the exact linear flow.
enum class Dynamics { full, harmonic };

/// V(r) = r^2/2 + r^3/3 + a r^4/4
double potential_v(double r, double a) noexcept;
/// V'(r) = r + r^2 + a r^3
double potential_dv(double r, double a) noexcept;

struct Energies {
  double h0 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;

  double total() const noexcept { return h0 + h1 + h2; }
};

Energies energies(const ChainState& state, const ChainParams& params);

/// Bond extensions r_j = q_{j+1} - q_j for j = 0..N (N+1 values).
std::vector<double> bond_extensions(std::span<const double> q);

/// -dH/dq_j = V'(r_j) - V'(r_{j-1}).
std::vector<double> forces(const ChainState& state, const ChainParams& params,
                           Dynamics dynamics = Dynamics::full);
void forces_into(std::span<const double> q, double a, Dynamics dynamics, std::span<double> out);

/// One Stormer-Verlet step: half kick, drift, half kick.
ChainState step_verlet(ChainState state, double dt, const ChainParams& params,
                       Dynamics dynamics = Dynamics::full);

struct Snapshot {
  double t = 0.0;
  ChainState state;
};

/// Number of whole steps of size dt that fit in t_final.
long long step_count(double dt, double t_final);

/// Repeated step_verlet, emitting every `stride` steps starting at t = 0.
/// Throws Error(numerical) with the offending time if the state stops being
/// finite.
std::vector<Snapshot> integrate(ChainState state, double dt, double t_final, int stride,
                                const ChainParams& params, Dynamics dynamics = Dynamics::full);

/// Streaming leapfrog that keeps the force from the previous step, so each
/// step costs one force evaluation. Used by the long ensemble runs.
class Integrator {
 public:
  Integrator(ChainState initial, double dt, const ChainParams& params,
             Dynamics dynamics = Dynamics::full);

  void advance(long long steps);

  const ChainState& state() const noexcept { return state_; }
  double time() const noexcept { return static_cast<double>(steps_) * dt_; }
  long long steps_taken() const noexcept { return steps_; }

 private:
  ChainState state_;
  std::vector<double> force_;
  double dt_;
  double a_;
  Dynamics dynamics_;
  long long steps_ = 0;
};

}  // namespace adiabat

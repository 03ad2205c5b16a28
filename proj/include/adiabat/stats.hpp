#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adiabat/chain.hpp"
#include "adiabat/estimate.hpp"
#include "adiabat/gibbs.hpp"
#include "adiabat/mode_polynomial.hpp"
#include "adiabat/packet.hpp"
#include "adiabat/profiles.hpp"

namespace adiabat {

using StateFunction = std::function<double(const ChainState&)>;

std::vector<ChainState> ensemble_states(const Ensemble& ensemble);

Estimate mc_estimate(const StateFunction& f, std::span<const ChainState> states);

/// Observables recorded along trajectories started from each initial state,
/// at the times in `times` (the first of which must be 0).
class TrajectoryTable {
 public:
  TrajectoryTable(int observables, int states, std::vector<double> times);

  int observables() const noexcept { return n_obs_; }
  int states() const noexcept { return n_states_; }
  const std::vector<double>& times() const noexcept { return times_; }

  double& at(int obs, int state, int t) { return values_[index(obs, state, t)]; }
  double at(int obs, int state, int t) const { return values_[index(obs, state, t)]; }

 private:
  std::size_t index(int obs, int state, int t) const {
    return (static_cast<std::size_t>(obs) * n_states_ + state) * times_.size() + t;
  }
  int n_obs_, n_states_;
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Integrates every initial state with step dt up to the last grid time.
/// Grid times are rounded down to whole steps.
TrajectoryTable record_trajectories(std::span<const StateFunction> observables,
                                    std::span<const ChainState> initial, const ChainParams& params,
                                    double dt, std::span<const double> times,
                                    Dynamics dynamics = Dynamics::full, int threads = 1);

/// C_F(t) = <F F(t)> - <F><F(t)> over initial conditions, with jackknife
/// errors. `normalized` is C_F(t)/C_F(0); values[0] is the sample variance.
struct CorrelationCurve {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> std_errors;
  std::vector<double> normalized;
  std::vector<double> normalized_std_errors;
  double variance = 0.0;
  int n_samples = 0;
};

CorrelationCurve correlation_curve(const TrajectoryTable& table, int obs);

CorrelationCurve autocorrelation(const StateFunction& f, std::span<const ChainState> initial,
                                 const ChainParams& params, double dt,
                                 std::span<const double> times,
                                 Dynamics dynamics = Dynamics::full, int threads = 1);

/// First time the normalized curve drops below 1/2, linearly interpolated
/// between grid points. Empty if it never does.
std::optional<double> half_life(std::span<const double> times, std::span<const double> normalized);
std::optional<double> half_life(const CorrelationCurve& curve);

struct HalfLife {
  bool reached = false;
  /// Crossing time, or the last grid time when not reached (a lower bound).
  double time = 0.0;
  double std_error = 0.0;
};

/// Half-life with a jackknife error over initial conditions.
HalfLife half_life_estimate(const TrajectoryTable& table, int obs);

struct Theorem1Ratio {
  double phi_dot_norm = 0.0;
  double sigma_phi = 0.0;
  double ratio = 0.0;
  double ratio_std_error = 0.0;
  double sigma_phi0 = 0.0;
  double sigma_phi1 = 0.0;
  double phi1_over_phi0 = 0.0;
  double phi1_over_phi0_std_error = 0.0;
  int n_samples = 0;
};

/// ||Phi_dot|| / sigma_Phi with Phi = Phi0 + Phi1 and Phi_dot from the
/// analytic bracket. With Dynamics::harmonic the Hamiltonian is H0 and Phi
/// is Phi0 alone.
Theorem1Ratio ratio_theorem1(const PacketObservable& packet, const ChainParams& params,
                             std::span<const ChainState> states,
                             Dynamics dynamics = Dynamics::full, int threads = 1);

struct Lemma3Row {
  int n = 0;
  double beta = 0.0;
  int degree = 0;
  double plus_norm = 0.0;
  double variance = 0.0;
  double variance_std_error = 0.0;
  /// variance beta^s / (N ||f||_+^2)
  double normalized = 0.0;
  double normalized_std_error = 0.0;
};

Lemma3Row lemma3_cell(const PsTestFunction& f, const ChainParams& params,
                      std::span<const ChainState> states);

std::vector<Lemma3Row> lemma3_scan(PsKind kind, const NuProfile& profile,
                                   std::span<const int> n_list, std::span<const double> beta_list,
                                   double a, int n_samples, std::uint64_t seed,
                                   const SamplerSettings& settings = {}, int threads = 1);

struct ChebyshevResult {
  double beta = 0.0;
  double a = 0.0;
  double time = 0.0;
  double sigma_phi0 = 0.0;
  double threshold = 0.0;
  double probability = 0.0;
  double probability_std_error = 0.0;
  /// 2 (sigma^2 - C(t)) from the same samples.
  double increment_variance = 0.0;
  double chebyshev_bound = 0.0;
  double chebyshev_bound_std_error = 0.0;
  int n_samples = 0;
};

/// Exceedance of |Phi0(t) - Phi0(0)| >= sigma_Phi0 beta^{-a/2} at
/// t = beta^{1-a} (or at `time` when given).
ChebyshevResult chebyshev_experiment(const PacketObservable& packet, const ChainParams& params,
                                     double a, std::span<const ChainState> states, double dt,
                                     std::optional<double> time = std::nullopt, int threads = 1);

struct MultiPacketResult {
  double time = 0.0;
  std::vector<double> probabilities;
  std::vector<double> probability_std_errors;
  double joint_probability = 0.0;
  double joint_std_error = 0.0;
  double sum_of_probabilities = 0.0;
  double persistence_time = 0.0;
  std::vector<double> persistence;  // normalized autocorrelation at persistence_time
  std::vector<double> persistence_std_errors;
  int n_samples = 0;
};

/// Joint exceedance for several packets along the same trajectories, plus
/// each packet's normalized autocorrelation at t = beta/4.
MultiPacketResult multi_packet_experiment(std::span<const NuProfile> profiles,
                                          const ChainParams& params, double a,
                                          std::span<const ChainState> states, double dt,
                                          int threads = 1);

}  // namespace adiabat

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "adiabat/chain.hpp"
#include "adiabat/random.hpp"

namespace adiabat {

/// One-site law proportional to exp(-gamma r - beta V(r)), where the cubic
/// coefficient of V may be switched off (cubic = 0) to get the symmetric
/// potential. Moments up to order 8 are cached at construction.
class TiltedDensity {
 public:
  static constexpr int kMaxMoment = 8;

  TiltedDensity(double beta, double a, double gamma, double cubic = 1.0);

  double beta() const noexcept { return beta_; }
  double a() const noexcept { return a_; }
  double gamma() const noexcept { return gamma_; }
  double cubic() const noexcept { return cubic_; }

  /// -gamma r - beta V(r).
  double exponent(double r) const noexcept;
  /// log of the normalization q_gamma.
  double log_normalization() const noexcept { return log_q_; }
  double normalization() const;

  double moment(int n) const;
  double mean() const { return moments_[1]; }
  double variance() const { return moments_[2] - moments_[1] * moments_[1]; }

  /// Integration window; the exponent is at least 60 below its maximum
  /// outside it.
  double lower() const noexcept { return lo_; }
  double upper() const noexcept { return hi_; }
  double peak() const noexcept { return peak_; }
  int panels() const noexcept { return panels_; }
  /// Largest relative change of a moment at the last panel doubling.
  double quadrature_change() const noexcept { return change_; }

 private:
  double beta_, a_, gamma_, cubic_;
  double lo_ = 0.0, hi_ = 0.0, peak_ = 0.0, e_max_ = 0.0, log_q_ = 0.0;
  int panels_ = 0;
  double change_ = 0.0;
  std::array<double, kMaxMoment + 1> moments_{};
};

/// Solves <r>_theta = 0. Newton steps safeguarded by bisection on [-10, 10];
/// throws Error(numerical) when the bracket has no sign change.
double solve_theta(double beta, double a, double cubic = 1.0);

double tilted_moment(const TiltedDensity& density, int n);

/// Exact draws from a tilted density through a tabulated inverse CDF.
class TiltedIidSampler {
 public:
  explicit TiltedIidSampler(const TiltedDensity& density, int cells = 1 << 18);
  double operator()(Rng& rng) const;

 private:
  double lo_, width_;
  std::vector<double> cdf_;
};

std::vector<double> sample_momenta(Rng& rng, int n, double beta);

/// q_j = sum_{i<j} r_i. Throws if |sum r| > 1e-12 (N+1) or sizes disagree.
ChainState bonds_to_state(std::span<const double> r, std::span<const double> p);
std::vector<double> state_to_bonds(const ChainState& state);

struct SamplerSettings {
  int burn_in_sweeps = 100;
  int pilot_sweeps = 2000;
  double target_acceptance = 0.3;
  /// 0 selects ceil(5 tau_int(H1)) from the pilot run.
  int stride = 0;
  /// Independent Markov chains the ensemble is split across.
  int chains = 8;
  /// Fixed proposal width; 0 means tune during burn-in.
  double proposal_width = 0.0;
};

struct SamplerDiagnostics {
  double theta = 0.0;
  double log_q_theta = 0.0;
  double proposal_width = 0.0;
  double acceptance = 0.0;
  double tau_int_h1 = 0.0;
  int stride = 0;
  long long sweeps = 0;
};

/// Metropolis chain on {sum r = 0} targeting prod exp(-beta V(r_j)). A move
/// picks a pair i != j and shifts r_i += d, r_j -= d with d ~ N(0, width^2).
class BondChain {
 public:
  BondChain(const ChainParams& params, double proposal_width, Rng rng);

  void sweep();
  void sweeps(long long count);
  /// Burn-in that rescales the width every 10 sweeps toward the target
  /// acceptance. The width is left frozen afterwards.
  void tune(int sweeps, double target_acceptance);

  std::span<const double> bonds() const noexcept { return r_; }
  double proposal_width() const noexcept { return width_; }
  double acceptance() const noexcept;
  void reset_counters() noexcept { proposed_ = accepted_ = 0; }
  long long sweeps_done() const noexcept { return sweeps_; }
  Rng& rng() noexcept { return rng_; }

 private:
  ChainParams params_;
  double width_;
  Rng rng_;
  std::vector<double> r_;
  long long proposed_ = 0, accepted_ = 0, sweeps_ = 0;
};

/// Bonds after `sweeps` sweeps from r = 0, with the width tuned in the first
/// min(sweeps, 100) sweeps.
std::vector<double> sample_bonds(Rng& rng, const ChainParams& params, int sweeps);

struct GibbsSample {
  ChainState state;
  std::vector<double> r;
  std::uint64_t seed = 0;
  int chain = 0;
  long long sweep = 0;
};

GibbsSample sample_state(Rng& rng, const ChainParams& params, int sweeps);

/// Tunes the proposal width and measures tau_int(H1) on a pilot chain drawn
/// from its own seed stream.
SamplerDiagnostics tune_sampler(const ChainParams& params, const SamplerSettings& settings,
                                std::uint64_t seed);

struct Ensemble {
  std::vector<GibbsSample> samples;
  SamplerDiagnostics diagnostics;
};

/// n_samples Gibbs states, split evenly across settings.chains independent
/// chains with seeds derived from `seed`. The result depends on the seed and
/// settings only, never on `threads`.
Ensemble sample_ensemble(const ChainParams& params, int n_samples, std::uint64_t seed,
                         const SamplerSettings& settings = {}, int threads = 1);

struct CovarianceResult {
  double covariance = 0.0;
  double std_error = 0.0;
  double mean_k = 0.0;
  double mean_l = 0.0;
  int n_samples = 0;
};

/// Estimates <r^k r^l> - <r^k><r^l>, where r^k = prod over the multiset
/// k_sites of r_site. With `independent` the bonds come from the tilted iid
/// sampler without the zero-sum constraint.
CovarianceResult monomial_covariance_test(const ChainParams& params,
                                          std::span<const int> k_sites,
                                          std::span<const int> l_sites, int n_samples,
                                          std::uint64_t seed, const SamplerSettings& settings = {},
                                          bool independent = false, int threads = 1);

/// Bond vectors with |sum r| <= half_width, by rejection from iid tilted draws.
std::vector<std::vector<double>> slab_rejection_bonds(const ChainParams& params, int n_samples,
                                                      std::uint64_t seed,
                                                      double half_width = 1e-3);

}  // namespace adiabat

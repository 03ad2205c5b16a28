#include "adiabat/stats.hpp"

#include <algorithm>
#include <cmath>

#include "adiabat/error.hpp"
#include "adiabat/parallel.hpp"
#include "adiabat/random.hpp"

namespace adiabat {

std::vector<ChainState> ensemble_states(const Ensemble& ensemble) {
  std::vector<ChainState> out;
  out.reserve(ensemble.samples.size());
  for (const auto& s : ensemble.samples) out.push_back(s.state);
  return out;
}

Estimate mc_estimate(const StateFunction& f, std::span<const ChainState> states) {
  std::vector<double> values(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) values[i] = f(states[i]);
  return mc_estimate(values);
}

TrajectoryTable::TrajectoryTable(int observables, int states, std::vector<double> times)
    : n_obs_(observables), n_states_(states), times_(std::move(times)) {
  require(observables >= 1 && states >= 0 && !times_.empty(), ErrorCode::invalid_argument,
          "empty trajectory table");
  values_.assign(static_cast<std::size_t>(n_obs_) * n_states_ * times_.size(), 0.0);
}

TrajectoryTable record_trajectories(std::span<const StateFunction> observables,
                                    std::span<const ChainState> initial, const ChainParams& params,
                                    double dt, std::span<const double> times, Dynamics dynamics,
                                    int threads) {
  require(!times.empty() && times.front() == 0.0, ErrorCode::invalid_argument,
          "the time grid must start at 0");
  require(std::is_sorted(times.begin(), times.end()), ErrorCode::invalid_argument,
          "the time grid must be increasing");
  require(dt > 0.0, ErrorCode::invalid_argument, "dt must be > 0");
  const int n_obs = static_cast<int>(observables.size());
  const int n_states = static_cast<int>(initial.size());
  std::vector<long long> steps(times.size());
  for (std::size_t g = 0; g < times.size(); ++g) steps[g] = step_count(dt, times[g]);

  TrajectoryTable table(n_obs, n_states, {times.begin(), times.end()});
  parallel_for(n_states, threads, [&](std::size_t i) {
    Integrator integrator(initial[i], dt, params, dynamics);
    for (std::size_t g = 0; g < times.size(); ++g) {
      integrator.advance(steps[g] - integrator.steps_taken());
      for (int o = 0; o < n_obs; ++o)
        table.at(o, static_cast<int>(i), static_cast<int>(g)) = observables[o](integrator.state());
    }
  });
  return table;
}

namespace {

// Centered sums for the pair (F(0), F(t_g)) that give leave-one-out
// covariances in O(1).
struct PairSums {
  std::vector<double> dx, dy;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;

  PairSums(std::span<const double> x, std::span<const double> y) : n(static_cast<int>(x.size())) {
    const double mx = pairwise_sum(x) / n, my = pairwise_sum(y) / n;
    dx.resize(n);
    dy.resize(n);
    for (int i = 0; i < n; ++i) {
      dx[i] = x[i] - mx;
      dy[i] = y[i] - my;
      sx += dx[i];
      sy += dy[i];
      sxx += dx[i] * dx[i];
      sxy += dx[i] * dy[i];
    }
  }
  double cov() const { return (sxy - sx * sy / n) / (n - 1); }
  double var() const { return (sxx - sx * sx / n) / (n - 1); }
  double cov_without(int i) const {
    const double a = sx - dx[i], b = sy - dy[i], c = sxy - dx[i] * dy[i];
    return (c - a * b / (n - 1)) / (n - 2);
  }
  double var_without(int i) const {
    const double a = sx - dx[i], c = sxx - dx[i] * dx[i];
    return (c - a * a / (n - 1)) / (n - 2);
  }
};

std::vector<double> column(const TrajectoryTable& table, int obs, int t) {
  std::vector<double> out(table.states());
  for (int i = 0; i < table.states(); ++i) out[i] = table.at(obs, i, t);
  return out;
}

}  // namespace

CorrelationCurve correlation_curve(const TrajectoryTable& table, int obs) {
  const int n = table.states();
  require(n >= 3, ErrorCode::invalid_argument, "a correlation curve needs at least 3 trajectories");
  CorrelationCurve curve;
  curve.times = table.times();
  curve.n_samples = n;
  const auto x = column(table, obs, 0);
  for (std::size_t g = 0; g < curve.times.size(); ++g) {
    const auto y = column(table, obs, static_cast<int>(g));
    const PairSums sums(x, y);
    const double c = sums.cov(), v = sums.var();
    curve.values.push_back(c);
    curve.std_errors.push_back(jackknife_error(n, [&](int i) { return sums.cov_without(i); }));
    curve.normalized.push_back(v > 0.0 ? c / v : 1.0);
    curve.normalized_std_errors.push_back(
        v > 0.0 ? jackknife_error(n, [&](int i) { return sums.cov_without(i) / sums.var_without(i); })
                : 0.0);
  }
  curve.variance = curve.values.front();
  return curve;
}

CorrelationCurve autocorrelation(const StateFunction& f, std::span<const ChainState> initial,
                                 const ChainParams& params, double dt,
                                 std::span<const double> times, Dynamics dynamics, int threads) {
  const StateFunction obs[1] = {f};
  return correlation_curve(record_trajectories(obs, initial, params, dt, times, dynamics, threads),
                           0);
}

std::optional<double> half_life(std::span<const double> times, std::span<const double> normalized) {
  require(times.size() == normalized.size(), ErrorCode::dimension_mismatch,
          "curve times and values differ in length");
  for (std::size_t g = 0; g < normalized.size(); ++g) {
    if (normalized[g] < 0.5) {
      if (g == 0) return times[0];
      const double y0 = normalized[g - 1], y1 = normalized[g];
      const double frac = (y0 - 0.5) / (y0 - y1);
      return times[g - 1] + frac * (times[g] - times[g - 1]);
    }
  }
  return std::nullopt;
}

std::optional<double> half_life(const CorrelationCurve& curve) {
  return half_life(curve.times, curve.normalized);
}

HalfLife half_life_estimate(const TrajectoryTable& table, int obs) {
  const int n = table.states();
  const auto& times = table.times();
  const int m = static_cast<int>(times.size());
  const auto x = column(table, obs, 0);
  std::vector<PairSums> sums;
  sums.reserve(m);
  std::vector<double> rho(m);
  for (int g = 0; g < m; ++g) {
    sums.emplace_back(x, column(table, obs, g));
    const double v = sums.back().var();
    rho[g] = v > 0.0 ? sums.back().cov() / v : 1.0;
  }
  HalfLife out;
  const auto full = half_life(times, rho);
  out.reached = full.has_value();
  out.time = full.value_or(times.back());
  if (!out.reached) return out;
  out.std_error = jackknife_error(n, [&](int i) {
    std::vector<double> r(m);
    for (int g = 0; g < m; ++g) {
      const double v = sums[g].var_without(i);
      r[g] = v > 0.0 ? sums[g].cov_without(i) / v : 1.0;
    }
    return half_life(times, r).value_or(times.back());
  });
  return out;
}

Theorem1Ratio ratio_theorem1(const PacketObservable& packet, const ChainParams& params,
                             std::span<const ChainState> states, Dynamics dynamics, int threads) {
  const int n = static_cast<int>(states.size());
  require(n >= 3, ErrorCode::invalid_argument, "the ratio needs at least 3 samples");
  require(packet.size() == params.n, ErrorCode::dimension_mismatch,
          "packet and chain have different N");
  std::vector<double> f0(n), f1(n), fd(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const ChainState& s = states[i];
    f0[i] = phi0(s, packet);
    if (dynamics == Dynamics::harmonic) {
      f1[i] = 0.0;
      fd[i] = poisson_bracket(grad_phi(s, packet, Observable::phi0),
                              grad_hamiltonian(s, params, HamiltonianPart::h0));
    } else {
      f1[i] = phi1(s, packet);
      fd[i] = phi_dot_reduced(s, packet, params);
    }
  });

  std::vector<double> phi(n), d2(n);
  for (int i = 0; i < n; ++i) {
    phi[i] = f0[i] + f1[i];
    d2[i] = fd[i] * fd[i];
  }
  const PairSums sp(phi, phi), s0(f0, f0), s1(f1, f1);
  const double sd2 = pairwise_sum(d2);

  Theorem1Ratio out;
  out.n_samples = n;
  out.phi_dot_norm = std::sqrt(sd2 / n);
  out.sigma_phi = std::sqrt(std::max(sp.var(), 0.0));
  out.ratio = out.sigma_phi > 0.0 ? out.phi_dot_norm / out.sigma_phi : 0.0;
  out.ratio_std_error = jackknife_error(n, [&](int i) {
    const double v = sp.var_without(i);
    return v > 0.0 ? std::sqrt((sd2 - d2[i]) / (n - 1)) / std::sqrt(v) : 0.0;
  });
  out.sigma_phi0 = std::sqrt(std::max(s0.var(), 0.0));
  out.sigma_phi1 = std::sqrt(std::max(s1.var(), 0.0));
  out.phi1_over_phi0 = out.sigma_phi0 > 0.0 ? out.sigma_phi1 / out.sigma_phi0 : 0.0;
  out.phi1_over_phi0_std_error = jackknife_error(n, [&](int i) {
    const double v0 = s0.var_without(i);
    return v0 > 0.0 ? std::sqrt(std::max(s1.var_without(i), 0.0) / v0) : 0.0;
  });
  return out;
}

Lemma3Row lemma3_cell(const PsTestFunction& f, const ChainParams& params,
                      std::span<const ChainState> states) {
  require(f.packet && f.packet->size() == params.n, ErrorCode::dimension_mismatch,
          "test function and chain have different N");
  std::vector<double> values(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) values[i] = f(states[i]);
  const Estimate e = mc_estimate(values);
  Lemma3Row row;
  row.n = params.n;
  row.beta = params.beta;
  row.degree = f.degree;
  row.plus_norm = f.plus_norm;
  row.variance = e.variance;
  row.variance_std_error = e.std_error_variance;
  const double scale = std::pow(params.beta, f.degree) / (params.n * f.plus_norm * f.plus_norm);
  row.normalized = e.variance * scale;
  row.normalized_std_error = e.std_error_variance * scale;
  return row;
}

std::vector<Lemma3Row> lemma3_scan(PsKind kind, const NuProfile& profile,
                                   std::span<const int> n_list, std::span<const double> beta_list,
                                   double a, int n_samples, std::uint64_t seed,
                                   const SamplerSettings& settings, int threads) {
  std::vector<Lemma3Row> rows;
  std::uint64_t cell = 0;
  for (int n : n_list) {
    const PsTestFunction f = make_ps_test(kind, profile, n);
    for (double beta : beta_list) {
      const ChainParams params{n, a, beta};
      const auto ens = sample_ensemble(params, n_samples, derive_seed(seed, cell++), settings, threads);
      rows.push_back(lemma3_cell(f, params, ensemble_states(ens)));
    }
  }
  return rows;
}

ChebyshevResult chebyshev_experiment(const PacketObservable& packet, const ChainParams& params,
                                     double a, std::span<const ChainState> states, double dt,
                                     std::optional<double> time, int threads) {
  require(a >= 0.0 && a <= 0.5, ErrorCode::invalid_argument, "a must be in [0, 1/2]");
  ChebyshevResult out;
  out.beta = params.beta;
  out.a = a;
  out.time = time.value_or(std::pow(params.beta, 1.0 - a));
  require(out.time > 0.0, ErrorCode::invalid_argument, "time must be > 0");
  const StateFunction obs[1] = {[&](const ChainState& s) { return phi0(s, packet); }};
  const double grid[2] = {0.0, out.time};
  const auto table = record_trajectories(obs, states, params, dt, grid, Dynamics::full, threads);

  const int n = table.states();
  out.n_samples = n;
  const auto x = column(table, 0, 0), y = column(table, 0, 1);
  const PairSums sums(x, y);
  out.sigma_phi0 = std::sqrt(sums.var());
  out.threshold = out.sigma_phi0 * std::pow(params.beta, -0.5 * a);
  int hits = 0;
  for (int i = 0; i < n; ++i)
    if (std::abs(y[i] - x[i]) >= out.threshold) ++hits;
  out.probability = static_cast<double>(hits) / n;
  out.probability_std_error = std::sqrt(out.probability * (1.0 - out.probability) / n);
  out.increment_variance = 2.0 * (sums.var() - sums.cov());
  // With the threshold tied to sigma, the bound is 2 (1 - rho(t)) beta^a.
  const double amp = 2.0 * std::pow(params.beta, a);
  out.chebyshev_bound = amp * (1.0 - sums.cov() / sums.var());
  out.chebyshev_bound_std_error = jackknife_error(
      n, [&](int i) { return amp * (1.0 - sums.cov_without(i) / sums.var_without(i)); });
  return out;
}

MultiPacketResult multi_packet_experiment(std::span<const NuProfile> profiles,
                                          const ChainParams& params, double a,
                                          std::span<const ChainState> states, double dt,
                                          int threads) {
  const int k = static_cast<int>(profiles.size());
  require(k >= 1, ErrorCode::invalid_argument, "need at least one packet");
  std::vector<PacketObservable> packets;
  packets.reserve(k);
  for (const auto& p : profiles) packets.push_back(PacketObservable::build(p, params.n));
  std::vector<StateFunction> obs;
  for (int l = 0; l < k; ++l)
    obs.push_back([&packets, l](const ChainState& s) { return phi0(s, packets[l]); });

  MultiPacketResult out;
  out.time = std::pow(params.beta, 1.0 - a);
  out.persistence_time = params.beta / 4.0;
  std::vector<double> grid{0.0, out.time, out.persistence_time};
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const int g_exc = static_cast<int>(std::find(grid.begin(), grid.end(), out.time) - grid.begin());
  const int g_per =
      static_cast<int>(std::find(grid.begin(), grid.end(), out.persistence_time) - grid.begin());
  const auto table = record_trajectories(obs, states, params, dt, grid, Dynamics::full, threads);

  const int n = table.states();
  out.n_samples = n;
  std::vector<char> any(n, 0);
  for (int l = 0; l < k; ++l) {
    const auto x = column(table, l, 0), y = column(table, l, g_exc);
    const double sigma = std::sqrt(PairSums(x, x).var());
    const double threshold = sigma * std::pow(params.beta, -0.5 * a);
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(y[i] - x[i]) >= threshold) {
        ++hits;
        any[i] = 1;
      }
    }
    const double p = static_cast<double>(hits) / n;
    out.probabilities.push_back(p);
    out.probability_std_errors.push_back(std::sqrt(p * (1.0 - p) / n));
    out.sum_of_probabilities += p;
    const auto curve = correlation_curve(table, l);
    out.persistence.push_back(curve.normalized[g_per]);
    out.persistence_std_errors.push_back(curve.normalized_std_errors[g_per]);
  }
  const double joint = static_cast<double>(std::count(any.begin(), any.end(), 1)) / n;
  out.joint_probability = joint;
  out.joint_std_error = std::sqrt(joint * (1.0 - joint) / n);
  return out;
}

}  // namespace adiabat

#include <cmath>
#include <random>

#include "doctest.h"

#include "adiabat/error.hpp"
#include "adiabat/spectral.hpp"
#include "adiabat/stats.hpp"
#include "support.hpp"

using namespace adiabat;

namespace {

// Exact Gibbs states of the harmonic chain: independent modes with
// p_hat ~ N(0, 1/beta) and q_hat ~ N(0, 1/(beta omega^2)).
std::vector<ChainState> harmonic_gibbs(int n, double beta, int count, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto w = frequencies(n);
  std::vector<ChainState> out;
  for (int i = 0; i < count; ++i) {
    ModeState m{std::vector<double>(n), std::vector<double>(n)};
    for (int k = 0; k < n; ++k) {
      m.p_hat[k] = normal(rng) / std::sqrt(beta);
      m.q_hat[k] = normal(rng) / (std::sqrt(beta) * w[k]);
    }
    out.push_back(from_modes(m));
  }
  return out;
}

}  // namespace

TEST_CASE("correlation curve of a synthetic table") {
  TrajectoryTable table(1, 4, {0.0, 1.0});
  const double x[4] = {1.0, 2.0, 3.0, 4.0};
  const double y[4] = {1.5, 1.0, 3.5, 3.0};
  for (int i = 0; i < 4; ++i) {
    table.at(0, i, 0) = x[i];
    table.at(0, i, 1) = y[i];
  }
  const auto c = correlation_curve(table, 0);
  const double mx = 2.5, my = 2.25;
  double vxx = 0.0, vxy = 0.0;
  for (int i = 0; i < 4; ++i) {
    vxx += (x[i] - mx) * (x[i] - mx);
    vxy += (x[i] - mx) * (y[i] - my);
  }
  CHECK(c.values[0] == doctest::Approx(vxx / 3.0));
  CHECK(c.values[1] == doctest::Approx(vxy / 3.0));
  CHECK(c.normalized[0] == doctest::Approx(1.0));
  CHECK(c.normalized[1] == doctest::Approx(vxy / vxx));
  CHECK(c.variance == doctest::Approx(vxx / 3.0));
  CHECK(c.n_samples == 4);
  CHECK(c.std_errors[1] > 0.0);
}

TEST_CASE("half-life interpolates the first crossing") {
  const std::vector<double> t{0.0, 1.0, 2.0, 3.0};
  CHECK(*half_life(t, std::vector<double>{1.0, 0.6, 0.4, 0.7}) == doctest::Approx(1.5));
  CHECK(*half_life(t, std::vector<double>{1.0, 0.5, 0.4, 0.3}) == doctest::Approx(1.0));
  CHECK_FALSE(half_life(t, std::vector<double>{1.0, 0.9, 0.8, 0.7}).has_value());
  CHECK_THROWS_AS(half_life(t, std::vector<double>{1.0}), Error);
}

TEST_CASE("half-life estimate reports censoring") {
  TrajectoryTable table(1, 5, {0.0, 1.0, 2.0});
  for (int i = 0; i < 5; ++i) {
    const double v = i - 2.0;
    table.at(0, i, 0) = v;
    table.at(0, i, 1) = 0.9 * v + (i % 2 ? 0.1 : -0.1);
    table.at(0, i, 2) = 0.8 * v;
  }
  const auto h = half_life_estimate(table, 0);
  CHECK_FALSE(h.reached);
  CHECK(h.time == 2.0);
}

TEST_CASE("recorded trajectories match direct integration") {
  Rng rng = make_rng(61, 0);
  const ChainParams params{9, 1.0, 10.0};
  std::vector<ChainState> states{testing_support::gaussian_state(rng, 9, 10.0),
                                 testing_support::gaussian_state(rng, 9, 10.0)};
  const StateFunction obs[2] = {[](const ChainState& s) { return s.q[0]; },
                                [](const ChainState& s) { return s.p[4]; }};
  const std::vector<double> grid{0.0, 0.5, 1.25};
  const auto table = record_trajectories(obs, states, params, 0.1, grid);
  for (int i = 0; i < 2; ++i) {
    CHECK(table.at(0, i, 0) == states[i].q[0]);
    Integrator integ(states[i], 0.1, params);
    integ.advance(5);
    CHECK(table.at(0, i, 1) == integ.state().q[0]);
    CHECK(table.at(1, i, 1) == integ.state().p[4]);
    integ.advance(7);  // 1.25 rounds down to 12 steps
    CHECK(table.at(0, i, 2) == integ.state().q[0]);
  }
  const auto threaded = record_trajectories(obs, states, params, 0.1, grid, Dynamics::full, 2);
  CHECK(threaded.at(1, 1, 2) == table.at(1, 1, 2));
  CHECK_THROWS_AS(record_trajectories(obs, states, params, 0.1, std::vector<double>{0.5, 1.0}), Error);
}

TEST_CASE("harmonic Gibbs variance of Phi0") {
  // Each mode contributes g_k^2 Var(I_k omega_k) = g_k^2 / beta^2.
  const int n = 31;
  const double beta = 50.0;
  const auto packet = PacketObservable::build(default_packet_profile(), n);
  const auto states = harmonic_gibbs(n, beta, 20000, 62);
  const auto e = mc_estimate([&](const ChainState& s) { return phi0(s, packet); }, states);
  double expected = 0.0;
  for (double g : packet.g()) expected += g * g;
  expected /= beta * beta;
  CHECK(std::abs(e.variance - expected) < 4.0 * e.std_error_variance);
  // Momentum half alone: F = sum g_k p_hat_k^2 / 2 has variance sum g^2 / (2 beta^2).
  const auto f = mc_estimate(
      [&](const ChainState& s) {
        const auto m = to_modes(s);
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += packet.g()[k] * m.p_hat[k] * m.p_hat[k] / 2.0;
        return acc;
      },
      states);
  CHECK(std::abs(f.variance - expected / 2.0) < 4.0 * f.std_error_variance);
}

TEST_CASE("Phi0 is conserved by the harmonic flow up to the leapfrog error") {
  const int n = 31;
  const auto packet = PacketObservable::build(default_packet_profile(), n);
  const auto states = harmonic_gibbs(n, 100.0, 40, 63);
  const ChainParams params{n, 1.0, 100.0};
  const std::vector<double> grid{0.0, 50.0, 200.0};
  const auto curve = autocorrelation([&](const ChainState& s) { return phi0(s, packet); }, states, params,
                                     0.02, grid, Dynamics::harmonic);
  for (double v : curve.normalized) CHECK(v == doctest::Approx(1.0).epsilon(1e-3));
  const auto t = ratio_theorem1(packet, params, states, Dynamics::harmonic);
  CHECK(t.ratio < 1e-12);
  CHECK(t.sigma_phi1 == 0.0);
}

TEST_CASE("ratio pieces are consistent with direct estimates") {
  const int n = 31;
  const ChainParams params{n, 1.0, 100.0};
  const auto packet = PacketObservable::build(default_packet_profile(), n);
  SamplerSettings settings;
  settings.pilot_sweeps = 500;
  const auto states = ensemble_states(sample_ensemble(params, 400, 64, settings));
  const auto r = ratio_theorem1(packet, params, states);
  double sq = 0.0;
  for (const auto& s : states) sq += std::pow(phi_dot(s, packet, params), 2);
  CHECK(r.phi_dot_norm == doctest::Approx(std::sqrt(sq / states.size())).epsilon(1e-8));
  const auto e = mc_estimate([&](const ChainState& s) { return phi0(s, packet) + phi1(s, packet); }, states);
  CHECK(r.sigma_phi == doctest::Approx(e.std_dev()).epsilon(1e-10));
  CHECK(r.ratio == doctest::Approx(r.phi_dot_norm / r.sigma_phi).epsilon(1e-12));
  CHECK(r.phi1_over_phi0 == doctest::Approx(r.sigma_phi1 / r.sigma_phi0).epsilon(1e-12));
  CHECK(r.ratio_std_error > 0.0);
  CHECK(r.n_samples == 400);
}

TEST_CASE("normalized variance of a test function") {
  const int n = 15;
  const ChainParams params{n, 1.0, 50.0};
  SamplerSettings settings;
  settings.pilot_sweeps = 300;
  const auto states = ensemble_states(sample_ensemble(params, 200, 65, settings));
  const auto f = make_ps_test(PsKind::phi1, default_packet_profile(), n);
  const auto row = lemma3_cell(f, params, states);
  const auto e = mc_estimate([&](const ChainState& s) { return f(s); }, states);
  CHECK(row.variance == doctest::Approx(e.variance));
  CHECK(row.normalized == doctest::Approx(e.variance * std::pow(50.0, 3) / (n * f.plus_norm * f.plus_norm)));
  CHECK(row.degree == 3);

  const int ns[2] = {7, 9};
  const double betas[1] = {40.0};
  const auto rows = lemma3_scan(PsKind::h1, default_packet_profile(), ns, betas, 1.0, 50, 66, settings);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].n == 9);
  CHECK(rows[1].plus_norm == doctest::Approx(0.25));
}

TEST_CASE("Chebyshev bound is the measured increment variance over the threshold") {
  const int n = 31;
  const ChainParams params{n, 1.0, 100.0};
  const auto packet = PacketObservable::build(default_packet_profile(), n);
  SamplerSettings settings;
  settings.pilot_sweeps = 300;
  const auto states = ensemble_states(sample_ensemble(params, 300, 67, settings));
  const auto c = chebyshev_experiment(packet, params, 0.4, states, 0.02);
  CHECK(c.time == doctest::Approx(std::pow(100.0, 0.6)));
  CHECK(c.threshold == doctest::Approx(c.sigma_phi0 * std::pow(100.0, -0.2)));
  CHECK(c.chebyshev_bound == doctest::Approx(c.increment_variance / (c.threshold * c.threshold)).epsilon(1e-10));
  CHECK(c.probability >= 0.0);
  CHECK(c.probability <= 1.0);
  CHECK_THROWS_AS(chebyshev_experiment(packet, params, 0.7, states, 0.02), Error);
}

TEST_CASE("multi-packet joint exceedance respects the union bound") {
  const int n = 31;
  const ChainParams params{n, 1.0, 100.0};
  SamplerSettings settings;
  settings.pilot_sweeps = 300;
  const auto states = ensemble_states(sample_ensemble(params, 200, 68, settings));
  const auto profiles = disjoint_profiles(3, "bump");
  const auto m = multi_packet_experiment(profiles, params, 0.4, states, 0.02);
  REQUIRE(m.probabilities.size() == 3);
  double maxp = 0.0;
  for (double p : m.probabilities) maxp = std::max(maxp, p);
  CHECK(m.joint_probability >= maxp);
  CHECK(m.joint_probability <= m.sum_of_probabilities + 1e-15);
  CHECK(m.persistence_time == doctest::Approx(25.0));
}

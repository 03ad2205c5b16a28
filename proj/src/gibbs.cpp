#include "adiabat/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "adiabat/error.hpp"
#include "adiabat/estimate.hpp"
#include "adiabat/parallel.hpp"

namespace adiabat {

namespace {

constexpr double kDrop = 60.0;

// Real roots of a r^3 + c r^2 + r + d, sorted.
std::vector<double> cubic_roots(double a, double c, double d) {
  auto f = [&](double r) { return ((a * r + c) * r + 1.0) * r + d; };
  auto bisect = [&](double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  // Split the line at the turning points of the cubic; f is monotone on
  // each piece.
  std::vector<double> cuts;
  const double disc = 4.0 * c * c - 12.0 * a;
  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    cuts = {(-2.0 * c - s) / (6.0 * a), (-2.0 * c + s) / (6.0 * a)};
  }
  double span = 1.0;
  while (f(-span) > 0.0 || f(span) < 0.0) span *= 2.0;
  for (double& x : cuts) span = std::max(span, 2.0 * std::abs(x) + 1.0);
  std::vector<double> edges{-span};
  edges.insert(edges.end(), cuts.begin(), cuts.end());
  edges.push_back(span);
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double fl = f(edges[i]), fh = f(edges[i + 1]);
    if (fl == 0.0) roots.push_back(edges[i]);
    else if ((fl < 0.0) != (fh < 0.0)) roots.push_back(bisect(edges[i], edges[i + 1]));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

TiltedDensity::TiltedDensity(double beta, double a, double gamma, double cubic)
    : beta_(beta), a_(a), gamma_(gamma), cubic_(cubic) {
  require(beta > 0.0 && std::isfinite(beta), ErrorCode::invalid_argument, "beta must be > 0");
  require(a > 0.0 && std::isfinite(a), ErrorCode::invalid_argument, "A must be > 0");
  require(std::isfinite(gamma) && std::isfinite(cubic), ErrorCode::invalid_argument,
          "tilt must be finite");

  const auto critical = cubic_roots(a, cubic, gamma / beta);
  require(!critical.empty(), ErrorCode::numerical, "tilted density has no maximum");
  e_max_ = -std::numeric_limits<double>::infinity();
  for (double r : critical) {
    if (exponent(r) > e_max_) {
      e_max_ = exponent(r);
      peak_ = r;
    }
  }
  const double floor_level = e_max_ - kDrop;
  auto edge = [&](double start, double dir) {
    double step = 1.0 / std::sqrt(beta);
    double inner = start, outer = start + dir * step;
    while (exponent(outer) > floor_level) {
      inner = outer;
      step *= 2.0;
      outer = start + dir * step;
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (inner + outer);
      if (exponent(mid) > floor_level) inner = mid;
      else outer = mid;
    }
    return outer;
  };
  lo_ = edge(critical.front(), -1.0);
  hi_ = edge(critical.back(), 1.0);

  auto simpson = [&](int panels, std::array<double, kMaxMoment + 1>& m) {
    const double h = (hi_ - lo_) / panels;
    m.fill(0.0);
    for (int i = 0; i <= panels; ++i) {
      const double r = lo_ + i * h;
      const double w = (i == 0 || i == panels ? 1.0 : (i % 2 ? 4.0 : 2.0)) *
                       std::exp(exponent(r) - e_max_);
      double pw = w;
      for (int n = 0; n <= kMaxMoment; ++n) {
        m[n] += pw;
        pw *= r;
      }
    }
    const double z = m[0];
    for (double& v : m) v /= z;
    return z * h / 3.0;
  };

  std::array<double, kMaxMoment + 1> prev{}, next{};
  int panels = 256;
  double z = simpson(panels, prev);
  for (;;) {
    panels *= 2;
    z = simpson(panels, next);
    // Moments are compared on the scale of the width so that near-zero odd
    // moments do not stall the refinement.
    const double scale = std::sqrt(std::max(next[2] - next[1] * next[1], 1e-300));
    change_ = 0.0;
    double sn = 1.0;
    for (int n = 1; n <= kMaxMoment; ++n) {
      sn *= scale;
      const double ref = std::max(std::abs(next[n]), sn);
      change_ = std::max(change_, std::abs(next[n] - prev[n]) / ref);
    }
    prev = next;
    if (change_ <= 1e-12 || panels >= (1 << 22)) break;
  }
  panels_ = panels;
  moments_ = next;
  log_q_ = e_max_ + std::log(z);
}

double TiltedDensity::exponent(double r) const noexcept {
  const double r2 = r * r;
  return -gamma_ * r - beta_ * (0.5 * r2 + cubic_ * r2 * r / 3.0 + 0.25 * a_ * r2 * r2);
}

double TiltedDensity::normalization() const { return std::exp(log_q_); }

double TiltedDensity::moment(int n) const {
  require(n >= 0 && n <= kMaxMoment, ErrorCode::invalid_argument, "moment order must be in 0..8");
  return moments_[n];
}

double tilted_moment(const TiltedDensity& density, int n) { return density.moment(n); }

double solve_theta(double beta, double a, double cubic) {
  double lo = -10.0, hi = 10.0;
  // <r>_gamma is strictly decreasing in gamma.
  const double m_lo = TiltedDensity(beta, a, lo, cubic).mean();
  const double m_hi = TiltedDensity(beta, a, hi, cubic).mean();
  if (!(m_lo > 0.0 && m_hi < 0.0)) {
    fail(ErrorCode::numerical, "theta is not bracketed in [-10, 10] for beta=" +
                                   std::to_string(beta) + ", A=" + std::to_string(a));
  }
  double gamma = 0.0;
  for (int it = 0; it < 200; ++it) {
    const TiltedDensity d(beta, a, gamma, cubic);
    const double m = d.mean();
    const double sd = std::sqrt(d.variance());
    if (std::abs(m) <= 1e-13 * sd) return gamma;
    if (m > 0.0) lo = gamma;
    else hi = gamma;
    if (hi - lo <= 1e-15 * (1.0 + std::abs(gamma))) return gamma;
    double next = gamma + m / d.variance();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    gamma = next;
  }
  return gamma;
}

TiltedIidSampler::TiltedIidSampler(const TiltedDensity& density, int cells)
    : lo_(density.lower()), width_((density.upper() - density.lower()) / cells), cdf_(cells + 1) {
  require(cells >= 16, ErrorCode::invalid_argument, "sampler table too small");
  const double shift = density.exponent(density.peak());
  auto w = [&](double r) { return std::exp(density.exponent(r) - shift); };
  cdf_[0] = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double a = lo_ + i * width_;
    const double cell = width_ / 6.0 * (w(a) + 4.0 * w(a + 0.5 * width_) + w(a + width_));
    cdf_[i + 1] = cdf_[i] + cell;
  }
  const double total = cdf_.back();
  for (double& c : cdf_) c /= total;
}

double TiltedIidSampler::operator()(Rng& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t cell = std::clamp<std::size_t>(it - cdf_.begin(), 1, cdf_.size() - 1) - 1;
  const double span = cdf_[cell + 1] - cdf_[cell];
  const double frac = span > 0.0 ? (u - cdf_[cell]) / span : 0.5;
  return lo_ + (static_cast<double>(cell) + frac) * width_;
}

std::vector<double> sample_momenta(Rng& rng, int n, double beta) {
  require(beta > 0.0, ErrorCode::invalid_argument, "beta must be > 0");
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(beta));
  std::vector<double> p(n);
  for (double& v : p) v = normal(rng);
  return p;
}

ChainState bonds_to_state(std::span<const double> r, std::span<const double> p) {
  require(r.size() == p.size() + 1, ErrorCode::dimension_mismatch,
          "bonds must have one more entry than momenta");
  double total = 0.0;
  for (double v : r) total += v;
  require(std::abs(total) <= 1e-12 * static_cast<double>(r.size()), ErrorCode::invalid_argument,
          "bonds do not sum to zero");
  ChainState s;
  s.p.assign(p.begin(), p.end());
  s.q.resize(p.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    acc += r[j];
    s.q[j] = acc;
  }
  return s;
}

std::vector<double> state_to_bonds(const ChainState& state) { return bond_extensions(state.q); }

BondChain::BondChain(const ChainParams& params, double proposal_width, Rng rng)
    : params_(params), width_(proposal_width), rng_(std::move(rng)), r_(params.n + 1, 0.0) {
  params.validate();
  require(proposal_width > 0.0, ErrorCode::invalid_argument, "proposal width must be > 0");
}

void BondChain::sweep() {
  const int m = params_.n + 1;
  std::uniform_int_distribution<int> pick_i(0, m - 1), pick_j(0, m - 2);
  std::normal_distribution<double> step(0.0, width_);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double beta = params_.beta, a = params_.a;
  for (int move = 0; move < m; ++move) {
    const int i = pick_i(rng_);
    int j = pick_j(rng_);
    if (j >= i) ++j;
    const double d = step(rng_);
    const double ri = r_[i] + d, rj = r_[j] - d;
    const double delta = beta * (potential_v(ri, a) + potential_v(rj, a) - potential_v(r_[i], a) -
                                 potential_v(r_[j], a));
    ++proposed_;
    if (delta <= 0.0 || unit(rng_) < std::exp(-delta)) {
      r_[i] = ri;
      r_[j] = rj;
      ++accepted_;
    }
  }
  ++sweeps_;
}

void BondChain::sweeps(long long count) {
  for (long long s = 0; s < count; ++s) sweep();
}

void BondChain::tune(int sweeps, double target_acceptance) {
  for (int done = 0; done < sweeps;) {
    const int block = std::min(10, sweeps - done);
    reset_counters();
    for (int s = 0; s < block; ++s) sweep();
    done += block;
    width_ *= std::exp(2.0 * (acceptance() - target_acceptance));
  }
  reset_counters();
}

double BondChain::acceptance() const noexcept {
  return proposed_ ? static_cast<double>(accepted_) / static_cast<double>(proposed_) : 0.0;
}

namespace {

double initial_width(double beta) { return 1.5 / std::sqrt(beta); }

double cubic_sum(std::span<const double> r) {
  double acc = 0.0;
  for (double v : r) acc += v * v * v;
  return acc / 3.0;
}

}  // namespace

std::vector<double> sample_bonds(Rng& rng, const ChainParams& params, int sweeps) {
  require(sweeps >= 1, ErrorCode::invalid_argument, "sweeps must be >= 1");
  BondChain chain(params, initial_width(params.beta), Rng(rng()));
  const int tuning = std::min(sweeps, 100);
  chain.tune(tuning, 0.3);
  chain.sweeps(sweeps - tuning);
  return {chain.bonds().begin(), chain.bonds().end()};
}

GibbsSample sample_state(Rng& rng, const ChainParams& params, int sweeps) {
  GibbsSample out;
  out.r = sample_bonds(rng, params, sweeps);
  const auto p = sample_momenta(rng, params.n, params.beta);
  out.state = bonds_to_state(out.r, p);
  out.sweep = sweeps;
  return out;
}

SamplerDiagnostics tune_sampler(const ChainParams& params, const SamplerSettings& settings,
                                std::uint64_t seed) {
  params.validate();
  require(settings.burn_in_sweeps >= 0 && settings.pilot_sweeps >= 0 && settings.stride >= 0 &&
              settings.chains >= 1,
          ErrorCode::invalid_argument, "sampler settings must be non-negative");
  SamplerDiagnostics diag;
  diag.theta = solve_theta(params.beta, params.a);
  diag.log_q_theta = TiltedDensity(params.beta, params.a, diag.theta).log_normalization();

  const bool fixed = settings.proposal_width > 0.0;
  BondChain pilot(params, fixed ? settings.proposal_width : initial_width(params.beta),
                  make_rng(seed, 0x70696c6f74ULL));
  if (fixed) pilot.sweeps(settings.burn_in_sweeps);
  else pilot.tune(settings.burn_in_sweeps, settings.target_acceptance);
  diag.proposal_width = pilot.proposal_width();

  std::vector<double> h1;
  h1.reserve(settings.pilot_sweeps);
  for (int s = 0; s < settings.pilot_sweeps; ++s) {
    pilot.sweep();
    h1.push_back(cubic_sum(pilot.bonds()));
  }
  diag.acceptance = pilot.acceptance();
  diag.tau_int_h1 = integrated_autocorrelation_time(h1);
  diag.stride = settings.stride > 0 ? settings.stride
                                    : std::max(1, static_cast<int>(std::ceil(5.0 * diag.tau_int_h1)));
  diag.sweeps = pilot.sweeps_done();
  return diag;
}

Ensemble sample_ensemble(const ChainParams& params, int n_samples, std::uint64_t seed,
                         const SamplerSettings& settings, int threads) {
  require(n_samples >= 1, ErrorCode::invalid_argument, "n_samples must be >= 1");
  Ensemble out;
  out.diagnostics = tune_sampler(params, settings, seed);
  const int chains = settings.chains;
  std::vector<std::vector<GibbsSample>> per_chain(chains);
  std::vector<long long> accepted_sweeps(chains, 0);
  std::vector<double> acceptance(chains, 0.0);
  const SamplerDiagnostics diag = out.diagnostics;

  parallel_for(chains, threads, [&](std::size_t c) {
    const int count = n_samples / chains + (static_cast<int>(c) < n_samples % chains ? 1 : 0);
    const std::uint64_t chain_seed = derive_seed(seed, c + 1);
    BondChain chain(params, diag.proposal_width, Rng(chain_seed));
    chain.sweeps(settings.burn_in_sweeps);
    chain.reset_counters();
    auto& samples = per_chain[c];
    samples.reserve(count);
    for (int i = 0; i < count; ++i) {
      chain.sweeps(diag.stride);
      GibbsSample s;
      s.r.assign(chain.bonds().begin(), chain.bonds().end());
      const auto p = sample_momenta(chain.rng(), params.n, params.beta);
      s.state = bonds_to_state(s.r, p);
      s.seed = chain_seed;
      s.chain = static_cast<int>(c);
      s.sweep = chain.sweeps_done();
      samples.push_back(std::move(s));
    }
    acceptance[c] = chain.acceptance();
    accepted_sweeps[c] = chain.sweeps_done();
  });

  out.samples.reserve(n_samples);
  double acc_sum = 0.0;
  int acc_count = 0;
  for (int c = 0; c < chains; ++c) {
    for (auto& s : per_chain[c]) out.samples.push_back(std::move(s));
    out.diagnostics.sweeps += accepted_sweeps[c];
    if (!per_chain[c].empty()) {
      acc_sum += acceptance[c];
      ++acc_count;
    }
  }
  if (acc_count) out.diagnostics.acceptance = acc_sum / acc_count;
  return out;
}

namespace {

double monomial(std::span<const double> r, std::span<const int> sites) {
  double v = 1.0;
  for (int s : sites) v *= r[s];
  return v;
}

}  // namespace

CovarianceResult monomial_covariance_test(const ChainParams& params,
                                          std::span<const int> k_sites,
                                          std::span<const int> l_sites, int n_samples,
                                          std::uint64_t seed, const SamplerSettings& settings,
                                          bool independent, int threads) {
  params.validate();
  for (int s : k_sites)
    require(s >= 0 && s <= params.n, ErrorCode::invalid_argument, "site index out of range");
  for (int s : l_sites)
    require(s >= 0 && s <= params.n, ErrorCode::invalid_argument, "site index out of range");
  require(n_samples >= 3, ErrorCode::invalid_argument, "n_samples must be >= 3");

  std::vector<double> xs(n_samples), ys(n_samples);
  if (independent) {
    const TiltedDensity density(params.beta, params.a, solve_theta(params.beta, params.a));
    const TiltedIidSampler draw(density);
    Rng rng = make_rng(seed, 0x696964ULL);
    std::vector<double> r(params.n + 1);
    for (int i = 0; i < n_samples; ++i) {
      for (double& v : r) v = draw(rng);
      xs[i] = monomial(r, k_sites);
      ys[i] = monomial(r, l_sites);
    }
  } else {
    const Ensemble ens = sample_ensemble(params, n_samples, seed, settings, threads);
    for (int i = 0; i < n_samples; ++i) {
      xs[i] = monomial(ens.samples[i].r, k_sites);
      ys[i] = monomial(ens.samples[i].r, l_sites);
    }
  }
  const CovarianceEstimate est = covariance_estimate(xs, ys);
  CovarianceResult out;
  out.covariance = est.covariance;
  out.std_error = est.std_error;
  out.mean_k = pairwise_sum(xs) / n_samples;
  out.mean_l = pairwise_sum(ys) / n_samples;
  out.n_samples = n_samples;
  return out;
}

std::vector<std::vector<double>> slab_rejection_bonds(const ChainParams& params, int n_samples,
                                                      std::uint64_t seed, double half_width) {
  params.validate();
  require(half_width > 0.0, ErrorCode::invalid_argument, "slab half width must be > 0");
  const TiltedDensity density(params.beta, params.a, solve_theta(params.beta, params.a));
  const TiltedIidSampler draw(density);
  Rng rng = make_rng(seed, 0x736c6162ULL);
  std::vector<std::vector<double>> out;
  out.reserve(n_samples);
  std::vector<double> r(params.n + 1);
  while (static_cast<int>(out.size()) < n_samples) {
    double total = 0.0;
    for (double& v : r) {
      v = draw(rng);
      total += v;
    }
    if (std::abs(total) <= half_width) out.push_back(r);
  }
  return out;
}

}  // namespace adiabat

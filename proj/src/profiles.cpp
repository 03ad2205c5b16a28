#include "adiabat/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "adiabat/error.hpp"

namespace adiabat {

using std::numbers::pi;

double omega_of(double x) noexcept { return 2.0 * std::sin(0.5 * pi * x); }

double z_fold(double x, double y) noexcept {
  const double s = x + y;
  return s <= 1.0 ? s : 2.0 - s;
}

NuProfile::NuProfile(Kind kind, std::vector<double> params)
    : kind_(kind), params_(std::move(params)) {
  for (double v : params_)
    require(std::isfinite(v), ErrorCode::invalid_argument, "profile parameters must be finite");
  c2_ = compute_c2();
}

NuProfile NuProfile::constant(double c) { return NuProfile(Kind::constant, {c}); }

NuProfile NuProfile::polynomial(std::vector<double> coefficients) {
  require(!coefficients.empty(), ErrorCode::invalid_argument,
          "polynomial profile needs at least one coefficient");
  return NuProfile(Kind::polynomial, std::move(coefficients));
}

NuProfile NuProfile::cosine(double offset, double amplitude, double wavenumber) {
  require(wavenumber >= 0.0, ErrorCode::invalid_argument, "cosine wavenumber must be >= 0");
  return NuProfile(Kind::cosine, {offset, amplitude, wavenumber});
}

NuProfile NuProfile::bump(double center, double half_width, double amplitude) {
  require(half_width > 0.0, ErrorCode::invalid_argument, "bump half_width must be > 0");
  return NuProfile(Kind::bump, {center, half_width, amplitude});
}

std::string_view NuProfile::kind_name() const noexcept {
  switch (kind_) {
    case Kind::constant: return "constant";
    case Kind::polynomial: return "polynomial";
    case Kind::cosine: return "cosine";
    case Kind::bump: return "bump";
  }
  return "unknown";
}

const std::vector<std::string>& registered_profile_kinds() {
  static const std::vector<std::string> kinds{"constant", "polynomial", "cosine", "bump"};
  return kinds;
}

namespace {

// Derivative `order` of sum_i c_i x^i.
double poly_derivative(const std::vector<double>& c, double x, int order) {
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > static_cast<std::size_t>(order);) {
    double factor = 1.0;
    for (int d = 0; d < order; ++d) factor *= static_cast<double>(i - d);
    acc = acc * x + factor * c[i];
  }
  return acc;
}

// (1 - u^2)^3 and its first two derivatives, zero outside |u| < 1.
double bump_shape(double u, int order) {
  if (std::abs(u) >= 1.0) return 0.0;
  const double w = 1.0 - u * u;
  switch (order) {
    case 0: return w * w * w;
    case 1: return -6.0 * u * w * w;
    default: return 6.0 * w * (5.0 * u * u - 1.0);
  }
}

}  // namespace

double NuProfile::g(double x) const {
  switch (kind_) {
    case Kind::constant: return params_[0];
    case Kind::polynomial: return poly_derivative(params_, x, 0);
    case Kind::cosine: return params_[0] + params_[1] * std::cos(pi * params_[2] * x);
    case Kind::bump: return params_[2] * bump_shape((x - params_[0]) / params_[1], 0);
  }
  return 0.0;
}

double NuProfile::dg(double x) const {
  switch (kind_) {
    case Kind::constant: return 0.0;
    case Kind::polynomial: return poly_derivative(params_, x, 1);
    case Kind::cosine: return -params_[1] * pi * params_[2] * std::sin(pi * params_[2] * x);
    case Kind::bump:
      return params_[2] / params_[1] * bump_shape((x - params_[0]) / params_[1], 1);
  }
  return 0.0;
}

double NuProfile::d2g(double x) const {
  switch (kind_) {
    case Kind::constant: return 0.0;
    case Kind::polynomial: return poly_derivative(params_, x, 2);
    case Kind::cosine: {
      const double m = pi * params_[2];
      return -params_[1] * m * m * std::cos(m * x);
    }
    case Kind::bump:
      return params_[2] / (params_[1] * params_[1]) *
             bump_shape((x - params_[0]) / params_[1], 2);
  }
  return 0.0;
}

double NuProfile::compute_c2() const {
  switch (kind_) {
    case Kind::constant: return 0.0;
    case Kind::cosine: {
      // |g''| peaks at x = 0 where cos = 1.
      const double m = pi * params_[2];
      return std::abs(params_[1]) * m * m;
    }
    case Kind::bump: {
      // g''' vanishes at u = 0 and u^2 = 3/5; the rest of the candidates are
      // the ends of [0,1].
      const double c = params_[0], w = params_[1];
      const double r = w * std::sqrt(0.6);
      double best = 0.0;
      for (double x : {0.0, 1.0, c, c - r, c + r})
        if (x >= 0.0 && x <= 1.0) best = std::max(best, std::abs(d2g(x)));
      return best;
    }
    case Kind::polynomial: {
      // Candidates: the ends of [0,1] and the roots of g''' located by sign
      // changes on a fine grid and refined by bisection.
      double best = std::max(std::abs(d2g(0.0)), std::abs(d2g(1.0)));
      if (params_.size() <= 3) return best;
      constexpr int kGrid = 10000;
      auto d3 = [&](double x) { return poly_derivative(params_, x, 3); };
      double x_prev = 0.0, f_prev = d3(0.0);
      for (int i = 1; i <= kGrid; ++i) {
        const double x = static_cast<double>(i) / kGrid;
        const double f = d3(x);
        if (f_prev == 0.0) best = std::max(best, std::abs(d2g(x_prev)));
        if ((f_prev < 0.0) != (f < 0.0)) {
          double lo = x_prev, hi = x, flo = f_prev;
          for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = d3(mid);
            if ((fm < 0.0) == (flo < 0.0)) {
              lo = mid;
              flo = fm;
            } else {
              hi = mid;
            }
          }
          best = std::max(best, std::abs(d2g(0.5 * (lo + hi))));
        }
        x_prev = x;
        f_prev = f;
      }
      return best;
    }
  }
  return 0.0;
}

double NuProfile::slope_at_origin() const {
  constexpr double h = 1e-6;
  return (g(h) - g(-h)) / (2.0 * h);
}

bool NuProfile::admissible() const { return std::abs(slope_at_origin()) <= 1e-4; }

NuProfile NuProfile::scaled(double s) const {
  std::vector<double> p = params_;
  switch (kind_) {
    case Kind::constant: p[0] *= s; break;
    case Kind::polynomial:
      for (double& c : p) c *= s;
      break;
    case Kind::cosine:
      p[0] *= s;
      p[1] *= s;
      break;
    case Kind::bump: p[2] *= s; break;
  }
  return NuProfile(kind_, std::move(p));
}

std::string NuProfile::describe() const {
  std::ostringstream out;
  out.precision(17);
  out << kind_name() << "(";
  switch (kind_) {
    case Kind::constant: out << "value=" << params_[0]; break;
    case Kind::polynomial:
      out << "coefficients=[";
      for (std::size_t i = 0; i < params_.size(); ++i) out << (i ? "," : "") << params_[i];
      out << "]";
      break;
    case Kind::cosine:
      out << "offset=" << params_[0] << ", amplitude=" << params_[1]
          << ", wavenumber=" << params_[2];
      break;
    case Kind::bump:
      out << "center=" << params_[0] << ", half_width=" << params_[1]
          << ", amplitude=" << params_[2];
      break;
  }
  out << ")";
  return out.str();
}

H1Result eval_h1(const NuProfile& profile, int grid_size) {
  require(grid_size >= 2, ErrorCode::invalid_argument, "grid_size must be >= 2");
  const int m = grid_size;
  const double step = 1.0 / (m - 1);
  std::vector<double> omega(m), nu(m);
  for (int i = 0; i < m; ++i) {
    const double x = i * step;
    omega[i] = omega_of(x);
    nu[i] = profile.g(x) * omega[i];
  }
  // |ratio| is invariant under tau -> -tau, so the patterns with tau_1 = +1
  // cover all eight.
  constexpr int kPatterns[4][3] = {{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}};

  H1Result out;
  out.min_denominator = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == 0 && j == 0) continue;
      const int s = i + j;
      const int zi = s <= m - 1 ? s : 2 * (m - 1) - s;
      for (const auto& tau : kPatterns) {
        const double den = tau[0] * omega[i] + tau[1] * omega[j] + tau[2] * omega[zi];
        const double num = tau[0] * nu[i] + tau[1] * nu[j] + tau[2] * nu[zi];
        if (den == 0.0) {
          if (num != 0.0) ++out.singular_points;
          continue;
        }
        out.min_denominator = std::min(out.min_denominator, std::abs(den));
        const double ratio = std::abs(num / den);
        if (ratio > out.value) {
          out.value = ratio;
          out.arg_x = i * step;
          out.arg_y = j * step;
          out.arg_tau = {tau[0], tau[1], tau[2]};
        }
      }
    }
  }
  return out;
}

double eval_h2(const NuProfile& profile) {
  auto f = [&](double x) {
    const double g = profile.g(x);
    return g * g;
  };
  auto simpson = [&](int panels) {
    const double h = 1.0 / panels;
    double acc = f(0.0) + f(1.0);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
  };
  int panels = 64;
  double prev = simpson(panels);
  for (int round = 0; round < 18; ++round) {
    panels *= 2;
    const double next = simpson(panels);
    if (std::abs(next - prev) <= 1e-12 * std::abs(next) || next == prev) return next;
    prev = next;
  }
  return prev;
}

double check_thm2_bound(const NuProfile& profile, int grid_size) {
  if (!profile.admissible()) {
    std::ostringstream msg;
    msg << "profile " << profile.describe() << " is inadmissible: g'(0) ~ "
        << profile.slope_at_origin();
    fail(ErrorCode::invalid_argument, msg.str());
  }
  const double denom = profile.c0() + profile.c2();
  require(denom > 0.0, ErrorCode::invalid_argument, "c0 + c2 must be > 0");
  return eval_h1(profile, grid_size).value / denom;
}

std::vector<NuProfile> disjoint_profiles(int k, std::string_view kind) {
  require(kind == "bump", ErrorCode::invalid_argument,
          "disjoint profiles are only available for kind \"bump\", got \"" + std::string(kind) +
              "\"");
  require(k >= 1 && k <= kMaxDisjointProfiles, ErrorCode::invalid_argument,
          "disjoint profile count must be in 1.." + std::to_string(kMaxDisjointProfiles));
  std::vector<NuProfile> out;
  out.reserve(k);
  const double width = 1.0 / k;
  for (int l = 0; l < k; ++l) out.push_back(NuProfile::bump((l + 0.5) * width, 0.5 * width, 1.0));
  return out;
}

NuProfile default_packet_profile() { return NuProfile::bump(0.5, 0.25, 1.0); }

std::vector<NuProfile> admissible_family() {
  return {
      NuProfile::constant(1.0),
      NuProfile::polynomial({0.0, 0.0, 1.0}),
      NuProfile::polynomial({1.0, 0.0, 1.0}),
      NuProfile::polynomial({1.0, 0.0, -0.5, 0.0, 0.1}),
      NuProfile::cosine(0.0, 1.0, 1.0),
      NuProfile::cosine(2.0, 1.0, 1.0),
      NuProfile::bump(0.5, 0.25, 1.0),
      NuProfile::bump(0.0, 0.5, 1.0),
      NuProfile::bump(0.8, 0.15, 1.0),
  };
}

}  // namespace adiabat

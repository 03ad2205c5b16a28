#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace adiabat {

/// omega(x) = 2 sin(pi x / 2); omega(k/(N+1)) is the k-th chain frequency.
double omega_of(double x) noexcept;

/// x+y folded back into [0,1]: x+y if x+y <= 1, else 2-x-y.
double z_fold(double x, double y) noexcept;

/// Packet weight nu(x) = g(x) omega(x), with g drawn from a small registered
/// family so that c0 = g(0) and c2 = sup |g''| are known in closed form.
///
///   constant    g = c
///   polynomial  g = sum_i c_i x^i
///   cosine      g = offset + amplitude cos(pi m x)
///   bump        g = amplitude (1 - u^2)^3 for |u| < 1, u = (x - center)/half_width
///
/// The bump is C^2 with compact support. g is evaluated on all of R (the
/// admissibility test needs g(-h)).
class NuProfile {
 public:
  enum class Kind { constant, polynomial, cosine, bump };

  static NuProfile constant(double c);
  static NuProfile polynomial(std::vector<double> coefficients);
  static NuProfile cosine(double offset, double amplitude, double wavenumber);
  static NuProfile bump(double center, double half_width, double amplitude);

  Kind kind() const noexcept { return kind_; }
  std::string_view kind_name() const noexcept;
  const std::vector<double>& parameters() const noexcept { return params_; }

  double g(double x) const;
  double dg(double x) const;
  double d2g(double x) const;
  double nu(double x) const { return g(x) * omega_of(x); }

  double c0() const { return g(0.0); }
  double c2() const noexcept { return c2_; }

  /// Central difference of g at 0 with step 1e-6, compared against 1e-4.
  double slope_at_origin() const;
  bool admissible() const;

  /// Same family with g multiplied by s.
  NuProfile scaled(double s) const;

  std::string describe() const;

 private:
  NuProfile(Kind kind, std::vector<double> params);
  double compute_c2() const;

  Kind kind_;
  std::vector<double> params_;
  double c2_ = 0.0;
};

/// Names accepted by profile factories in configs.
const std::vector<std::string>& registered_profile_kinds();

struct H1Result {
  double value = 0.0;
  double arg_x = 0.0;
  double arg_y = 0.0;
  std::array<int, 3> arg_tau{1, 1, 1};
  double min_denominator = 0.0;
  // Grid points where the denominator is exactly 0 but the numerator is not.
  std::size_t singular_points = 0;
};

/// Grid maximum of |tau.nu| / |tau.omega| over the 8 sign patterns and an
/// evenly spaced grid_size x grid_size grid on [0,1]^2, z = z_fold(x, y).
/// Points where numerator and denominator both vanish exactly (the origin
/// and, for some patterns, the axes) are skipped.
H1Result eval_h1(const NuProfile& profile, int grid_size);

/// Integral of g^2 over [0,1], composite Simpson refined by halving until
/// successive estimates agree to 1e-12 relative.
double eval_h2(const NuProfile& profile);

/// h1 / (c0 + c2) on the given grid. Throws for inadmissible profiles or
/// c0 + c2 <= 0.
double check_thm2_bound(const NuProfile& profile, int grid_size);

/// K profiles with pairwise disjoint supports: bump l lives on [l/K, (l+1)/K].
/// Only kind "bump" is supported; 1 <= K <= 16.
std::vector<NuProfile> disjoint_profiles(int k, std::string_view kind);

inline constexpr int kMaxDisjointProfiles = 16;

/// The packet used by the experiments unless a config says otherwise.
NuProfile default_packet_profile();

/// Admissible members spanning every registered kind; the Theorem-2 scan
/// runs over this list.
std::vector<NuProfile> admissible_family();

}  // namespace adiabat

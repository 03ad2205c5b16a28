#include <cmath>
#include <numbers>

#include "doctest.h"

#include "adiabat/error.hpp"
#include "adiabat/profiles.hpp"

using namespace adiabat;
using std::numbers::pi;

namespace {

// Brute-force sup of |tau.nu / tau.omega| over the folded grid and all
// eight sign patterns.
double brute_h1(const NuProfile& p, int m) {
  double best = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double x = double(i) / (m - 1), y = double(j) / (m - 1);
      const double z = x + y <= 1.0 ? x + y : 2.0 - x - y;
      const double xs[3] = {x, y, z};
      for (int pat = 0; pat < 8; ++pat) {
        double num = 0.0, den = 0.0;
        for (int l = 0; l < 3; ++l) {
          const double t = (pat >> l) & 1 ? -1.0 : 1.0;
          const double w = 2.0 * std::sin(0.5 * pi * xs[l]);
          num += t * p.g(xs[l]) * w;
          den += t * w;
        }
        if (den != 0.0) best = std::max(best, std::abs(num / den));
      }
    }
  }
  return best;
}

double brute_c2(const NuProfile& p) {
  double best = 0.0;
  const int m = 20000;
  const double h = 1e-4;
  for (int i = 0; i <= m; ++i) {
    const double x = double(i) / m;
    best = std::max(best, std::abs((p.g(x + h) - 2 * p.g(x) + p.g(x - h)) / (h * h)));
  }
  return best;
}

}  // namespace

TEST_CASE("dispersion and fold maps") {
  CHECK(omega_of(0.0) == 0.0);
  CHECK(omega_of(1.0) == doctest::Approx(2.0));
  CHECK(omega_of(0.5) == doctest::Approx(std::sqrt(2.0)));
  CHECK(z_fold(0.3, 0.4) == doctest::Approx(0.7));
  CHECK(z_fold(0.8, 0.6) == doctest::Approx(0.6));
  CHECK(z_fold(1.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("profile derivatives match finite differences") {
  for (const auto& p : admissible_family()) {
    for (double x : {0.05, 0.3, 0.55, 0.9}) {
      const double h = 1e-5;
      CHECK(p.dg(x) == doctest::Approx((p.g(x + h) - p.g(x - h)) / (2 * h)).epsilon(1e-6).scale(1.0));
      CHECK(p.d2g(x) == doctest::Approx((p.dg(x + h) - p.dg(x - h)) / (2 * h)).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("c2 is the sup of |g''| on [0,1]") {
  CHECK(NuProfile::cosine(0.0, 1.0, 1.0).c2() == doctest::Approx(pi * pi));
  CHECK(NuProfile::bump(0.5, 0.25, 1.0).c2() == doctest::Approx(96.0));
  CHECK(NuProfile::polynomial({1.0, 0.0, -0.5, 0.0, 0.1}).c2() == doctest::Approx(1.0));
  CHECK(NuProfile::constant(3.0).c2() == 0.0);
  for (const auto& p : admissible_family()) {
    INFO(p.describe());
    CHECK(p.c2() == doctest::Approx(brute_c2(p)).epsilon(1e-3).scale(1.0));
  }
  // g'' = x - x^2 peaks inside the interval.
  const auto quartic = NuProfile::polynomial({0.0, 0.0, 0.0, 1.0 / 6.0, -1.0 / 12.0});
  CHECK(quartic.c2() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("admissibility is flatness at the origin") {
  CHECK_FALSE(NuProfile::polynomial({0.0, 1.0}).admissible());
  CHECK(NuProfile::cosine(0.0, 1.0, 0.5).admissible());
  CHECK(NuProfile::constant(1.0).admissible());
  CHECK(NuProfile::bump(0.0, 0.5, 1.0).admissible());
  CHECK_FALSE(NuProfile::bump(0.1, 0.5, 1.0).admissible());
  int admissible = 0;
  for (const auto& p : admissible_family()) admissible += p.admissible();
  CHECK(admissible >= 5);
  CHECK(admissible == static_cast<int>(admissible_family().size()));
}

TEST_CASE("h1 of the dispersion itself is one") {
  // nu = omega makes every ratio exactly one.
  const auto h = eval_h1(NuProfile::constant(1.0), 64);
  CHECK(h.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.min_denominator > 0.0);
}

TEST_CASE("h1 agrees with a brute-force scan over all sign patterns") {
  for (const auto& p : admissible_family()) {
    INFO(p.describe());
    CHECK(eval_h1(p, 41).value == doctest::Approx(brute_h1(p, 41)).epsilon(1e-12));
  }
  const auto linear = NuProfile::polynomial({0.0, 1.0});
  CHECK(eval_h1(linear, 33).value == doctest::Approx(brute_h1(linear, 33)).epsilon(1e-12));
}

TEST_CASE("h1/(c0+c2) is stable under refinement for admissible profiles") {
  for (const auto& p : admissible_family()) {
    const double a = check_thm2_bound(p, 512);
    const double b = check_thm2_bound(p, 1024);
    INFO(p.describe());
    CHECK(std::abs(b - a) / a < 0.05);
  }
}

TEST_CASE("h1 diverges for a profile with nonzero slope at the origin") {
  const auto linear = NuProfile::polynomial({0.0, 1.0});
  const double coarse = eval_h1(linear, 128).value;
  const double fine = eval_h1(linear, 1024).value;
  CHECK(fine > 4.0 * coarse);
  CHECK_THROWS_AS(check_thm2_bound(linear, 128), Error);
}

TEST_CASE("h2 is the L2 norm squared of g") {
  CHECK(eval_h2(NuProfile::constant(2.0)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(eval_h2(NuProfile::cosine(0.0, 1.0, 1.0)) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(eval_h2(NuProfile::polynomial({0.0, 1.0})) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("disjoint profiles have disjoint supports") {
  for (int k : {1, 2, 4, 7}) {
    const auto ps = disjoint_profiles(k, "bump");
    REQUIRE(static_cast<int>(ps.size()) == k);
    for (int i = 0; i <= 4000; ++i) {
      const double x = i / 4000.0;
      int nonzero = 0;
      for (const auto& p : ps) nonzero += p.g(x) != 0.0;
      CHECK(nonzero <= 1);
    }
  }
  CHECK_THROWS_AS(disjoint_profiles(2, "cosine"), Error);
  CHECK_THROWS_AS(disjoint_profiles(0, "bump"), Error);
  CHECK_THROWS_AS(disjoint_profiles(kMaxDisjointProfiles + 1, "bump"), Error);
}

TEST_CASE("profile construction and description") {
  CHECK_THROWS_AS(NuProfile::bump(0.5, 0.0, 1.0), Error);
  CHECK_THROWS_AS(NuProfile::polynomial({}), Error);
  CHECK_THROWS_AS(NuProfile::cosine(0.0, 1.0, -1.0), Error);
  CHECK_THROWS_AS(NuProfile::constant(std::nan("")), Error);
  CHECK(default_packet_profile().describe() == "bump(center=0.5, half_width=0.25, amplitude=1)");
  CHECK(NuProfile::bump(0.5, 0.25, 1.0).scaled(2.0).g(0.5) == doctest::Approx(2.0));
  CHECK(registered_profile_kinds().size() == 4);
}

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "adiabat/chain.hpp"
#include "adiabat/random.hpp"

namespace testing_support {

// Gaussian state with variance 1/beta in every coordinate. Close to Gibbs
// at large beta, and cheap.
inline adiabat::ChainState gaussian_state(adiabat::Rng& rng, int n, double beta) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(beta));
  adiabat::ChainState s = adiabat::ChainState::zero(n);
  for (int j = 0; j < n; ++j) {
    s.p[j] = normal(rng);
    s.q[j] = normal(rng);
  }
  return s;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace testing_support

#pragma once

// Seeded random instances for property tests. Every generator takes the rng
// by reference so a test can replay a failing case from its seed alone.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "stc/assignment.hpp"
#include "stc/config.hpp"
#include "stc/core.hpp"

namespace stc::testing {

using Rng = std::mt19937_64;

inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Configuration random_configuration(Rng& rng, int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return Configuration(perm);
}

inline WeightMatrix random_weights(Rng& rng, int n, std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> e(static_cast<std::size_t>(n) * n);
  for (auto& v : e) v = uniform_int(rng, lo, hi);
  return WeightMatrix(n, std::move(e));
}

inline DeviationVector random_deviation(Rng& rng, int n, Deviation lo, Deviation hi) {
  DeviationVector d(n);
  for (std::size_t q = 0; q < d.size(); ++q) d[q] = uniform_int(rng, lo, hi);
  return d;
}

inline BitVector random_bits(Rng& rng, std::size_t count, double p) {
  std::bernoulli_distribution coin(p);
  BitVector b(count);
  for (auto& v : b) v = coin(rng) ? 1 : 0;
  return b;
}

// Entries drawn independently, then every line scaled under `target` so the
// matrix is admissible with some support pattern left random.
inline LoadMatrix random_admissible_load(Rng& rng, int n, double target = 0.95) {
  LoadMatrix m(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) = uniform_real(rng, 0.0, 1.0) < 0.3 ? 0.0 : uniform_real(rng, 0.0, 1.0);
    }
  }
  const double worst = m.max_line_sum();
  if (worst > 0) {
    const double scale = uniform_real(rng, 0.05, target) / worst;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) *= scale;
    }
  }
  return m;
}

}  // namespace stc::testing

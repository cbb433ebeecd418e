#include "stc/assignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "stc/detail/matching.hpp"

namespace stc {

WeightMatrix::WeightMatrix(int n, std::vector<std::int64_t> entries)
    : n_(n), entries_(std::move(entries)) {
  if (n < 1) throw ArgumentError("weight matrix must be at least 1 x 1");
  if (entries_.size() != static_cast<std::size_t>(n) * n) {
    throw DimensionError("weight matrix must be square");
  }
}

WeightMatrix WeightMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  const auto n = rows.size();
  std::vector<std::int64_t> flat;
  flat.reserve(n * n);
  for (const auto& r : rows) {
    if (r.size() != n) throw DimensionError("weight matrix must be square");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return WeightMatrix(static_cast<int>(n), std::move(flat));
}

std::int64_t assignment_value(const WeightMatrix& w, const Configuration& c) {
  if (c.n() != w.n()) throw DimensionError("configuration and weight matrix sizes differ");
  std::int64_t s = 0;
  for (int i = 0; i < w.n(); ++i) s += w(i, c.output_of(i));
  return s;
}

Configuration min_weight_assignment(const WeightMatrix& w) {
  const int n = w.n();
  if (n < 1) throw DimensionError("empty weight matrix");
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

  // 1-based potentials; column 0 is the virtual start column.
  std::vector<std::int64_t> u(static_cast<std::size_t>(n) + 1, 0);
  std::vector<std::int64_t> v(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> owner(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  std::vector<std::int64_t> minv(static_cast<std::size_t>(n) + 1);
  std::vector<char> used(static_cast<std::size_t>(n) + 1);

  for (int i = 1; i <= n; ++i) {
    owner[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = owner[static_cast<std::size_t>(j0)];
      std::int64_t delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const std::int64_t cur = w(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                 v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(owner[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (owner[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      owner[static_cast<std::size_t>(j0)] = owner[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  // Every optimal assignment lives on edges with zero reduced cost.
  std::vector<char> tight(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      tight[static_cast<std::size_t>(i) * n + j] =
          w(i, j) == u[static_cast<std::size_t>(i) + 1] + v[static_cast<std::size_t>(j) + 1];
    }
  }
  auto perm = detail::lex_min_perfect_matching(n, tight);
  if (!perm) {
    // Unreachable with consistent potentials; fall back to the Hungarian result.
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) p[static_cast<std::size_t>(owner[static_cast<std::size_t>(j)] - 1)] = j - 1;
    return Configuration(std::move(p));
  }
  return Configuration(std::move(*perm));
}

Configuration brute_force_assignment(const WeightMatrix& w) {
  const int n = w.n();
  if (n < 1) throw DimensionError("empty weight matrix");
  if (n > 8) throw CapabilityError("brute-force assignment supports N <= 8");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  std::int64_t best_value = std::numeric_limits<std::int64_t>::max();
  do {
    std::int64_t value = 0;
    for (int i = 0; i < n; ++i) value += w(i, perm[static_cast<std::size_t>(i)]);
    if (value < best_value) {
      best_value = value;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return Configuration(std::move(best));
}

}  // namespace stc

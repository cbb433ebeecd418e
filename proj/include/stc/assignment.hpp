#pragma once

// Minimum-weight perfect matching on N x N integer weights (the assignment
// problem behind MSL's first step).

#include <cstdint>
#include <span>
#include <vector>

#include "stc/config.hpp"

namespace stc {

class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(int n, std::vector<std::int64_t> entries);
  // Builds a square matrix from rows; throws DimensionError unless square.
  static WeightMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);

  int n() const { return n_; }
  std::int64_t operator()(int i, int j) const {
    return entries_[static_cast<std::size_t>(i) * n_ + j];
  }
  const std::vector<std::int64_t>& entries() const { return entries_; }

 private:
  int n_ = 0;
  std::vector<std::int64_t> entries_;
};

// Sum_i w(i, c.perm[i]).
std::int64_t assignment_value(const WeightMatrix& w, const Configuration& c);

// Hungarian algorithm, O(N^3), followed by a pass over the tight edges that
// returns the lexicographically smallest optimal permutation.
Configuration min_weight_assignment(const WeightMatrix& w);

// Exhaustive oracle with the same tie-break. N <= 8.
Configuration brute_force_assignment(const WeightMatrix& w);

}  // namespace stc

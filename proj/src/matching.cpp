#include "stc/detail/matching.hpp"

#include <cstddef>

namespace stc::detail {
namespace {

class Matcher {
 public:
  Matcher(int n, const std::vector<char>& adj)
      : n_(n), adj_(adj), row_to_col_(n, -1), col_to_row_(n, -1), seen_(n, 0), blocked_(n, 0) {}

  bool edge(int r, int c) const { return adj_[static_cast<std::size_t>(r) * n_ + c] != 0; }

  bool kuhn(int r) {
    for (int c = 0; c < n_; ++c) {
      if (!edge(r, c) || seen_[c]) continue;
      seen_[c] = 1;
      if (col_to_row_[c] < 0 || kuhn(col_to_row_[c])) {
        row_to_col_[r] = c;
        col_to_row_[c] = r;
        return true;
      }
    }
    return false;
  }

  bool maximum() {
    for (int r = 0; r < n_; ++r) {
      std::fill(seen_.begin(), seen_.end(), 0);
      if (!kuhn(r)) return false;
    }
    return true;
  }

  // Alternating path from row r that ends by taking column target. Columns
  // marked in blocked_ are unavailable.
  bool reroute(int r, int target) {
    for (int c = 0; c < n_; ++c) {
      if (!edge(r, c) || blocked_[c] || seen_[c]) continue;
      seen_[c] = 1;
      if (c == target || reroute(col_to_row_[c], target)) {
        row_to_col_[r] = c;
        col_to_row_[c] = r;
        return true;
      }
    }
    return false;
  }

  void make_lex_min() {
    for (int i = 0; i < n_; ++i) {
      const int current = row_to_col_[i];
      for (int j = 0; j < current; ++j) {
        if (!edge(i, j) || blocked_[j]) continue;
        const int displaced = col_to_row_[j];
        blocked_[j] = 1;
        std::fill(seen_.begin(), seen_.end(), 0);
        const bool ok = reroute(displaced, current);
        blocked_[j] = 0;
        if (ok) {
          row_to_col_[i] = j;
          col_to_row_[j] = i;
          break;
        }
      }
      blocked_[row_to_col_[i]] = 1;
    }
  }

  std::vector<int> result() const { return row_to_col_; }

 private:
  int n_;
  const std::vector<char>& adj_;
  std::vector<int> row_to_col_;
  std::vector<int> col_to_row_;
  std::vector<char> seen_;
  std::vector<char> blocked_;
};

}  // namespace

std::optional<std::vector<int>> lex_min_perfect_matching(int n, const std::vector<char>& adj) {
  Matcher m(n, adj);
  if (!m.maximum()) return std::nullopt;
  m.make_lex_min();
  return m.result();
}

}  // namespace stc::detail

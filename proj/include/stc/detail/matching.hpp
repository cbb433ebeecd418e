#pragma once

#include <optional>
#include <vector>

namespace stc::detail {

// Lexicographically smallest perfect matching (row -> column) of an n x n
// bipartite graph given as a row-major adjacency matrix, or nullopt when no
// perfect matching exists. O(n^4) worst case, O(n^3) typical.
std::optional<std::vector<int>> lex_min_perfect_matching(int n, const std::vector<char>& adj);

}  // namespace stc::detail

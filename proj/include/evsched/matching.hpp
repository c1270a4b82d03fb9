#pragma once

// Bipartite perfect matching by augmenting paths (Kuhn's algorithm).

#include <algorithm>
#include <optional>
#include <vector>

namespace evsched {

/// `adj[r]` lists the right vertices left vertex r may take. Returns, for each
/// left vertex, its matched right vertex when a perfect matching exists.
inline std::optional<std::vector<int>> perfect_matching(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> match_right(n, -1);
  std::vector<char> seen(n);

  auto augment = [&](auto&& self, int r) -> bool {
    for (int q : adj[r]) {
      if (seen[q]) continue;
      seen[q] = 1;
      if (match_right[q] < 0 || self(self, match_right[q])) {
        match_right[q] = r;
        return true;
      }
    }
    return false;
  };

  for (int r = 0; r < n; ++r) {
    std::fill(seen.begin(), seen.end(), 0);
    if (!augment(augment, r)) return std::nullopt;
  }
  std::vector<int> match_left(n, -1);
  for (int q = 0; q < n; ++q) match_left[match_right[q]] = q;
  return match_left;
}

}  // namespace evsched

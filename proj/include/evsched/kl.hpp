#pragma once

// Kernighan-Lin graph bisection on an unweighted undirected graph.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "evsched/bcp.hpp"
#include "evsched/error.hpp"

namespace evsched {

/// Undirected graph over block ids; adjacency is by vertex index, sorted.
class BlockGraph {
 public:
  BlockGraph() = default;

  BlockGraph(std::vector<int> vertex_ids, const std::vector<std::pair<int, int>>& edges)
      : ids_(std::move(vertex_ids)), adj_(ids_.size()) {
    std::vector<std::pair<int, int>> sorted;
    sorted.reserve(ids_.size());
    for (std::size_t k = 0; k < ids_.size(); ++k) sorted.emplace_back(ids_[k], static_cast<int>(k));
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 1; k < sorted.size(); ++k)
      if (sorted[k].first == sorted[k - 1].first) throw Error("duplicate vertex " + std::to_string(sorted[k].first));
    auto index = [&](int id) {
      auto it = std::lower_bound(sorted.begin(), sorted.end(), std::make_pair(id, -1));
      if (it == sorted.end() || it->first != id) throw Error("edge references unknown vertex " + std::to_string(id));
      return it->second;
    };
    for (auto [a, b] : edges) {
      if (a == b) throw Error("self-loop on vertex " + std::to_string(a));
      const int x = index(a), y = index(b);
      adj_[x].push_back(y);
      adj_[y].push_back(x);
    }
    for (auto& nb : adj_) {
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
      num_edges_ += nb.size();
    }
    num_edges_ /= 2;
  }

  std::size_t size() const { return ids_.size(); }
  std::size_t num_edges() const { return num_edges_; }
  int id(int v) const { return ids_[v]; }
  const std::vector<int>& ids() const { return ids_; }
  const std::vector<int>& neighbours(int v) const { return adj_[v]; }
  bool adjacent(int a, int b) const { return std::binary_search(adj_[a].begin(), adj_[a].end(), b); }

 private:
  std::vector<int> ids_;
  std::vector<std::vector<int>> adj_;
  std::size_t num_edges_ = 0;
};

/// Vertices are blocks, edges the day arcs with direction dropped.
inline BlockGraph block_graph(const BcpInstance& inst) {
  std::vector<int> ids;
  for (const auto& b : inst.blocks) ids.push_back(b.id);
  std::vector<std::pair<int, int>> edges;
  const int n = static_cast<int>(inst.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (inst.day_arc(i, j)) edges.emplace_back(ids[i], ids[j]);
  return BlockGraph(std::move(ids), edges);
}

struct Bisection {
  std::vector<int> a;  // block ids, ascending
  std::vector<int> b;
  std::size_t cut = 0;
};

/// SplitMix64 finaliser; used to order vertices for the initial split.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline Bisection kl_bisect(const BlockGraph& g, std::uint64_t seed, int max_passes = 50) {
  const int n = static_cast<int>(g.size());
  if (n < 2) throw Error("bisection needs at least two vertices");

  // Initial balanced split: alternate over vertices ordered by hashed id.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> key(n);
  for (int v = 0; v < n; ++v) key[v] = splitmix64(static_cast<std::uint64_t>(g.id(v)) ^ splitmix64(seed));
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return key[x] != key[y] ? key[x] < key[y] : g.id(x) < g.id(y);
  });
  std::vector<char> side(n);
  for (int k = 0; k < n; ++k) side[order[k]] = static_cast<char>(k % 2);

  std::vector<int> D(n);
  std::vector<char> locked(n);
  using Entry = std::pair<int, int>;  // (-D, vertex)
  for (int pass = 0; pass < max_passes; ++pass) {
    for (int v = 0; v < n; ++v) {
      int ext = 0, in = 0;
      for (int w : g.neighbours(v)) (side[w] != side[v] ? ext : in)++;
      D[v] = ext - in;
    }
    std::fill(locked.begin(), locked.end(), 0);
    std::set<Entry> pool[2];
    for (int v = 0; v < n; ++v) pool[static_cast<int>(side[v])].insert({-D[v], v});

    auto update = [&](int v, int delta) {
      if (locked[v]) return;
      auto& s = pool[static_cast<int>(side[v])];
      s.erase({-D[v], v});
      D[v] += delta;
      s.insert({-D[v], v});
    };

    std::vector<std::pair<int, int>> swaps;
    std::vector<int> gains;
    const int steps = n / 2;
    for (int step = 0; step < steps && !pool[0].empty() && !pool[1].empty(); ++step) {
      int best = std::numeric_limits<int>::min(), ba = -1, bb = -1;
      const int top_b = -pool[1].begin()->first;
      for (const auto& [na, a] : pool[0]) {
        const int da = -na;
        if (da + top_b <= best) break;
        for (const auto& [nb, b] : pool[1]) {
          const int db = -nb;
          if (da + db <= best) break;
          const int gain = da + db - (g.adjacent(a, b) ? 2 : 0);
          if (gain > best) {
            best = gain;
            ba = a;
            bb = b;
          }
        }
      }
      pool[0].erase({-D[ba], ba});
      pool[1].erase({-D[bb], bb});
      locked[ba] = locked[bb] = 1;
      // Treat a as moved to side 1 and b to side 0.
      for (int w : g.neighbours(ba)) update(w, side[w] == 0 ? 2 : -2);
      for (int w : g.neighbours(bb)) update(w, side[w] == 1 ? 2 : -2);
      swaps.emplace_back(ba, bb);
      gains.push_back(best);
    }

    int total = 0, best_total = 0, best_k = 0;
    for (std::size_t k = 0; k < gains.size(); ++k) {
      total += gains[k];
      if (total > best_total) {
        best_total = total;
        best_k = static_cast<int>(k) + 1;
      }
    }
    if (best_k == 0) break;
    for (int k = 0; k < best_k; ++k) {
      side[swaps[k].first] = 1;
      side[swaps[k].second] = 0;
    }
  }

  Bisection out;
  for (int v = 0; v < n; ++v) {
    (side[v] ? out.b : out.a).push_back(g.id(v));
    for (int w : g.neighbours(v))
      if (v < w && side[v] != side[w]) ++out.cut;
  }
  std::sort(out.a.begin(), out.a.end());
  std::sort(out.b.begin(), out.b.end());
  return out;
}

/// Cut size of a two-way split given by vertex ids.
inline std::size_t cut_size(const BlockGraph& g, const std::vector<int>& part_a) {
  std::set<int> in_a(part_a.begin(), part_a.end());
  std::size_t cut = 0;
  for (int v = 0; v < static_cast<int>(g.size()); ++v)
    for (int w : g.neighbours(v))
      if (v < w && in_a.count(g.id(v)) != in_a.count(g.id(w))) ++cut;
  return cut;
}

}  // namespace evsched

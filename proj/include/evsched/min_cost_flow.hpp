#pragma once

// Successive-shortest-path min-cost flow with Johnson potentials.
//
// Arcs are stored in pairs (forward at 2k, residual at 2k+1). Among
// shortest augmenting paths of equal cost the one reached through the lower
// arc index is kept, so results are deterministic for a fixed arc order.

#include <algorithm>
#include <cassert>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

namespace evsched {

template <typename Cost>
class MinCostFlow {
 public:
  struct Result {
    long long flow = 0;
    Cost cost = 0;
  };

  explicit MinCostFlow(int num_nodes) : head_(num_nodes, -1) {}

  int num_nodes() const { return static_cast<int>(head_.size()); }
  int num_arcs() const { return static_cast<int>(to_.size() / 2); }

  /// Returns the arc index (0-based, in insertion order).
  int add_arc(int from, int to, long long capacity, Cost cost) {
    assert(from >= 0 && from < num_nodes() && to >= 0 && to < num_nodes());
    push(from, to, capacity, cost);
    push(to, from, 0, -cost);
    if (cost < Cost{0}) has_negative_ = true;
    return num_arcs() - 1;
  }

  long long flow(int arc) const { return cap_[2 * arc + 1]; }
  int tail(int arc) const { return to_[2 * arc + 1]; }
  int head(int arc) const { return to_[2 * arc]; }

  /// Sends up to `max_flow` units from source to sink at minimum cost.
  Result solve(int source, int sink, long long max_flow) {
    const int n = num_nodes();
    std::vector<Cost> potential(n, Cost{0});
    if (has_negative_) bellman_ford(source, potential);

    Result result;
    std::vector<Cost> dist(n);
    std::vector<int> parent(n);
    std::vector<char> done(n);
    using Item = std::pair<Cost, int>;

    while (result.flow < max_flow) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(parent.begin(), parent.end(), -1);
      std::fill(done.begin(), done.end(), 0);
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
      dist[source] = Cost{0};
      pq.push({Cost{0}, source});
      while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        for (int e = head_[u]; e != -1; e = next_[e]) {
          if (cap_[e] <= 0) continue;
          const int v = to_[e];
          if (done[v]) continue;
          Cost reduced = cost_[e] + potential[u] - potential[v];
          if (reduced < Cost{0}) reduced = Cost{0};  // rounding guard for floating costs
          const Cost nd = d + reduced;
          if (nd < dist[v] || (nd == dist[v] && e < parent[v])) {
            dist[v] = nd;
            parent[v] = e;
            pq.push({nd, v});
          }
        }
      }
      if (dist[sink] == kInf) break;
      // Capping at the sink distance keeps reduced costs non-negative for
      // nodes that were unreachable in this round.
      for (int v = 0; v < n; ++v) potential[v] += std::min(dist[v], dist[sink]);

      long long push_amount = max_flow - result.flow;
      for (int v = sink; v != source; v = to_[parent[v] ^ 1])
        push_amount = std::min(push_amount, cap_[parent[v]]);
      for (int v = sink; v != source; v = to_[parent[v] ^ 1]) {
        cap_[parent[v]] -= push_amount;
        cap_[parent[v] ^ 1] += push_amount;
        result.cost += cost_[parent[v]] * static_cast<Cost>(push_amount);
      }
      result.flow += push_amount;
    }
    return result;
  }

 private:
  static constexpr Cost kInf = std::numeric_limits<Cost>::has_infinity
                                   ? std::numeric_limits<Cost>::infinity()
                                   : std::numeric_limits<Cost>::max() / 4;

  void push(int from, int to, long long cap, Cost cost) {
    to_.push_back(to);
    cap_.push_back(cap);
    cost_.push_back(cost);
    next_.push_back(head_[from]);
    head_[from] = static_cast<int>(to_.size()) - 1;
  }

  void bellman_ford(int source, std::vector<Cost>& potential) const {
    const int n = num_nodes();
    std::fill(potential.begin(), potential.end(), kInf);
    potential[source] = Cost{0};
    for (int round = 0; round < n; ++round) {
      bool changed = false;
      for (int e = 0; e < static_cast<int>(to_.size()); ++e) {
        if (cap_[e] <= 0) continue;
        const int u = to_[e ^ 1];
        if (potential[u] == kInf) continue;
        if (potential[u] + cost_[e] < potential[to_[e]]) {
          potential[to_[e]] = potential[u] + cost_[e];
          changed = true;
        }
      }
      if (!changed) break;
    }
    for (auto& p : potential)
      if (p == kInf) p = Cost{0};
  }

  std::vector<int> head_;
  std::vector<int> to_;
  std::vector<long long> cap_;
  std::vector<Cost> cost_;
  std::vector<int> next_;
  bool has_negative_ = false;
};

}  // namespace evsched

#pragma once

// Brute-force reference solvers and random fixtures shared by the tests and
// the acceptance runner. Nothing here reuses solver internals: the SDVSP
// oracle enumerates successor assignments, the chaining oracle enumerates run
// partitions and next-day permutations and simulates SOC step by step.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "evsched/evsched.hpp"

namespace oracle {

using namespace evsched;

// --- SDVSP -------------------------------------------------------------------

/// Minimum weighted non-revenue time over all feasible trip chainings.
inline double sdvsp_brute_force(const SdvspInstance& inst) {
  const int n = static_cast<int>(inst.trips.size());
  std::vector<std::vector<const TripArc*>> out(n);
  for (const auto& a : inst.arcs) out[a.from].push_back(&a);
  std::vector<char> has_pred(n, 0);
  double best = std::numeric_limits<double>::infinity();

  std::function<void(int, double)> go = [&](int i, double cost) {
    if (i == n) {
      double total = cost;
      for (int j = 0; j < n; ++j)
        if (!has_pred[j]) total += inst.params.K + static_cast<double>(inst.depot_out[j]);
      best = std::min(best, total);
      return;
    }
    go(i + 1, cost + static_cast<double>(inst.depot_in[i]));  // pull in after i
    for (const TripArc* a : out[i]) {
      if (has_pred[a->to]) continue;
      has_pred[a->to] = 1;
      go(i + 1, cost + static_cast<double>(a->deadhead) + inst.params.W * static_cast<double>(a->layover));
      has_pred[a->to] = 0;
    }
  };
  go(0, 0.0);
  return n == 0 ? 0.0 : best;
}

// --- Block chaining ----------------------------------------------------------

struct ChainOracle {
  bool feasible = false;
  double objective = 0.0;
  std::vector<std::vector<int>> runs;  // block indices
};

namespace detail {

/// SOC left after the last block when the run starts with `s`, charging as
/// much as possible in every depot layover; nullopt when a block cannot be served.
inline std::optional<double> simulate(const BcpInstance& inst, const std::vector<int>& run, double s) {
  const auto& p = inst.params;
  double soc = s;
  for (std::size_t k = 0; k < run.size(); ++k) {
    const Block& b = inst.blocks[run[k]];
    if (soc < static_cast<double>(b.consumption) - 1e-9) return std::nullopt;
    soc -= static_cast<double>(b.consumption);
    if (k + 1 < run.size()) {
      const double gap = static_cast<double>(inst.blocks[run[k + 1]].start_time - b.end_time);
      soc = std::min(p.battery_cap, soc + gap * p.rate_day);
    }
  }
  return soc;
}

inline double overnight(const BcpInstance& inst, int last, int first, double end_soc) {
  const double w = static_cast<double>(inst.night_window(last, first));
  return std::min(inst.params.battery_cap, end_soc + w * inst.params.rate_night);
}

/// Is there a start SOC per run such that the day works and the overnight
/// charge along sigma restores every successor's start SOC? Iterates the
/// start SOCs downward from a full battery to the greatest fixed point.
inline bool cycle_feasible(const BcpInstance& inst, const std::vector<std::vector<int>>& runs,
                           const std::vector<int>& sigma, bool full_initial) {
  const int k = static_cast<int>(runs.size());
  const double cap = inst.params.battery_cap;
  std::vector<double> s(k, cap);
  for (int iter = 0; iter < 200000; ++iter) {
    std::vector<double> next(k, cap);
    for (int r = 0; r < k; ++r) {
      const auto end = simulate(inst, runs[r], s[r]);
      if (!end) return false;
      next[sigma[r]] = overnight(inst, runs[r].back(), runs[sigma[r]].front(), *end);
    }
    if (full_initial) {
      for (int q = 0; q < k; ++q)
        if (next[q] < cap - 1e-9) return false;
      return true;
    }
    double change = 0.0;
    for (int q = 0; q < k; ++q) {
      const double v = std::min(s[q], next[q]);
      change = std::max(change, s[q] - v);
      s[q] = v;
    }
    if (change < 1e-12) return true;
  }
  return false;
}

inline bool next_day_feasible(const BcpInstance& inst, const std::vector<std::vector<int>>& runs,
                              bool full_initial) {
  const int k = static_cast<int>(runs.size());
  const double cap = inst.params.battery_cap;
  // Pairwise necessary condition: q is reachable overnight from r's best case.
  std::vector<std::vector<char>> ok(k, std::vector<char>(k, 0));
  for (int r = 0; r < k; ++r) {
    const auto end = simulate(inst, runs[r], cap);
    if (!end) return false;
    for (int q = 0; q < k; ++q) {
      if (!inst.night_arc(runs[r].back(), runs[q].front())) continue;
      const double v = overnight(inst, runs[r].back(), runs[q].front(), *end);
      ok[r][q] = full_initial ? v >= cap - 1e-9 : simulate(inst, runs[q], v).has_value();
    }
  }
  std::vector<int> sigma(k, -1);
  std::vector<char> used(k, 0);
  std::function<bool(int)> go = [&](int r) {
    if (r == k) return cycle_feasible(inst, runs, sigma, full_initial);
    for (int q = 0; q < k; ++q) {
      if (used[q] || !ok[r][q]) continue;
      used[q] = 1;
      sigma[r] = q;
      if (go(r + 1)) return true;
      used[q] = 0;
    }
    return false;
  };
  return go(0);
}

}  // namespace detail

/// Cheapest run partition that is day-feasible and next-day operable.
inline ChainOracle chain_brute_force(const BcpInstance& inst, bool full_initial) {
  const int n = static_cast<int>(inst.size());
  ChainOracle res;
  if (n == 0) {
    res.feasible = true;
    return res;
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& x = inst.blocks[a];
    const auto& y = inst.blocks[b];
    return std::tie(x.start_time, x.id) < std::tie(y.start_time, y.id);
  });

  struct Candidate {
    double cost;
    std::vector<std::vector<int>> runs;
  };
  std::vector<Candidate> all;
  std::vector<std::vector<int>> runs;
  const auto& p = inst.params;
  std::function<void(int, double)> go = [&](int k, double cost) {
    if (k == n) {
      all.push_back({cost, runs});
      return;
    }
    const int j = order[k];
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const int i = runs[r].back();
      if (!inst.day_arc(i, j)) continue;
      runs[r].push_back(j);
      if (detail::simulate(inst, runs[r], p.battery_cap))
        go(k + 1, cost + p.layover_weight * static_cast<double>(inst.gap(i, j)));
      runs[r].pop_back();
    }
    runs.push_back({j});
    go(k + 1, cost + p.vehicle_cost);
    runs.pop_back();
  };
  go(0, 0.0);
  std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
  for (auto& c : all) {
    if (detail::next_day_feasible(inst, c.runs, full_initial)) {
      res.feasible = true;
      res.objective = c.cost;
      res.runs = std::move(c.runs);
      return res;
    }
  }
  return res;
}

// --- Fixtures ----------------------------------------------------------------

/// Small chaining instance where battery and overnight charging both bind:
/// blocks spread over the whole day and a slow night charger.
inline BcpInstance tight_instance(int n, Rng& rng, EnergyParams p = {}) {
  p.rate_night = 0.05 + 0.45 * rng.unit();
  BlockGenOptions g;
  g.n_blocks = n;
  g.first_start = 3 * 3600;
  g.last_start = 21 * 3600;
  g.min_span = 1200;
  g.max_span = 3 * 3600;
  g.min_fill = 0.6;
  g.max_fill = 0.95;
  g.battery_cap = p.battery_cap;
  return build_instance(random_blocks(g, rng), p);
}

/// Instance drawn with the default benchmark generator.
inline BcpInstance bench_instance(int n, Rng& rng, const EnergyParams& p = {}) {
  BlockGenOptions g;
  g.n_blocks = n;
  g.battery_cap = p.battery_cap;
  return build_instance(random_blocks(g, rng), p);
}

/// Trips with integer endpoints on a small grid so deadheads are integral.
inline std::vector<Trip> random_small_trips(int n, Rng& rng) {
  TripGenOptions o;
  o.n_trips = n;
  o.first_start = 6 * 3600;
  o.last_start = 10 * 3600;
  o.min_duration = 600;
  o.max_duration = 2400;
  o.spread_deg = 0.03;
  return random_trips(o, rng);
}

}  // namespace oracle

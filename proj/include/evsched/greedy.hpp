#pragma once

// Earliest-start greedy chainer. Vehicles are opened one at a time with a
// full battery; candidate blocks are scanned in start-time order and inserted
// when the day charge, the SOC bounds and the overnight recharge all allow it.

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "evsched/bcp.hpp"
#include "evsched/error.hpp"

namespace evsched {

enum class OvernightWindow {
  kConsistent,    // window ends the day at the inserted block
  kPrecedingBlock,  // window measured from the end of the preceding block
};

inline OvernightWindow parse_overnight_window(const std::string& s) {
  if (s == "consistent") return OvernightWindow::kConsistent;
  if (s == "preceding-block") return OvernightWindow::kPrecedingBlock;
  throw Error("unknown overnight window '" + s + "' (expected consistent or preceding-block)");
}

inline const char* to_string(OvernightWindow w) {
  return w == OvernightWindow::kConsistent ? "consistent" : "preceding-block";
}

struct GreedyOptions {
  OvernightWindow overnight_window = OvernightWindow::kConsistent;
};

/// Block indices sorted by start time, ties by id.
inline std::vector<int> start_order(const BcpInstance& inst) {
  std::vector<int> order(inst.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& x = inst.blocks[a];
    const auto& y = inst.blocks[b];
    return x.start_time != y.start_time ? x.start_time < y.start_time : x.id < y.id;
  });
  return order;
}

inline ChainSolution solve_greedy(const BcpInstance& inst, const GreedyOptions& opts = {}) {
  const auto& p = inst.params;
  const double cap = p.battery_cap;
  const double eps = 1e-9;
  std::vector<int> remaining = start_order(inst);
  std::vector<std::vector<int>> vehicles;  // block indices
  std::vector<double> soc(inst.size(), 0.0);
  std::vector<double> charge_in(inst.size(), 0.0);  // day charge on the arc into the block

  auto need = [&](int k) { return static_cast<double>(inst.blocks[k].consumption); };

  auto seed = [&]() {
    const int f = remaining.front();
    remaining.erase(remaining.begin());
    // A single-block vehicle must be able to serve itself again tomorrow.
    const double overnight = static_cast<double>(inst.night_window(f, f)) * p.rate_night;
    if (!inst.night_arc(f, f) || overnight < need(f) - kSocTolerance)
      throw InfeasibleError("block " + std::to_string(inst.blocks[f].id) +
                                " cannot be served again the next day by a single vehicle",
                            inst.blocks[f].id);
    soc[f] = cap;
    vehicles.push_back({f});
    return need(f);
  };

  double net = 0.0;  // consumption minus day charges since the vehicle started
  std::size_t k = 0;
  bool open = false;
  while (!remaining.empty()) {
    if (!open) {
      net = seed();
      k = 0;
      open = true;
      continue;
    }
    if (k >= remaining.size()) {
      open = false;
      continue;
    }
    auto& run = vehicles.back();
    const int first = run.front();
    const int i = run.back();
    const int j = remaining[k];
    if (inst.day_arc(i, j) && inst.night_arc(j, first)) {
      const double gap = static_cast<double>(inst.gap(i, j));
      const double u = std::min(cap - soc[i] + need(i), gap * p.rate_day);
      const double b = soc[i] - need(i) + u;
      const Seconds window = opts.overnight_window == OvernightWindow::kConsistent
                                 ? inst.night_window(j, first)
                                 : inst.night_window(i, first);
      const double u_night = std::min(cap - b + need(j), static_cast<double>(window) * p.rate_night);
      const double net_next = net + need(j) - u;
      if (u_night >= net_next - eps && soc[i] >= need(i) - eps && b >= need(j) - eps) {
        soc[j] = b;
        charge_in[j] = u;
        net = net_next;
        run.push_back(j);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(k));
        continue;
      }
    }
    ++k;
  }

  std::vector<std::vector<int>> runs;
  std::vector<double> starts;
  std::map<int, int> links;
  for (const auto& v : vehicles) {
    std::vector<int> ids;
    for (int b : v) ids.push_back(inst.blocks[b].id);
    links[ids.back()] = ids.front();
    runs.push_back(std::move(ids));
    starts.push_back(cap);
  }
  ChainSolution sol = complete_solution(inst, std::move(runs), starts, links);
  sol.optimal = false;
  return sol;
}

/// Percentage gap of an objective against a reference objective.
inline double gap_percent(double objective, double reference) {
  if (reference == 0.0) throw Error("gap reference objective is zero");
  return 100.0 * (objective - reference) / reference;
}

inline double greedy_gap(const BcpInstance& inst, double reference_objective,
                         const GreedyOptions& opts = {}) {
  if (!(reference_objective > 0.0)) throw Error("gap reference objective must be positive");
  return gap_percent(solve_greedy(inst, opts).objective, reference_objective);
}

}  // namespace evsched

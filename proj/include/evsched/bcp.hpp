#pragma once

// Block chaining problem: instances, energy parameters and chain solutions.
//
// Energy is measured in seconds of driving. A block i consumes B_i, starts at
// T^alpha_i and ends at T^beta_i. Day arcs (i, j) chain two blocks within the
// horizon, night arcs link the last block of a run to the first block of a
// run on the following horizon.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "evsched/error.hpp"
#include "evsched/sdvsp.hpp"
#include "evsched/units.hpp"

namespace evsched {

/// Absolute tolerance for SOC and charge comparisons, in seconds.
inline constexpr double kSocTolerance = 1e-6;

/// Sentinel block id standing for the depot (s or t) in arc keys.
inline constexpr int kDepotId = -1;

struct EnergyParams {
  double battery_cap = 7200.0;          // B-bar, seconds of driving
  double rate_day = 450.0 / 220.0;      // R^delta
  double rate_night = 125.0 / 220.0;    // R^nu
  Seconds horizon = 86400;              // T-bar
  double vehicle_cost = 50000.0;        // K'
  double layover_weight = 1.0;          // W'
  Seconds layover_min = 0;              // L
  std::optional<Seconds> layover_max;   // U, unbounded when empty
  double power_day = 450.0;             // kW, fast charger
  double power_night = 125.0;           // kW, slow charger
  double consumption_rate = 220.0;      // kW while driving

  /// Battery size in kWh implied by the range in seconds.
  double battery_kwh() const { return consumption_rate * battery_cap / 3600.0; }

  /// Recharge rates from charger power and consumption rate.
  void derive_rates() {
    rate_day = power_day / consumption_rate;
    rate_night = power_night / consumption_rate;
  }

  void check() const {
    if (!(battery_cap > 0.0)) throw Error("battery capacity must be positive");
    if (!(rate_night > 0.0) || rate_day < rate_night)
      throw Error("recharge rates must satisfy rate_day >= rate_night > 0");
    if (horizon <= 0) throw Error("horizon must be positive");
    if (layover_max && *layover_max < layover_min) throw Error("layover_min exceeds layover_max");
    if (vehicle_cost < 0.0 || layover_weight < 0.0) throw Error("costs must be non-negative");
  }
};

/// Parameters for chaining blocks into diesel runs: the battery never binds.
inline EnergyParams unconstrained_energy(EnergyParams p, const std::vector<Block>& blocks) {
  double total = 1.0;
  for (const auto& b : blocks) total += static_cast<double>(b.consumption);
  p.battery_cap = std::max(total, p.battery_cap);
  p.rate_day = p.rate_night = p.battery_cap;
  return p;
}

inline bool within_layover(const EnergyParams& p, Seconds gap) {
  return gap >= p.layover_min && (!p.layover_max || gap <= *p.layover_max);
}

/// Blocks plus energy parameters. The day arc set E and night arc set C are
/// closed-form membership tests; `day_arcs()` / `night_arcs()` enumerate them
/// for small instances.
struct BcpInstance {
  std::vector<Block> blocks;
  EnergyParams params;
  double big_m1 = 0.0;
  double big_m2 = 0.0;

  std::size_t size() const { return blocks.size(); }

  int index_of(int block_id) const {
    auto it = index_.find(block_id);
    return it == index_.end() ? -1 : it->second;
  }
  const Block& block(int block_id) const {
    const int k = index_of(block_id);
    if (k < 0) throw Error("unknown block id " + std::to_string(block_id));
    return blocks[k];
  }

  Seconds gap(int i, int j) const { return blocks[j].start_time - blocks[i].end_time; }
  Seconds night_window(int i, int j) const {
    return params.horizon + blocks[j].start_time - blocks[i].end_time;
  }
  bool day_arc(int i, int j) const { return i != j && within_layover(params, gap(i, j)); }
  bool night_arc(int i, int j) const { return within_layover(params, night_window(i, j)); }

  std::vector<std::pair<int, int>> day_arcs() const { return enumerate(&BcpInstance::day_arc); }
  std::vector<std::pair<int, int>> night_arcs() const { return enumerate(&BcpInstance::night_arc); }

  void reindex() {
    index_.clear();
    for (std::size_t k = 0; k < blocks.size(); ++k) index_[blocks[k].id] = static_cast<int>(k);
  }

 private:
  std::vector<std::pair<int, int>> enumerate(bool (BcpInstance::*member)(int, int) const) const {
    std::vector<std::pair<int, int>> arcs;
    const int n = static_cast<int>(blocks.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if ((this->*member)(i, j)) arcs.emplace_back(i, j);
    return arcs;
  }

  std::unordered_map<int, int> index_;
};

/// Smallest admissible first big-M plus one second; the second is B + 2*M1.
inline std::pair<double, double> big_m_values(const std::vector<Block>& blocks,
                                              const EnergyParams& p) {
  Seconds max_alpha = 0;
  for (const auto& b : blocks) max_alpha = std::max(max_alpha, b.start_time);
  const double bound =
      p.battery_cap + std::max(static_cast<double>(p.horizon + max_alpha) * p.rate_night,
                               p.rate_day * static_cast<double>(max_alpha));
  const double m1 = bound + 1.0;
  return {m1, p.battery_cap + 2.0 * m1};
}

inline BcpInstance build_instance(std::vector<Block> blocks, const EnergyParams& params) {
  params.check();
  std::unordered_map<int, int> seen;
  for (const auto& b : blocks) {
    if (static_cast<double>(b.consumption) > params.battery_cap + kSocTolerance)
      throw Error("block " + std::to_string(b.id) + " consumes " + std::to_string(b.consumption) +
                  " s, more than the battery capacity");
    if (b.end_time <= b.start_time || b.consumption < 0)
      throw Error("block " + std::to_string(b.id) + " has an invalid time window");
    if (seen.count(b.id)) throw Error("duplicate block id " + std::to_string(b.id));
    seen[b.id] = 1;
  }
  BcpInstance inst;
  inst.blocks = std::move(blocks);
  inst.params = params;
  std::tie(inst.big_m1, inst.big_m2) = big_m_values(inst.blocks, params);
  inst.reindex();
  return inst;
}

/// Sub-instance restricted to the given block ids; arcs and big-Ms are rebuilt.
inline BcpInstance restrict_instance(const BcpInstance& inst, const std::vector<int>& block_ids) {
  std::vector<Block> sub;
  sub.reserve(block_ids.size());
  for (int id : block_ids) sub.push_back(inst.block(id));
  return build_instance(std::move(sub), inst.params);
}

using ArcKey = std::pair<int, int>;

struct ChainSolution {
  std::vector<std::vector<int>> runs;     // block ids in service order
  std::map<ArcKey, double> day_charge;    // u_ij; (i, kDepotId) is the charge before pull-in
  std::map<int, double> soc;              // b_i at the start of block i
  std::map<ArcKey, double> soc_arc;       // v_ij on used arcs; (i, kDepotId) is the end-of-day SOC
  std::map<int, int> next_day;            // last block of a run -> first block of next day's run
  std::map<int, double> next_day_soc;     // last block of a run -> v'
  double objective = 0.0;
  bool optimal = false;

  std::size_t num_vehicles() const { return runs.size(); }
};

/// Objective value: weighted depot layover on day arcs plus vehicle cost.
inline double chain_objective(const BcpInstance& inst, const std::vector<std::vector<int>>& runs) {
  double total = 0.0;
  for (const auto& run : runs) {
    if (run.empty()) continue;
    total += inst.params.vehicle_cost;
    for (std::size_t k = 1; k < run.size(); ++k) {
      const auto& a = inst.block(run[k - 1]);
      const auto& b = inst.block(run[k]);
      total += inst.params.layover_weight * static_cast<double>(b.start_time - a.end_time);
    }
  }
  return total;
}

/// Overnight SOC at the start of `first` after the run ending with `last`.
inline double overnight_soc(const BcpInstance& inst, const Block& last, const Block& first,
                            double end_soc) {
  const double window = static_cast<double>(inst.params.horizon + first.start_time - last.end_time);
  return std::min(inst.params.battery_cap, end_soc + window * inst.params.rate_night);
}

/// Fills charges, SOC values, overnight SOC and objective for fixed runs,
/// start SOCs and next-day links, charging maximally on every day arc.
inline ChainSolution complete_solution(const BcpInstance& inst, std::vector<std::vector<int>> runs,
                                       const std::vector<double>& start_soc,
                                       const std::map<int, int>& next_day) {
  ChainSolution sol;
  const double cap = inst.params.battery_cap;
  std::map<int, double> end_soc;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& run = runs[r];
    double b = start_soc.at(r);
    for (std::size_t k = 0; k < run.size(); ++k) {
      const Block& cur = inst.block(run[k]);
      sol.soc[cur.id] = b;
      const double after = b - static_cast<double>(cur.consumption);
      if (k + 1 < run.size()) {
        const Block& nxt = inst.block(run[k + 1]);
        const double limit = static_cast<double>(nxt.start_time - cur.end_time) * inst.params.rate_day;
        const double u = std::max(0.0, std::min(limit, cap - after));
        sol.day_charge[{cur.id, nxt.id}] = u;
        b = after + u;
        sol.soc_arc[{cur.id, nxt.id}] = b;
      } else {
        sol.day_charge[{cur.id, kDepotId}] = 0.0;
        sol.soc_arc[{cur.id, kDepotId}] = after;
        end_soc[cur.id] = after;
      }
    }
  }
  for (const auto& [last, first] : next_day) {
    sol.next_day[last] = first;
    sol.next_day_soc[last] = overnight_soc(inst, inst.block(last), inst.block(first), end_soc.at(last));
  }
  sol.objective = chain_objective(inst, runs);
  sol.runs = std::move(runs);
  return sol;
}

}  // namespace evsched

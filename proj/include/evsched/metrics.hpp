#pragma once

// Fleet and efficiency metrics for blocks and chained schedules.

#include <cmath>
#include <optional>
#include <vector>

#include "evsched/bcp.hpp"
#include "evsched/error.hpp"
#include "evsched/units.hpp"

namespace evsched {

struct RangeSplit {
  std::vector<Block> ev;  // consumption within range
  std::vector<Block> dv;  // the rest, served by diesel vehicles
};

/// Range in seconds of driving for a range in miles.
inline Seconds range_seconds(double miles, double speed_mph = kDefaultSpeedMph) {
  return static_cast<Seconds>(std::llround(miles_to_seconds(miles, speed_mph)));
}

inline RangeSplit split_by_range(const std::vector<Block>& blocks, std::optional<Seconds> range_limit_s) {
  RangeSplit out;
  for (const auto& b : blocks) (!range_limit_s || b.consumption <= *range_limit_s ? out.ev : out.dv).push_back(b);
  return out;
}

/// Revenue time over total block time.
inline double block_efficiency(const std::vector<Block>& blocks) {
  if (blocks.empty()) throw Error("block efficiency of an empty block set");
  double revenue = 0.0, total = 0.0;
  for (const auto& b : blocks) {
    revenue += static_cast<double>(b.revenue_time);
    total += static_cast<double>(b.span());
  }
  return revenue / total;
}

struct EfficiencyReport {
  double block_eff = 0.0;
  double schedule_eff = 0.0;
  double service_s = 0.0;
  double deadhead_s = 0.0;
  double intertrip_layover_s = 0.0;  // block time not spent driving
  double day_depot_layover_s = 0.0;
  double overnight_depot_layover_s = 0.0;
  std::size_t n_vehicles = 0;
  double horizon_s = 0.0;

  double accounted_s() const {
    return service_s + deadhead_s + intertrip_layover_s + day_depot_layover_s + overnight_depot_layover_s;
  }
  double fleet_time_s() const { return static_cast<double>(n_vehicles) * horizon_s; }
};

inline EfficiencyReport schedule_efficiency(const ChainSolution& sol, const BcpInstance& inst) {
  if (sol.runs.empty()) throw Error("schedule efficiency of an empty solution");
  EfficiencyReport rep;
  rep.horizon_s = static_cast<double>(inst.params.horizon);
  std::vector<Block> used;
  for (const auto& run : sol.runs) {
    if (run.empty()) continue;
    ++rep.n_vehicles;
    for (std::size_t k = 0; k < run.size(); ++k) {
      const Block& b = inst.block(run[k]);
      used.push_back(b);
      rep.service_s += static_cast<double>(b.revenue_time);
      rep.deadhead_s += static_cast<double>(b.deadhead_time);
      rep.intertrip_layover_s += static_cast<double>(b.span() - b.revenue_time - b.deadhead_time);
      if (k > 0) rep.day_depot_layover_s += static_cast<double>(b.start_time - inst.block(run[k - 1]).end_time);
    }
    const double active = static_cast<double>(inst.block(run.back()).end_time - inst.block(run.front()).start_time);
    rep.overnight_depot_layover_s += rep.horizon_s - active;
  }
  rep.block_eff = block_efficiency(used);
  rep.schedule_eff = rep.service_s / rep.fleet_time_s();
  return rep;
}

struct FleetReport {
  std::size_t n_ev = 0;
  std::size_t n_dv = 0;
  std::size_t total = 0;
  double ev_share = 0.0;
  double dv_share = 0.0;
};

inline FleetReport fleet_report(std::size_t n_ev, std::size_t n_dv) {
  FleetReport r{n_ev, n_dv, n_ev + n_dv, 0.0, 0.0};
  if (r.total > 0) {
    r.ev_share = static_cast<double>(n_ev) / static_cast<double>(r.total);
    r.dv_share = 1.0 - r.ev_share;
  }
  return r;
}

/// EVs deployed per diesel vehicle they replace.
inline double replacement_ratio(std::size_t n_ev, std::size_t n_dv_scenario, std::size_t n_dv_only) {
  if (n_dv_only <= n_dv_scenario) throw Error("replacement ratio undefined: no diesel vehicles were replaced");
  return static_cast<double>(n_ev) / static_cast<double>(n_dv_only - n_dv_scenario);
}

}  // namespace evsched

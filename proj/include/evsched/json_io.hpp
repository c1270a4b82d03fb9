#pragma once

// JSON forms of blocks, energy parameters and chain solutions.

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evsched/bcp.hpp"
#include "evsched/dac.hpp"
#include "evsched/error.hpp"
#include "evsched/metrics.hpp"

namespace evsched {

using nlohmann::json;

inline json block_to_json(const Block& b) {
  return {{"block_id", b.id},
          {"trip_ids", b.trip_ids},
          {"start_time_s", b.start_time},
          {"end_time_s", b.end_time},
          {"consumption_s", b.consumption},
          {"revenue_s", b.revenue_time},
          {"deadhead_s", b.deadhead_time},
          {"layover_s", b.intertrip_layover}};
}

inline Block block_from_json(const json& j) {
  try {
    Block b;
    b.id = j.at("block_id").get<int>();
    if (j.contains("trip_ids")) b.trip_ids = j.at("trip_ids").get<std::vector<std::string>>();
    b.start_time = j.at("start_time_s").get<Seconds>();
    b.end_time = j.at("end_time_s").get<Seconds>();
    b.consumption = j.at("consumption_s").get<Seconds>();
    b.revenue_time = j.value("revenue_s", Seconds{0});
    b.deadhead_time = j.value("deadhead_s", Seconds{0});
    b.intertrip_layover = j.value("layover_s", Seconds{0});
    return b;
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid block record: ") + e.what());
  }
}

/// One JSON object per line.
inline void write_blocks_jsonl(std::ostream& out, const std::vector<Block>& blocks) {
  for (const auto& b : blocks) out << block_to_json(b).dump() << '\n';
}

inline std::vector<Block> read_blocks_jsonl(std::istream& in) {
  std::vector<Block> blocks;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      blocks.push_back(block_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw DataError(std::string("invalid JSON line: ") + e.what());
    }
  }
  return blocks;
}

inline json params_to_json(const EnergyParams& p) {
  json j = {{"battery_cap_s", p.battery_cap},
            {"battery_kwh", p.battery_kwh()},
            {"rate_day", p.rate_day},
            {"rate_night", p.rate_night},
            {"horizon_s", p.horizon},
            {"vehicle_cost_s", p.vehicle_cost},
            {"layover_weight", p.layover_weight},
            {"layover_min_s", p.layover_min}};
  j["layover_max_s"] = p.layover_max ? json(*p.layover_max) : json(nullptr);
  return j;
}

inline std::string arc_key(const ArcKey& k) {
  auto part = [](int id) { return id == kDepotId ? std::string("t") : std::to_string(id); };
  return part(k.first) + "-" + part(k.second);
}

inline ArcKey parse_arc_key(const std::string& s) {
  const auto dash = s.find('-', 1);
  if (dash == std::string::npos) throw DataError("invalid arc key '" + s + "'");
  auto part = [&](const std::string& t) {
    if (t == "t" || t == "s") return kDepotId;
    try {
      return std::stoi(t);
    } catch (const std::exception&) {
      throw DataError("invalid arc key '" + s + "'");
    }
  };
  return {part(s.substr(0, dash)), part(s.substr(dash + 1))};
}

inline json partition_to_json(const Partitioning& p) { return {{"parts", p.parts}, {"cut_edges", p.cut_edges}}; }

inline json solution_to_json(const ChainSolution& sol) {
  json j;
  j["runs"] = sol.runs;
  json charge = json::object(), soc = json::object(), next = json::object(), next_soc = json::object(),
       soc_arc = json::object();
  for (const auto& [k, v] : sol.day_charge) charge[arc_key(k)] = v;
  for (const auto& [k, v] : sol.soc_arc) soc_arc[arc_key(k)] = v;
  for (const auto& [k, v] : sol.soc) soc[std::to_string(k)] = v;
  for (const auto& [k, v] : sol.next_day) next[std::to_string(k)] = std::to_string(v);
  for (const auto& [k, v] : sol.next_day_soc) next_soc[std::to_string(k)] = v;
  j["day_charge"] = charge;
  j["soc"] = soc;
  j["soc_arc"] = soc_arc;
  j["next_day"] = next;
  j["next_day_soc"] = next_soc;
  j["objective"] = sol.objective;
  j["optimal"] = sol.optimal;
  return j;
}

inline ChainSolution solution_from_json(const json& j) {
  try {
    ChainSolution sol;
    sol.runs = j.at("runs").get<std::vector<std::vector<int>>>();
    // Sections are copied out first: ranging over items() of a temporary
    // would dangle.
    auto section = [&](const char* key) { return j.value(key, json::object()); };
    const json charge = section("day_charge"), soc_arc = section("soc_arc"), soc = section("soc"),
               next = section("next_day"), next_soc = section("next_day_soc");
    for (const auto& [k, v] : charge.items()) sol.day_charge[parse_arc_key(k)] = v.get<double>();
    for (const auto& [k, v] : soc_arc.items()) sol.soc_arc[parse_arc_key(k)] = v.get<double>();
    for (const auto& [k, v] : soc.items()) sol.soc[std::stoi(k)] = v.get<double>();
    for (const auto& [k, v] : next.items())
      sol.next_day[std::stoi(k)] = v.is_string() ? std::stoi(v.get<std::string>()) : v.get<int>();
    for (const auto& [k, v] : next_soc.items()) sol.next_day_soc[std::stoi(k)] = v.get<double>();
    sol.objective = j.at("objective").get<double>();
    sol.optimal = j.value("optimal", false);
    return sol;
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid solution JSON: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw DataError("invalid solution JSON: non-numeric block id");
  }
}

inline json efficiency_to_json(const EfficiencyReport& r) {
  return {{"block_eff", r.block_eff},
          {"schedule_eff", r.schedule_eff},
          {"service_s", r.service_s},
          {"deadhead_s", r.deadhead_s},
          {"intertrip_layover_s", r.intertrip_layover_s},
          {"day_depot_layover_s", r.day_depot_layover_s},
          {"overnight_depot_layover_s", r.overnight_depot_layover_s},
          {"n_vehicles", r.n_vehicles},
          {"horizon_s", r.horizon_s}};
}

inline json fleet_to_json(const FleetReport& r) {
  return {{"n_ev", r.n_ev}, {"n_dv", r.n_dv}, {"total", r.total}, {"ev_share", r.ev_share}, {"dv_share", r.dv_share}};
}

}  // namespace evsched

#pragma once

// Single-depot vehicle scheduling: chain trips into depot-to-depot blocks.
//
// The chaining constraints are assignment constraints (every trip has exactly
// one successor and one predecessor, trip or depot), so the integer program is
// solved exactly as a min-cost flow on a bipartite out/in network with one
// depot transshipment node.

#include <concepts>
#include <algorithm>
#include <cassert>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "evsched/csv.hpp"
#include "evsched/error.hpp"
#include "evsched/min_cost_flow.hpp"
#include "evsched/schedule_data.hpp"
#include "evsched/units.hpp"

namespace evsched {

struct SdvspParams {
  double K = 50000.0;  // block generation cost, seconds
  double W = 1.0;      // weight on intertrip layover
};

struct TripArc {
  int from = 0;
  int to = 0;
  Seconds deadhead = 0;
  Seconds layover = 0;
};

struct SdvspInstance {
  std::vector<Trip> trips;
  Depot depot;
  std::vector<TripArc> arcs;
  std::vector<Seconds> depot_out;  // pull-out deadhead, depot -> origin of trip j
  std::vector<Seconds> depot_in;   // pull-in deadhead, destination of trip i -> depot
  SdvspParams params;

  double arc_cost(const TripArc& a) const {
    return static_cast<double>(a.deadhead) + params.W * static_cast<double>(a.layover);
  }
};

struct Block {
  int id = 0;
  std::vector<std::string> trip_ids;
  Seconds start_time = 0;  // depot departure
  Seconds end_time = 0;    // depot arrival
  Seconds consumption = 0;  // driving time: revenue + deadhead
  Seconds revenue_time = 0;
  Seconds deadhead_time = 0;
  Seconds intertrip_layover = 0;

  Seconds span() const { return end_time - start_time; }
};

/// Arc (i, j) exists iff trip j can start after trip i ends plus the deadhead.
template <typename DeadheadFn>
  requires std::invocable<DeadheadFn&, const Stop&, const Stop&>
SdvspInstance build_arcs(std::vector<Trip> trips, Depot depot, DeadheadFn&& deadhead,
                         SdvspParams params = {}) {
  SdvspInstance inst;
  inst.depot = std::move(depot);
  inst.params = params;
  const int n = static_cast<int>(trips.size());
  inst.depot_out.resize(n);
  inst.depot_in.resize(n);
  for (int i = 0; i < n; ++i) {
    inst.depot_out[i] = deadhead(inst.depot.location, trips[i].origin);
    inst.depot_in[i] = deadhead(trips[i].destination, inst.depot.location);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Seconds dh = deadhead(trips[i].destination, trips[j].origin);
      const Seconds slack = trips[j].start_time - trips[i].end_time - dh;
      if (slack >= 0) inst.arcs.push_back({i, j, dh, slack});
    }
  }
  inst.trips = std::move(trips);
  return inst;
}

inline SdvspInstance build_arcs(std::vector<Trip> trips, Depot depot, const TravelModel& model,
                                SdvspParams params = {}) {
  return build_arcs(
      std::move(trips), std::move(depot),
      [&model](const Stop& a, const Stop& b) { return deadhead_time(a, b, model); }, params);
}

struct SdvspSolution {
  std::vector<Block> blocks;
  std::vector<int> successor;  // trip index, or -1 for the depot
  double objective = 0.0;
};

namespace detail {

inline std::vector<Block> decode_blocks(const SdvspInstance& inst, const std::vector<int>& succ,
                                        const std::vector<int>& arc_of) {
  const int n = static_cast<int>(inst.trips.size());
  std::vector<char> has_pred(n, 0);
  for (int i = 0; i < n; ++i)
    if (succ[i] >= 0) has_pred[succ[i]] = 1;

  std::vector<Block> blocks;
  for (int first = 0; first < n; ++first) {
    if (has_pred[first]) continue;
    Block b;
    b.start_time = inst.trips[first].start_time - inst.depot_out[first];
    b.deadhead_time = inst.depot_out[first];
    int cur = first;
    while (true) {
      const Trip& t = inst.trips[cur];
      b.trip_ids.push_back(t.id);
      b.revenue_time += t.duration();
      const int nxt = succ[cur];
      if (nxt < 0) break;
      const TripArc& a = inst.arcs[arc_of[cur]];
      b.deadhead_time += a.deadhead;
      b.intertrip_layover += a.layover;
      cur = nxt;
    }
    b.end_time = inst.trips[cur].end_time + inst.depot_in[cur];
    b.deadhead_time += inst.depot_in[cur];
    b.consumption = b.revenue_time + b.deadhead_time;
    blocks.push_back(std::move(b));
  }
  std::sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
    if (a.start_time != b.start_time) return a.start_time < b.start_time;
    return a.trip_ids.front() < b.trip_ids.front();
  });
  for (std::size_t k = 0; k < blocks.size(); ++k) blocks[k].id = static_cast<int>(k) + 1;
  return blocks;
}

}  // namespace detail

inline SdvspSolution solve_sdvsp(const SdvspInstance& inst) {
  const int n = static_cast<int>(inst.trips.size());
  SdvspSolution sol;
  if (n == 0) return sol;

  // Nodes: source, sink, depot, out_i, in_j.
  const int kSource = 0, kSink = 1, kDepot = 2;
  auto out_node = [](int i) { return 3 + i; };
  auto in_node = [n](int j) { return 3 + n + j; };
  MinCostFlow<double> mcf(3 + 2 * n);
  for (int i = 0; i < n; ++i) mcf.add_arc(kSource, out_node(i), 1, 0.0);
  for (int j = 0; j < n; ++j) mcf.add_arc(in_node(j), kSink, 1, 0.0);
  std::vector<int> trip_arc_ids;
  trip_arc_ids.reserve(inst.arcs.size());
  for (const auto& a : inst.arcs)
    trip_arc_ids.push_back(mcf.add_arc(out_node(a.from), in_node(a.to), 1, inst.arc_cost(a)));
  for (int i = 0; i < n; ++i)
    mcf.add_arc(out_node(i), kDepot, 1, static_cast<double>(inst.depot_in[i]));
  for (int j = 0; j < n; ++j)
    mcf.add_arc(kDepot, in_node(j), 1, inst.params.K + static_cast<double>(inst.depot_out[j]));

  const auto res = mcf.solve(kSource, kSink, n);
  // out_i -> depot -> in_j always exists, so the full assignment is feasible.
  if (res.flow != n) throw Error("SDVSP flow did not saturate; network is malformed");

  sol.successor.assign(n, -1);
  std::vector<int> arc_of(n, -1);
  std::vector<int> pred_count(n, 0);
  for (std::size_t k = 0; k < inst.arcs.size(); ++k) {
    if (mcf.flow(trip_arc_ids[k]) == 0) continue;
    const auto& a = inst.arcs[k];
    if (sol.successor[a.from] != -1) throw Error("SDVSP decode: trip with two successors");
    sol.successor[a.from] = a.to;
    arc_of[a.from] = static_cast<int>(k);
    ++pred_count[a.to];
  }
  for (int j = 0; j < n; ++j)
    if (pred_count[j] > 1) throw Error("SDVSP decode: trip with two predecessors");

  sol.objective = res.cost;
  sol.blocks = detail::decode_blocks(inst, sol.successor, arc_of);
  return sol;
}

struct SweepRow {
  double K = 0.0;
  double W = 0.0;
  std::size_t n_blocks = 0;
  double share_within_range = 1.0;
  double objective = 0.0;
};

/// Grid search over (K, W); reports the share of blocks whose consumption is
/// within `range_limit` (no limit when empty).
inline std::vector<SweepRow> sweep_block_control(const SdvspInstance& inst,
                                                 const std::vector<double>& K_values,
                                                 const std::vector<double>& W_values,
                                                 std::optional<Seconds> range_limit) {
  if (K_values.empty() || W_values.empty()) throw Error("sweep grids must be non-empty");
  std::vector<SweepRow> rows;
  for (double K : K_values) {
    for (double W : W_values) {
      SdvspInstance copy = inst;
      copy.params = {K, W};
      const auto sol = solve_sdvsp(copy);
      SweepRow row{K, W, sol.blocks.size(), 1.0, sol.objective};
      if (!sol.blocks.empty() && range_limit) {
        const auto within = std::count_if(sol.blocks.begin(), sol.blocks.end(), [&](const Block& b) {
          return b.consumption <= *range_limit;
        });
        row.share_within_range = static_cast<double>(within) / static_cast<double>(sol.blocks.size());
      }
      rows.push_back(row);
    }
  }
  return rows;
}

// --- Block CSV -------------------------------------------------------------

inline constexpr const char* kBlockCsvHeader =
    "block_id,trip_ids,start_time_s,end_time_s,consumption_s,revenue_s,deadhead_s,layover_s";

inline std::string join_trip_ids(const std::vector<std::string>& ids) {
  std::string s;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k) s.push_back(';');
    s += ids[k];
  }
  return s;
}

inline void write_blocks_csv(std::ostream& out, const std::vector<Block>& blocks) {
  out << kBlockCsvHeader << '\n';
  for (const auto& b : blocks) {
    out << b.id << ',' << csv::escape(join_trip_ids(b.trip_ids)) << ',' << b.start_time << ','
        << b.end_time << ',' << b.consumption << ',' << b.revenue_time << ',' << b.deadhead_time
        << ',' << b.intertrip_layover << '\n';
  }
}

inline std::vector<Block> parse_blocks_table(const csv::Table& t) {
  t.require_columns({"block_id", "start_time_s", "end_time_s", "consumption_s"});
  std::vector<Block> blocks;
  for (std::size_t r = 0; r < t.size(); ++r) {
    const std::string ctx = t.name() + " row " + std::to_string(r + 2);
    Block b;
    b.id = static_cast<int>(csv::to_int(t.at(r, "block_id"), ctx));
    if (t.has_column("trip_ids")) {
      std::stringstream ss(t.at(r, "trip_ids"));
      std::string id;
      while (std::getline(ss, id, ';'))
        if (!id.empty()) b.trip_ids.push_back(id);
    }
    b.start_time = csv::to_int(t.at(r, "start_time_s"), ctx);
    b.end_time = csv::to_int(t.at(r, "end_time_s"), ctx);
    b.consumption = csv::to_int(t.at(r, "consumption_s"), ctx);
    if (t.has_column("revenue_s")) b.revenue_time = csv::to_int(t.at(r, "revenue_s"), ctx);
    if (t.has_column("deadhead_s")) b.deadhead_time = csv::to_int(t.at(r, "deadhead_s"), ctx);
    if (t.has_column("layover_s")) b.intertrip_layover = csv::to_int(t.at(r, "layover_s"), ctx);
    if (b.end_time <= b.start_time) throw DataError(ctx + ": block needs start < end");
    blocks.push_back(std::move(b));
  }
  return blocks;
}

}  // namespace evsched

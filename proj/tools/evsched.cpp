// evsched: command-line front end.
//
//   evsched ingest  --gtfs DIR --date YYYYMMDD | --trips FILE  --depots FILE --out DIR
//   evsched solve   --trips FILE --depots FILE [--depot ID] | --blocks FILE   --out DIR
//   evsched solve   --blocks FILE --validate-only --solution FILE
//   evsched bench   --trips FILE --depots FILE | --synthetic-blocks   --sizes 10,20 --reps 5,5 --out FILE
//
// Exit codes: 0 ok, 1 internal error, 2 data error, 3 infeasible,
// 4 time limit without incumbent, 5 validation failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evsched/evsched.hpp"

namespace fs = std::filesystem;
using namespace evsched;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitData = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitTimeLimit = 4;
constexpr int kExitInvalid = 5;

/// Flags mapped onto config keys; only flags the user passed are applied.
struct ConfigFlags {
  std::optional<std::string> config_file;
  std::map<std::string, std::string> values;
  bool full_initial = false;

  void add(CLI::App* app) {
    app->add_option("--config", config_file, "key = value configuration file");
    for (const char* name : {"method", "battery-min", "battery-cap-s", "range-miles", "rate-day", "rate-night",
                             "power-day-kw", "power-night-kw", "consumption-kw", "horizon-s", "vehicle-cost-s",
                             "layover-weight", "layover-min-s", "layover-max-s", "K", "W", "seed",
                             "time-limit-s", "subproblem-cap", "exact-max-blocks", "overnight-window",
                             "speed-mph", "lp-out"}) {
      const std::string key = name;
      app->add_option_function<std::string>(
          "--" + key, [this, key](const std::string& v) { values[key] = v; }, "see README");
    }
    app->add_flag("--full-initial", full_initial, "every run starts with a full battery");
  }

  RunConfig build() const {
    RunConfig c;
    if (config_file) apply_config_file(c, *config_file);
    if (auto it = values.find("speed-mph"); it != values.end()) apply_setting(c, it->first, it->second);
    for (const auto& [k, v] : values)
      if (k != "speed-mph") apply_setting(c, k, v);
    if (full_initial) c.assume_full_initial = true;
    c.energy.check();
    return c;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string safe_name(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  return s;
}

std::vector<Block> read_blocks_file(const fs::path& path) {
  if (path.extension() == ".jsonl") {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return read_blocks_jsonl(in);
  }
  return parse_blocks_table(csv::Table::read(path));
}

Depot pick_depot(const fs::path& depots_file, const std::optional<std::string>& depot_id) {
  const auto depots = read_depot_csv(depots_file);
  if (depots.empty()) throw DataError(depots_file.string() + " lists no depots");
  if (!depot_id) {
    if (depots.size() > 1) throw DataError("several depots listed; choose one with --depot");
    return depots.front();
  }
  for (const auto& d : depots)
    if (d.id == *depot_id) return d;
  throw DataError("unknown depot '" + *depot_id + "'");
}

// --- ingest ------------------------------------------------------------------

struct IngestArgs {
  std::optional<std::string> gtfs, trips, route_map;
  std::string depots, out, date;
  double speed_mph = kDefaultSpeedMph;
  Seconds horizon = 86400;
};

int cmd_ingest(const IngestArgs& a) {
  std::vector<Trip> trips;
  if (a.gtfs) {
    if (a.date.empty()) throw DataError("--date is required with --gtfs");
    auto feed = gtfs::parse_gtfs(*a.gtfs, gtfs::parse_date(a.date));
    if (feed.skipped_short) std::cerr << "warning: skipped " << feed.skipped_short << " trip(s) with fewer than two stop times\n";
    if (feed.skipped_invalid) std::cerr << "warning: skipped " << feed.skipped_invalid << " trip(s) with invalid times or stops\n";
    trips = std::move(feed.trips);
  } else if (a.trips) {
    trips = read_trip_csv(*a.trips);
  } else {
    throw DataError("ingest needs --gtfs or --trips");
  }
  const auto clipped = clip_to_horizon(trips, a.horizon);
  if (clipped.excluded) std::cerr << "warning: excluded " << clipped.excluded << " trip(s) starting after the horizon\n";

  const auto depots = read_depot_csv(a.depots);
  std::optional<std::map<std::string, std::string>> mapping;
  if (a.route_map) mapping = read_route_mapping(*a.route_map);
  const auto assignment = assign_trips_to_depot(clipped.kept, depots, mapping);

  fs::create_directories(a.out);
  json summary = json::object();
  for (const auto& [depot, dtrips] : assignment) {
    const fs::path file = fs::path(a.out) / ("trips_" + safe_name(depot) + ".csv");
    std::ostringstream os;
    write_trip_csv(os, dtrips);
    write_text(file, os.str());
    summary[depot] = {{"file", file.string()}, {"n_trips", dtrips.size()}};
  }
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

// --- solve -------------------------------------------------------------------

struct SolveArgs {
  std::optional<std::string> trips, depots, depot, blocks, solution, plot_data;
  std::string out;
  bool validate_only = false;
  ConfigFlags flags;
};

struct BcpRun {
  ChainSolution solution;
  std::optional<Partitioning> partition;
  double seconds = 0.0;
};

BcpRun run_method(const BcpInstance& inst, const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  BcpRun r;
  switch (c.method) {
    case Method::kGreedy:
      r.solution = solve_greedy(inst, {c.overnight_window});
      break;
    case Method::kExact: {
      ExactOptions o;
      o.time_limit_s = c.time_limit_s;
      o.assume_full_initial = c.assume_full_initial;
      o.max_blocks = c.exact_max_blocks;
      r.solution = solve_exact(inst, o);
      break;
    }
    case Method::kDac: {
      DacOptions o;
      o.subproblem_cap = c.subproblem_cap;
      o.time_limit_per_sub_s = c.time_limit_s;
      o.assume_full_initial = c.assume_full_initial;
      o.seed = c.seed;
      auto d = solve_dac(inst, o);
      r.solution = std::move(d.solution);
      r.partition = std::move(d.partition);
      break;
    }
  }
  r.seconds = seconds_since(t0);
  return r;
}

json validation_json(const ValidationReport& rep) {
  json v = json::array();
  for (const auto& x : rep.violations) v.push_back({{"tag", x.tag}, {"ids", x.ids}, {"magnitude", x.magnitude}});
  return {{"feasible", rep.feasible()}, {"violations", v}};
}

int cmd_validate_only(const SolveArgs& a, const RunConfig& c) {
  if (!a.blocks || !a.solution) throw DataError("--validate-only needs --blocks and --solution");
  // Same range split as solve: blocks past the range belong to the diesel pool.
  const auto split = split_by_range(read_blocks_file(*a.blocks), c.range_limit_s());
  const auto inst = build_instance(split.ev, c.energy);
  std::ifstream in(*a.solution);
  if (!in) throw DataError("cannot open " + *a.solution);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid JSON in ") + *a.solution + ": " + e.what());
  }
  const bool full = c.assume_full_initial || j.value("assume_full_initial", false);
  const auto sol = solution_from_json(j.contains("solution") ? j.at("solution") : j);
  auto rep = validate(inst, sol, full);
  const auto day2 = replay_next_day(inst, sol);
  rep.violations.insert(rep.violations.end(), day2.violations.begin(), day2.violations.end());
  std::cout << rep.summary() << "\n";
  return rep.feasible() ? kExitOk : kExitInvalid;
}

int cmd_solve(const SolveArgs& a) {
  const RunConfig c = a.flags.build();
  if (a.validate_only) return cmd_validate_only(a, c);
  if (a.out.empty()) throw DataError("--out is required");

  std::vector<Block> blocks;
  json sdvsp_info = nullptr;
  if (a.blocks) {
    blocks = read_blocks_file(*a.blocks);
  } else if (a.trips && a.depots) {
    const Depot depot = pick_depot(*a.depots, a.depot);
    TravelModel model;
    model.avg_speed = mph_to_mps(c.speed_mph);
    auto clipped = clip_to_horizon(read_trip_csv(*a.trips), c.energy.horizon);
    if (clipped.excluded) std::cerr << "warning: excluded " << clipped.excluded << " trip(s) starting after the horizon\n";
    const auto sd = solve_sdvsp(build_arcs(std::move(clipped.kept), depot, model, c.sdvsp));
    blocks = sd.blocks;
    sdvsp_info = {{"objective", sd.objective}, {"n_blocks", sd.blocks.size()}, {"K", c.sdvsp.K}, {"W", c.sdvsp.W}};
  } else {
    throw DataError("solve needs --blocks, or --trips with --depots");
  }

  fs::create_directories(a.out);
  {
    std::ostringstream csv_out, jsonl_out;
    write_blocks_csv(csv_out, blocks);
    write_blocks_jsonl(jsonl_out, blocks);
    write_text(fs::path(a.out) / "blocks.csv", csv_out.str());
    write_text(fs::path(a.out) / "blocks.jsonl", jsonl_out.str());
  }

  const auto split = split_by_range(blocks, c.range_limit_s());
  const auto inst = build_instance(split.ev, c.energy);
  if (c.lp_out) write_lp_file(inst, *c.lp_out, true, c.assume_full_initial);

  const BcpRun ev = run_method(inst, c);
  // Greedy plans every run from a full battery.
  const bool full = c.assume_full_initial || c.method == Method::kGreedy;
  auto report = validate(inst, ev.solution, full);
  const auto day2 = replay_next_day(inst, ev.solution);
  report.violations.insert(report.violations.end(), day2.violations.begin(), day2.violations.end());

  // Diesel pool and the diesel-only baseline, chained without battery limits.
  const auto dv_inst = build_instance(split.dv, unconstrained_energy(c.energy, split.dv));
  const auto dv_sol = solve_greedy(dv_inst);
  const auto dv_only_inst = build_instance(blocks, unconstrained_energy(c.energy, blocks));
  const auto dv_only = solve_greedy(dv_only_inst);

  json sol_json = solution_to_json(ev.solution);
  if (ev.partition) sol_json["partition"] = partition_to_json(*ev.partition);
  sol_json["assume_full_initial"] = full;
  write_text(fs::path(a.out) / "solution.json", sol_json.dump(2) + "\n");

  const auto fleet = fleet_report(ev.solution.num_vehicles(), dv_sol.num_vehicles());
  json metrics = {{"fleet", fleet_to_json(fleet)}, {"n_dv_only", dv_only.num_vehicles()}};
  if (!split.ev.empty()) metrics["block_eff_ev"] = block_efficiency(split.ev);
  if (!blocks.empty()) metrics["block_eff_all"] = block_efficiency(blocks);
  if (!ev.solution.runs.empty()) metrics["ev_schedule"] = efficiency_to_json(schedule_efficiency(ev.solution, inst));
  if (!dv_only.runs.empty()) metrics["dv_only_schedule"] = efficiency_to_json(schedule_efficiency(dv_only, dv_only_inst));
  if (dv_only.num_vehicles() > dv_sol.num_vehicles())
    metrics["replacement_ratio"] =
        replacement_ratio(ev.solution.num_vehicles(), dv_sol.num_vehicles(), dv_only.num_vehicles());
  else
    metrics["replacement_ratio"] = nullptr;

  json out = {{"method", to_string(c.method)},
              {"params", params_to_json(c.energy)},
              {"n_blocks", blocks.size()},
              {"n_ev_blocks", split.ev.size()},
              {"n_dv_blocks", split.dv.size()},
              {"objective", ev.solution.objective},
              {"optimal", ev.solution.optimal},
              {"solve_seconds", ev.seconds},
              {"validation", validation_json(report)},
              {"metrics", metrics}};
  if (!sdvsp_info.is_null()) out["sdvsp"] = sdvsp_info;
  write_text(fs::path(a.out) / "report.json", out.dump(2) + "\n");

  if (a.plot_data) {
    std::ostringstream os;
    os << "figure,series,metric,value\n";
    os << "fleet,scenario,n_ev," << fleet.n_ev << "\n";
    os << "fleet,scenario,n_dv," << fleet.n_dv << "\n";
    os << "fleet,scenario,ev_share," << fleet.ev_share << "\n";
    os << "fleet,dv_only,n_dv," << dv_only.num_vehicles() << "\n";
    auto emit = [&](const char* series, const EfficiencyReport& r) {
      os << "time," << series << ",service_s," << r.service_s << "\n";
      os << "time," << series << ",deadhead_s," << r.deadhead_s << "\n";
      os << "time," << series << ",intertrip_layover_s," << r.intertrip_layover_s << "\n";
      os << "time," << series << ",day_depot_layover_s," << r.day_depot_layover_s << "\n";
      os << "time," << series << ",overnight_depot_layover_s," << r.overnight_depot_layover_s << "\n";
      os << "efficiency," << series << ",block_eff," << r.block_eff << "\n";
      os << "efficiency," << series << ",schedule_eff," << r.schedule_eff << "\n";
    };
    if (!ev.solution.runs.empty()) emit("ev", schedule_efficiency(ev.solution, inst));
    if (!dv_only.runs.empty()) emit("dv_only", schedule_efficiency(dv_only, dv_only_inst));
    write_text(*a.plot_data, os.str());
  }

  std::cout << "method=" << to_string(c.method) << " blocks=" << blocks.size() << " ev_runs="
            << ev.solution.num_vehicles() << " dv_runs=" << dv_sol.num_vehicles()
            << " objective=" << ev.solution.objective << " optimal=" << (ev.solution.optimal ? "true" : "false")
            << " validation=" << report.summary() << "\n";
  return report.feasible() ? kExitOk : kExitInvalid;
}

// --- bench -------------------------------------------------------------------

struct BenchArgs {
  std::optional<std::string> trips, depots, depot, rows_out;
  std::string out;
  std::vector<std::size_t> sizes, reps;
  bool synthetic = false;
  ConfigFlags flags;
};

struct RepResult {
  bool exact_found = false, exact_opt = false;
  double exact_obj = 0.0, root_bound = 0.0, greedy_obj = 0.0, dac_obj = 0.0;
  bool greedy_ok = false, dac_ok = false;
  std::size_t n_blocks = 0, n_subs = 0;
  double t_exact = 0.0, t_greedy = 0.0, t_dac = 0.0;
};

RepResult bench_rep(const std::vector<Block>& blocks, const RunConfig& c) {
  RepResult r;
  const auto inst = build_instance(split_by_range(blocks, c.range_limit_s()).ev, c.energy);
  r.n_blocks = inst.size();

  auto t0 = std::chrono::steady_clock::now();
  try {
    ExactOptions o;
    o.time_limit_s = c.time_limit_s;
    o.assume_full_initial = true;
    o.max_blocks = 0;
    ExactStats st;
    const auto s = solve_exact(inst, o, &st);
    r.exact_found = true;
    r.exact_opt = s.optimal;
    r.exact_obj = s.objective;
    r.root_bound = st.root_bound;
  } catch (const Error&) {
  }
  r.t_exact = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  try {
    r.greedy_obj = solve_greedy(inst, {c.overnight_window}).objective;
    r.greedy_ok = true;
  } catch (const Error&) {
  }
  r.t_greedy = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  try {
    DacOptions o;
    o.subproblem_cap = c.subproblem_cap;
    o.time_limit_per_sub_s = c.time_limit_s;
    o.assume_full_initial = true;
    o.seed = c.seed;
    o.workers = 1;
    const auto d = solve_dac(inst, o);
    r.dac_obj = d.solution.objective;
    r.n_subs = d.partition.parts.size();
    r.dac_ok = true;
  } catch (const Error&) {
  }
  r.t_dac = seconds_since(t0);
  return r;
}

int cmd_bench(BenchArgs a) {
  const RunConfig c = a.flags.build();
  if (a.sizes.empty()) throw DataError("--sizes is required");
  if (a.reps.empty()) a.reps.assign(a.sizes.size(), 1);
  if (a.reps.size() == 1 && a.sizes.size() > 1) a.reps.assign(a.sizes.size(), a.reps.front());
  if (a.reps.size() != a.sizes.size()) throw DataError("--reps must have one entry per size");

  std::vector<Trip> pool;
  Depot depot;
  TravelModel model;
  model.avg_speed = mph_to_mps(c.speed_mph);
  if (!a.synthetic) {
    if (!a.trips || !a.depots) throw DataError("bench needs --trips and --depots, or --synthetic-blocks");
    depot = pick_depot(*a.depots, a.depot);
    pool = clip_to_horizon(read_trip_csv(*a.trips), c.energy.horizon).kept;
    for (auto n : a.sizes)
      if (n > pool.size())
        throw DataError("size " + std::to_string(n) + " exceeds the " + std::to_string(pool.size()) + " available trips");
  }

  std::ostringstream table, rows;
  table << "n_trips,n_solved,n_opt,avg_mip_gap,greedy_gap,m,dac_gap,t_exact,t_greedy,t_dac\n";
  rows << "n_trips,rep,n_blocks,exact_obj,exact_optimal,root_bound,greedy_obj,dac_obj,n_subproblems,t_exact,t_greedy,t_dac\n";
  table << std::setprecision(6);
  rows << std::setprecision(10);

  for (std::size_t s = 0; s < a.sizes.size(); ++s) {
    const std::size_t n = a.sizes[s], reps = a.reps[s];
    // Instances are drawn sequentially so they do not depend on the worker count.
    std::vector<std::vector<Block>> instances(reps);
    Rng rng(c.seed * 1000003ull + n);
    for (std::size_t r = 0; r < reps; ++r) {
      if (a.synthetic) {
        BlockGenOptions g;
        g.n_blocks = static_cast<int>(n);
        g.battery_cap = c.energy.battery_cap;
        instances[r] = random_blocks(g, rng);
      } else {
        std::vector<Trip> sample;
        for (auto k : sample_indices(pool.size(), n, rng)) sample.push_back(pool[k]);
        instances[r] = solve_sdvsp(build_arcs(std::move(sample), depot, model, c.sdvsp)).blocks;
      }
    }
    std::vector<RepResult> results(reps);
    parallel_for(reps, worker_count(), [&](std::size_t r) { results[r] = bench_rep(instances[r], c); });

    std::size_t solved = 0, opt = 0, g_count = 0, d_count = 0;
    double mip_gap = 0.0, g_gap = 0.0, d_gap = 0.0, m = 0.0, te = 0.0, tg = 0.0, td = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& x = results[r];
      rows << n << ',' << r << ',' << x.n_blocks << ',' << x.exact_obj << ',' << (x.exact_opt ? 1 : 0) << ','
           << x.root_bound << ',' << x.greedy_obj << ',' << x.dac_obj << ',' << x.n_subs << ',' << x.t_exact << ','
           << x.t_greedy << ',' << x.t_dac << '\n';
      te += x.t_exact;
      tg += x.t_greedy;
      td += x.t_dac;
      m += static_cast<double>(x.n_subs);
      if (!x.exact_found || x.exact_obj <= 0.0) continue;
      ++solved;
      if (x.exact_opt) ++opt;
      mip_gap += x.exact_opt ? 0.0 : 100.0 * (x.exact_obj - x.root_bound) / x.exact_obj;
      if (x.greedy_ok) {
        g_gap += gap_percent(x.greedy_obj, x.exact_obj);
        ++g_count;
      }
      if (x.dac_ok) {
        d_gap += gap_percent(x.dac_obj, x.exact_obj);
        ++d_count;
      }
    }
    const double R = static_cast<double>(std::max<std::size_t>(reps, 1));
    auto avg = [](double sum, std::size_t k) { return k ? sum / static_cast<double>(k) : 0.0; };
    table << n << ',' << solved << ',' << opt << ',' << avg(mip_gap, solved) << ',' << avg(g_gap, g_count) << ','
          << m / R << ',' << avg(d_gap, d_count) << ',' << te / R << ',' << tg / R << ',' << td / R << '\n';
  }

  if (a.out.empty() || a.out == "-")
    std::cout << table.str();
  else
    write_text(a.out, table.str());
  if (a.rows_out) write_text(*a.rows_out, rows.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electric bus block generation and chaining"};
  app.require_subcommand(1);

  IngestArgs ia;
  auto* ingest = app.add_subcommand("ingest", "GTFS or trip CSV to per-depot trip files");
  ingest->add_option("--gtfs", ia.gtfs, "GTFS feed directory");
  ingest->add_option("--date", ia.date, "service date, YYYYMMDD");
  ingest->add_option("--trips", ia.trips, "trip CSV instead of a feed");
  ingest->add_option("--depots", ia.depots, "depot CSV")->required();
  ingest->add_option("--route-map", ia.route_map, "route_id,depot_id CSV");
  ingest->add_option("--out", ia.out, "output directory")->required();
  ingest->add_option("--horizon-s", ia.horizon, "horizon length in seconds");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "block generation, chaining, validation and metrics");
  solve->add_option("--trips", sa.trips, "trip CSV of one depot");
  solve->add_option("--depots", sa.depots, "depot CSV");
  solve->add_option("--depot", sa.depot, "depot id when the CSV lists several");
  solve->add_option("--blocks", sa.blocks, "block CSV or JSONL; skips block generation");
  solve->add_option("--out", sa.out, "output directory");
  solve->add_flag("--validate-only", sa.validate_only, "validate --solution against --blocks");
  solve->add_option("--solution", sa.solution, "solution JSON for --validate-only");
  solve->add_option("--plot-data", sa.plot_data, "long-format CSV of fleet and time metrics");
  sa.flags.add(solve);

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "exact vs greedy vs divide-and-conquer on sampled instances");
  bench->add_option("--trips", ba.trips, "trip CSV of one depot");
  bench->add_option("--depots", ba.depots, "depot CSV");
  bench->add_option("--depot", ba.depot, "depot id");
  bench->add_flag("--synthetic-blocks", ba.synthetic, "sample random blocks instead of trips");
  bench->add_option("--sizes", ba.sizes, "instance sizes")->delimiter(',');
  bench->add_option("--reps", ba.reps, "repetitions per size")->delimiter(',');
  bench->add_option("--out", ba.out, "summary CSV ('-' for stdout)");
  bench->add_option("--rows", ba.rows_out, "per-repetition CSV");
  ba.flags.add(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitData;
  }

  try {
    if (*ingest) return cmd_ingest(ia);
    if (*solve) return cmd_solve(sa);
    if (*bench) return cmd_bench(ba);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const TimeLimitError& e) {
    std::cerr << "time limit: " << e.what() << "\n";
    return kExitTimeLimit;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. An optional argument names the
// directory for the gap artifact (default: current directory).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "evsched/evsched.hpp"
#include "lp_fixtures.hpp"
#include "oracles.hpp"

using namespace evsched;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExactOptions full_initial() {
  ExactOptions o;
  o.assume_full_initial = true;
  return o;
}

Block block(int id, Seconds start, Seconds end, Seconds consumption) {
  Block b;
  b.id = id;
  b.start_time = start;
  b.end_time = end;
  b.consumption = consumption;
  b.revenue_time = consumption * 9 / 10;
  b.deadhead_time = consumption - b.revenue_time;
  b.intertrip_layover = (end - start) - consumption;
  return b;
}

Outcome sdvsp_exactness() {
  const auto t0 = Clock::now();
  oracle::Rng rng(101);
  const Depot depot{"depot", {"depot", 41.88, -87.63}};
  int match = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const double K = static_cast<double>(rng.between(0, 5) * 1000);
    const double W = static_cast<double>(rng.between(0, 3));
    const auto inst = build_arcs(oracle::random_small_trips(n, rng), depot, TravelModel{}, {K, W});
    if (solve_sdvsp(inst).objective == oracle::sdvsp_brute_force(inst)) ++match;
  }
  const double secs = since(t0);
  return {match == 200 && secs < 60.0, fmt("%d/200 objectives equal the enumeration oracle in %.2f s", match, secs)};
}

Outcome bcp_exactness() {
  const auto t0 = Clock::now();
  oracle::Rng rng(102);
  int match = 0, infeasible = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng.below(10));
    const auto inst = oracle::tight_instance(n, rng);
    const auto ref = oracle::chain_brute_force(inst, false);
    if (!ref.feasible) {
      try {
        solve_exact(inst, ExactOptions{});
      } catch (const InfeasibleError&) {
        ++match;
        ++infeasible;
      }
      continue;
    }
    const double obj = solve_exact(inst, ExactOptions{}).objective;
    worst = std::max(worst, std::abs(obj - ref.objective));
    if (std::abs(obj - ref.objective) <= 1e-6) ++match;
  }
  const double secs = since(t0);
  return {match == 100 && secs < 600.0,
          fmt("%d/100 match brute force (%d infeasible on both sides), max |diff| %.2g, %.1f s", match, infeasible,
              worst, secs)};
}

Outcome lp_golden() {
  int same = 0, total = 0;
  const fs::path dir = fs::temp_directory_path() / "evsched_acceptance_lp";
  fs::create_directories(dir);
  for (const auto& c : lp_fixtures::cases()) {
    ++total;
    const fs::path out = dir / (c.name + ".lp");
    write_lp_file(c.inst, out.string(), c.opts.linearized, c.opts.assume_full_initial);
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    const fs::path golden = fs::path(EVSCHED_GOLDEN_DIR) / (c.name + ".lp");
    if (fs::exists(golden) && slurp(golden) == slurp(out)) ++same;
  }
  return {same == total, fmt("%d/%d LP files byte-identical to golden; solver cross-check runs as lp_crosscheck", same,
                             total)};
}

Outcome greedy_feasibility() {
  oracle::Rng rng(104);
  int ok = 0, total = 0;
  std::size_t violations = 0;
  for (int size : {10, 50, 200, 1000}) {
    for (int t = 0; t < 250; ++t) {
      ++total;
      const auto inst = oracle::bench_instance(size, rng);
      const auto rep = validate(inst, solve_greedy(inst), true);
      violations += rep.violations.size();
      if (rep.feasible()) ++ok;
    }
  }
  return {ok == total, fmt("%d/%d greedy solutions valid with full initial battery, %zu violations", ok, total,
                           violations)};
}

Outcome greedy_vs_exact(const fs::path& artifact_dir) {
  oracle::Rng rng(105);
  int checked = 0, ordered = 0, greedy_infeasible = 0;
  for (int t = 0; t < 300; ++t) {
    const int n = 1 + static_cast<int>(rng.below(10));
    const auto inst = t % 2 ? oracle::tight_instance(n, rng) : oracle::bench_instance(n, rng);
    double exact;
    try {
      exact = solve_exact(inst, full_initial()).objective;
    } catch (const InfeasibleError&) {
      continue;
    }
    ++checked;
    try {
      if (solve_greedy(inst).objective >= exact - 1e-6) ++ordered;
    } catch (const InfeasibleError&) {
      ++ordered;  // no greedy schedule: infinite objective
      ++greedy_infeasible;
    }
  }

  const fs::path csv = artifact_dir / "greedy_gap_20_blocks.csv";
  std::ofstream out(csv);
  out << "instance,exact_obj,exact_optimal,greedy_obj,gap_percent\n";
  double sum = 0.0;
  int n_gap = 0, n_opt = 0;
  bool nonneg = true;
  for (int t = 0; t < 500; ++t) {
    const auto inst = oracle::bench_instance(20, rng);
    auto o = full_initial();
    o.time_limit_s = 60.0;
    const auto ex = solve_exact(inst, o);
    const double g = solve_greedy(inst).objective;
    const double gap = gap_percent(g, ex.objective);
    out << t << ',' << ex.objective << ',' << (ex.optimal ? 1 : 0) << ',' << g << ',' << gap << '\n';
    sum += gap;
    ++n_gap;
    n_opt += ex.optimal;
    nonneg = nonneg && gap >= -1e-9;
  }
  const double mean = sum / n_gap;
  out << "mean,,," << n_opt << ',' << mean << '\n';
  const bool pass = checked > 0 && ordered == checked && std::isfinite(mean) && mean >= 0.0 && nonneg;
  return {pass, fmt("greedy >= exact on %d/%d fixtures (%d greedy-infeasible); mean gap over 500 x 20 blocks "
                    "%.2f%% (%d optimal), written to %s",
                    ordered, checked, greedy_infeasible, mean, n_opt, csv.string().c_str())};
}

Outcome dac_properties() {
  oracle::Rng rng(106);
  DacOptions serial;
  serial.workers = 1;

  // (a) one part reproduces the exact solver.
  int identical = 0;
  for (int t = 0; t < 50; ++t) {
    const auto inst = oracle::bench_instance(1 + static_cast<int>(rng.below(15)), rng);
    auto o = serial;
    o.subproblem_cap = std::max<std::size_t>(2, inst.size());
    const auto d = solve_dac(inst, o).solution;
    const auto e = solve_exact(inst, full_initial());
    identical += d.runs == e.runs && d.objective == e.objective && d.soc == e.soc && d.next_day == e.next_day &&
                 d.day_charge == e.day_charge;
  }

  // (b) merged solutions validate on the master instance.
  int merged_ok = 0;
  for (int t = 0; t < 500; ++t) {
    const auto inst = oracle::bench_instance(20 + static_cast<int>(rng.below(41)), rng);
    auto o = serial;
    o.subproblem_cap = 8;
    o.seed = rng.next();
    const auto d = solve_dac(inst, o).solution;
    merged_ok += validate(inst, d, true).feasible() && replay_next_day(inst, d).feasible();
  }

  // (c) never better than exact where exact completes.
  int compared = 0, not_better = 0;
  for (int t = 0; t < 100; ++t) {
    const auto inst = oracle::bench_instance(8 + static_cast<int>(rng.below(13)), rng);
    auto eo = full_initial();
    eo.time_limit_s = 60.0;
    const auto e = solve_exact(inst, eo);
    if (!e.optimal) continue;
    auto o = serial;
    o.subproblem_cap = 5;
    ++compared;
    not_better += solve_dac(inst, o).solution.objective >= e.objective - 1e-6;
  }

  // (d) part count from the level formula.
  const auto parts = partition_blocks(oracle::bench_instance(100, rng), 20).parts.size();

  const bool pass = identical == 50 && merged_ok == 500 && compared > 0 && not_better == compared && parts == 8;
  return {pass, fmt("(a) %d/50 identical to exact, (b) %d/500 merged valid, (c) %d/%d no better than exact, "
                    "(d) 100 blocks cap 20 -> %zu parts",
                    identical, merged_ok, not_better, compared, parts)};
}

Outcome parameters() {
  EnergyParams p;
  p.power_day = 450.0;
  p.power_night = 125.0;
  p.consumption_rate = 220.0;
  p.derive_rates();
  const bool pass = std::abs(p.rate_day - 2.0455) <= 1e-3 && std::abs(p.rate_night - 0.5682) <= 1e-3 &&
                    p.battery_kwh() == 440.0;
  return {pass, fmt("R_day %.4f, R_night %.4f, battery %.1f kWh", p.rate_day, p.rate_night, p.battery_kwh())};
}

// Shared by criteria 8 and 9: every solver's output on 300 instances.
struct SolvedCase {
  BcpInstance inst;
  ChainSolution sol;
  std::string solver;
};

std::vector<SolvedCase> solved_cases() {
  oracle::Rng rng(108);
  std::vector<SolvedCase> out;
  DacOptions dac;
  dac.workers = 1;
  dac.subproblem_cap = 4;
  for (int t = 0; t < 300; ++t) {
    const int n = 1 + static_cast<int>(rng.below(10));
    const auto inst = t % 2 ? oracle::tight_instance(n, rng) : oracle::bench_instance(n, rng);
    auto add = [&](const char* name, auto&& solve) {
      try {
        out.push_back({inst, solve(), name});
      } catch (const InfeasibleError&) {
      }
    };
    add("exact", [&] { return solve_exact(inst, ExactOptions{}); });
    add("exact-full", [&] { return solve_exact(inst, full_initial()); });
    add("greedy", [&] { return solve_greedy(inst); });
    add("dac", [&] { return solve_dac(inst, dac).solution; });
  }
  return out;
}

Outcome replay(const std::vector<SolvedCase>& cases) {
  std::size_t violations = 0;
  int clean = 0;
  for (const auto& c : cases) {
    const auto rep = replay_next_day(c.inst, c.sol);
    violations += rep.violations.size();
    clean += rep.feasible();
  }
  return {violations == 0 && !cases.empty(),
          fmt("%d/%zu solver outputs replay a second day cleanly, %zu violations", clean, cases.size(), violations)};
}

Outcome metrics(const std::vector<SolvedCase>& cases) {
  double worst = 0.0;
  for (const auto& c : cases) {
    if (c.sol.runs.empty()) continue;
    const auto rep = schedule_efficiency(c.sol, c.inst);
    worst = std::max(worst, std::abs(rep.accounted_s() - rep.fleet_time_s()));
  }

  // Ten overlapping morning blocks and six midday blocks. A diesel bus
  // chains a midday block after a morning one; an electric bus cannot
  // recharge enough in 30 minutes, so each block needs its own EV.
  std::vector<Block> blocks;
  for (int k = 0; k < 10; ++k) blocks.push_back(block(k + 1, 21600 + 60 * k, 32400 + 60 * k, 7000));
  for (int k = 0; k < 6; ++k) blocks.push_back(block(k + 11, 34800 + 60 * k, 45600 + 60 * k, 7000));
  const auto ev = build_instance(blocks, EnergyParams{});
  const auto dv = build_instance(blocks, unconstrained_energy(EnergyParams{}, blocks));
  const std::size_t n_ev = solve_exact(ev, full_initial()).runs.size();
  const std::size_t n_dv_only = solve_exact(dv, full_initial()).runs.size();
  const double ratio = replacement_ratio(n_ev, 0, n_dv_only);
  const bool pass = worst <= 1e-6 && std::abs(ratio - 1.6) <= 1e-12;
  return {pass, fmt("time accounting off by at most %.2g s over %zu solutions; %zu EVs replace %zu DVs -> ratio %.3f",
                    worst, cases.size(), n_ev, n_dv_only, ratio)};
}

Outcome performance() {
  oracle::Rng rng(110);
  BlockGenOptions g;
  g.n_blocks = 10000;
  g.first_start = 3600;
  g.last_start = 22 * 3600;
  const auto inst = build_instance(random_blocks(g, rng), EnergyParams{});
  auto t0 = Clock::now();
  const auto sol = solve_greedy(inst);
  const double t_greedy = since(t0);

  const auto [ids, edges] = random_graph(10000, 50000, rng);
  const BlockGraph graph(ids, edges);
  t0 = Clock::now();
  const auto bis = kl_bisect(graph, 1);
  const double t_kl = since(t0);
  const bool pass = t_greedy < 60.0 && t_kl < 30.0 && graph.num_edges() == 50000;
  return {pass, fmt("greedy on 10000 blocks %.2f s (%zu vehicles); K-L on 10000 vertices / %zu edges %.2f s (cut %zu)",
                    t_greedy, sol.runs.size(), graph.num_edges(), t_kl, bis.cut)};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path artifacts = argc > 1 ? fs::path(argv[1]) : fs::current_path();
  fs::create_directories(artifacts);

  report(1, "SDVSP exactness", sdvsp_exactness);
  report(2, "BCP exactness", bcp_exactness);
  report(3, "LP model files", lp_golden);
  report(4, "greedy feasibility", greedy_feasibility);
  report(5, "greedy vs exact ordering", [&] { return greedy_vs_exact(artifacts); });
  report(6, "DaC properties", dac_properties);
  report(7, "parameter derivations", parameters);
  std::vector<SolvedCase> cases;
  report(8, "next-day replay", [&] {
    cases = solved_cases();
    return replay(cases);
  });
  report(9, "metrics closure", [&] { return metrics(cases); });
  report(10, "performance guard", performance);

  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}

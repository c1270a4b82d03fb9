#pragma once

// Constraint checker for chain solutions, and a second-horizon replay that
// exercises the next-day links.

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "evsched/bcp.hpp"

namespace evsched {

struct Violation {
  std::string tag;       // e.g. "day-charge"
  std::vector<int> ids;  // block ids involved
  double magnitude = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }

  std::string summary(std::size_t max_items = 10) const {
    if (violations.empty()) return "feasible";
    std::ostringstream os;
    os << violations.size() << " violation(s):";
    for (std::size_t k = 0; k < violations.size() && k < max_items; ++k) {
      const auto& v = violations[k];
      os << ' ' << v.tag << '[';
      for (std::size_t m = 0; m < v.ids.size(); ++m) os << (m ? "," : "") << v.ids[m];
      os << "]=" << v.magnitude;
    }
    return os.str();
  }
};

namespace detail {

template <typename Map, typename Key>
double value_or(const Map& m, const Key& k, double fallback) {
  auto it = m.find(k);
  return it == m.end() ? fallback : it->second;
}

}  // namespace detail

/// Checks partition, SOC recursion, battery bounds, charge caps, overnight
/// SOC and the run-end/run-start bijection. With `assume_full_initial` every
/// run must also start with a full battery.
inline ValidationReport validate(const BcpInstance& inst, const ChainSolution& sol,
                                 bool assume_full_initial) {
  ValidationReport rep;
  auto flag = [&rep](std::string tag, std::vector<int> ids, double magnitude) {
    rep.violations.push_back({std::move(tag), std::move(ids), magnitude});
  };
  const auto& p = inst.params;
  const double tol = kSocTolerance;

  // Partition of blocks into runs.
  std::map<int, int> seen;
  std::vector<std::vector<int>> runs;
  for (const auto& run : sol.runs) {
    if (run.empty()) {
      flag("empty-run", {}, 0.0);
      continue;
    }
    bool ok = true;
    for (int id : run) {
      if (inst.index_of(id) < 0) {
        flag("unknown-block", {id}, 0.0);
        ok = false;
      }
      ++seen[id];
    }
    if (ok) runs.push_back(run);
  }
  for (const auto& b : inst.blocks) {
    const int c = seen.count(b.id) ? seen[b.id] : 0;
    if (c == 0) flag("missing-block", {b.id}, 1.0);
    if (c > 1) flag("repeated-block", {b.id}, c - 1.0);
  }

  std::set<ArcKey> used;
  std::map<int, double> end_soc;
  for (const auto& run : runs) {
    const double first_soc = detail::value_or(sol.soc, run.front(), std::nan(""));
    if (assume_full_initial && !(std::abs(first_soc - p.battery_cap) <= tol))
      flag("full-start", {run.front()}, std::abs(first_soc - p.battery_cap));

    for (std::size_t k = 0; k < run.size(); ++k) {
      const Block& cur = inst.block(run[k]);
      auto soc_it = sol.soc.find(cur.id);
      if (soc_it == sol.soc.end()) {
        flag("missing-soc", {cur.id}, 0.0);
        continue;
      }
      const double b = soc_it->second;
      const double need = static_cast<double>(cur.consumption);
      if (b < need - tol) flag("soc-range", {cur.id}, need - b);
      if (b > p.battery_cap + tol) flag("soc-range", {cur.id}, b - p.battery_cap);

      if (k + 1 == run.size()) {
        const double u_t = detail::value_or(sol.day_charge, ArcKey{cur.id, kDepotId}, 0.0);
        if (std::abs(u_t) > tol) flag("return-charge", {cur.id}, std::abs(u_t));
        const double v_t = std::max(b - need, 0.0);
        end_soc[cur.id] = v_t;
        auto va = sol.soc_arc.find({cur.id, kDepotId});
        if (va != sol.soc_arc.end() && std::abs(va->second - v_t) > tol)
          flag("soc-carry", {cur.id, kDepotId}, std::abs(va->second - v_t));
        continue;
      }

      const Block& nxt = inst.block(run[k + 1]);
      const int ci = inst.index_of(cur.id), ni = inst.index_of(nxt.id);
      used.insert({cur.id, nxt.id});
      if (!inst.day_arc(ci, ni)) {
        flag("arc-E", {cur.id, nxt.id}, static_cast<double>(inst.gap(ci, ni)));
        continue;
      }
      const double u = detail::value_or(sol.day_charge, ArcKey{cur.id, nxt.id}, 0.0);
      if (u < -tol) flag("nonneg", {cur.id, nxt.id}, -u);
      const double u_cap = static_cast<double>(inst.gap(ci, ni)) * p.rate_day;
      if (u > u_cap + tol) flag("day-charge", {cur.id, nxt.id}, u - u_cap);
      const double expected = std::max(b - need + u, 0.0);
      const double b_next = detail::value_or(sol.soc, nxt.id, std::nan(""));
      if (!(std::abs(b_next - expected) <= tol))
        flag("soc-carry", {cur.id, nxt.id}, std::abs(b_next - expected));
      auto va = sol.soc_arc.find({cur.id, nxt.id});
      if (va != sol.soc_arc.end() && std::abs(va->second - expected) > tol)
        flag("arc-soc", {cur.id, nxt.id}, std::abs(va->second - expected));
    }
  }

  // Charges on arcs that are not part of any run must be zero.
  for (const auto& [key, u] : sol.day_charge) {
    if (key.second == kDepotId || used.count(key)) continue;
    if (std::abs(u) > tol) flag("day-charge", {key.first, key.second}, std::abs(u));
  }

  // Next-day links: a bijection between run ends and run starts.
  std::map<int, int> run_of_first, run_of_last;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    run_of_first[runs[r].front()] = static_cast<int>(r);
    run_of_last[runs[r].back()] = static_cast<int>(r);
  }
  std::map<int, int> predecessors;
  for (const auto& [last, first] : sol.next_day) {
    if (!run_of_last.count(last)) {
      flag("link-out", {last, first}, 1.0);
      continue;
    }
    if (!run_of_first.count(first)) {
      flag("link-in", {last, first}, 1.0);
      continue;
    }
    ++predecessors[first];
    const int li = inst.index_of(last), fi = inst.index_of(first);
    if (!inst.night_arc(li, fi)) {
      flag("arc-C", {last, first}, static_cast<double>(inst.night_window(li, fi)));
      continue;
    }
    if (!end_soc.count(last) || !sol.soc.count(first)) continue;
    const double v_night = overnight_soc(inst, inst.blocks[li], inst.blocks[fi], end_soc[last]);
    auto given = sol.next_day_soc.find(last);
    if (given != sol.next_day_soc.end() && std::abs(given->second - v_night) > tol)
      flag("night-soc", {last, first}, std::abs(given->second - v_night));
    const double need = sol.soc.at(first);
    if (v_night < need - tol) flag("night-need", {last, first}, need - v_night);
  }
  for (const auto& [last, r] : run_of_last)
    if (!sol.next_day.count(last)) flag("link-out", {last}, 1.0);
  for (const auto& [first, r] : run_of_first) {
    const int c = predecessors.count(first) ? predecessors[first] : 0;
    if (c != 1) flag("link-in", {first}, std::abs(c - 1.0));
  }

  const double obj = chain_objective(inst, runs);
  if (std::abs(obj - sol.objective) > tol) flag("objective", {}, std::abs(obj - sol.objective));
  return rep;
}

/// Simulates the following horizon: every run restarts from its next-day
/// predecessor's overnight SOC and repeats its planned charges. Reports each
/// block whose start SOC falls short of its consumption.
inline ValidationReport replay_next_day(const BcpInstance& inst, const ChainSolution& sol) {
  ValidationReport rep;
  const auto& p = inst.params;
  std::map<int, const std::vector<int>*> run_by_first;
  for (const auto& run : sol.runs)
    if (!run.empty()) run_by_first[run.front()] = &run;

  for (const auto& run : sol.runs) {
    if (run.empty()) continue;
    const int last = run.back();
    auto link = sol.next_day.find(last);
    if (link == sol.next_day.end() || !run_by_first.count(link->second)) {
      rep.violations.push_back({"day2-link", {last}, 1.0});
      continue;
    }
    // Day-one end SOC from the planned trajectory.
    const Block& last_block = inst.block(last);
    const double end = detail::value_or(sol.soc, last, 0.0) - static_cast<double>(last_block.consumption);
    double soc = overnight_soc(inst, last_block, inst.block(link->second), end);

    const auto& next_run = *run_by_first[link->second];
    for (std::size_t k = 0; k < next_run.size(); ++k) {
      const Block& cur = inst.block(next_run[k]);
      const double need = static_cast<double>(cur.consumption);
      if (soc < need - kSocTolerance) rep.violations.push_back({"day2-soc", {cur.id}, need - soc});
      soc -= need;
      if (k + 1 < next_run.size()) {
        const double u = detail::value_or(sol.day_charge, ArcKey{cur.id, next_run[k + 1]}, 0.0);
        soc = std::min(p.battery_cap, soc + u);
      }
    }
  }
  return rep;
}

}  // namespace evsched

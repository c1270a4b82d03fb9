#pragma once

// Exact block chaining by depth-first branch-and-bound.
//
// Blocks are placed in start-time order; each one either extends an open run
// through a day arc or opens a new run. Charging is always maximal, so a run's
// SOC at the start of its current last block is min(A, s + c) for its start
// SOC s, and the run is feasible for s in [lo, B]. Complete partitions are
// checked for next-day operability by matching run ends to run starts.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evsched/bcp.hpp"
#include "evsched/error.hpp"
#include "evsched/greedy.hpp"
#include "evsched/matching.hpp"
#include "evsched/min_cost_flow.hpp"

namespace evsched {

struct ExactOptions {
  double time_limit_s = 1200.0;
  bool assume_full_initial = false;
  std::size_t max_blocks = 20;  // 0 lifts the limit
  bool seed_with_greedy = true;
};

struct ExactStats {
  std::uint64_t nodes = 0;
  double root_bound = 0.0;  // battery-free assignment bound
  double seconds = 0.0;
  bool timed_out = false;
};

namespace detail {

// Internal slack kept below the validator tolerance so accumulated rounding in
// the completed solution still passes.
inline constexpr double kExactTol = 1e-7;

/// End-of-day profile of a run: end SOC is min(A, s + c) for start SOC s >= lo.
struct RunProfile {
  int first = 0;
  int last = 0;
  double A = 0.0;
  double c = 0.0;
  double lo = 0.0;
};

struct NextDayPlan {
  std::vector<int> successor;   // run -> run served next day
  std::vector<double> start;    // start SOC per run
};

class NextDayChecker {
 public:
  NextDayChecker(const BcpInstance& inst, const std::vector<RunProfile>& runs, bool full_initial)
      : inst_(inst), runs_(runs), full_(full_initial), k_(static_cast<int>(runs.size())) {
    const double cap = inst.params.battery_cap;
    P_.assign(k_, std::vector<double>(k_, 0.0));
    Q_.assign(k_, std::vector<double>(k_, 0.0));
    ok_.assign(k_, std::vector<char>(k_, 0));
    for (int r = 0; r < k_; ++r) {
      for (int q = 0; q < k_; ++q) {
        if (!inst.night_arc(runs[r].last, runs[q].first)) continue;
        const double w = static_cast<double>(inst.night_window(runs[r].last, runs[q].first)) *
                         inst.params.rate_night;
        ok_[r][q] = 1;
        P_[r][q] = std::min(cap, runs[r].A + w);
        Q_[r][q] = runs[r].c + w;
      }
    }
  }

  std::optional<NextDayPlan> solve() {
    if (k_ == 0) return NextDayPlan{};
    const double cap = inst_.params.battery_cap;
    if (full_) {
      auto m = match([&](int r, int q) { return phi(r, q, cap) >= cap - kExactTol; });
      if (!m) return std::nullopt;
      return NextDayPlan{*m, std::vector<double>(k_, cap)};
    }
    // Necessary: every run start reachable from some run end at its best.
    if (!match([&](int r, int q) { return phi(r, q, cap) >= runs_[q].lo - kExactTol; }))
      return std::nullopt;
    for (bool at_lo : {true, false}) {
      auto m = match([&](int r, int q) {
        const double s = at_lo ? runs_[r].lo : cap;
        return phi(r, q, s) >= (at_lo ? runs_[q].lo : cap) - kExactTol;
      });
      if (m) {
        if (auto plan = evaluate(*m)) return plan;
      }
    }
    succ_.assign(k_, -1);
    pred_.assign(k_, -1);
    return search(0);
  }

 private:
  double phi(int r, int q, double s) const {
    if (!ok_[r][q]) return -std::numeric_limits<double>::infinity();
    return std::min(P_[r][q], s + Q_[r][q]);
  }

  template <typename Edge>
  std::optional<std::vector<int>> match(Edge&& edge) const {
    std::vector<std::vector<int>> adj(k_);
    for (int r = 0; r < k_; ++r)
      for (int q = 0; q < k_; ++q)
        if (ok_[r][q] && edge(r, q)) adj[r].push_back(q);
    return perfect_matching(adj);
  }

  // Greatest feasible start SOCs on the cycle through r0; empty if infeasible.
  bool cycle_starts(const std::vector<int>& succ, int r0, std::vector<double>& start) const {
    double P = std::numeric_limits<double>::infinity(), Q = 0.0;
    int r = r0;
    do {
      const int q = succ[r];
      P = std::min(P_[r][q], P + Q_[r][q]);
      Q += Q_[r][q];
      r = q;
    } while (r != r0);
    if (Q < -kExactTol) return false;
    double s = std::min(inst_.params.battery_cap, P);
    r = r0;
    do {
      if (s < runs_[r].lo - kExactTol) return false;
      start[r] = s;
      s = phi(r, succ[r], s);
      r = succ[r];
    } while (r != r0);
    return s >= start[r0] - kExactTol;
  }

  std::optional<NextDayPlan> evaluate(const std::vector<int>& succ) const {
    std::vector<double> start(k_, 0.0);
    std::vector<char> done(k_, 0);
    for (int r = 0; r < k_; ++r) {
      if (done[r]) continue;
      if (!cycle_starts(succ, r, start)) return std::nullopt;
      for (int x = r; !done[x]; x = succ[x]) done[x] = 1;
    }
    return NextDayPlan{succ, start};
  }

  // Upper-bound propagation along the open chain through r.
  bool chain_ok(int r) const {
    int head = r;
    while (pred_[head] >= 0) head = pred_[head];
    double s = inst_.params.battery_cap;
    for (int x = head;; x = succ_[x]) {
      if (s < runs_[x].lo - kExactTol) return false;
      if (succ_[x] < 0) return true;
      s = phi(x, succ_[x], s);
    }
  }

  std::optional<NextDayPlan> search(int r) {
    if (r == k_) return evaluate(succ_);
    const double cap = inst_.params.battery_cap;
    for (int q = 0; q < k_; ++q) {
      if (pred_[q] >= 0 || phi(r, q, cap) < runs_[q].lo - kExactTol) continue;
      succ_[r] = q;
      pred_[q] = r;
      // Does r -> q close a cycle?
      int x = q;
      while (succ_[x] >= 0 && x != r) x = succ_[x];
      bool ok;
      if (x == r) {
        std::vector<double> start(k_, 0.0);
        ok = cycle_starts(succ_, r, start);
      } else {
        ok = chain_ok(r);
      }
      if (ok) {
        if (auto plan = search(r + 1)) return plan;
      }
      succ_[r] = -1;
      pred_[q] = -1;
    }
    return std::nullopt;
  }

  const BcpInstance& inst_;
  const std::vector<RunProfile>& runs_;
  bool full_;
  int k_;
  std::vector<std::vector<double>> P_, Q_;
  std::vector<std::vector<char>> ok_;
  std::vector<int> succ_, pred_;
};

/// Open run during the search: SOC at the start of `last` is min(A, s + c).
struct OpenRun {
  std::vector<int> blocks;
  double A = 0.0;
  double c = 0.0;
  double lo = 0.0;
};

class ExactSearch {
 public:
  ExactSearch(const BcpInstance& inst, const ExactOptions& opts)
      : inst_(inst), opts_(opts), order_(start_order(inst)), n_(static_cast<int>(inst.size())) {
    link_ok_.assign(static_cast<std::size_t>(n_) * n_, 0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        link_ok_[static_cast<std::size_t>(i) * n_ + j] = inst_.day_arc(i, j) && reachable(i, inst_.params.battery_cap, j);
  }

  void seed(const ChainSolution& sol) {
    best_ = sol;
    best_cost_ = sol.objective;
  }

  double assignment_bound(int p) const {
    // Each remaining block takes a predecessor (an open run end or another
    // remaining block, at most one successor each) or opens a run.
    const auto& par = inst_.params;
    const int m = n_ - p;
    if (m == 0) return 0.0;
    const int k = static_cast<int>(runs_.size());
    const int src = 0, sink = 1, fresh = 2;
    auto left = [&](int x) { return 3 + x; };           // x < k: open run, else remaining block
    auto right = [&](int j) { return 3 + k + m + j; };  // remaining block j
    MinCostFlow<double> mcf(3 + k + 2 * m);
    mcf.add_arc(src, fresh, m, 0.0);
    for (int x = 0; x < k + m; ++x) mcf.add_arc(src, left(x), 1, 0.0);
    for (int j = 0; j < m; ++j) {
      const int bj = order_[p + j];
      mcf.add_arc(fresh, right(j), 1, par.vehicle_cost);
      mcf.add_arc(right(j), sink, 1, 0.0);
      for (int x = 0; x < k + m; ++x) {
        const bool ok = x < k ? can_extend(runs_[x], bj) : linkable(order_[p + x - k], bj);
        const int bi = x < k ? runs_[x].blocks.back() : order_[p + x - k];
        if (ok)
          mcf.add_arc(left(x), right(j), 1, par.layover_weight * static_cast<double>(inst_.gap(bi, bj)));
      }
    }
    return mcf.solve(src, sink, m).cost;
  }

  void run(ExactStats& stats) {
    start_ = std::chrono::steady_clock::now();
    stats.root_bound = assignment_bound(0);
    dfs(0, 0.0);
    stats.nodes = nodes_;
    stats.timed_out = timed_out_;
    stats.seconds = elapsed();
  }

  bool found() const { return best_.has_value(); }
  const ChainSolution& best() const { return *best_; }
  bool timed_out() const { return timed_out_; }

 private:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  // Cheap bound: cheapest available predecessor per remaining block.
  double quick_bound(int p) const {
    const auto& par = inst_.params;
    double total = 0.0;
    for (int j = p; j < n_; ++j) {
      const int bj = order_[j];
      double best = par.vehicle_cost;
      auto consider = [&](int bi) {
        best = std::min(best, par.layover_weight * static_cast<double>(inst_.gap(bi, bj)));
      };
      for (const auto& r : runs_)
        if (can_extend(r, bj)) consider(r.blocks.back());
      for (int i = p; i < j; ++i)
        if (linkable(order_[i], bj)) consider(order_[i]);
      total += best;
    }
    return total;
  }

  // Can j follow i when i starts with SOC at most a? Uses maximal day charging.
  bool reachable(int i, double a, int j) const {
    const auto& par = inst_.params;
    const double need_i = static_cast<double>(inst_.blocks[i].consumption);
    const double soc = std::min(par.battery_cap, a - need_i + static_cast<double>(inst_.gap(i, j)) * par.rate_day);
    return soc >= static_cast<double>(inst_.blocks[j].consumption) - kExactTol;
  }

  bool linkable(int i, int j) const { return link_ok_[static_cast<std::size_t>(i) * n_ + j]; }

  bool can_extend(const OpenRun& r, int j) const {
    const int i = r.blocks.back();
    return linkable(i, j) && reachable(i, r.A, j);
  }

  bool pruned(double bound) const { return bound >= best_cost_ - 1e-9; }

  void dfs(int p, double cost) {
    if (timed_out_) return;
    if ((++nodes_ & 255u) == 0 && elapsed() > opts_.time_limit_s) {
      timed_out_ = true;
      return;
    }
    if (p == n_) {
      leaf(cost);
      return;
    }
    if (pruned(cost + quick_bound(p))) return;
    if (n_ - p > 2 && pruned(cost + assignment_bound(p))) return;

    const auto& par = inst_.params;
    const double cap = par.battery_cap;
    const int j = order_[p];
    const double need_j = static_cast<double>(inst_.blocks[j].consumption);

    struct Option {
      double cost;
      int run;  // -1 opens a new run
    };
    std::vector<Option> options;
    for (int r = 0; r < static_cast<int>(runs_.size()); ++r) {
      const int i = runs_[r].blocks.back();
      if (!inst_.day_arc(i, j)) continue;
      options.push_back({par.layover_weight * static_cast<double>(inst_.gap(i, j)), r});
    }
    options.push_back({par.vehicle_cost, -1});
    std::stable_sort(options.begin(), options.end(),
                     [](const Option& a, const Option& b) { return a.cost < b.cost; });

    for (const auto& opt : options) {
      if (pruned(cost + opt.cost)) continue;
      if (opt.run < 0) {
        runs_.push_back({{j}, cap, 0.0, need_j});
        dfs(p + 1, cost + opt.cost);
        runs_.pop_back();
      } else {
        OpenRun& r = runs_[opt.run];
        const int i = r.blocks.back();
        const double need_i = static_cast<double>(inst_.blocks[i].consumption);
        const double charge = static_cast<double>(inst_.gap(i, j)) * par.rate_day;
        const double A2 = std::min(cap, r.A - need_i + charge);
        const double c2 = r.c - need_i + charge;
        const double lo2 = std::max(r.lo, need_j - c2);
        if (A2 < need_j - kExactTol || lo2 > cap + kExactTol) continue;
        const OpenRun saved{{}, r.A, r.c, r.lo};
        r.blocks.push_back(j);
        r.A = A2;
        r.c = c2;
        r.lo = lo2;
        dfs(p + 1, cost + opt.cost);
        OpenRun& back = runs_[opt.run];  // deeper calls may reallocate runs_
        back.blocks.pop_back();
        back.A = saved.A;
        back.c = saved.c;
        back.lo = saved.lo;
      }
      if (timed_out_) return;
    }
  }

  void leaf(double cost) {
    if (pruned(cost)) return;
    std::vector<RunProfile> profiles;
    for (const auto& r : runs_) {
      const double need = static_cast<double>(inst_.blocks[r.blocks.back()].consumption);
      profiles.push_back({r.blocks.front(), r.blocks.back(), r.A - need, r.c - need, r.lo});
    }
    NextDayChecker checker(inst_, profiles, opts_.assume_full_initial);
    auto plan = checker.solve();
    if (!plan) return;

    std::vector<std::vector<int>> ids;
    std::map<int, int> links;
    for (std::size_t r = 0; r < runs_.size(); ++r) {
      std::vector<int> run;
      for (int b : runs_[r].blocks) run.push_back(inst_.blocks[b].id);
      ids.push_back(std::move(run));
    }
    for (std::size_t r = 0; r < runs_.size(); ++r)
      links[ids[r].back()] = ids[plan->successor[r]].front();
    best_ = complete_solution(inst_, std::move(ids), plan->start, links);
    best_cost_ = best_->objective;
  }

  const BcpInstance& inst_;
  ExactOptions opts_;
  std::vector<int> order_;
  int n_;
  std::vector<char> link_ok_;  // day arc that survives a full-battery start
  std::vector<OpenRun> runs_;
  std::optional<ChainSolution> best_;
  double best_cost_ = std::numeric_limits<double>::infinity();
  std::uint64_t nodes_ = 0;
  bool timed_out_ = false;
  std::chrono::steady_clock::time_point start_;
};

/// First block, in start order, that no vehicle could serve on consecutive days.
inline int first_unservable_block(const BcpInstance& inst) {
  const auto order = start_order(inst);
  for (int b : order) {
    const double w = static_cast<double>(inst.night_window(b, b)) * inst.params.rate_night;
    if (!inst.night_arc(b, b) || w < static_cast<double>(inst.blocks[b].consumption) - kSocTolerance)
      return inst.blocks[b].id;
  }
  return order.empty() ? -1 : inst.blocks[order.front()].id;
}

}  // namespace detail

inline ChainSolution solve_exact(const BcpInstance& inst, const ExactOptions& opts,
                                 ExactStats* stats = nullptr) {
  if (opts.max_blocks && inst.size() > opts.max_blocks)
    throw Error("exact solver is limited to " + std::to_string(opts.max_blocks) + " blocks, got " +
                std::to_string(inst.size()));
  ExactStats local;
  ExactStats& st = stats ? *stats : local;
  st = {};
  if (inst.size() == 0) {
    ChainSolution empty;
    empty.optimal = true;
    return empty;
  }

  detail::ExactSearch search(inst, opts);
  if (opts.seed_with_greedy) {
    try {
      search.seed(solve_greedy(inst));
    } catch (const InfeasibleError&) {
      // No full-battery single vehicle for some block; the search decides.
    }
  }
  search.run(st);
  if (!search.found()) {
    if (st.timed_out) throw TimeLimitError("time limit reached before any feasible chaining was found");
    const int id = detail::first_unservable_block(inst);
    throw InfeasibleError("no chaining keeps every run operable the next day; first unservable block " +
                              std::to_string(id),
                          id);
  }
  ChainSolution sol = search.best();
  sol.optimal = !st.timed_out;
  return sol;
}

inline ChainSolution solve_exact(const BcpInstance& inst, double time_limit_s, bool assume_full_initial) {
  ExactOptions opts;
  opts.time_limit_s = time_limit_s;
  opts.assume_full_initial = assume_full_initial;
  return solve_exact(inst, opts);
}

}  // namespace evsched

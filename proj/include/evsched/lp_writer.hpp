#pragma once

// Writes the block chaining MILP in CPLEX LP text format.
//
// Variables: y (arc used), z (next-day link), u (day charge), v (SOC on an
// arc), vp (next-day SOC), b (SOC at block start), plus x / n binaries for
// the max / min forms and w / wp defining variables in the envelope form.
// Depot arcs use "s" (dispatch) and "t" (return) in place of a block id.
// Rows are named after the constraint they encode, e.g. charge_1_2.

#include <charconv>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "evsched/bcp.hpp"
#include "evsched/error.hpp"

namespace evsched {

struct LpOptions {
  bool linearized = true;
  bool assume_full_initial = false;
};

namespace detail {

// Shortest round-trip form. Truncating digits breaks the big-M rows that pin vp to a single value.
inline std::string lp_num(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// Linear expression accumulated as (coefficient, variable) terms.
class LpExpr {
 public:
  LpExpr& add(double coef, std::string var) {
    terms_.emplace_back(coef, std::move(var));
    return *this;
  }
  bool empty() const { return terms_.empty(); }

  void write(std::ostream& out) const {
    if (terms_.empty()) {
      out << " 0";
      return;
    }
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      if (k && k % 8 == 0) out << "\n   ";
      const double c = terms_[k].first;
      out << (c < 0 ? " - " : (k ? " + " : " "));
      const double mag = c < 0 ? -c : c;
      if (mag != 1.0) out << lp_num(mag) << ' ';
      out << terms_[k].second;
    }
  }

 private:
  std::vector<std::pair<double, std::string>> terms_;
};

class LpModelWriter {
 public:
  LpModelWriter(const BcpInstance& inst, const LpOptions& opts) : inst_(inst), opts_(opts) {}

  void write(std::ostream& out) {
    const int n = static_cast<int>(inst_.size());
    const auto& p = inst_.params;
    const double M1 = inst_.big_m1, M2 = inst_.big_m2, cap = p.battery_cap;
    day_ = inst_.day_arcs();
    night_ = inst_.night_arcs();

    out << "\\ Block chaining model: " << n << " blocks, " << day_.size() << " day arcs, "
        << night_.size() << " night arcs" << (opts_.linearized ? ", linearized" : ", envelope form")
        << (opts_.assume_full_initial ? ", full initial battery" : "") << "\n";
    out << "Minimize\n obj:";
    LpExpr obj;
    for (auto [i, j] : day_) obj.add(p.layover_weight * static_cast<double>(inst_.gap(i, j)), var("y", i, j));
    for (int j = 0; j < n; ++j) obj.add(p.vehicle_cost, var("y", kS, j));
    obj.write(out);
    out << "\n";
    if (n == 0) {
      out << "End\n";
      return;
    }
    out << "Subject To\n";

    // Every block has one successor and one predecessor (block or depot).
    for (int i = 0; i < n; ++i) {
      LpExpr e;
      for (auto [a, b] : day_)
        if (a == i) e.add(1, var("y", a, b));
      e.add(1, var("y", i, kT));
      row(out, "succ_" + id(i), e, "=", 1);
    }
    for (int j = 0; j < n; ++j) {
      LpExpr e;
      e.add(1, var("y", kS, j));
      for (auto [a, b] : day_)
        if (b == j) e.add(1, var("y", a, b));
      row(out, "pred_" + id(j), e, "=", 1);
    }

    // SOC carried along each arc of A.
    for (const auto& [i, j] : all_arcs()) {
      const double need = i == kS ? 0.0 : static_cast<double>(inst_.blocks[i].consumption);
      const std::string suffix = id(i) + "_" + id(j);
      const std::string v = var("v", i, j), b = "b_" + id(i), u = var("u", i, j), y = var("y", i, j),
                        x = var("x", i, j);
      if (opts_.linearized) {
        // v >= b - B + u - M1 (1 - y)
        row(out, "carry_lo_" + suffix, LpExpr().add(1, v).add(-1, b).add(-1, u).add(-M1, y), ">=", -need - M1);
        // v <= b - B + u - M1 (1 - y - x)
        row(out, "carry_hi_" + suffix, LpExpr().add(1, v).add(-1, b).add(-1, u).add(-M1, y).add(-M1, x), "<=",
            -need - M1);
        // v <= M1 (1 - x)
        row(out, "carry_off_" + suffix, LpExpr().add(1, v).add(M1, x), "<=", M1);
      } else {
        const std::string w = var("w", i, j);
        row(out, "carry_def_" + suffix, LpExpr().add(1, w).add(-1, b).add(-1, u).add(-M1, y), "=", -need - M1);
        row(out, "carry_max_" + suffix, LpExpr().add(1, v).add(-1, w), ">=", 0);
        row(out, "carry_sel_" + suffix, LpExpr().add(1, v).add(-1, w).add(-M2, x), "<=", 0);
        row(out, "carry_off_" + suffix, LpExpr().add(1, v).add(M1, x), "<=", M1);
      }
    }

    for (int j = 0; j < n; ++j) {
      LpExpr e;
      e.add(1, "b_" + id(j));
      e.add(-1, var("v", kS, j));
      for (auto [a, b] : day_)
        if (b == j) e.add(-1, var("v", a, b));
      row(out, "flow_" + id(j), e, "=", 0);
    }

    for (auto [i, j] : day_)
      row(out, "charge_" + id(i) + "_" + id(j),
          LpExpr().add(1, var("u", i, j)).add(-static_cast<double>(inst_.gap(i, j)) * p.rate_day, var("y", i, j)),
          "<=", 0);
    // Dispatch charge only on used dispatch arcs; it sets the run's start SOC.
    for (int j = 0; j < n; ++j)
      row(out, "charge_s_" + id(j), LpExpr().add(1, var("u", kS, j)).add(-cap, var("y", kS, j)), "<=", 0);
    for (int i = 0; i < n; ++i) row(out, "ret_" + id(i), LpExpr().add(1, var("u", i, kT)), "=", 0);

    for (auto [i, j] : night_) {
      const std::string suffix = id(i) + "_" + id(j);
      const double gain = static_cast<double>(inst_.night_window(i, j)) * p.rate_night;
      const std::string vp = var("vp", i, j), vt = var("v", i, kT), ys = var("y", kS, j), yt = var("y", i, kT),
                        nn = var("n", i, j);
      if (opts_.linearized) {
        row(out, "night_cap_" + suffix, LpExpr().add(1, vp), "<=", cap);
        // vp <= v_it + gain - M1 (2 - y_sj - y_it)
        row(out, "night_hi_" + suffix, LpExpr().add(1, vp).add(-1, vt).add(-M1, ys).add(-M1, yt), "<=", gain - 2 * M1);
        row(out, "night_selcap_" + suffix, LpExpr().add(1, vp).add(M2, nn), ">=", cap);
        // vp >= v_it + gain - M1 (3 - y_sj - y_it - n)
        row(out, "night_lo_" + suffix, LpExpr().add(1, vp).add(-1, vt).add(-M1, ys).add(-M1, yt).add(-M1, nn), ">=",
            gain - 3 * M1);
      } else {
        const std::string wp = var("wp", i, j);
        row(out, "night_def_" + suffix, LpExpr().add(1, wp).add(-1, vt).add(-M1, ys).add(-M1, yt), "=", gain - 2 * M1);
        row(out, "night_cap_" + suffix, LpExpr().add(1, vp), "<=", cap);
        row(out, "night_min_" + suffix, LpExpr().add(1, vp).add(-1, wp), "<=", 0);
        row(out, "night_selcap_" + suffix, LpExpr().add(1, vp).add(M2, nn), ">=", cap);
        row(out, "night_selw_" + suffix, LpExpr().add(1, vp).add(-1, wp).add(-M2, nn), ">=", -M2);
      }
      row(out, "night_need_" + suffix, LpExpr().add(1, vp).add(-1, "b_" + id(j)).add(-M2, var("z", i, j)), ">=", -M2);
    }
    for (int j = 0; j < n; ++j) {
      LpExpr e;
      for (auto [a, b] : night_)
        if (b == j) e.add(1, var("z", a, b));
      e.add(-1, var("y", kS, j));
      row(out, "link_in_" + id(j), e, "=", 0);
    }
    for (int i = 0; i < n; ++i) {
      LpExpr e;
      for (auto [a, b] : night_)
        if (a == i) e.add(1, var("z", a, b));
      e.add(-1, var("y", i, kT));
      row(out, "link_out_" + id(i), e, "=", 0);
    }
    if (opts_.assume_full_initial)
      for (int j = 0; j < n; ++j)
        row(out, "full_" + id(j), LpExpr().add(1, var("v", kS, j)).add(-cap, var("y", kS, j)), "=", 0);

    out << "Bounds\n";
    out << " b_s = 0\n";
    for (int i = 0; i < n; ++i)
      out << " " << lp_num(static_cast<double>(inst_.blocks[i].consumption)) << " <= b_" << id(i)
          << " <= " << lp_num(cap) << "\n";
    for (auto [i, j] : night_) out << " " << var("vp", i, j) << " free\n";
    if (!opts_.linearized) {
      for (const auto& [i, j] : all_arcs()) out << " " << var("w", i, j) << " free\n";
      for (auto [i, j] : night_) out << " " << var("wp", i, j) << " free\n";
    }

    out << "Binaries\n";
    for (const auto& [i, j] : all_arcs()) out << " " << var("y", i, j) << "\n";
    for (auto [i, j] : night_) out << " " << var("z", i, j) << "\n";
    for (const auto& [i, j] : all_arcs()) out << " " << var("x", i, j) << "\n";
    for (auto [i, j] : night_) out << " " << var("n", i, j) << "\n";
    out << "End\n";
  }

 private:
  static constexpr int kS = -1;  // dispatch depot
  static constexpr int kT = -2;  // return depot

  std::string id(int k) const {
    if (k == kS) return "s";
    if (k == kT) return "t";
    return std::to_string(inst_.blocks[k].id);
  }
  std::string var(const char* prefix, int i, int j) const { return std::string(prefix) + "_" + id(i) + "_" + id(j); }

  std::vector<std::pair<int, int>> all_arcs() const {
    std::vector<std::pair<int, int>> arcs;
    const int n = static_cast<int>(inst_.size());
    for (int j = 0; j < n; ++j) arcs.emplace_back(kS, j);
    arcs.insert(arcs.end(), day_.begin(), day_.end());
    for (int i = 0; i < n; ++i) arcs.emplace_back(i, kT);
    return arcs;
  }

  static void row(std::ostream& out, const std::string& name, const LpExpr& e, const char* sense, double rhs) {
    out << " " << name << ":";
    e.write(out);
    out << " " << sense << " " << lp_num(rhs) << "\n";
  }

  const BcpInstance& inst_;
  LpOptions opts_;
  std::vector<std::pair<int, int>> day_, night_;
};

}  // namespace detail

inline void write_lp(std::ostream& out, const BcpInstance& inst, const LpOptions& opts = {}) {
  detail::LpModelWriter(inst, opts).write(out);
}

inline void write_lp_file(const BcpInstance& inst, const std::string& path, bool linearized,
                          bool assume_full_initial) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write LP file " + path);
  write_lp(out, inst, {linearized, assume_full_initial});
  if (!out) throw Error("I/O error while writing LP file " + path);
}

}  // namespace evsched

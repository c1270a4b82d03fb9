#pragma once

// Run configuration: a flat `key = value` file whose keys mirror the
// command-line flags (dashes or underscores). Later settings win.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "evsched/bcp.hpp"
#include "evsched/csv.hpp"
#include "evsched/error.hpp"
#include "evsched/greedy.hpp"
#include "evsched/metrics.hpp"
#include "evsched/sdvsp.hpp"

namespace evsched {

enum class Method { kExact, kGreedy, kDac };

inline Method parse_method(const std::string& s) {
  if (s == "exact") return Method::kExact;
  if (s == "greedy") return Method::kGreedy;
  if (s == "dac") return Method::kDac;
  throw DataError("unknown method '" + s + "' (expected exact, greedy or dac)");
}

inline const char* to_string(Method m) {
  switch (m) {
    case Method::kExact:
      return "exact";
    case Method::kGreedy:
      return "greedy";
    default:
      return "dac";
  }
}

struct RunConfig {
  EnergyParams energy;
  SdvspParams sdvsp;
  Method method = Method::kGreedy;
  std::uint64_t seed = 1;
  double time_limit_s = 1200.0;
  std::size_t subproblem_cap = 20;
  std::size_t exact_max_blocks = 20;
  bool assume_full_initial = false;
  OvernightWindow overnight_window = OvernightWindow::kConsistent;
  double speed_mph = kDefaultSpeedMph;
  std::optional<std::string> lp_out;

  /// Blocks driving longer than this go to the diesel pool.
  Seconds range_limit_s() const { return static_cast<Seconds>(std::floor(energy.battery_cap + kSocTolerance)); }
};

namespace detail {

inline std::string normalize_key(std::string key) {
  key = csv::trim(key);
  while (!key.empty() && key.front() == '-') key.erase(key.begin());
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw DataError("config key '" + key + "' expects a boolean, got '" + v + "'");
}

}  // namespace detail

/// Applies one setting. Unknown keys are data errors.
inline void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = detail::normalize_key(raw_key);
  const std::string v = csv::trim(raw_value);
  const std::string ctx = "config key '" + key + "'";
  auto num = [&] { return csv::to_double(v, ctx); };
  auto sec = [&] { return static_cast<Seconds>(std::llround(num())); };

  if (key == "battery_min") c.energy.battery_cap = num() * 60.0;
  else if (key == "battery_cap_s") c.energy.battery_cap = num();
  else if (key == "range_miles") c.energy.battery_cap = miles_to_seconds(num(), c.speed_mph);
  else if (key == "rate_day") c.energy.rate_day = num();
  else if (key == "rate_night") c.energy.rate_night = num();
  else if (key == "power_day_kw") {
    c.energy.power_day = num();
    c.energy.derive_rates();
  } else if (key == "power_night_kw") {
    c.energy.power_night = num();
    c.energy.derive_rates();
  } else if (key == "consumption_kw") {
    c.energy.consumption_rate = num();
    c.energy.derive_rates();
  } else if (key == "horizon_s") c.energy.horizon = sec();
  else if (key == "vehicle_cost_s") c.energy.vehicle_cost = num();
  else if (key == "layover_weight") c.energy.layover_weight = num();
  else if (key == "layover_min_s") c.energy.layover_min = sec();
  else if (key == "layover_max_s") {
    if (v.empty() || v == "inf" || v == "none") c.energy.layover_max.reset();
    else c.energy.layover_max = sec();
  } else if (key == "K") c.sdvsp.K = num();
  else if (key == "W") c.sdvsp.W = num();
  else if (key == "method") c.method = parse_method(v);
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(csv::to_int(v, ctx));
  else if (key == "time_limit_s") c.time_limit_s = num();
  else if (key == "subproblem_cap") c.subproblem_cap = static_cast<std::size_t>(csv::to_int(v, ctx));
  else if (key == "exact_max_blocks") c.exact_max_blocks = static_cast<std::size_t>(csv::to_int(v, ctx));
  else if (key == "full_initial") c.assume_full_initial = detail::parse_bool(v, key);
  else if (key == "overnight_window") {
    try {
      c.overnight_window = parse_overnight_window(v);
    } catch (const Error& e) {
      throw DataError(e.what());
    }
  } else if (key == "speed_mph") c.speed_mph = num();
  else if (key == "lp_out") c.lp_out = v;
  else throw DataError("unknown config key '" + key + "'");
}

inline std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& name) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (csv::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError(name + " line " + std::to_string(lineno) + ": expected key = value");
    out[detail::normalize_key(line.substr(0, eq))] = csv::trim(line.substr(eq + 1));
  }
  return out;
}

inline void apply_config_file(RunConfig& c, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  // Speed first so a range in miles converts with the configured speed.
  const auto settings = parse_config_text(ss.str(), path.string());
  if (auto it = settings.find("speed_mph"); it != settings.end()) apply_setting(c, it->first, it->second);
  for (const auto& [k, v] : settings)
    if (k != "speed_mph") apply_setting(c, k, v);
}

}  // namespace evsched

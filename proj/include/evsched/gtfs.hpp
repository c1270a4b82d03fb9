#pragma once

// GTFS static feed ingestion: one Trip per trip active on a service date.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "evsched/csv.hpp"
#include "evsched/error.hpp"
#include "evsched/schedule_data.hpp"

namespace evsched::gtfs {

using Date = std::chrono::year_month_day;

/// Accepts YYYYMMDD (GTFS style) and YYYY-MM-DD.
inline Date parse_date(const std::string& text) {
  std::string digits;
  for (char c : text)
    if (c != '-') digits.push_back(c);
  if (digits.size() != 8 || !std::all_of(digits.begin(), digits.end(), ::isdigit))
    throw DataError("invalid date '" + text + "'");
  const Date d{std::chrono::year{std::stoi(digits.substr(0, 4))},
               std::chrono::month{static_cast<unsigned>(std::stoi(digits.substr(4, 2)))},
               std::chrono::day{static_cast<unsigned>(std::stoi(digits.substr(6, 2)))}};
  if (!d.ok()) throw DataError("invalid date '" + text + "'");
  return d;
}

/// HH:MM:SS with hours allowed past 24 (service after midnight).
inline Seconds parse_time(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) throw DataError("invalid time '" + text + "'");
  const std::string ctx = "time '" + text + "'";
  const auto h = csv::to_int(text.substr(0, c1), ctx);
  const auto m = csv::to_int(text.substr(c1 + 1, c2 - c1 - 1), ctx);
  const auto s = csv::to_int(text.substr(c2 + 1), ctx);
  if (h < 0 || m < 0 || m > 59 || s < 0 || s > 59) throw DataError("invalid " + ctx);
  return h * 3600 + m * 60 + s;
}

struct FeedResult {
  std::vector<Trip> trips;          // sorted by trip id
  std::size_t skipped_short = 0;    // fewer than two stop_times
  std::size_t skipped_invalid = 0;  // missing times or end <= start
};

namespace detail {

inline csv::Table require_file(const std::filesystem::path& dir, const char* name) {
  const auto p = dir / name;
  if (!std::filesystem::exists(p)) throw DataError("GTFS feed is missing required file " + std::string(name));
  return csv::Table::read(p);
}

inline std::set<std::string> active_services(const std::filesystem::path& dir, const Date& date) {
  const bool has_calendar = std::filesystem::exists(dir / "calendar.txt");
  const bool has_dates = std::filesystem::exists(dir / "calendar_dates.txt");
  if (!has_calendar && !has_dates)
    throw DataError("GTFS feed is missing required file calendar.txt (or calendar_dates.txt)");

  std::set<std::string> active;
  const int key = static_cast<int>(date.year()) * 10000 +
                  static_cast<int>(static_cast<unsigned>(date.month())) * 100 +
                  static_cast<int>(static_cast<unsigned>(date.day()));
  if (has_calendar) {
    static const char* kDays[] = {"sunday",   "monday", "tuesday", "wednesday",
                                  "thursday", "friday", "saturday"};
    const auto t = csv::Table::read(dir / "calendar.txt");
    t.require_columns({"service_id", "start_date", "end_date"});
    const unsigned wd = std::chrono::weekday{std::chrono::sys_days{date}}.c_encoding();
    const auto day_col = t.column(kDays[wd]);
    for (std::size_t r = 0; r < t.size(); ++r) {
      const auto start = csv::to_int(t.at(r, "start_date"), "calendar.txt start_date");
      const auto end = csv::to_int(t.at(r, "end_date"), "calendar.txt end_date");
      if (key >= start && key <= end && t.at(r, day_col) == "1") active.insert(t.at(r, "service_id"));
    }
  }
  if (has_dates) {
    const auto t = csv::Table::read(dir / "calendar_dates.txt");
    t.require_columns({"service_id", "date", "exception_type"});
    for (std::size_t r = 0; r < t.size(); ++r) {
      if (csv::to_int(t.at(r, "date"), "calendar_dates.txt date") != key) continue;
      const auto type = t.at(r, "exception_type");
      if (type == "1")
        active.insert(t.at(r, "service_id"));
      else if (type == "2")
        active.erase(t.at(r, "service_id"));
    }
  }
  return active;
}

}  // namespace detail

/// Trips active on `service_date`. Times past midnight are kept as-is.
inline FeedResult parse_gtfs(const std::filesystem::path& feed_dir, const Date& service_date) {
  auto trips_t = detail::require_file(feed_dir, "trips.txt");
  auto stop_times_t = detail::require_file(feed_dir, "stop_times.txt");
  auto stops_t = detail::require_file(feed_dir, "stops.txt");
  const auto services = detail::active_services(feed_dir, service_date);

  trips_t.require_columns({"trip_id", "service_id"});
  stop_times_t.require_columns({"trip_id", "stop_id", "stop_sequence"});
  stops_t.require_columns({"stop_id", "stop_lat", "stop_lon"});

  std::unordered_map<std::string, Stop> stops;
  for (std::size_t r = 0; r < stops_t.size(); ++r) {
    Stop s{stops_t.at(r, "stop_id"), 0.0, 0.0};
    const auto lat = stops_t.at(r, "stop_lat");
    const auto lon = stops_t.at(r, "stop_lon");
    // Stations without coordinates are legal GTFS but cannot be trip endpoints.
    if (lat.empty() || lon.empty()) continue;
    s.lat = csv::to_double(lat, "stops.txt stop_lat");
    s.lon = csv::to_double(lon, "stops.txt stop_lon");
    stops.emplace(s.id, s);
  }

  std::map<std::string, std::string> active_trips;  // trip_id -> route_id
  const auto route_col = trips_t.find_column("route_id");
  for (std::size_t r = 0; r < trips_t.size(); ++r) {
    if (!services.count(trips_t.at(r, "service_id"))) continue;
    active_trips[trips_t.at(r, "trip_id")] = route_col ? trips_t.at(r, *route_col) : std::string{};
  }

  struct StopTime {
    std::int64_t sequence;
    std::string stop_id;
    std::string arrival;
    std::string departure;
  };
  std::unordered_map<std::string, std::vector<StopTime>> by_trip;
  const auto arr_col = stop_times_t.find_column("arrival_time");
  const auto dep_col = stop_times_t.find_column("departure_time");
  for (std::size_t r = 0; r < stop_times_t.size(); ++r) {
    const auto trip_id = stop_times_t.at(r, "trip_id");
    if (!active_trips.count(trip_id)) continue;
    by_trip[trip_id].push_back(
        {csv::to_int(stop_times_t.at(r, "stop_sequence"), "stop_times.txt stop_sequence"),
         stop_times_t.at(r, "stop_id"), arr_col ? stop_times_t.at(r, *arr_col) : std::string{},
         dep_col ? stop_times_t.at(r, *dep_col) : std::string{}});
  }

  FeedResult result;
  for (const auto& [trip_id, route_id] : active_trips) {
    auto it = by_trip.find(trip_id);
    if (it == by_trip.end() || it->second.size() < 2) {
      ++result.skipped_short;
      continue;
    }
    auto& sts = it->second;
    std::sort(sts.begin(), sts.end(),
              [](const StopTime& a, const StopTime& b) { return a.sequence < b.sequence; });
    const auto& first = sts.front();
    const auto& last = sts.back();
    const std::string start_text = first.departure.empty() ? first.arrival : first.departure;
    const std::string end_text = last.arrival.empty() ? last.departure : last.arrival;
    auto o = stops.find(first.stop_id);
    auto d = stops.find(last.stop_id);
    if (start_text.empty() || end_text.empty() || o == stops.end() || d == stops.end()) {
      ++result.skipped_invalid;
      continue;
    }
    Trip trip{trip_id, o->second, d->second, parse_time(start_text), parse_time(end_text), route_id};
    if (trip.end_time <= trip.start_time) {
      ++result.skipped_invalid;
      continue;
    }
    result.trips.push_back(std::move(trip));
  }
  // active_trips is an ordered map, so trips are already sorted by id.
  return result;
}

}  // namespace evsched::gtfs

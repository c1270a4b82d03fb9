#pragma once

// Trips, stops and depots; deadhead estimation and trip-to-depot assignment.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "evsched/csv.hpp"
#include "evsched/error.hpp"
#include "evsched/units.hpp"

namespace evsched {

struct Stop {
  std::string id;
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees

  bool valid() const { return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0; }
};

struct Trip {
  std::string id;
  Stop origin;
  Stop destination;
  Seconds start_time = 0;
  Seconds end_time = 0;
  std::string route_id;

  Seconds duration() const { return end_time - start_time; }
};

struct Depot {
  std::string id;
  Stop location;
};

struct TravelModel {
  enum class Metric { kManhattanProjected };

  double avg_speed = mph_to_mps(kDefaultSpeedMph);  // m/s
  Metric metric = Metric::kManhattanProjected;
};

/// Manhattan distance in meters under an equirectangular projection centred
/// on the midpoint of the two stops.
inline double manhattan_meters(const Stop& a, const Stop& b) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double mean_lat = 0.5 * (a.lat + b.lat) * kDeg;
  const double dy = (b.lat - a.lat) * kDeg * kMeanEarthRadiusM;
  const double dx = (b.lon - a.lon) * kDeg * kMeanEarthRadiusM * std::cos(mean_lat);
  return std::abs(dx) + std::abs(dy);
}

/// Deadhead travel time, rounded to whole seconds.
inline Seconds deadhead_time(const Stop& a, const Stop& b, const TravelModel& model = {}) {
  if (!(model.avg_speed > 0.0)) throw Error("travel model speed must be positive");
  return static_cast<Seconds>(std::llround(manhattan_meters(a, b) / model.avg_speed));
}

inline Stop trip_midpoint(const Trip& t) {
  return Stop{t.id + "#mid", 0.5 * (t.origin.lat + t.destination.lat),
              0.5 * (t.origin.lon + t.destination.lon)};
}

using DepotAssignment = std::map<std::string, std::vector<Trip>>;

/// Route-mapped trips go to their mapped depot; all others to the depot
/// nearest to the trip midpoint (ties broken by smallest depot id).
inline DepotAssignment assign_trips_to_depot(
    const std::vector<Trip>& trips, const std::vector<Depot>& depots,
    const std::optional<std::map<std::string, std::string>>& route_to_depot = std::nullopt) {
  if (depots.empty()) throw DataError("at least one depot is required");

  std::vector<const Depot*> ordered;
  for (const auto& d : depots) ordered.push_back(&d);
  std::sort(ordered.begin(), ordered.end(),
            [](const Depot* a, const Depot* b) { return a->id < b->id; });

  DepotAssignment out;
  for (const auto* d : ordered) out[d->id];

  if (route_to_depot) {
    for (const auto& [route, depot] : *route_to_depot) {
      if (!out.count(depot))
        throw DataError("route '" + route + "' mapped to unknown depot '" + depot + "'");
    }
  }

  for (const auto& trip : trips) {
    if (route_to_depot) {
      auto it = route_to_depot->find(trip.route_id);
      if (it != route_to_depot->end()) {
        out[it->second].push_back(trip);
        continue;
      }
    }
    const Stop mid = trip_midpoint(trip);
    const Depot* best = nullptr;
    double best_dist = 0.0;
    for (const auto* d : ordered) {
      const double dist = manhattan_meters(mid, d->location);
      // Strict comparison keeps the lexicographically smallest id on ties.
      if (best == nullptr || dist < best_dist) {
        best = d;
        best_dist = dist;
      }
    }
    out[best->id].push_back(trip);
  }
  return out;
}

/// Trips starting at or after the horizon cannot be scheduled in [0, horizon).
struct HorizonFilter {
  std::vector<Trip> kept;
  std::size_t excluded = 0;
};

inline HorizonFilter clip_to_horizon(const std::vector<Trip>& trips, Seconds horizon) {
  HorizonFilter f;
  for (const auto& t : trips) {
    if (t.start_time >= horizon)
      ++f.excluded;
    else
      f.kept.push_back(t);
  }
  return f;
}

// --- Trip / depot CSV exchange formats -------------------------------------

inline constexpr const char* kTripCsvHeader =
    "trip_id,start_time_s,end_time_s,origin_lat,origin_lon,dest_lat,dest_lon,route_id";
inline constexpr const char* kDepotCsvHeader = "depot_id,lat,lon";

inline std::vector<Trip> parse_trip_table(const csv::Table& t) {
  t.require_columns({"trip_id", "start_time_s", "end_time_s", "origin_lat", "origin_lon",
                     "dest_lat", "dest_lon"});
  const auto route_col = t.find_column("route_id");
  std::vector<Trip> trips;
  trips.reserve(t.size());
  for (std::size_t r = 0; r < t.size(); ++r) {
    const std::string ctx = t.name() + " row " + std::to_string(r + 2);
    Trip trip;
    trip.id = t.at(r, "trip_id");
    trip.start_time = csv::to_int(t.at(r, "start_time_s"), ctx);
    trip.end_time = csv::to_int(t.at(r, "end_time_s"), ctx);
    trip.origin = {trip.id + ":O", csv::to_double(t.at(r, "origin_lat"), ctx),
                   csv::to_double(t.at(r, "origin_lon"), ctx)};
    trip.destination = {trip.id + ":D", csv::to_double(t.at(r, "dest_lat"), ctx),
                        csv::to_double(t.at(r, "dest_lon"), ctx)};
    if (route_col) trip.route_id = t.at(r, *route_col);
    if (trip.start_time < 0 || trip.end_time <= trip.start_time)
      throw DataError(ctx + ": trip '" + trip.id + "' needs 0 <= start < end");
    if (!trip.origin.valid() || !trip.destination.valid())
      throw DataError(ctx + ": coordinates out of range");
    trips.push_back(std::move(trip));
  }
  return trips;
}

inline std::vector<Trip> read_trip_csv(const std::filesystem::path& path) {
  return parse_trip_table(csv::Table::read(path));
}

inline void write_trip_csv(std::ostream& out, const std::vector<Trip>& trips) {
  out << kTripCsvHeader << '\n';
  out.precision(10);
  for (const auto& t : trips) {
    out << csv::escape(t.id) << ',' << t.start_time << ',' << t.end_time << ','
        << t.origin.lat << ',' << t.origin.lon << ',' << t.destination.lat << ','
        << t.destination.lon << ',' << csv::escape(t.route_id) << '\n';
  }
}

inline std::vector<Depot> parse_depot_table(const csv::Table& t) {
  t.require_columns({"depot_id", "lat", "lon"});
  std::vector<Depot> depots;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < t.size(); ++r) {
    const std::string ctx = t.name() + " row " + std::to_string(r + 2);
    Depot d;
    d.id = t.at(r, "depot_id");
    d.location = {d.id, csv::to_double(t.at(r, "lat"), ctx), csv::to_double(t.at(r, "lon"), ctx)};
    if (!d.location.valid()) throw DataError(ctx + ": coordinates out of range");
    if (!seen.insert(d.id).second) throw DataError(ctx + ": duplicate depot '" + d.id + "'");
    depots.push_back(std::move(d));
  }
  return depots;
}

inline std::vector<Depot> read_depot_csv(const std::filesystem::path& path) {
  return parse_depot_table(csv::Table::read(path));
}

inline void write_depot_csv(std::ostream& out, const std::vector<Depot>& depots) {
  out << kDepotCsvHeader << '\n';
  out.precision(10);
  for (const auto& d : depots)
    out << csv::escape(d.id) << ',' << d.location.lat << ',' << d.location.lon << '\n';
}

/// Route-to-depot mapping file with header `route_id,depot_id`.
inline std::map<std::string, std::string> read_route_mapping(const std::filesystem::path& path) {
  const auto t = csv::Table::read(path);
  t.require_columns({"route_id", "depot_id"});
  std::map<std::string, std::string> m;
  for (std::size_t r = 0; r < t.size(); ++r) m[t.at(r, "route_id")] = t.at(r, "depot_id");
  return m;
}

}  // namespace evsched

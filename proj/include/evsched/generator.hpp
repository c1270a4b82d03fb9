#pragma once

// Reproducible random instances: trips, blocks and graphs.
//
// Randomness comes from std::mt19937_64, whose output sequence is fixed by the
// C++ standard. The bounded-integer and unit-interval mappings are written
// out here because the std distributions differ between library vendors.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "evsched/bcp.hpp"
#include "evsched/schedule_data.hpp"
#include "evsched/sdvsp.hpp"

namespace evsched {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform integer in [0, n), by rejection of the biased low range.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = gen_();
      if (r >= threshold) return r % n;
    }
  }

  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 gen_;
};

/// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  k = std::min(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

struct BlockGenOptions {
  int n_blocks = 10;
  Seconds first_start = 4 * 3600;
  Seconds last_start = 20 * 3600;
  Seconds min_span = 1800;
  Seconds max_span = 4 * 3600;
  double min_fill = 0.5;  // consumption as a share of the span
  double max_fill = 0.95;
  double battery_cap = 7200.0;
};

/// Blocks with ids 1..n in start order. Revenue is 85% of the driving time.
inline std::vector<Block> random_blocks(const BlockGenOptions& o, Rng& rng) {
  std::vector<Block> blocks;
  for (int k = 0; k < o.n_blocks; ++k) {
    Block b;
    b.start_time = rng.between(o.first_start, o.last_start);
    const Seconds span = rng.between(o.min_span, o.max_span);
    b.end_time = b.start_time + span;
    const double fill = rng.uniform(o.min_fill, o.max_fill);
    b.consumption = std::max<Seconds>(1, std::min<Seconds>(static_cast<Seconds>(fill * static_cast<double>(span)),
                                                           static_cast<Seconds>(o.battery_cap)));
    b.revenue_time = b.consumption * 85 / 100;
    b.deadhead_time = b.consumption - b.revenue_time;
    b.intertrip_layover = span - b.consumption;
    blocks.push_back(b);
  }
  std::stable_sort(blocks.begin(), blocks.end(),
                   [](const Block& a, const Block& b) { return a.start_time < b.start_time; });
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    blocks[k].id = static_cast<int>(k) + 1;
    blocks[k].trip_ids = {"b" + std::to_string(k + 1)};
  }
  return blocks;
}

struct TripGenOptions {
  int n_trips = 8;
  Seconds first_start = 5 * 3600;
  Seconds last_start = 22 * 3600;
  Seconds min_duration = 600;
  Seconds max_duration = 3600;
  double center_lat = 41.88;
  double center_lon = -87.63;
  double spread_deg = 0.08;
  int n_stops = 6;
};

inline std::vector<Trip> random_trips(const TripGenOptions& o, Rng& rng) {
  std::vector<Stop> stops;
  for (int k = 0; k < o.n_stops; ++k)
    stops.push_back({"S" + std::to_string(k), o.center_lat + rng.uniform(-o.spread_deg, o.spread_deg),
                     o.center_lon + rng.uniform(-o.spread_deg, o.spread_deg)});
  std::vector<Trip> trips;
  for (int k = 0; k < o.n_trips; ++k) {
    Trip t;
    t.id = "T" + std::to_string(k);
    t.origin = stops[rng.below(stops.size())];
    t.destination = stops[rng.below(stops.size())];
    t.start_time = rng.between(o.first_start, o.last_start);
    t.end_time = t.start_time + rng.between(o.min_duration, o.max_duration);
    t.route_id = "R" + std::to_string(rng.below(3));
    trips.push_back(std::move(t));
  }
  return trips;
}

/// Simple graph with n vertices (ids 0..n-1) and m distinct random edges.
inline std::pair<std::vector<int>, std::vector<std::pair<int, int>>> random_graph(int n, std::size_t m, Rng& rng) {
  std::vector<int> ids(n);
  for (int v = 0; v < n; ++v) ids[v] = v;
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> edges;
  const std::size_t max_edges = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  m = std::min(m, max_edges);
  while (edges.size() < m) {
    int a = static_cast<int>(rng.below(n)), b = static_cast<int>(rng.below(n));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (seen.insert({a, b}).second) edges.emplace_back(a, b);
  }
  return {std::move(ids), std::move(edges)};
}

}  // namespace evsched

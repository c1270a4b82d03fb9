#pragma once

// Divide and conquer: recursive K-L bisection of the block graph, independent
// exact solves of the parts, and a union of their runs. Each part is a
// self-contained instance, so the union stays feasible on the whole instance.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "evsched/bcp.hpp"
#include "evsched/bcp_exact.hpp"
#include "evsched/error.hpp"
#include "evsched/kl.hpp"

namespace evsched {

struct Partitioning {
  std::vector<std::vector<int>> parts;  // block ids per sub-instance, ascending
  std::size_t cut_edges = 0;            // block-graph edges between different parts
};

/// Bisection depth: ceil(log2(ceil(n / cap))), zero when n fits in one part.
inline int dac_levels(std::size_t n_blocks, std::size_t cap) {
  if (cap < 2) throw Error("subproblem cap must be at least 2");
  const std::size_t m = (n_blocks + cap - 1) / cap;
  int levels = 0;
  while ((std::size_t{1} << levels) < m) ++levels;
  return levels;
}

inline Partitioning partition_blocks(const BcpInstance& inst, std::size_t cap, std::uint64_t seed = 0) {
  const int levels = dac_levels(inst.size(), cap);
  const BlockGraph full = block_graph(inst);
  Partitioning out;
  out.parts.push_back(full.ids());
  std::sort(out.parts.front().begin(), out.parts.front().end());

  for (int level = 0; level < levels; ++level) {
    std::vector<std::vector<int>> next;
    for (const auto& part : out.parts) {
      if (part.size() < 2) {
        next.push_back(part);
        next.emplace_back();
        continue;
      }
      const BcpInstance sub = restrict_instance(inst, part);
      const Bisection bis = kl_bisect(block_graph(sub), seed);
      next.push_back(bis.a);
      next.push_back(bis.b);
    }
    out.parts = std::move(next);
  }

  std::vector<int> part_of_vertex(full.size(), -1);
  for (std::size_t p = 0; p < out.parts.size(); ++p)
    for (int id : out.parts[p]) part_of_vertex[inst.index_of(id)] = static_cast<int>(p);
  // Vertex index in `full` equals the block index in `inst`.
  for (int v = 0; v < static_cast<int>(full.size()); ++v)
    for (int w : full.neighbours(v))
      if (v < w && part_of_vertex[v] != part_of_vertex[w]) ++out.cut_edges;
  return out;
}

inline std::vector<BcpInstance> partition_instance(const BcpInstance& inst, std::size_t cap,
                                                   std::uint64_t seed = 0) {
  std::vector<BcpInstance> subs;
  for (const auto& part : partition_blocks(inst, cap, seed).parts) subs.push_back(restrict_instance(inst, part));
  return subs;
}

/// Worker count from EVSCHED_WORKERS, else the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("EVSCHED_WORKERS")) {
    const long w = std::strtol(env, nullptr, 10);
    if (w > 0) return static_cast<unsigned>(w);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `job(k)` for k in [0, count) on up to `workers` threads. The first
/// exception by index is rethrown after all jobs finish.
template <typename Job>
void parallel_for(std::size_t count, unsigned workers, Job&& job) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        job(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned n = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), count));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct DacOptions {
  std::size_t subproblem_cap = 20;
  double time_limit_per_sub_s = 1200.0;
  bool assume_full_initial = true;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0 reads EVSCHED_WORKERS
};

struct DacSolution {
  ChainSolution solution;
  Partitioning partition;
  std::size_t n_optimal_subs = 0;
};

inline DacSolution solve_dac(const BcpInstance& inst, const DacOptions& opts = {}) {
  DacSolution out;
  ExactOptions exact;
  exact.time_limit_s = opts.time_limit_per_sub_s;
  exact.assume_full_initial = opts.assume_full_initial;
  exact.max_blocks = 0;

  if (dac_levels(inst.size(), opts.subproblem_cap) == 0) {
    std::vector<int> ids;
    for (const auto& b : inst.blocks) ids.push_back(b.id);
    std::sort(ids.begin(), ids.end());
    out.partition.parts = {ids};
    out.solution = solve_exact(inst, exact);
    out.n_optimal_subs = out.solution.optimal ? 1 : 0;
    return out;
  }

  out.partition = partition_blocks(inst, opts.subproblem_cap, opts.seed);
  const auto& parts = out.partition.parts;
  std::vector<ChainSolution> subs(parts.size());
  parallel_for(parts.size(), opts.workers ? opts.workers : worker_count(), [&](std::size_t k) {
    try {
      subs[k] = solve_exact(restrict_instance(inst, parts[k]), exact);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError("sub-instance " + std::to_string(k) + ": " + e.what(), e.block_id());
    } catch (const TimeLimitError& e) {
      throw TimeLimitError("sub-instance " + std::to_string(k) + ": " + e.what());
    }
  });

  ChainSolution& merged = out.solution;
  for (auto& s : subs) {
    for (auto& run : s.runs) merged.runs.push_back(std::move(run));
    merged.day_charge.insert(s.day_charge.begin(), s.day_charge.end());
    merged.soc.insert(s.soc.begin(), s.soc.end());
    merged.soc_arc.insert(s.soc_arc.begin(), s.soc_arc.end());
    merged.next_day.insert(s.next_day.begin(), s.next_day.end());
    merged.next_day_soc.insert(s.next_day_soc.begin(), s.next_day_soc.end());
    merged.objective += s.objective;
    if (s.optimal) ++out.n_optimal_subs;
  }
  merged.optimal = false;
  return out;
}

}  // namespace evsched

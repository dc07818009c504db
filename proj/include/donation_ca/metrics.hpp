#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "donation_ca/engine.hpp"
#include "donation_ca/history.hpp"
#include "donation_ca/parallel.hpp"
#include "donation_ca/random.hpp"

namespace donation_ca {

/// High states per agent id over rows 1..T; the initial row is excluded.
inline std::vector<std::size_t> agent_reputation_counts(const History& history) {
  std::vector<std::size_t> counts(history.agents(), 0);
  for (std::size_t t = 1; t < history.agent_states.rows(); ++t) {
    const auto row = history.agent_states.row(t);
    for (std::size_t id = 0; id < row.size(); ++id) counts[id] += row[id];
  }
  return counts;
}

inline std::vector<double> agent_donations_received(const History& history) {
  std::vector<double> totals(history.agents(), 0.0);
  for (std::size_t t = 0; t < history.received.rows(); ++t) {
    const auto row = history.received.row(t);
    for (std::size_t id = 0; id < row.size(); ++id) totals[id] += row[id];
  }
  return totals;
}

inline std::vector<std::size_t> agent_donations_made(const History& history) {
  std::vector<std::size_t> totals(history.agents(), 0);
  for (std::size_t t = 0; t < history.donated.rows(); ++t) {
    const auto row = history.donated.row(t);
    for (std::size_t id = 0; id < row.size(); ++id) totals[id] += row[id];
  }
  return totals;
}

/// Midpoint of the sorted values; mean of the two central ones for even N.
template <typename T>
double median(std::span<const T> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sequence");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  if (sorted.size() % 2 == 1) return sorted[mid];
  return (sorted[mid - 1] + sorted[mid]) / 2.0;
}

template <typename T>
double median(const std::vector<T>& values) {
  return median(std::span<const T>(values));
}

inline Matrix<std::uint8_t> site_spacetime(const History& history) { return history.site_matrix; }

/// Everything needed to build and run one replicate.
struct RunSpec {
  std::size_t n = 100;
  std::size_t steps = 300;
  InitSpec init = init::RandomUniform{};
  std::vector<Strategy> strategies;
  WorldParams params;
};

/// Per-agent outcomes of a run, accumulated without keeping the history.
struct RunTotals {
  std::vector<std::size_t> high_counts;
  std::vector<double> received;
};

inline RunTotals run_totals(World& world, std::size_t steps) {
  RunTotals totals;
  totals.high_counts.assign(world.size(), 0);
  std::vector<double> received_before(world.size());
  for (const auto& a : world.cells()) received_before[a.id] = a.donations_received;
  StepRecord record;
  for (std::size_t t = 0; t < steps; ++t) {
    world.step(record);
    for (const auto& a : world.cells()) totals.high_counts[a.id] += static_cast<std::size_t>(a.state);
  }
  totals.received.assign(world.size(), 0.0);
  for (const auto& a : world.cells()) totals.received[a.id] = a.donations_received - received_before[a.id];
  return totals;
}

struct ReplicateStats {
  double mean_median_reputation = 0.0;
  double mean_median_donations = 0.0;
  double stddev_median_reputation = 0.0;
  std::size_t replicates = 0;
};

inline std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t axis_index, std::uint64_t replicate) {
  return mix64(base_seed, axis_index, replicate);
}

/// Mean over R replicates of the median reputation count and of the median
/// donations received. Replicate r is seeded with mix64(base, axis, r).
inline ReplicateStats replicate_stats(const RunSpec& spec, std::size_t replicates, std::uint64_t base_seed,
                                      std::uint64_t axis_index = 0, std::size_t threads = 1) {
  if (replicates < 1) throw std::invalid_argument("need at least one replicate");
  std::vector<double> rep(replicates), don(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    World world(spec.n, spec.init, spec.strategies, spec.params, replicate_seed(base_seed, axis_index, r));
    const auto totals = run_totals(world, spec.steps);
    rep[r] = median(totals.high_counts);
    don[r] = median(totals.received);
  });

  ReplicateStats stats;
  stats.replicates = replicates;
  const double count = static_cast<double>(replicates);
  stats.mean_median_reputation = std::accumulate(rep.begin(), rep.end(), 0.0) / count;
  stats.mean_median_donations = std::accumulate(don.begin(), don.end(), 0.0) / count;
  if (replicates > 1) {
    double ss = 0.0;
    for (double v : rep) ss += (v - stats.mean_median_reputation) * (v - stats.mean_median_reputation);
    stats.stddev_median_reputation = std::sqrt(ss / (count - 1.0));
  }
  return stats;
}

inline double averaged_median_reputation(const RunSpec& spec, std::size_t replicates, std::uint64_t base_seed,
                                         std::size_t threads = 1) {
  return replicate_stats(spec, replicates, base_seed, 0, threads).mean_median_reputation;
}

inline double averaged_median_donations(const RunSpec& spec, std::size_t replicates, std::uint64_t base_seed,
                                        std::size_t threads = 1) {
  return replicate_stats(spec, replicates, base_seed, 0, threads).mean_median_donations;
}

}  // namespace donation_ca

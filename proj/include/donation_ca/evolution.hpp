#pragma once

// Generational dynamics over the twelve curated strategies.
//
// Each generation plays T lattice iterations; fitness is the total value of
// donations received. Parents are drawn by roulette wheel, offspring mutate
// along Hamming-similarity weights and are dropped onto a fresh random
// permutation of grid positions with re-randomised reputations.

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "donation_ca/engine.hpp"
#include "donation_ca/history.hpp"
#include "donation_ca/random.hpp"
#include "donation_ca/rules.hpp"

namespace donation_ca {

inline constexpr std::size_t kStrategyCount = kCurated.size();

/// Forced abstention window used when fatigue is requested without a value.
inline constexpr unsigned kDefaultFatigueLimit = 3;

constexpr int hamming(unsigned rule_a, unsigned rule_b) {
  return std::popcount((rule_a ^ rule_b) & 0xFFu);
}

/// Row-stochastic strategy transition matrix. Off-diagonal weight between
/// rules r and s is 1 - hamming(r, s) / 8 before row normalisation; the
/// diagonal is zero.
class MutationMatrix {
 public:
  explicit MutationMatrix(std::vector<unsigned> rules) : rules_(std::move(rules)) {
    const std::size_t k = rules_.size();
    if (k < 2) throw std::invalid_argument("mutation matrix needs at least two rules");
    for (std::size_t i = 0; i < k; ++i) {
      if (rules_[i] > 255) throw std::invalid_argument("rule number out of range");
      for (std::size_t j = 0; j < i; ++j) {
        if (rules_[i] == rules_[j]) {
          throw std::invalid_argument("duplicate rule " + std::to_string(rules_[i]) + " in mutation matrix");
        }
      }
    }
    probs_ = Matrix<double>(k, k, 0.0);
    for (std::size_t r = 0; r < k; ++r) {
      double sum = 0.0;
      for (std::size_t s = 0; s < k; ++s) {
        if (s == r) continue;
        const double w = 1.0 - hamming(rules_[r], rules_[s]) / 8.0;
        probs_(r, s) = w;
        sum += w;
      }
      if (sum <= 0.0) {
        throw std::invalid_argument("rule " + std::to_string(rules_[r]) + " has no reachable mutation");
      }
      for (std::size_t s = 0; s < k; ++s) probs_(r, s) /= sum;
    }
  }

  std::size_t size() const { return rules_.size(); }
  const std::vector<unsigned>& rules() const { return rules_; }
  double operator()(std::size_t from, std::size_t to) const { return probs_(from, to); }
  std::span<const double> row(std::size_t from) const { return probs_.row(from); }

 private:
  std::vector<unsigned> rules_;
  Matrix<double> probs_;
};

inline MutationMatrix mutation_matrix(std::span<const unsigned> rules) {
  return MutationMatrix({rules.begin(), rules.end()});
}

inline MutationMatrix curated_mutation_matrix() {
  const auto numbers = curated_rule_numbers();
  return mutation_matrix(numbers);
}

/// Total donations received by an agent over the recorded run.
inline double fitness(const History& history, std::size_t agent_id) {
  double total = 0.0;
  for (std::size_t t = 0; t < history.received.rows(); ++t) total += history.received(t, agent_id);
  return total;
}

namespace detail {
inline std::size_t roulette(std::span<const double> cumulative, double total, Rng& rng) {
  const double target = rng.uniform() * total;
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  auto index = static_cast<std::size_t>(it - cumulative.begin());
  // Guard against landing past the end through rounding, and skip
  // zero-width slots at the boundary.
  index = std::min(index, cumulative.size() - 1);
  while (index > 0 && cumulative[index] == cumulative[index - 1]) --index;
  return index;
}
}  // namespace detail

/// N independent fitness-proportional draws; uniform when all fitness is zero.
inline std::vector<std::size_t> select_parents(std::span<const double> fitness_values, Rng& rng) {
  const std::size_t n = fitness_values.size();
  std::vector<std::size_t> parents(n);
  if (n == 0) return parents;
  std::vector<double> cumulative(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(fitness_values[i] >= 0.0)) throw std::invalid_argument("fitness must be non-negative");
    total += fitness_values[i];
    cumulative[i] = total;
  }
  if (total <= 0.0) {
    for (auto& p : parents) p = rng.index(n);
    return parents;
  }
  for (auto& p : parents) p = detail::roulette(cumulative, total, rng);
  return parents;
}

/// Keeps the parent's strategy with probability 1 - p_m, otherwise samples
/// the parent's row of the mutation matrix.
inline std::size_t mutate(std::size_t parent, double p_m, const MutationMatrix& matrix, Rng& rng) {
  if (!rng.bernoulli(p_m)) return parent;
  const auto row = matrix.row(parent);
  std::vector<double> cumulative(row.size());
  std::partial_sum(row.begin(), row.end(), cumulative.begin());
  return detail::roulette(cumulative, cumulative.back(), rng);
}

struct EvolutionParams {
  std::size_t population = 100;
  std::size_t generations = 1;
  std::size_t iterations_per_generation = 300;
  double mutation_probability = 0.001;
  WorldParams world;  // noise, mobility and fatigue_limit
  /// Optional starting strategy index per agent (into kCurated); random
  /// uniform assignment when empty. A single entry means a homogeneous start.
  std::vector<std::size_t> initial_strategies;
};

/// Counts and mean fitness per strategy, one row per evaluated generation
/// (generation 0 is the initial population).
struct AbundanceSeries {
  std::array<unsigned, kStrategyCount> rules{};
  Matrix<std::size_t> counts;
  Matrix<double> mean_fitness_by_rule;  // 0 for absent rules
  std::vector<double> mean_fitness;

  std::size_t generations() const { return counts.rows(); }

  /// Strategy index with the largest count in a row; ties go to the lower index.
  std::size_t modal_index(std::size_t generation) const {
    const auto row = counts.row(generation);
    return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  unsigned modal_rule(std::size_t generation) const { return rules[modal_index(generation)]; }
};

/// Fraction of rows in which a single strategy holds at least `share` of
/// the population.
inline double dominance_fraction(const AbundanceSeries& series, double share) {
  if (series.generations() == 0) return 0.0;
  std::size_t dominated = 0;
  for (std::size_t g = 0; g < series.generations(); ++g) {
    const auto row = series.counts.row(g);
    const double total = static_cast<double>(std::accumulate(row.begin(), row.end(), std::size_t{0}));
    const auto top = static_cast<double>(*std::max_element(row.begin(), row.end()));
    if (total > 0 && top >= share * total) ++dominated;
  }
  return static_cast<double>(dominated) / static_cast<double>(series.generations());
}

/// Called after each generation's lattice run with the generation index,
/// the strategy index per agent id and the recorded history.
using GenerationObserver =
    std::function<void(std::size_t generation, std::span<const std::size_t> strategy_by_id, const History&)>;

inline AbundanceSeries run_generations(const EvolutionParams& params, std::uint64_t seed,
                                       const GenerationObserver& observer = {}) {
  const std::size_t n = params.population;
  if (n < 3) throw std::invalid_argument("population needs at least 3 agents");
  if (params.generations < 1) throw std::invalid_argument("need at least one generation");
  if (params.iterations_per_generation < 1) throw std::invalid_argument("need at least one iteration per generation");
  if (!(params.mutation_probability >= 0.0 && params.mutation_probability <= 1.0)) {
    throw std::invalid_argument("mutation probability must be in [0, 1]");
  }

  Rng rng(seed);
  const auto matrix = curated_mutation_matrix();

  std::vector<std::size_t> strategy(n);
  if (params.initial_strategies.empty()) {
    for (auto& s : strategy) s = rng.index(kStrategyCount);
  } else if (params.initial_strategies.size() == 1) {
    std::fill(strategy.begin(), strategy.end(), params.initial_strategies[0]);
  } else if (params.initial_strategies.size() == n) {
    strategy = params.initial_strategies;
  } else {
    throw std::invalid_argument("initial strategies must have 1 or N entries");
  }
  for (auto s : strategy) {
    if (s >= kStrategyCount) throw std::invalid_argument("initial strategy index out of range");
  }

  AbundanceSeries series;
  series.rules = curated_rule_numbers();
  series.counts = Matrix<std::size_t>(0, kStrategyCount);
  series.mean_fitness_by_rule = Matrix<double>(0, kStrategyCount);

  std::vector<Strategy> lattice_strategies(n);
  std::vector<double> fit(n);
  std::vector<std::size_t> offspring(n), order(n);

  for (std::size_t g = 0; g <= params.generations; ++g) {
    for (std::size_t i = 0; i < n; ++i) lattice_strategies[i] = kCurated[strategy[i]];
    World world(n, init::RandomUniform{}, lattice_strategies, params.world, rng.next());
    if (observer) {
      const auto history = world.run(params.iterations_per_generation);
      observer(g, strategy, history);
    } else {
      world.advance(params.iterations_per_generation);
    }
    for (const auto& a : world.cells()) fit[a.id] = a.donations_received;

    std::array<std::size_t, kStrategyCount> count{};
    std::array<double, kStrategyCount> fit_sum{};
    for (std::size_t i = 0; i < n; ++i) {
      ++count[strategy[i]];
      fit_sum[strategy[i]] += fit[i];
    }
    std::array<double, kStrategyCount> fit_mean{};
    for (std::size_t s = 0; s < kStrategyCount; ++s) {
      fit_mean[s] = count[s] ? fit_sum[s] / static_cast<double>(count[s]) : 0.0;
    }
    series.counts.push_row(count);
    series.mean_fitness_by_rule.push_row(fit_mean);
    series.mean_fitness.push_back(std::accumulate(fit.begin(), fit.end(), 0.0) / static_cast<double>(n));

    if (g == params.generations) break;

    const auto parents = select_parents(fit, rng);
    for (std::size_t i = 0; i < n; ++i) {
      offspring[i] = mutate(strategy[parents[i]], params.mutation_probability, matrix, rng);
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
    for (std::size_t p = 0; p < n; ++p) strategy[p] = offspring[order[p]];
  }
  return series;
}

}  // namespace donation_ca

#pragma once

// Synchronous donation-game lattice with periodic boundaries.
//
// One step runs, in order: perception (with e_R flips), donation decisions,
// delivery, state update (with e_A corruption), fatigue bookkeeping,
// directed shift, random swaps. Decisions read only the pre-step states.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "donation_ca/history.hpp"
#include "donation_ca/random.hpp"
#include "donation_ca/rules.hpp"

namespace donation_ca {

/// A descriptor, or a raw Wolfram table for pattern generation. A raw table
/// that fires splits the donation equally between both neighbors.
using Strategy = std::variant<StrategyDescriptor, RuleTable>;

inline RuleTable rule_table_of(const Strategy& strategy) {
  if (const auto* desc = std::get_if<StrategyDescriptor>(&strategy)) return derive_rule_table(*desc);
  return std::get<RuleTable>(strategy);
}

inline std::string to_string(const Strategy& strategy) {
  if (const auto* desc = std::get_if<StrategyDescriptor>(&strategy)) return to_string(*desc);
  return "raw:" + std::to_string(std::get<RuleTable>(strategy).number());
}

/// Decision for each perceived neighborhood packed two bits per entry:
/// 0 none, 1 left, 2 right, 3 split.
class CompiledStrategy {
 public:
  enum Code : unsigned { kNone = 0, kLeft = 1, kRight = 2, kSplit = 3 };

  CompiledStrategy() = default;
  explicit CompiledStrategy(const Strategy& strategy) {
    for (unsigned k = 0; k < 8; ++k) {
      unsigned code = kNone;
      if (const auto* desc = std::get_if<StrategyDescriptor>(&strategy)) {
        const auto d = decide_donation(*desc, left_of(k), centre_of(k), right_of(k));
        code = (d.share_left > 0 ? kLeft : 0u) | (d.share_right > 0 ? kRight : 0u);
      } else if (std::get<RuleTable>(strategy).bit(k)) {
        code = kSplit;
      }
      packed_ = static_cast<std::uint16_t>(packed_ | (code << (2 * k)));
    }
  }

  unsigned code(unsigned neighborhood) const { return (packed_ >> (2 * neighborhood)) & 3u; }

  DonationDecision decision(unsigned neighborhood) const {
    switch (code(neighborhood)) {
      case kLeft: return {1.0, 0.0};
      case kRight: return {0.0, 1.0};
      case kSplit: return {0.5, 0.5};
      default: return {};
    }
  }

 private:
  std::uint16_t packed_ = 0;
};

struct Agent {
  std::size_t id = 0;
  Strategy strategy;
  CompiledStrategy compiled;
  Reputation state = Reputation::Low;
  unsigned fatigue_streak = 0;
  double donations_received = 0.0;
  double donations_made = 0.0;
};

struct NoiseParams {
  double perception = 0.0;  // e_R
  double action = 0.0;      // e_A
};

struct MobilityParams {
  std::size_t swap_pairs = 0;
  bool directed = false;
};

struct WorldParams {
  NoiseParams noise;
  MobilityParams mobility;
  unsigned fatigue_limit = 0;  // 0 disables fatigue
  std::size_t swap_cap = 0;    // 0 means N
};

namespace init {
struct RandomUniform {};
struct SingleHighCenter {};
struct Checkerboard {};
struct Explicit {
  std::vector<Reputation> states;
};
}  // namespace init

using InitSpec = std::variant<init::RandomUniform, init::SingleHighCenter, init::Checkerboard, init::Explicit>;

struct StepRecord {
  std::vector<std::uint8_t> site_states;    // by position, after mobility
  std::vector<std::uint8_t> donated;        // by agent id
  std::vector<double> received;             // by agent id
};

/// Even positions rotate forward by two (mod N); odd positions stay.
/// `perm[p]` is the destination of the occupant of position p.
inline std::vector<std::size_t> directed_shift(std::size_t n) {
  if (n % 2 != 0) throw std::invalid_argument("directed shift needs an even lattice size");
  std::vector<std::size_t> perm(n);
  for (std::size_t p = 0; p < n; ++p) perm[p] = (p % 2 == 0) ? (p + 2) % n : p;
  return perm;
}

template <typename T>
void apply_directed_shift(std::vector<T>& cells) {
  const std::size_t n = cells.size();
  if (n % 2 != 0) throw std::invalid_argument("directed shift needs an even lattice size");
  if (n < 4) return;
  // Rotate the even sublattice right by one slot.
  T carry = std::move(cells[n - 2]);
  for (std::size_t p = n - 2; p >= 2; p -= 2) cells[p] = std::move(cells[p - 2]);
  cells[0] = std::move(carry);
}

class World {
 public:
  World(std::vector<Agent> cells, WorldParams params, std::uint64_t seed)
      : cells_(std::move(cells)), params_(params), rng_(seed) {
    validate();
  }

  /// Builds a lattice; `rng` is consumed for random initial states and then
  /// drives the dynamics.
  World(std::size_t n, const InitSpec& init_spec, const std::vector<Strategy>& strategies,
        WorldParams params, std::uint64_t seed)
      : params_(params), rng_(seed) {
    if (n < 3) throw std::invalid_argument("lattice needs at least 3 cells");
    if (strategies.size() != 1 && strategies.size() != n) {
      throw std::invalid_argument("expected one strategy or one per agent");
    }
    const auto states = initial_states(n, init_spec);
    cells_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& a = cells_[i];
      a.id = i;
      a.strategy = strategies.size() == 1 ? strategies[0] : strategies[i];
      a.compiled = CompiledStrategy(a.strategy);
      a.state = states[i];
    }
    validate();
  }

  std::size_t size() const { return cells_.size(); }
  std::uint64_t iteration() const { return iteration_; }
  const WorldParams& params() const { return params_; }
  const std::vector<Agent>& cells() const { return cells_; }
  const Agent& at(std::size_t position) const { return cells_[position]; }
  Rng& rng() { return rng_; }

  std::vector<std::uint8_t> site_states() const {
    std::vector<std::uint8_t> out(cells_.size());
    for (std::size_t p = 0; p < cells_.size(); ++p) out[p] = static_cast<std::uint8_t>(cells_[p].state);
    return out;
  }

  std::vector<std::uint8_t> agent_states() const {
    std::vector<std::uint8_t> out(cells_.size());
    for (const auto& a : cells_) out[a.id] = static_cast<std::uint8_t>(a.state);
    return out;
  }

  StepRecord step() {
    StepRecord record;
    step(record);
    return record;
  }

  void step(StepRecord& record) {
    const std::size_t n = cells_.size();
    record.site_states.resize(n);
    record.donated.assign(n, 0);
    record.received.assign(n, 0.0);

    snapshot_.resize(n);
    codes_.resize(n);
    for (std::size_t p = 0; p < n; ++p) snapshot_[p] = static_cast<unsigned>(cells_[p].state);

    const double e_r = params_.noise.perception;
    const unsigned limit = params_.fatigue_limit;
    for (std::size_t p = 0; p < n; ++p) {
      unsigned left = snapshot_[p == 0 ? n - 1 : p - 1];
      unsigned right = snapshot_[p + 1 == n ? 0 : p + 1];
      if (e_r > 0.0) {
        if (rng_.bernoulli(e_r)) left ^= 1u;
        if (rng_.bernoulli(e_r)) right ^= 1u;
      }
      const auto& agent = cells_[p];
      if (limit > 0 && agent.fatigue_streak >= limit) {
        codes_[p] = CompiledStrategy::kNone;
      } else {
        codes_[p] = static_cast<std::uint8_t>(agent.compiled.code((left << 2) | (snapshot_[p] << 1) | right));
      }
    }

    for (std::size_t p = 0; p < n; ++p) {
      const unsigned code = codes_[p];
      if (code == CompiledStrategy::kNone) continue;
      auto& left = cells_[p == 0 ? n - 1 : p - 1];
      auto& right = cells_[p + 1 == n ? 0 : p + 1];
      const double share = code == CompiledStrategy::kSplit ? 0.5 : 1.0;
      if (code & CompiledStrategy::kLeft) {
        left.donations_received += share;
        record.received[left.id] += share;
      }
      if (code & CompiledStrategy::kRight) {
        right.donations_received += share;
        record.received[right.id] += share;
      }
      cells_[p].donations_made += 1.0;
    }

    const double e_a = params_.noise.action;
    for (std::size_t p = 0; p < n; ++p) {
      auto& agent = cells_[p];
      const bool donated = codes_[p] != CompiledStrategy::kNone;
      record.donated[agent.id] = donated ? 1 : 0;
      if (donated) {
        agent.state = rng_.bernoulli(e_a) ? Reputation::Low : Reputation::High;
        ++agent.fatigue_streak;
      } else {
        agent.state = Reputation::Low;
        agent.fatigue_streak = 0;
      }
    }

    if (params_.mobility.directed) apply_directed_shift(cells_);
    for (std::size_t k = 0; k < params_.mobility.swap_pairs; ++k) {
      const std::size_t i = rng_.index(n);
      std::size_t j = rng_.index(n - 1);
      if (j >= i) ++j;
      std::swap(cells_[i], cells_[j]);
    }

    for (std::size_t p = 0; p < n; ++p) record.site_states[p] = static_cast<std::uint8_t>(cells_[p].state);
    ++iteration_;
  }

  History run(std::size_t steps) {
    if (steps < 1) throw std::invalid_argument("run needs at least one step");
    const std::size_t n = cells_.size();
    History h;
    h.site_matrix = Matrix<std::uint8_t>(0, n);
    h.agent_states = Matrix<std::uint8_t>(0, n);
    h.received = Matrix<double>(0, n);
    h.donated = Matrix<std::uint8_t>(0, n);
    h.site_matrix.reserve_rows(steps + 1);
    h.agent_states.reserve_rows(steps + 1);
    h.received.reserve_rows(steps);
    h.donated.reserve_rows(steps);

    h.site_matrix.push_row(site_states());
    h.agent_states.push_row(agent_states());
    StepRecord record;
    for (std::size_t t = 0; t < steps; ++t) {
      step(record);
      h.site_matrix.push_row(record.site_states);
      h.agent_states.push_row(agent_states());
      h.received.push_row(record.received);
      h.donated.push_row(record.donated);
    }
    return h;
  }

  /// Steps without recording anything beyond the agents' own tallies.
  void advance(std::size_t steps) {
    StepRecord record;
    for (std::size_t t = 0; t < steps; ++t) step(record);
  }

 private:
  std::vector<Reputation> initial_states(std::size_t n, const InitSpec& init_spec) {
    std::vector<Reputation> states(n, Reputation::Low);
    if (std::holds_alternative<init::RandomUniform>(init_spec)) {
      for (auto& s : states) s = rng_.bernoulli(0.5) ? Reputation::High : Reputation::Low;
    } else if (std::holds_alternative<init::SingleHighCenter>(init_spec)) {
      states[n / 2] = Reputation::High;
    } else if (std::holds_alternative<init::Checkerboard>(init_spec)) {
      for (std::size_t i = 0; i < n; i += 2) states[i] = Reputation::High;
    } else {
      const auto& explicit_states = std::get<init::Explicit>(init_spec).states;
      if (explicit_states.size() != n) {
        throw std::invalid_argument("explicit initial state has " + std::to_string(explicit_states.size()) +
                                    " cells, expected " + std::to_string(n));
      }
      states = explicit_states;
    }
    return states;
  }

  void validate() const {
    const std::size_t n = cells_.size();
    if (n < 3) throw std::invalid_argument("lattice needs at least 3 cells");
    const auto check_prob = [](double p, const char* name) {
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must be in [0, 1]");
    };
    check_prob(params_.noise.perception, "perception noise");
    check_prob(params_.noise.action, "action noise");
    const std::size_t cap = params_.swap_cap == 0 ? n : params_.swap_cap;
    if (params_.mobility.swap_pairs > cap) {
      throw std::invalid_argument("swap pairs " + std::to_string(params_.mobility.swap_pairs) +
                                  " exceed cap " + std::to_string(cap));
    }
    if (params_.mobility.directed && n % 2 != 0) {
      throw std::invalid_argument("directed movement needs an even lattice size");
    }
  }

  std::vector<Agent> cells_;
  WorldParams params_;
  Rng rng_;
  std::uint64_t iteration_ = 0;
  std::vector<unsigned> snapshot_;
  std::vector<std::uint8_t> codes_;
};

}  // namespace donation_ca

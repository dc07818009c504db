#pragma once

// Image-score donation game with optional nearest-neighbor pairing.
//
// Each round one donor is drawn uniformly; its recipient is a lattice
// neighbor (AdjacentNeighbor) or any other agent (RandomPair). The donor
// gives when the recipient's image reaches its threshold k.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "donation_ca/random.hpp"

namespace donation_ca::imagescore {

enum class Pairing { AdjacentNeighbor, RandomPair };

inline std::string_view to_string(Pairing pairing) {
  return pairing == Pairing::AdjacentNeighbor ? "local" : "random";
}

inline Pairing parse_pairing(std::string_view text) {
  if (text == "local" || text == "adjacent") return Pairing::AdjacentNeighbor;
  if (text == "random") return Pairing::RandomPair;
  throw std::invalid_argument("unknown pairing '" + std::string(text) + "', expected local or random");
}

struct ScoredAgent {
  std::size_t id = 0;
  int strategy_k = 0;
  int image = 0;
  double payoff = 0.0;
};

/// Defaults follow the classic image-scoring setup.
struct ImageGameParams {
  std::size_t population = 100;
  std::size_t rounds = 10000;
  double benefit = 1.0;
  double cost = 0.1;
  Pairing pairing = Pairing::AdjacentNeighbor;
  std::size_t swap_pairs = 0;   // per round
  double perception_noise = 0.0;  // a_p
  double action_noise = 0.0;      // a_e
  int image_min = -5;
  int image_max = 5;
  int strategy_min = -5;
  int strategy_max = 6;
  int initial_image = 0;

  void validate() const {
    if (population < 3) throw std::invalid_argument("image game needs at least 3 agents");
    if (!(cost < benefit)) throw std::invalid_argument("cost must be smaller than benefit");
    if (!(perception_noise >= 0.0 && perception_noise <= 1.0)) {
      throw std::invalid_argument("perception noise must be in [0, 1]");
    }
    if (!(action_noise >= 0.0 && action_noise <= 1.0)) throw std::invalid_argument("action noise must be in [0, 1]");
    if (image_min > image_max) throw std::invalid_argument("empty image range");
    if (strategy_min > strategy_max) throw std::invalid_argument("empty strategy range");
    if (initial_image < image_min || initial_image > image_max) {
      throw std::invalid_argument("initial image outside image range");
    }
  }
};

/// Agents by lattice position plus the generator that drives them.
class ImageGame {
 public:
  /// Strategies are drawn uniformly from [strategy_min, strategy_max].
  ImageGame(ImageGameParams params, std::uint64_t seed) : params_(params), rng_(seed) {
    params_.validate();
    agents_.resize(params_.population);
    const auto span = static_cast<std::uint64_t>(params_.strategy_max - params_.strategy_min + 1);
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      agents_[i].id = i;
      agents_[i].strategy_k = params_.strategy_min + static_cast<int>(rng_.below(span));
      agents_[i].image = params_.initial_image;
    }
  }

  ImageGame(ImageGameParams params, std::vector<ScoredAgent> agents, std::uint64_t seed)
      : params_(params), rng_(seed), agents_(std::move(agents)) {
    params_.validate();
    if (agents_.size() != params_.population) throw std::invalid_argument("agent count does not match population");
  }

  const ImageGameParams& params() const { return params_; }
  const std::vector<ScoredAgent>& agents() const { return agents_; }
  std::size_t donations() const { return donations_; }
  std::size_t rounds_played() const { return rounds_; }

  void play_round() {
    const std::size_t m = agents_.size();
    const std::size_t donor_pos = rng_.index(m);
    std::size_t recipient_pos;
    if (params_.pairing == Pairing::AdjacentNeighbor) {
      recipient_pos = rng_.bernoulli(0.5) ? (donor_pos + 1) % m : (donor_pos + m - 1) % m;
    } else {
      recipient_pos = rng_.index(m - 1);
      if (recipient_pos >= donor_pos) ++recipient_pos;
    }

    auto& donor = agents_[donor_pos];
    auto& recipient = agents_[recipient_pos];
    bool give = recipient.image >= donor.strategy_k;
    if (rng_.bernoulli(params_.perception_noise)) give = !give;

    if (give) {
      donor.payoff -= params_.cost;
      recipient.payoff += params_.benefit;
      ++donations_;
      donor.image += rng_.bernoulli(params_.action_noise) ? -1 : 1;
    } else {
      donor.image -= 1;
    }
    donor.image = std::clamp(donor.image, params_.image_min, params_.image_max);

    for (std::size_t k = 0; k < params_.swap_pairs; ++k) {
      const std::size_t i = rng_.index(m);
      std::size_t j = rng_.index(m - 1);
      if (j >= i) ++j;
      std::swap(agents_[i], agents_[j]);
    }
    ++rounds_;
  }

  void play(std::size_t rounds) {
    for (std::size_t r = 0; r < rounds; ++r) play_round();
  }

 private:
  ImageGameParams params_;
  Rng rng_;
  std::vector<ScoredAgent> agents_;
  std::size_t donations_ = 0;
  std::size_t rounds_ = 0;
};

inline double average_payoff(const std::vector<ScoredAgent>& agents) {
  if (agents.empty()) return 0.0;
  double total = 0.0;
  for (const auto& a : agents) total += a.payoff;
  return total / static_cast<double>(agents.size());
}

inline double average_payoff(const ImageGame& game) { return average_payoff(game.agents()); }

/// Plays params.rounds rounds from a fresh population; returns the mean payoff.
inline double run_image_game(const ImageGameParams& params, std::uint64_t seed) {
  ImageGame game(params, seed);
  game.play(params.rounds);
  return average_payoff(game);
}

}  // namespace donation_ca::imagescore

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "donation_ca/engine.hpp"
#include "donation_ca/metrics.hpp"
#include "oracle.hpp"

using namespace donation_ca;

namespace {

std::vector<Reputation> states(std::initializer_list<int> bits) {
  std::vector<Reputation> out;
  for (int b : bits) out.push_back(b ? Reputation::High : Reputation::Low);
  return out;
}

std::vector<std::uint8_t> row_of(const std::vector<Reputation>& s) {
  std::vector<std::uint8_t> out;
  for (auto r : s) out.push_back(static_cast<std::uint8_t>(r));
  return out;
}

StrategyDescriptor descriptor_for(unsigned rule) {
  if (rule == 255) return kAltruist;
  for (const auto& d : kCurated) {
    if (derive_rule_table(d).number() == rule) return d;
  }
  throw std::logic_error("not a curated rule");
}

std::vector<StrategyDescriptor> rules_under_test() {
  auto list = curated_strategies();
  list.push_back(kAltruist);
  return list;
}

/// Random strategy mix, states and parameters for property tests.
struct RandomScenario {
  std::size_t n;
  std::vector<Strategy> strategies;
  WorldParams params;
  std::uint64_t seed;
};

RandomScenario random_scenario(Rng& g) {
  RandomScenario s;
  s.n = 2 * (2 + g.index(20));
  for (std::size_t i = 0; i < s.n; ++i) {
    if (g.bernoulli(0.2)) s.strategies.emplace_back(kAltruist);
    else s.strategies.emplace_back(kCurated[g.index(kCurated.size())]);
  }
  s.params.noise.perception = g.bernoulli(0.5) ? g.uniform() : 0.0;
  s.params.noise.action = g.bernoulli(0.5) ? g.uniform() : 0.0;
  s.params.mobility.swap_pairs = g.index(s.n + 1);
  s.params.mobility.directed = g.bernoulli(0.5);
  s.params.fatigue_limit = static_cast<unsigned>(g.index(4));
  s.seed = g.next();
  return s;
}

}  // namespace

TEST(InitWorld, DeterministicPatterns) {
  const std::vector<Strategy> igb{kCurated[0]};
  EXPECT_EQ(World(5, init::SingleHighCenter{}, igb, {}, 0).site_states(), row_of(states({0, 0, 1, 0, 0})));
  EXPECT_EQ(World(4, init::Checkerboard{}, igb, {}, 0).site_states(), row_of(states({1, 0, 1, 0})));
  EXPECT_EQ(World(3, init::Explicit{states({1, 1, 0})}, igb, {}, 0).site_states(), row_of(states({1, 1, 0})));
}

TEST(InitWorld, AgentsStartClean) {
  World w(10, init::RandomUniform{}, {kCurated[6]}, {}, 3);
  for (std::size_t p = 0; p < w.size(); ++p) {
    const auto& a = w.at(p);
    EXPECT_EQ(a.id, p);
    EXPECT_EQ(a.fatigue_streak, 0u);
    EXPECT_EQ(a.donations_received, 0.0);
    EXPECT_EQ(a.donations_made, 0.0);
  }
  EXPECT_EQ(w.iteration(), 0u);
}

TEST(InitWorld, RandomUniformIsRoughlyHalf) {
  World w(20000, init::RandomUniform{}, {kCurated[0]}, {}, 99);
  const auto s = w.site_states();
  const double frac = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  EXPECT_NEAR(frac, 0.5, 0.02);
}

TEST(InitWorld, Errors) {
  const std::vector<Strategy> igb{kCurated[0]};
  EXPECT_THROW(World(2, init::Checkerboard{}, igb, {}, 0), std::invalid_argument);
  EXPECT_THROW(World(4, init::Explicit{states({1, 0})}, igb, {}, 0), std::invalid_argument);
  EXPECT_THROW(World(4, init::Checkerboard{}, std::vector<Strategy>(3, kCurated[0]), {}, 0), std::invalid_argument);
  WorldParams directed;
  directed.mobility.directed = true;
  EXPECT_THROW(World(5, init::Checkerboard{}, igb, directed, 0), std::invalid_argument);
  WorldParams too_many;
  too_many.mobility.swap_pairs = 5;
  EXPECT_THROW(World(4, init::Checkerboard{}, igb, too_many, 0), std::invalid_argument);
  too_many.swap_cap = 10;
  EXPECT_NO_THROW(World(4, init::Checkerboard{}, igb, too_many, 0));
  WorldParams bad_noise;
  bad_noise.noise.perception = 1.5;
  EXPECT_THROW(World(4, init::Checkerboard{}, igb, bad_noise, 0), std::invalid_argument);
}

TEST(Step, Rule50Checkerboard) {
  World w(4, init::Explicit{states({1, 0, 1, 0})}, {descriptor_for(50)}, {}, 0);
  const auto rec = w.step();
  EXPECT_EQ(rec.site_states, row_of(states({0, 1, 0, 1})));
  EXPECT_EQ(w.iteration(), 1u);
}

TEST(Step, Rule251AllLowBecomesAllHigh) {
  World w(5, init::Explicit{states({0, 0, 0, 0, 0})}, {descriptor_for(251)}, {}, 0);
  EXPECT_EQ(w.step().site_states, row_of(states({1, 1, 1, 1, 1})));
}

TEST(Step, ActionNoiseOneRecordsLowButDelivers) {
  for (const auto& desc : rules_under_test()) {
    WorldParams p;
    p.noise.action = 1.0;
    World w(12, init::RandomUniform{}, {desc}, p, 5);
    const auto rec = w.step();
    for (auto s : rec.site_states) EXPECT_EQ(s, 0);
    const double received = std::accumulate(rec.received.begin(), rec.received.end(), 0.0);
    const double donors = std::accumulate(rec.donated.begin(), rec.donated.end(), 0.0);
    EXPECT_EQ(received, donors) << to_string(desc);
  }
}

TEST(Step, RecipientsKeepTheirState) {
  // FS donor (Low) gives to its High right neighbor; the High agents never
  // donate under FS, so they turn Low purely from their own abstention.
  World w(3, init::Explicit{states({0, 1, 1})}, {descriptor_for(34)}, {}, 0);
  const auto rec = w.step();
  EXPECT_EQ(rec.received[1], 1.0);
  EXPECT_EQ(rec.donated[0], 1);
  EXPECT_EQ(rec.site_states, row_of(states({1, 0, 0})));
}

TEST(Step, SplitDonationsCreditHalves) {
  World w(3, init::Explicit{states({0, 0, 0})}, std::vector<Strategy>{RuleTable::from_number(0), kAltruist, RuleTable::from_number(0)}, {}, 0);
  const auto rec = w.step();
  EXPECT_EQ(rec.received[0], 0.5);
  EXPECT_EQ(rec.received[2], 0.5);
  EXPECT_EQ(rec.received[1], 0.0);
  EXPECT_EQ(w.at(1).donations_made, 1.0);
}

TEST(DirectedShift, HandPermutations) {
  std::vector<char> six{'a', 'b', 'c', 'd', 'e', 'f'};
  apply_directed_shift(six);
  EXPECT_EQ(six, (std::vector<char>{'e', 'b', 'a', 'd', 'c', 'f'}));
  std::vector<char> four{'a', 'b', 'c', 'd'};
  apply_directed_shift(four);
  EXPECT_EQ(four, (std::vector<char>{'c', 'b', 'a', 'd'}));

  const auto perm = directed_shift(6);
  EXPECT_EQ(perm, (std::vector<std::size_t>{2, 1, 4, 3, 0, 5}));
  EXPECT_THROW(directed_shift(5), std::invalid_argument);
}

TEST(DirectedShift, GroupOrderIsHalfN) {
  for (std::size_t n : {4u, 6u, 10u, 32u}) {
    std::vector<std::size_t> cells(n);
    std::iota(cells.begin(), cells.end(), 0);
    const auto original = cells;
    for (std::size_t k = 1; k <= n / 2; ++k) {
      apply_directed_shift(cells);
      for (std::size_t p = 0; p < n; p += 2) EXPECT_EQ(cells[(p + 2 * k) % n], original[p]);
      for (std::size_t p = 1; p < n; p += 2) EXPECT_EQ(cells[p], original[p]);
      if (k < n / 2) {
        EXPECT_NE(cells, original);
      }
    }
    EXPECT_EQ(cells, original);
  }
}

TEST(Step, DirectedShiftMovesStatesAfterUpdate) {
  // Rule 255 makes every state High, so use raw rule 204 (identity: next = C)
  // to watch the shift alone.
  WorldParams p;
  p.mobility.directed = true;
  World w(6, init::Explicit{states({1, 0, 0, 0, 0, 0})}, {RuleTable::from_number(204)}, p, 0);
  EXPECT_EQ(w.step().site_states, row_of(states({0, 0, 1, 0, 0, 0})));
  EXPECT_EQ(w.at(2).id, 0u);
  EXPECT_EQ(w.at(0).id, 4u);
}

TEST(Run, HistoryShapeAndTrivialRules) {
  World w(9, init::RandomUniform{}, {kAltruist}, {}, 11);
  const auto h = w.run(3);
  EXPECT_EQ(h.site_matrix.rows(), 4u);
  EXPECT_EQ(h.received.rows(), 3u);
  for (std::size_t t = 1; t <= 3; ++t)
    for (auto s : h.site_matrix.row(t)) EXPECT_EQ(s, 1);

  World zero(9, init::RandomUniform{}, {RuleTable::from_number(0)}, {}, 11);
  const auto hz = zero.run(3);
  for (std::size_t t = 1; t <= 3; ++t)
    for (auto s : hz.site_matrix.row(t)) EXPECT_EQ(s, 0);
  EXPECT_THROW(zero.run(0), std::invalid_argument);
}

TEST(Run, Rule50CheckerboardAlternates) {
  World w(100, init::Checkerboard{}, {descriptor_for(50)}, {}, 0);
  const auto counts = agent_reputation_counts(w.run(300));
  for (auto c : counts) EXPECT_EQ(c, 150u);
}

TEST(Run, OracleEquivalenceExhaustiveSmallLattices) {
  for (const auto& desc : rules_under_test()) {
    const unsigned rule = derive_rule_table(desc).number();
    for (std::size_t n = 3; n <= 12; ++n) {
      for (std::uint64_t pattern = 0; pattern < (1ull << n); ++pattern) {
        auto init_row = oracle::bits_of(pattern, n);
        std::vector<Reputation> init_states;
        for (auto b : init_row) init_states.push_back(static_cast<Reputation>(b));
        World w(n, init::Explicit{init_states}, {desc}, {}, pattern);
        const auto h = w.run(32);
        const auto expected = oracle::ca_run(init_row, rule, 32);
        for (std::size_t t = 0; t <= 32; ++t) {
          const auto got = h.site_matrix.row(t);
          ASSERT_TRUE(std::equal(got.begin(), got.end(), expected[t].begin()))
              << "rule " << rule << " n " << n << " pattern " << pattern << " t " << t;
        }
      }
    }
  }
}

TEST(Run, OracleEquivalenceRandomLargerLattices) {
  Rng g(2024);
  for (const auto& desc : rules_under_test()) {
    const unsigned rule = derive_rule_table(desc).number();
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t n = 13 + g.index(52);
      World w(n, init::RandomUniform{}, {desc}, {}, g.next());
      const auto first = w.site_states();
      const auto h = w.run(40);
      const auto expected = oracle::ca_run(first, rule, 40);
      for (std::size_t t = 0; t <= 40; ++t) {
        const auto got = h.site_matrix.row(t);
        ASSERT_TRUE(std::equal(got.begin(), got.end(), expected[t].begin())) << rule << " n " << n;
      }
    }
  }
}

TEST(Run, RawTablesMatchOracleForEveryRuleNumber) {
  Rng g(7);
  for (unsigned rule = 0; rule < 256; ++rule) {
    World w(31, init::RandomUniform{}, {RuleTable::from_number(rule)}, {}, g.next());
    const auto first = w.site_states();
    const auto h = w.run(20);
    const auto expected = oracle::ca_run(first, rule, 20);
    for (std::size_t t = 0; t <= 20; ++t) {
      const auto got = h.site_matrix.row(t);
      ASSERT_TRUE(std::equal(got.begin(), got.end(), expected[t].begin())) << rule;
    }
  }
}

TEST(Properties, ConservationPermutationFatigueOnRandomScenarios) {
  Rng g(31337);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_scenario(g);
    World w(s.n, init::RandomUniform{}, s.strategies, s.params, s.seed);
    const auto h = w.run(25);

    std::vector<unsigned> streak(s.n, 0);
    for (std::size_t t = 0; t < h.steps(); ++t) {
      const auto rec = h.received.row(t);
      const auto don = h.donated.row(t);
      const double received = std::accumulate(rec.begin(), rec.end(), 0.0);
      const double donors = std::accumulate(don.begin(), don.end(), 0.0);
      ASSERT_EQ(received, donors);

      // Site row is a relabelling of the agent row.
      auto site = std::vector<std::uint8_t>(h.site_matrix.row(t + 1).begin(), h.site_matrix.row(t + 1).end());
      auto agent = std::vector<std::uint8_t>(h.agent_states.row(t + 1).begin(), h.agent_states.row(t + 1).end());
      std::sort(site.begin(), site.end());
      std::sort(agent.begin(), agent.end());
      ASSERT_EQ(site, agent);

      // A High state needs a donation; without action noise a donation gives High.
      for (std::size_t id = 0; id < s.n; ++id) {
        const auto st = h.agent_states(t + 1, id);
        if (st) {
          ASSERT_EQ(don[id], 1);
        }
        if (s.params.noise.action == 0.0 && don[id]) {
          ASSERT_EQ(st, 1);
        }
        streak[id] = don[id] ? streak[id] + 1 : 0;
        if (s.params.fatigue_limit > 0) {
          ASSERT_LE(streak[id], s.params.fatigue_limit);
        }
      }
    }

    std::vector<std::size_t> ids;
    for (const auto& a : w.cells()) ids.push_back(a.id);
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i) ASSERT_EQ(ids[i], i);

    double made = 0, got = 0;
    for (const auto& a : w.cells()) {
      made += a.donations_made;
      got += a.donations_received;
    }
    ASSERT_EQ(made, got);
  }
}

TEST(Properties, MobilityOnlyPermutesAgents) {
  Rng g(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 * (2 + g.index(20));
    WorldParams p;
    p.mobility.swap_pairs = g.index(n + 1);
    p.mobility.directed = g.bernoulli(0.5);
    // Raw 204 is the identity rule, so only mobility changes positions.
    World w(n, init::RandomUniform{}, {RuleTable::from_number(204)}, p, g.next());
    std::map<std::size_t, Reputation> before;
    for (const auto& a : w.cells()) before[a.id] = a.state;
    w.advance(5);
    std::map<std::size_t, Reputation> after;
    for (const auto& a : w.cells()) after[a.id] = a.state;
    ASSERT_EQ(before, after);
  }
}

TEST(Properties, DeterministicForSameSeed) {
  Rng g(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_scenario(g);
    World a(s.n, init::RandomUniform{}, s.strategies, s.params, s.seed);
    World b(s.n, init::RandomUniform{}, s.strategies, s.params, s.seed);
    ASSERT_EQ(a.run(30), b.run(30));
  }
}

TEST(Properties, ZeroNoiseMatchesNoiseFreeWorld) {
  // Explicit zero noise must not perturb the swap stream or the outcome.
  WorldParams p;
  p.mobility.swap_pairs = 7;
  World a(40, init::RandomUniform{}, {kCurated[3]}, p, 123);
  p.noise = {0.0, 0.0};
  World b(40, init::RandomUniform{}, {kCurated[3]}, p, 123);
  EXPECT_EQ(a.run(50), b.run(50));
}

TEST(Fatigue, LimitForcesAbstention) {
  WorldParams p;
  p.fatigue_limit = 3;
  World w(8, init::RandomUniform{}, {kAltruist}, p, 0);
  const auto h = w.run(12);
  // Altruists donate three times then rest once.
  for (std::size_t t = 0; t < 12; ++t) {
    for (std::size_t id = 0; id < 8; ++id) EXPECT_EQ(h.donated(t, id), (t % 4 == 3) ? 0 : 1) << t;
  }
}

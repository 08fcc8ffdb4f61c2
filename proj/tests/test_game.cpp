// Copyright 2026 The dop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "dop/game.hpp"
#include "dop/mechanisms.hpp"
#include "dop/systems.hpp"
#include "oracle.hpp"

namespace dop {
namespace {

using testing::OracleKind;

TEST(PowerDistribution, RejectsInvalidInputs) {
  EXPECT_THROW(PowerDistribution({}), InvalidArgument);
  EXPECT_THROW(PowerDistribution({0.5, 0.25, 0.25}), InvalidArgument);
  EXPECT_THROW(PowerDistribution({0.3, 0.3, 0.3}), InvalidArgument);
  EXPECT_THROW(PowerDistribution({0.0, 1.0 / 3, 1.0 / 3, 1.0 / 3}),
               InvalidArgument);
  EXPECT_NO_THROW(PowerDistribution({1.0 / 3, 1.0 / 3, 1.0 / 3}));
}

TEST(PowerDistribution, FillersRespectCap) {
  const auto d = PowerDistribution::with_fillers(0.01, 0.01);
  ASSERT_EQ(d.size(), 5u);
  EXPECT_DOUBLE_EQ(d[2], 0.98 / 3);
  const auto e = PowerDistribution::with_fillers(1.0 / 6, 1.0 / 6);
  EXPECT_EQ(e.size(), 4u);
  const auto f = PowerDistribution::with_fillers(1.0 / 3, 1.0 / 3);
  EXPECT_EQ(f.size(), 3u);
}

TEST(LeaderProbability, IsThePowerEntry) {
  EXPECT_DOUBLE_EQ(
      leader_probability(PowerDistribution({0.2, 0.3, 0.25, 0.25}), 1), 0.3);
  EXPECT_DOUBLE_EQ(
      leader_probability(PowerDistribution({1.0 / 3, 1.0 / 3, 1.0 / 3}), 0),
      1.0 / 3);
  EXPECT_DOUBLE_EQ(
      leader_probability(PowerDistribution({0.1, 0.3, 0.3, 0.3}), 0), 0.1);
  EXPECT_THROW(leader_probability(PowerDistribution({0.1, 0.3, 0.3, 0.3}), 4),
               InvalidArgument);
}

TEST(StrategyProfile, Invariants) {
  EXPECT_THROW(StrategyProfile::omission(1, 1), InvalidArgument);
  EXPECT_THROW(StrategyProfile::attack(AttackKind::kHonest, 0, 1),
               InvalidArgument);
  const auto h = StrategyProfile::honest();
  EXPECT_FALSE(h.attacker().has_value());
  EXPECT_FALSE(h.victim().has_value());
  const auto c = StrategyProfile::combined(0, 2);
  EXPECT_TRUE(c.omits_as_leader());
  EXPECT_TRUE(c.delays_as_voter());
}

TEST(IncludedPower, ExclusionRule) {
  const PowerDistribution d({0.1, 0.3, 0.3, 0.3});
  for (PlayerIndex l = 0; l < 4; ++l) {
    EXPECT_EQ(included_power(d, StrategyProfile::honest(), l), 1.0);
  }
  // Omission(j -> i) with j leading drops i.
  EXPECT_DOUBLE_EQ(included_power(d, StrategyProfile::omission(1, 0), 1), 0.9);
  EXPECT_EQ(included_power(d, StrategyProfile::omission(1, 0), 0), 1.0);
  // Delay(i -> j) with j leading drops i.
  EXPECT_DOUBLE_EQ(included_power(d, StrategyProfile::delay(0, 1), 1), 0.9);
  EXPECT_EQ(included_power(d, StrategyProfile::delay(0, 1), 0), 1.0);
  const auto c = StrategyProfile::combined(0, 1);
  EXPECT_DOUBLE_EQ(included_power(d, c, 0), 0.7);
  EXPECT_DOUBLE_EQ(included_power(d, c, 1), 0.9);
  EXPECT_EQ(included_power(d, c, 2), 1.0);
  EXPECT_THROW(included_power(d, c, 7), InvalidArgument);
}

TEST(ExpectedUtility, HonestSimpleReward) {
  const PowerDistribution d({0.1, 0.3, 0.3, 0.3});
  const auto r = simple_reward({1.0, 1.0});
  EXPECT_NEAR(expected_utility(d, StrategyProfile::honest(), r, 0), 0.2,
              1e-15);
  // P(1+b)R for every player.
  EXPECT_NEAR(expected_utility(d, StrategyProfile::honest(), r, 2), 0.6,
              1e-15);
}

TEST(ExpectedUtility, HonestMatchesTwoTermFormula) {
  std::mt19937_64 rng(7);
  const auto cosmos = cosmos_reward({0.7, 0.4, 0.3, 2.0});
  for (int trial = 0; trial < 50; ++trial) {
    const PowerDistribution d(testing::random_powers(rng));
    for (PlayerIndex p = 0; p < d.size(); ++p) {
      const double direct = d[p] * cosmos({true, true, d[p], 1.0}) +
                            (1 - d[p]) * cosmos({false, true, d[p], 1.0});
      EXPECT_NEAR(expected_utility(d, StrategyProfile::honest(), cosmos, p),
                  direct, 1e-12);
    }
  }
}

TEST(ExpectedUtility, CosmosHonestIsStakeShare) {
  const PowerDistribution d({0.1, 0.2, 0.3, 0.2, 0.2});
  for (double t : {0.0, 0.5, 2.0 / 3}) {
    for (double a : {0.0, 0.5, 0.9}) {
      for (double b : {0.0, 0.05, 0.5}) {
        const auto r = cosmos_reward({t, a, b, 1.0});
        for (PlayerIndex p = 0; p < d.size(); ++p) {
          EXPECT_NEAR(expected_utility(d, StrategyProfile::honest(), r, p),
                      d[p], 1e-15);
        }
      }
    }
  }
}

TEST(ExpectedUtility, RejectsProfileOutsideGame) {
  const PowerDistribution d({1.0 / 3, 1.0 / 3, 1.0 / 3});
  const auto r = simple_reward({});
  EXPECT_THROW(expected_utility(d, StrategyProfile::omission(0, 5), r, 0),
               InvalidArgument);
  EXPECT_THROW(expected_utility(d, StrategyProfile::honest(), r, 3),
               InvalidArgument);
}

TEST(UtilitiesUnderProfile, Shapes) {
  const PowerDistribution equal({1.0 / 3, 1.0 / 3, 1.0 / 3});
  const auto simple = simple_reward({0.5, 1.0});
  const auto u =
      utilities_under_profile(equal, StrategyProfile::honest(), simple);
  ASSERT_EQ(u.size(), 3u);
  EXPECT_DOUBLE_EQ(u[0], u[1]);
  EXPECT_DOUBLE_EQ(u[1], u[2]);

  const PowerDistribution d({0.2, 0.1, 0.25, 0.25, 0.2});
  const auto om = utilities_under_profile(d, StrategyProfile::omission(0, 1),
                                          simple_reward({1.0, 1.0}));
  const auto honest = utilities_under_profile(d, StrategyProfile::honest(),
                                              simple_reward({1.0, 1.0}));
  // Victim's utility drops; nobody else except the attacker changes.
  EXPECT_LT(om[1], honest[1]);
  for (PlayerIndex p = 2; p < d.size(); ++p) {
    EXPECT_NEAR(om[p], honest[p], 1e-15);
    EXPECT_GT(om[p], om[1]);
  }
}

struct NamedReward {
  std::string name;
  RewardFunction reward;
  testing::OracleReward oracle;
};

std::vector<NamedReward> catalog() {
  return {
      {"simple", simple_reward({0.7, 1.5}), testing::oracle_simple(0.7, 1.5)},
      {"threshold", threshold_reward({2.0 / 3, {0.3, 1.0}}),
       testing::oracle_threshold(2.0 / 3, 0.3)},
      {"scaling", scaling_reward({0.4, 1.0}), testing::oracle_scaling(0.4)},
      {"window", window_reward({0.6, 4, {0.2, 1.0}}),
       testing::oracle_window(0.6, 0.2)},
      {"base", base_reward({0.8, {0.1, 1.0}}), testing::oracle_base(0.8, 0.1)},
      {"cosmos", cosmos_reward({2.0 / 3, 0.9, 0.05, 1.0}),
       testing::oracle_cosmos(2.0 / 3, 0.9, 0.05)},
      {"ethereum", ethereum_reward({}), testing::oracle_ethereum(0.781, 0.125)},
  };
}

// The analytic case grouping agrees with summing over every leader.
TEST(ExpectedUtility, MatchesBruteForceOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto rewards = catalog();
  for (int trial = 0; trial < 200; ++trial) {
    const auto powers = testing::random_powers(rng);
    const PowerDistribution d(powers);
    const int n = static_cast<int>(powers.size());
    const int a = static_cast<int>(rng() % n);
    const int v = (a + 1 + static_cast<int>(rng() % (n - 1))) % n;
    const double s_lead = unit(rng);
    const double s_other = unit(rng) * 0.1;
    const auto& nr = rewards[trial % rewards.size()];
    for (auto [kind, okind] :
         {std::pair{AttackKind::kOmission, OracleKind::kOmission},
          std::pair{AttackKind::kDelay, OracleKind::kDelay},
          std::pair{AttackKind::kCombined, OracleKind::kCombined}}) {
      const auto profile = StrategyProfile::attack(kind, a, v);
      for (int p = 0; p < n; ++p) {
        EXPECT_NEAR(
            expected_utility(d, profile, nr.reward, p,
                             OmissionSuccess{s_lead, s_other}),
            testing::oracle_utility(powers, nr.oracle, okind, a, v, p, s_lead,
                                    s_other),
            1e-12)
            << nr.name << " kind " << to_string(kind);
      }
    }
    for (int p = 0; p < n; ++p) {
      EXPECT_NEAR(
          expected_utility(d, StrategyProfile::honest(), nr.reward, p),
          testing::oracle_utility(powers, nr.oracle, OracleKind::kHonest, -1,
                                  -1, p),
          1e-12);
    }
  }
}

// Omission(j -> i) and Delay(i -> j) remove the same vote in the same rounds.
TEST(ExpectedUtility, OmissionAndDelayUtilitiesCoincide) {
  std::mt19937_64 rng(13);
  for (const auto& nr : catalog()) {
    for (int trial = 0; trial < 40; ++trial) {
      const PowerDistribution d(testing::random_powers(rng));
      const PlayerIndex j = rng() % d.size();
      const PlayerIndex i = (j + 1 + rng() % (d.size() - 1)) % d.size();
      for (PlayerIndex r = 0; r < d.size(); ++r) {
        EXPECT_NEAR(
            expected_utility(d, StrategyProfile::omission(j, i), nr.reward, r),
            expected_utility(d, StrategyProfile::delay(i, j), nr.reward, r),
            1e-12)
            << nr.name;
      }
    }
  }
}

TEST(ExpectedUtility, CosmosConservesBudget) {
  std::mt19937_64 rng(17);
  const auto r = cosmos_reward({2.0 / 3, 0.9, 0.05, 3.0});
  for (int trial = 0; trial < 100; ++trial) {
    const PowerDistribution d(testing::random_powers(rng));
    const PlayerIndex a = rng() % d.size();
    const PlayerIndex v = (a + 1 + rng() % (d.size() - 1)) % d.size();
    for (auto kind : {AttackKind::kOmission, AttackKind::kDelay,
                      AttackKind::kCombined}) {
      const auto u =
          utilities_under_profile(d, StrategyProfile::attack(kind, a, v), r);
      double sum = 0.0;
      for (double x : u.values) sum += x;
      EXPECT_NEAR(sum, 3.0, 1e-12);
    }
  }
}

TEST(ExpectedUtility, ExclusionNeverHelpsTheVictim) {
  std::mt19937_64 rng(19);
  for (const auto& nr : catalog()) {
    for (int trial = 0; trial < 40; ++trial) {
      const PowerDistribution d(testing::random_powers(rng));
      const PlayerIndex a = rng() % d.size();
      const PlayerIndex v = (a + 1 + rng() % (d.size() - 1)) % d.size();
      const double honest =
          expected_utility(d, StrategyProfile::honest(), nr.reward, v);
      EXPECT_LE(
          expected_utility(d, StrategyProfile::omission(a, v), nr.reward, v),
          honest + 1e-15)
          << nr.name;
      // Under delay the excluded vote is the attacker's own.
      EXPECT_LE(
          expected_utility(d, StrategyProfile::delay(a, v), nr.reward, a),
          expected_utility(d, StrategyProfile::honest(), nr.reward, a) + 1e-15)
          << nr.name;
    }
  }
}

TEST(ExpectedUtility, HonestUtilityIsPowerProportional) {
  std::mt19937_64 rng(23);
  for (const auto& nr : catalog()) {
    const PowerDistribution d(testing::random_powers(rng));
    EXPECT_TRUE(honest_utility_is_power_proportional(d, nr.reward)) << nr.name;
  }
  // A flat per-player reward is not.
  RewardFunction flat([](const RewardInputs&) { return 1.0; });
  EXPECT_FALSE(honest_utility_is_power_proportional(
      PowerDistribution({0.2, 0.3, 0.25, 0.25}), flat));
}

}  // namespace
}  // namespace dop

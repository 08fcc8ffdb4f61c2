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

#include <cmath>

#include "dop/analysis.hpp"

namespace dop {
namespace {

TEST(PowerGrid, Shape) {
  const auto g = power_grid(0.01);
  EXPECT_EQ(g.size(), 34u);
  EXPECT_DOUBLE_EQ(g.front(), 0.01);
  EXPECT_DOUBLE_EQ(g[32], 0.33);
  EXPECT_DOUBLE_EQ(g.back(), kPowerCap);
  EXPECT_THROW(power_grid(0.0), InvalidArgument);
  const auto a = default_attacker_grid();
  EXPECT_DOUBLE_EQ(a.front(), 0.01);
  EXPECT_DOUBLE_EQ(a.back(), kPowerCap);
  EXPECT_EQ(a.size(), 66u);
}

TEST(Sweep, CosmosZeroCrossing) {
  const auto table = sweep(CosmosParams{}, {AttackKind::kOmission},
                           power_grid(0.01), {0.05, 0.15, 0.25});
  ASSERT_EQ(table.rows.size(), 34u * 3);
  for (const auto& row : table.rows) {
    ASSERT_TRUE(row.cost_defined);
    if (row.attacker_power <= 0.13 + 1e-12) {
      EXPECT_GT(row.cost, 0.0) << row.attacker_power;
    } else if (row.attacker_power >= 0.14 - 1e-12) {
      EXPECT_LT(row.cost, 0.0) << row.attacker_power;
    }
  }
}

TEST(Sweep, CosmosEffectivenessFlatAlongAttackerAxis) {
  const auto table = sweep(CosmosParams{}, {AttackKind::kOmission},
                           default_attacker_grid(), {0.15});
  for (const auto& row : table.rows) {
    EXPECT_EQ(row.effectiveness, table.rows.front().effectiveness);
  }
}

TEST(Sweep, OrderAndKinds) {
  const auto table =
      sweep(EthereumParams{}, {AttackKind::kOmission, AttackKind::kDelay},
            {0.1, 0.2}, {0.05, 0.15});
  ASSERT_EQ(table.rows.size(), 8u);
  EXPECT_EQ(table.rows[0].attacker_power, 0.1);
  EXPECT_EQ(table.rows[0].victim_power, 0.05);
  EXPECT_EQ(table.rows[0].attack, AttackKind::kOmission);
  EXPECT_EQ(table.rows[1].attack, AttackKind::kDelay);
  EXPECT_EQ(table.rows[2].victim_power, 0.15);
  EXPECT_EQ(table.rows[4].attacker_power, 0.2);
  EXPECT_THROW(sweep(CosmosParams{}, {AttackKind::kCombined}, {0.1}, {0.1}),
               InvalidArgument);
}

TEST(Sweep, GenericAgreesWithClosedForm) {
  const auto closed = sweep(CosmosParams{}, {AttackKind::kOmission},
                            power_grid(0.05), {0.05, 0.25});
  const auto generic = sweep_generic(cosmos_reward({}), {AttackKind::kOmission},
                                     power_grid(0.05), {0.05, 0.25});
  ASSERT_EQ(closed.rows.size(), generic.rows.size());
  for (std::size_t k = 0; k < closed.rows.size(); ++k) {
    EXPECT_NEAR(closed.rows[k].cost, generic.rows[k].cost, 1e-9);
    EXPECT_NEAR(closed.rows[k].effectiveness, generic.rows[k].effectiveness,
                1e-9);
  }
}

TEST(Sweep, Deterministic) {
  const auto a = sweep(CosmosParams{}, {AttackKind::kOmission, AttackKind::kDelay},
                       default_attacker_grid(), default_victim_values());
  const auto b = sweep(CosmosParams{}, {AttackKind::kOmission, AttackKind::kDelay},
                       default_attacker_grid(), default_victim_values());
  EXPECT_EQ(a.rows, b.rows);
}

TEST(AggregatorSweep, MoreAggregatorsMeanMoreEffectiveness) {
  const auto table =
      aggregator_sweep(EthereumParams{}, {8, 16}, default_attacker_grid());
  ASSERT_EQ(table.rows.size() % 2, 0u);
  for (std::size_t k = 0; k < table.rows.size(); k += 2) {
    EXPECT_EQ(table.rows[k].aggregators, 8);
    EXPECT_EQ(table.rows[k + 1].aggregators, 16);
    EXPECT_LT(table.rows[k].effectiveness, table.rows[k + 1].effectiveness);
    EXPECT_EQ(table.rows[k].cost, table.rows[k + 1].cost);
  }
  const auto& last8 = table.rows[table.rows.size() - 2];
  const auto& last16 = table.rows.back();
  EXPECT_NEAR(last16.effectiveness, 0.219, 1e-3);
  EXPECT_NEAR(last8.effectiveness, 0.204108, 1e-6);
}

TEST(BonusSearch, CosmosNash) {
  const auto r = find_min_bonus_nash_cosmos(2.0 / 3, 0.9);
  ASSERT_TRUE(r.feasible);
  EXPECT_FALSE(r.used_linear_scan);
  EXPECT_GE(r.b_star, 0.138);
  EXPECT_LE(r.b_star, 0.145);
  EXPECT_NEAR(r.b_star, 1.0 / 7, 1e-4);
  EXPECT_EQ(r.criterion, BonusCriterion::kNash);
  // The largest attacker is the binding one.
  EXPECT_DOUBLE_EQ(r.worst_case_pair.first, kPowerCap);

  CosmosParams p;
  p.bonus_fraction = r.b_star;
  EXPECT_TRUE(cosmos_is_nash(p, power_grid(0.001)));
  p.bonus_fraction = r.b_star - 10 * 1e-4;
  EXPECT_FALSE(cosmos_is_nash(p, power_grid(0.001)));
}

TEST(BonusSearch, CosmosIndependentOfBaseFraction) {
  const auto a = find_min_bonus_nash_cosmos(2.0 / 3, 0.9);
  const auto b = find_min_bonus_nash_cosmos(2.0 / 3, 0.2);
  EXPECT_EQ(a.b_star, b.b_star);
  // A higher threshold reduces the bonus needed.
  const auto high = find_min_bonus_nash_cosmos(0.9, 0.9);
  ASSERT_TRUE(high.feasible);
  EXPECT_LT(high.b_star, a.b_star);
  // Root of the largest-attacker numerator: P(1-t) / (1 - P t).
  const double root = kPowerCap * 0.1 / (1 - kPowerCap * 0.9);
  EXPECT_NEAR(high.b_star, root, 1e-4);
}

TEST(BonusSearch, CosmosToleranceConsistency) {
  const auto coarse = find_min_bonus_nash_cosmos(2.0 / 3, 0.9, 1e-3);
  const auto fine = find_min_bonus_nash_cosmos(2.0 / 3, 0.9, 1e-6);
  EXPECT_NEAR(coarse.b_star, fine.b_star, 1e-3);
  EXPECT_GE(fine.b_star, 1.0 / 7 - 1e-12);
}

TEST(BonusSearch, CosmosNoBonusWorksWithFullThreshold) {
  // With a = 1 every cost is undefined: nothing is ever lost.
  const auto r = find_min_bonus_nash_cosmos(2.0 / 3, 1.0);
  EXPECT_FALSE(r.feasible);
  EXPECT_TRUE(std::isnan(r.b_star));
}

TEST(BonusSearch, EthereumBalanced) {
  const auto r = find_min_bonus_balanced_eth(0.781, 0.2);
  ASSERT_TRUE(r.feasible);
  EXPECT_GE(r.b_star, 0.180);
  EXPECT_LE(r.b_star, 0.186);
  EXPECT_NEAR(r.b_star, 0.182281, 1e-4);
  EthereumParams p;
  p.bonus_fraction = r.b_star;
  EXPECT_TRUE(eth_costs_within_band(p, 0.2, power_grid(0.001)));
  p.bonus_fraction = r.b_star - 10 * 1e-4;
  EXPECT_FALSE(eth_costs_within_band(p, 0.2, power_grid(0.001)));

  EXPECT_FALSE(find_min_bonus_balanced_eth(0.781, 0.1).feasible);
  EXPECT_TRUE(find_min_bonus_balanced_eth(0.781, 1.0).feasible);
  EXPECT_THROW(find_min_bonus_balanced_eth(0.781, 0.0), InvalidArgument);
}

TEST(BonusSearch, CriticalEpsilon) {
  const double eps = critical_epsilon_eth(0.781);
  EXPECT_GE(eps, 0.17);
  EXPECT_LE(eps, 0.21);
  EXPECT_NEAR(eps, 0.17988, 2e-4);
  EXPECT_TRUE(find_min_bonus_balanced_eth(0.781, eps).feasible);
  EXPECT_FALSE(find_min_bonus_balanced_eth(0.781, eps - 1e-3).feasible);
  EXPECT_THROW(critical_epsilon_eth(1.0), InvalidArgument);
}

TEST(BonusSearch, MinimalBonusFallsBackToScan) {
  auto wiggly = [](double b) { return b > 0.3 && !(b > 0.5 && b < 0.6); };
  auto always = [](double) { return true; };
  const auto r = detail::minimal_bonus(wiggly, always, 0.0, 1.0, 1e-3);
  EXPECT_TRUE(r.linear_scan);
  ASSERT_TRUE(r.b.has_value());
  EXPECT_NEAR(*r.b, 0.3, 2e-3);
  auto never = [](double) { return false; };
  EXPECT_FALSE(detail::minimal_bonus(never, always, 0, 1, 1e-3).b);
  EXPECT_FALSE(detail::minimal_bonus(always, never, 0, 1, 1e-3).b);
}

TEST(CosmosCostFloor, Readings) {
  CosmosParams p;
  p.bonus_fraction = 0.21;
  const auto f = cosmos_cost_floor(p, power_grid(0.01));
  EXPECT_LE(f.omission_all_pairs, f.omission_equal_powers);
  EXPECT_LE(f.delay_all_pairs, f.delay_equal_powers);
  EXPECT_GT(f.omission_all_pairs, 0.0);
}

}  // namespace
}  // namespace dop

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

// Property suites shared by the command-line `verify` command and the
// acceptance checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dop/analysis.hpp"
#include "dop/game.hpp"
#include "dop/mechanisms.hpp"
#include "dop/metrics.hpp"
#include "dop/simulator.hpp"
#include "dop/systems.hpp"

namespace dop {

// One instance of every reward function, with parameters for which the
// targeted victim is the max-loss player.  Scaling rewards need b >= 1/3 for
// that (a filler of power 1/3 otherwise loses more under delay).
inline std::vector<RewardFunction> reward_catalog() {
  return {
      simple_reward({0.5, 1.0}),
      threshold_reward({2.0 / 3, {0.2, 1.0}}),
      scaling_reward({0.5, 1.0}),
      window_reward({0.781, 6, {0.3, 1.0}}),
      base_reward({0.9, {0.3, 1.0}}),
      cosmos_reward({}),
      ethereum_reward({}),
  };
}

// Random stake split over 3..max_players players, each share in (0, 1/3].
inline PowerDistribution random_distribution(std::mt19937_64& rng,
                                             std::size_t max_players = 8) {
  std::uniform_int_distribution<std::size_t> count(3, std::max<std::size_t>(3, max_players));
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  for (;;) {
    const std::size_t n = count(rng);
    std::vector<double> w(n);
    double sum = 0.0;
    for (double& x : w) sum += (x = unit(rng));
    bool ok = true;
    for (double& x : w) {
      x /= sum;
      ok = ok && x <= kPowerCap;
    }
    if (ok) return PowerDistribution(std::move(w));
  }
}

struct VerifyReport {
  std::string suite;
  std::size_t cases = 0;
  std::size_t skipped = 0;  // cases with an undefined metric
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  // Filled by the oracle suite only.
  std::vector<double> means;
  std::vector<double> std_errors;
  std::vector<double> z_scores;
  std::map<std::string, std::size_t> skipped_by_reward;
};

namespace detail {

inline void record(VerifyReport& r, double residual) {
  ++r.cases;
  if (!(residual <= r.tolerance)) r.pass = false;
  if (std::isnan(residual)) {
    r.max_residual = residual;
  } else if (!std::isnan(r.max_residual)) {
    r.max_residual = std::max(r.max_residual, residual);
  }
}

}  // namespace detail

// Cost inversion |cost(S^l_{j->i}) cost(S^v_{i->j}) - 1| and the
// effectiveness-relation residual over every (P_i, P_j) grid pair and every
// catalog reward, without aggregation.  Pairs where either cost is undefined
// (Cosmos delay past its profitability threshold) are skipped and counted.
inline VerifyReport verify_cost_relations(double grid_step = 0.01,
                                    double tolerance = 1e-9) {
  VerifyReport report;
  report.suite = "theorems";
  report.tolerance = tolerance;
  const auto grid = power_grid(grid_step);
  for (const auto& reward : reward_catalog()) {
    for (double pi : grid) {
      for (double pj : grid) {
        const auto dist = PowerDistribution::with_fillers(pi, pj);
        try {
          const auto [omission, delay] = check_cost_inversion(dist, reward, 0, 1);
          detail::record(report, std::abs(omission * delay - 1.0));
          detail::record(report,
                         std::abs(check_effectiveness_relation(dist, reward, 0, 1)));
        } catch (const UndefinedMetric&) {
          ++report.skipped;
          ++report.skipped_by_reward[reward.name()];
        }
      }
    }
  }
  return report;
}

// Omission(j -> i) and Delay(i -> j) give every player the same utility.
inline VerifyReport verify_profile_equivalence(std::size_t configurations = 1000,
                                 std::uint64_t seed = 1,
                                 double tolerance = 1e-12) {
  VerifyReport report;
  report.suite = "lemma";
  report.tolerance = tolerance;
  std::mt19937_64 rng(seed);
  const auto catalog = reward_catalog();
  for (std::size_t k = 0; k < configurations; ++k) {
    const auto dist = random_distribution(rng);
    const auto& reward = catalog[k % catalog.size()];
    std::uniform_int_distribution<PlayerIndex> pick(0, dist.size() - 1);
    const PlayerIndex j = pick(rng);
    PlayerIndex i = pick(rng);
    while (i == j) i = pick(rng);
    const auto om =
        utilities_under_profile(dist, StrategyProfile::omission(j, i), reward);
    const auto de =
        utilities_under_profile(dist, StrategyProfile::delay(i, j), reward);
    double worst = 0.0;
    for (PlayerIndex p = 0; p < dist.size(); ++p) {
      worst = std::max(worst, std::abs(om[p] - de[p]));
    }
    detail::record(report, worst);
  }
  return report;
}

// Simple reward with b = 1 and threshold reward with b = 1 - t have omission
// cost 1 for every attacker and victim on the grid.  The threshold identity
// needs 1 - P_v >= t, i.e. t <= 2/3 for victims up to 1/3.
inline VerifyReport verify_balance(double grid_step = 0.01,
                                   double tolerance = 1e-12) {
  VerifyReport report;
  report.suite = "balance";
  report.tolerance = tolerance;
  std::vector<RewardFunction> rewards = {simple_reward({1.0, 1.0})};
  for (double t : {0.5, 0.6, 2.0 / 3}) {
    rewards.push_back(threshold_reward({t, {1.0 - t, 1.0}}));
  }
  const auto grid = power_grid(grid_step);
  for (const auto& reward : rewards) {
    for (double pa : grid) {
      for (double pv : grid) {
        const auto cost =
            attack_cost(PowerDistribution::with_fillers(pa, pv),
                        StrategyProfile::omission(0, 1), reward);
        detail::record(report, cost.defined ? std::abs(cost.value - 1.0)
                                            : std::nan(""));
      }
    }
  }
  return report;
}

struct OracleCase {
  std::string system;
  PowerDistribution dist;
  StrategyProfile profile;
  std::uint64_t seed = 0;
};

inline std::vector<OracleCase> oracle_cases(std::size_t count,
                                            std::uint64_t seed) {
  static const char* const kSystems[] = {"simple", "threshold", "scaling",
                                         "window", "base",      "cosmos",
                                         "ethereum"};
  std::mt19937_64 rng(seed);
  std::vector<OracleCase> cases;
  for (std::size_t k = 0; k < count; ++k) {
    auto dist = random_distribution(rng, 6);
    const std::string system = kSystems[k % 7];
    const auto kind = static_cast<AttackKind>(rng() % 4);
    StrategyProfile profile = StrategyProfile::honest();
    if (kind != AttackKind::kHonest) {
      // Largest player attacks, so an Ethereum attacker always holds seats.
      const auto p = dist.powers();
      const auto attacker = static_cast<PlayerIndex>(
          std::max_element(p.begin(), p.end()) - p.begin());
      PlayerIndex victim = rng() % dist.size();
      if (victim == attacker) victim = (victim + 1) % dist.size();
      profile = StrategyProfile::attack(kind, attacker, victim);
    }
    cases.push_back({system, std::move(dist), profile, rng()});
  }
  return cases;
}

inline RewardFunction catalog_reward(const std::string& system) {
  for (auto& r : reward_catalog()) {
    if (r.name() == system) return r;
  }
  throw InvalidArgument("unknown system " + system);
}

// Monte Carlo means against the analytic engine (|z| < 4 for every player),
// plus the Cosmos per-round budget to 1e-12 Rmax in every round.
inline VerifyReport verify_oracle(std::size_t count = 25,
                                  std::uint64_t rounds = 1'000'000,
                                  std::uint64_t seed = 1,
                                  double z_threshold = 4.0) {
  VerifyReport report;
  report.suite = "oracle";
  report.tolerance = z_threshold;
  const EthereumParams eth;
  for (const auto& c : oracle_cases(count, seed)) {
    const SimConfig config{c.dist, c.profile, rounds, c.seed, 0};
    SimResult sim;
    UtilityVector analytic;
    if (c.system == "ethereum") {
      OmissionSuccess success;
      if (c.profile.is_attack()) {
        success = eth.aggregators().omission_success(c.dist[*c.profile.attacker()],
                                                     true);
      }
      analytic = utilities_under_profile(c.dist, c.profile,
                                         ethereum_reward(eth), success);
      sim = simulate_ethereum(config, eth);
    } else {
      const auto reward = catalog_reward(c.system);
      analytic = utilities_under_profile(c.dist, c.profile, reward);
      if (c.system == "cosmos") {
        const double rmax = CosmosParams{}.max_reward;
        double worst = 0.0;
        sim = simulate(config, reward,
                       [&](std::uint64_t, std::span<const double> rewards) {
                         double sum = 0.0;
                         for (double x : rewards) sum += x;
                         worst = std::max(worst, std::abs(sum - rmax));
                       });
        if (!(worst <= 1e-12 * rmax)) report.pass = false;
      } else {
        sim = simulate(config, reward);
      }
    }
    const auto cmp = compare_to_closed_form(sim, analytic, z_threshold);
    ++report.cases;
    report.pass = report.pass && cmp.pass;
    report.max_residual = std::max(report.max_residual, cmp.max_abs_z);
    report.means.insert(report.means.end(), sim.mean_utility.begin(),
                        sim.mean_utility.end());
    report.std_errors.insert(report.std_errors.end(), sim.std_error.begin(),
                             sim.std_error.end());
    report.z_scores.insert(report.z_scores.end(), cmp.z_scores.begin(),
                           cmp.z_scores.end());
  }
  return report;
}

}  // namespace dop

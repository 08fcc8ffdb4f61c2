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

// Round-level Monte Carlo oracle for the expected-utility engine.
//
// Each round samples a leader with probability equal to its power, applies
// the strategy profile's exclusions and pays every player its realized
// reward.  Randomness is a counter-based generator keyed by (seed, round,
// slot), and statistics are merged over fixed-size blocks in block order,
// so results are bit-identical for any thread count.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "dop/error.hpp"
#include "dop/game.hpp"
#include "dop/mechanisms.hpp"
#include "dop/systems.hpp"

namespace dop {

struct SimConfig {
  PowerDistribution dist;
  StrategyProfile profile = StrategyProfile::honest();
  std::uint64_t rounds = 1'000'000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: DOP_THREADS, else hardware concurrency
};

struct SimResult {
  std::vector<double> mean_utility;
  std::vector<double> std_error;
  std::uint64_t rounds_run = 0;
};

// Called once per round with the realized reward vector.  Supplying one
// forces single-threaded execution.
using RoundObserver =
    std::function<void(std::uint64_t round, std::span<const double> rewards)>;

// SplitMix64 finalizer applied to a (seed, round, slot) counter.
class CounterRng {
 public:
  static constexpr std::uint64_t kSlotsPerRound = 4;

  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  std::uint64_t bits(std::uint64_t round, std::uint64_t slot) const {
    return mix(key_ ^ mix(round * kSlotsPerRound + slot));
  }

  // Uniform on [0, 1) with 53 bits.
  double uniform(std::uint64_t round, std::uint64_t slot) const {
    return static_cast<double>(bits(round, slot) >> 11) * 0x1.0p-53;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
};

// Inverse-CDF sampler for Binomial(n, q) from one uniform.
class BinomialSampler {
 public:
  BinomialSampler(int trials, double probability) {
    if (trials < 0 || !(probability >= 0.0 && probability <= 1.0)) {
      throw InvalidArgument("binomial parameters out of range");
    }
    cdf_.reserve(static_cast<std::size_t>(trials) + 1);
    if (probability == 1.0) {
      cdf_.assign(static_cast<std::size_t>(trials), 0.0);
      cdf_.push_back(1.0);
      return;
    }
    double pmf = std::pow(1.0 - probability, trials);
    const double odds = probability / (1.0 - probability);
    double acc = 0.0;
    for (int k = 0; k <= trials; ++k) {
      acc += pmf;
      cdf_.push_back(acc);
      pmf *= odds * static_cast<double>(trials - k) / (k + 1);
    }
    cdf_.back() = 1.0;
  }

  int operator()(double u) const {
    return static_cast<int>(std::upper_bound(cdf_.begin(), cdf_.end(), u) -
                            cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

namespace detail {

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DOP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Count, mean and sum of squared deviations per player.
struct BlockStats {
  std::uint64_t count = 0;
  std::vector<double> mean;
  std::vector<double> m2;
};

inline void merge_into(BlockStats& acc, const BlockStats& block) {
  if (block.count == 0) return;
  if (acc.count == 0) {
    acc = block;
    return;
  }
  const double n_a = static_cast<double>(acc.count);
  const double n_b = static_cast<double>(block.count);
  const double n = n_a + n_b;
  for (std::size_t p = 0; p < acc.mean.size(); ++p) {
    const double delta = block.mean[p] - acc.mean[p];
    acc.mean[p] += delta * n_b / n;
    acc.m2[p] += block.m2[p] + delta * delta * n_a * n_b / n;
  }
  acc.count += block.count;
}

inline constexpr std::uint64_t kBlockRounds = 1u << 14;
inline constexpr std::uint64_t kLeaderSlot = 0;
inline constexpr std::uint64_t kAttackerAggSlot = 1;
inline constexpr std::uint64_t kHonestAggSlot = 2;

// `excluded_for_round(round, leader)` returns the player whose vote is
// missing, or kNobody.
template <RewardModel R, typename Exclusion>
SimResult run_rounds(const SimConfig& config, const R& reward,
                     const Exclusion& excluded_for_round,
                     const RoundObserver& observer) {
  if (config.rounds < 1) throw InvalidArgument("rounds must be >= 1");
  config.profile.validate(config.dist);
  const std::size_t n = config.dist.size();
  std::vector<double> cumulative(n);
  double acc = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    acc += config.dist[p];
    cumulative[p] = acc;
  }
  const CounterRng rng(config.seed);

  const std::uint64_t blocks =
      (config.rounds + kBlockRounds - 1) / kBlockRounds;
  std::vector<BlockStats> stats(blocks);

  auto run_block = [&](std::uint64_t block) {
    BlockStats s;
    s.mean.assign(n, 0.0);
    s.m2.assign(n, 0.0);
    std::vector<double> rewards(n);
    const std::uint64_t begin = block * kBlockRounds;
    const std::uint64_t end = std::min(config.rounds, begin + kBlockRounds);
    for (std::uint64_t round = begin; round < end; ++round) {
      const double u = rng.uniform(round, kLeaderSlot) * cumulative.back();
      const auto leader = static_cast<PlayerIndex>(std::min<std::ptrdiff_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), u) -
              cumulative.begin(),
          static_cast<std::ptrdiff_t>(n - 1)));
      const PlayerIndex excluded = excluded_for_round(rng, round, leader);
      const double included =
          excluded == kNobody ? 1.0 : 1.0 - config.dist[excluded];
      ++s.count;
      const double count = static_cast<double>(s.count);
      for (PlayerIndex p = 0; p < n; ++p) {
        rewards[p] = static_cast<double>(reward(RewardInputs{
            p == leader, p != excluded, config.dist[p], included}));
        const double delta = rewards[p] - s.mean[p];
        s.mean[p] += delta / count;
        s.m2[p] += delta * (rewards[p] - s.mean[p]);
      }
      if (observer) observer(round, rewards);
    }
    stats[block] = std::move(s);
  };

  const unsigned threads =
      observer ? 1u
               : static_cast<unsigned>(std::min<std::uint64_t>(
                     resolve_threads(config.threads), blocks));
  if (threads <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        for (std::uint64_t b = t; b < blocks; b += threads) run_block(b);
      });
    }
    for (auto& w : workers) w.join();
  }

  BlockStats total;
  for (const auto& s : stats) merge_into(total, s);

  SimResult result;
  result.rounds_run = total.count;
  result.mean_utility = total.mean;
  result.std_error.assign(n, 0.0);
  if (total.count >= 2) {
    const double count = static_cast<double>(total.count);
    for (std::size_t p = 0; p < n; ++p) {
      result.std_error[p] =
          std::sqrt(std::max(0.0, total.m2[p]) / (count - 1.0) / count);
    }
  }
  return result;
}

}  // namespace detail

// Plain reward game: omission always succeeds when the attacker leads.
template <RewardModel R>
SimResult simulate(const SimConfig& config, const R& reward,
                   const RoundObserver& observer = {}) {
  const auto& profile = config.profile;
  auto exclusion = [&](const CounterRng&, std::uint64_t, PlayerIndex leader) {
    if (!profile.is_attack()) return detail::kNobody;
    if (profile.omits_as_leader() && leader == *profile.attacker()) {
      return *profile.victim();
    }
    if (profile.delays_as_voter() && leader == *profile.victim()) {
      return *profile.attacker();
    }
    return detail::kNobody;
  };
  return detail::run_rounds(config, reward, exclusion, observer);
}

// Ethereum round: besides the leader, samples how many of the attacker's
// round(P_a c) committee seats and of the remaining seats are aggregators
// (each seat independently with probability m / c).  An omission succeeds if
// the attacker leads and holds an aggregator, or if it holds every
// aggregator while a third party leads.  Excluded votes still earn the late
// share through the reward function.
inline SimResult simulate_ethereum(const SimConfig& config,
                                   const EthereumParams& eth,
                                   const RoundObserver& observer = {}) {
  const auto reward = ethereum_reward(eth);
  const auto& profile = config.profile;
  const auto model = eth.aggregators();
  int seats = 0;
  if (profile.is_attack()) {
    profile.validate(config.dist);
    const double pa = config.dist[*profile.attacker()];
    if (pa * eth.committee_size < 1.0 - 1e-9) {
      throw InvalidArgument("attacker must hold a committee seat");
    }
    seats = model.attacker_seats(pa);
  }
  const BinomialSampler attacker_aggs(seats, model.selection_probability());
  const BinomialSampler honest_aggs(eth.committee_size - seats,
                                    model.selection_probability());
  auto exclusion = [&](const CounterRng& rng, std::uint64_t round,
                       PlayerIndex leader) {
    if (!profile.is_attack()) return detail::kNobody;
    const PlayerIndex attacker = *profile.attacker();
    const PlayerIndex victim = *profile.victim();
    if (profile.delays_as_voter() && leader == victim) return attacker;
    if (!profile.omits_as_leader() || leader == victim) return detail::kNobody;
    const int held = attacker_aggs(rng.uniform(round, detail::kAttackerAggSlot));
    if (held == 0) return detail::kNobody;
    if (leader == attacker) return victim;
    const int others = honest_aggs(rng.uniform(round, detail::kHonestAggSlot));
    return others == 0 ? victim : detail::kNobody;
  };
  return detail::run_rounds(config, reward, exclusion, observer);
}

struct ComparisonReport {
  std::vector<double> z_scores;
  double max_abs_z = 0.0;
  bool pass = false;
};

// |mean - analytic| / std_error per player; passes when every |z| is below
// the threshold.  A deviation with zero standard error is a hard failure.
inline ComparisonReport compare_to_closed_form(const SimResult& sim,
                                               const UtilityVector& analytic,
                                               double threshold = 4.0) {
  if (sim.mean_utility.size() != analytic.size()) {
    throw InvalidArgument("player counts differ between simulation and model");
  }
  ComparisonReport report;
  report.pass = true;
  for (std::size_t p = 0; p < analytic.size(); ++p) {
    const double dev = sim.mean_utility[p] - analytic[p];
    double z = 0.0;
    if (sim.std_error[p] > 0.0) {
      z = dev / sim.std_error[p];
    } else if (std::abs(dev) > 1e-12 * std::max(1.0, std::abs(analytic[p]))) {
      z = dev > 0 ? std::numeric_limits<double>::infinity()
                  : -std::numeric_limits<double>::infinity();
    }
    report.z_scores.push_back(z);
    report.max_abs_z = std::max(report.max_abs_z, std::abs(z));
    if (!(std::abs(z) < threshold)) report.pass = false;
  }
  return report;
}

}  // namespace dop

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

// Effectiveness and cost of single-attacker deviations, epsilon-gamma
// robustness scans, and the two balance identities between vote omission and
// vote delay.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "dop/error.hpp"
#include "dop/game.hpp"

namespace dop {

// Normalizer for a player's loss in the effectiveness metric.
//   kHonestUtility - U(p, S_e), the definition.
//   kStakeShare    - P[p] * Rmax, the player's voter share.  The two agree
//                    whenever honest utility equals the stake share (e.g.
//                    budget-conserving schemes) and differ by (1 + b) for
//                    schemes that pay the leader bonus on top.
enum class LossBaseline { kHonestUtility, kStakeShare };

struct MetricOptions {
  OmissionSuccess omission{};
  LossBaseline baseline = LossBaseline::kHonestUtility;
  double max_reward = 1.0;  // only read by kStakeShare
};

struct AttackMetrics {
  double effectiveness = 0.0;
  // Attacker loss over the largest non-attacker loss.  Set whenever that
  // loss is non-zero, so a negative value can still be read as "attacker
  // loss per unit of victim gain"; only meaningful as a cost when
  // cost_defined is true.
  double cost = 0.0;
  bool cost_defined = false;
  std::optional<PlayerIndex> max_loss_player;
};

struct AttackCost {
  double value = 0.0;
  bool defined = false;
};

namespace detail {

// Losses within this relative band of zero come from summation order only.
inline constexpr double kLossSnap = 1e-13;

struct AttackLosses {
  std::vector<double> honest;
  std::vector<double> loss;
};

template <RewardModel R>
AttackLosses attack_losses(const PowerDistribution& dist,
                           const StrategyProfile& profile, const R& reward,
                           const OmissionSuccess& success) {
  if (!profile.is_attack()) {
    throw InvalidArgument("metrics require an attack profile, not honest");
  }
  profile.validate(dist);
  AttackLosses out;
  out.honest =
      utilities_under_profile(dist, StrategyProfile::honest(), reward).values;
  const auto attacked =
      utilities_under_profile(dist, profile, reward, success).values;
  double scale = 0.0;
  for (double u : out.honest) scale = std::max(scale, std::abs(u));
  out.loss.resize(dist.size());
  for (PlayerIndex p = 0; p < dist.size(); ++p) {
    const double l = out.honest[p] - attacked[p];
    out.loss[p] = std::abs(l) <= kLossSnap * std::max(scale, 1e-300) ? 0.0 : l;
  }
  return out;
}

inline double loss_baseline(const PowerDistribution& dist,
                            const AttackLosses& losses, PlayerIndex p,
                            const MetricOptions& opts) {
  return opts.baseline == LossBaseline::kHonestUtility
             ? losses.honest[p]
             : dist[p] * opts.max_reward;
}

}  // namespace detail

template <RewardModel R>
AttackMetrics evaluate_attack(const PowerDistribution& dist,
                              const StrategyProfile& profile, const R& reward,
                              const MetricOptions& opts = {}) {
  const auto losses = detail::attack_losses(dist, profile, reward, opts.omission);
  const PlayerIndex attacker = *profile.attacker();
  const double pa = dist[attacker];

  AttackMetrics m;
  m.effectiveness = -std::numeric_limits<double>::infinity();
  double max_loss = -std::numeric_limits<double>::infinity();
  for (PlayerIndex p = 0; p < dist.size(); ++p) {
    if (p == attacker) continue;
    const double base = detail::loss_baseline(dist, losses, p, opts);
    if (base == 0.0) {
      throw UndefinedMetric("player " + std::to_string(p) +
                            " has zero honest utility");
    }
    m.effectiveness = std::max(m.effectiveness, losses.loss[p] / (base * pa));
    if (losses.loss[p] > max_loss) {
      max_loss = losses.loss[p];
      m.max_loss_player = p;
    }
  }
  m.cost_defined = max_loss > 0.0;
  m.cost = max_loss != 0.0 ? losses.loss[attacker] / max_loss : 0.0;
  return m;
}

// max over p != attacker of (U(p,S_e) - U(p,S_a)) / (U(p,S_e) * P[attacker]).
template <RewardModel R>
double attack_effectiveness(const PowerDistribution& dist,
                            const StrategyProfile& profile, const R& reward,
                            const MetricOptions& opts = {}) {
  return evaluate_attack(dist, profile, reward, opts).effectiveness;
}

// (U(a,S_e) - U(a,S_a)) / max over p != a of (U(p,S_e) - U(p,S_a)).
template <RewardModel R>
AttackCost attack_cost(const PowerDistribution& dist,
                       const StrategyProfile& profile, const R& reward,
                       const MetricOptions& opts = {}) {
  const auto m = evaluate_attack(dist, profile, reward, opts);
  return AttackCost{m.cost, m.cost_defined};
}

// ---------------------------------------------------------------------------
// Robustness

struct RobustnessResult {
  double epsilon = 0.0;
  std::optional<double> gamma;
  StrategyProfile worst_effectiveness_attack = StrategyProfile::honest();
  std::optional<StrategyProfile> worst_cost_attack;
  std::size_t undefined_cost_count = 0;
  std::size_t scanned = 0;
};

using AttackPair = std::pair<PlayerIndex, PlayerIndex>;  // (attacker, victim)

inline std::vector<AttackPair> all_attack_pairs(std::size_t players) {
  std::vector<AttackPair> pairs;
  for (PlayerIndex a = 0; a < players; ++a) {
    for (PlayerIndex v = 0; v < players; ++v) {
      if (a != v) pairs.emplace_back(a, v);
    }
  }
  return pairs;
}

namespace detail {

inline auto profile_key(const StrategyProfile& s) {
  return std::make_tuple(static_cast<int>(s.kind()), s.attacker().value_or(0),
                         s.victim().value_or(0));
}

}  // namespace detail

// epsilon = max effectiveness and gamma = min defined cost over every scanned
// attack.  Ties go to the smallest (kind, attacker, victim) so the result does
// not depend on scan order.
template <RewardModel R>
RobustnessResult robustness_scan(const PowerDistribution& dist,
                                 const R& reward,
                                 const std::vector<AttackKind>& kinds,
                                 const std::vector<AttackPair>& pairs,
                                 const MetricOptions& opts = {}) {
  if (pairs.empty() || kinds.empty()) {
    throw InvalidArgument("robustness scan needs attack kinds and pairs");
  }
  RobustnessResult out;
  bool first = true;
  for (AttackKind kind : kinds) {
    for (const auto& [attacker, victim] : pairs) {
      const auto profile = StrategyProfile::attack(kind, attacker, victim);
      const auto m = evaluate_attack(dist, profile, reward, opts);
      ++out.scanned;
      if (first || m.effectiveness > out.epsilon ||
          (m.effectiveness == out.epsilon &&
           detail::profile_key(profile) <
               detail::profile_key(out.worst_effectiveness_attack))) {
        out.epsilon = m.effectiveness;
        out.worst_effectiveness_attack = profile;
        first = false;
      }
      if (!m.cost_defined) {
        ++out.undefined_cost_count;
        continue;
      }
      if (!out.gamma || m.cost < *out.gamma ||
          (m.cost == *out.gamma &&
           detail::profile_key(profile) <
               detail::profile_key(*out.worst_cost_attack))) {
        out.gamma = m.cost;
        out.worst_cost_attack = profile;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Balance identities

// (cost(S^l_{j->i}), cost(S^v_{i->j})); the two are reciprocal.
template <RewardModel R>
std::pair<double, double> check_cost_inversion(const PowerDistribution& dist,
                                               const R& reward, PlayerIndex i,
                                               PlayerIndex j,
                                               const MetricOptions& opts = {}) {
  const auto omission =
      attack_cost(dist, StrategyProfile::omission(j, i), reward, opts);
  const auto delay =
      attack_cost(dist, StrategyProfile::delay(i, j), reward, opts);
  if (!omission.defined || !delay.defined || omission.value == 0.0 ||
      delay.value == 0.0) {
    throw UndefinedMetric("cost inversion needs two defined non-zero costs");
  }
  return {omission.value, delay.value};
}

// eff(S^l_{j->i}) / eff(S^v_{i->j})
//   - cost(S^v_{i->j}) * U(p_j,S_e) P[i] / (U(p_i,S_e) P[j]),
// which vanishes for every reward function in the catalog.
template <RewardModel R>
double check_effectiveness_relation(const PowerDistribution& dist,
                                    const R& reward, PlayerIndex i,
                                    PlayerIndex j,
                                    const MetricOptions& opts = {}) {
  const auto omission =
      evaluate_attack(dist, StrategyProfile::omission(j, i), reward, opts);
  const auto delay =
      evaluate_attack(dist, StrategyProfile::delay(i, j), reward, opts);
  if (omission.effectiveness == 0.0 || delay.effectiveness == 0.0) {
    throw UndefinedMetric("effectiveness relation needs non-zero effectiveness");
  }
  if (!delay.cost_defined) {
    throw UndefinedMetric("delay cost is undefined");
  }
  double base_i = 0.0;
  double base_j = 0.0;
  if (opts.baseline == LossBaseline::kHonestUtility) {
    base_i = expected_utility(dist, StrategyProfile::honest(), reward, i);
    base_j = expected_utility(dist, StrategyProfile::honest(), reward, j);
  } else {
    base_i = dist[i] * opts.max_reward;
    base_j = dist[j] * opts.max_reward;
  }
  if (base_i == 0.0) throw UndefinedMetric("zero honest utility");
  const double power_term = base_j * dist[i] / (base_i * dist[j]);
  return omission.effectiveness / delay.effectiveness -
         delay.cost * power_term;
}

}  // namespace dop

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

// Vote collection game: players with stake-proportional leader election,
// single-attacker strategy profiles and the expected-utility engine used by
// every metric in this library.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dop/error.hpp"

namespace dop {

using PlayerIndex = std::size_t;

inline constexpr double kPowerCap = 1.0 / 3.0;
inline constexpr double kPowerSumTolerance = 1e-12;
// Slack on the cap so that shares computed as x/3 are not rejected by one ulp.
inline constexpr double kPowerCapSlack = 1e-12;

class PowerDistribution {
 public:
  explicit PowerDistribution(std::vector<double> powers)
      : powers_(std::move(powers)) {
    if (powers_.empty()) {
      throw InvalidArgument("power distribution must not be empty");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < powers_.size(); ++i) {
      const double p = powers_[i];
      if (!std::isfinite(p) || p <= 0.0 || p > kPowerCap + kPowerCapSlack) {
        throw InvalidArgument("power of player " + std::to_string(i) + " = " +
                              std::to_string(p) + " is outside (0, 1/3]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kPowerSumTolerance) {
      throw InvalidArgument("powers sum to " + std::to_string(sum) +
                            ", expected 1");
    }
  }

  // Attacker at index 0, victim at index 1, and the remaining stake split
  // evenly over the fewest filler players that respect the 1/3 cap.
  static PowerDistribution with_fillers(double attacker_power,
                                        double victim_power) {
    const double remaining = 1.0 - attacker_power - victim_power;
    if (!(remaining > 0.0)) {
      throw InvalidArgument("attacker and victim powers leave no stake");
    }
    const auto fillers =
        static_cast<std::size_t>(std::ceil(remaining / kPowerCap - 1e-9));
    std::vector<double> powers{attacker_power, victim_power};
    powers.insert(powers.end(), std::max<std::size_t>(fillers, 1),
                  remaining / static_cast<double>(std::max<std::size_t>(fillers, 1)));
    return PowerDistribution(std::move(powers));
  }

  std::size_t size() const { return powers_.size(); }

  double power(PlayerIndex player) const {
    if (player >= powers_.size()) {
      throw InvalidArgument("player index " + std::to_string(player) +
                            " out of range for " +
                            std::to_string(powers_.size()) + " players");
    }
    return powers_[player];
  }

  double operator[](PlayerIndex player) const { return powers_[player]; }

  std::span<const double> powers() const { return powers_; }

 private:
  std::vector<double> powers_;
};

// P_l(p) = P[p].
inline double leader_probability(const PowerDistribution& dist,
                                 PlayerIndex player) {
  return dist.power(player);
}

enum class AttackKind { kHonest, kOmission, kDelay, kCombined };

inline const char* to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::kHonest:
      return "honest";
    case AttackKind::kOmission:
      return "omission";
    case AttackKind::kDelay:
      return "delay";
    case AttackKind::kCombined:
      return "combined";
  }
  return "unknown";
}

inline std::optional<AttackKind> attack_kind_from_string(const std::string& s) {
  for (auto kind : {AttackKind::kHonest, AttackKind::kOmission,
                    AttackKind::kDelay, AttackKind::kCombined}) {
    if (s == to_string(kind)) return kind;
  }
  return std::nullopt;
}

// Everyone follows the protocol, or exactly one attacker deviates against one
// victim:
//   omission  - the attacker, when leader, leaves out the victim's vote;
//   delay     - the attacker withholds its own vote while the victim leads;
//   combined  - both of the above.
class StrategyProfile {
 public:
  static StrategyProfile honest() { return StrategyProfile(); }

  static StrategyProfile attack(AttackKind kind, PlayerIndex attacker,
                                PlayerIndex victim) {
    if (kind == AttackKind::kHonest) {
      throw InvalidArgument("honest profile carries no attacker or victim");
    }
    if (attacker == victim) {
      throw InvalidArgument("attacker and victim must differ");
    }
    StrategyProfile profile;
    profile.kind_ = kind;
    profile.attacker_ = attacker;
    profile.victim_ = victim;
    return profile;
  }

  static StrategyProfile omission(PlayerIndex attacker, PlayerIndex victim) {
    return attack(AttackKind::kOmission, attacker, victim);
  }
  static StrategyProfile delay(PlayerIndex attacker, PlayerIndex victim) {
    return attack(AttackKind::kDelay, attacker, victim);
  }
  static StrategyProfile combined(PlayerIndex attacker, PlayerIndex victim) {
    return attack(AttackKind::kCombined, attacker, victim);
  }

  AttackKind kind() const { return kind_; }
  bool is_attack() const { return kind_ != AttackKind::kHonest; }
  std::optional<PlayerIndex> attacker() const { return attacker_; }
  std::optional<PlayerIndex> victim() const { return victim_; }

  bool omits_as_leader() const {
    return kind_ == AttackKind::kOmission || kind_ == AttackKind::kCombined;
  }
  bool delays_as_voter() const {
    return kind_ == AttackKind::kDelay || kind_ == AttackKind::kCombined;
  }

  void validate(const PowerDistribution& dist) const {
    if (!is_attack()) return;
    if (*attacker_ >= dist.size() || *victim_ >= dist.size()) {
      throw InvalidArgument("profile references a player outside the game");
    }
  }

  friend bool operator==(const StrategyProfile&,
                         const StrategyProfile&) = default;

 private:
  StrategyProfile() = default;

  AttackKind kind_ = AttackKind::kHonest;
  std::optional<PlayerIndex> attacker_;
  std::optional<PlayerIndex> victim_;
};

// Arguments of R(delta_l, delta_i, P_i, SigmaP).
struct RewardInputs {
  bool is_leader = false;
  bool is_included = true;
  double own_power = 0.0;
  double included_power = 1.0;
};

template <typename R>
concept RewardModel = requires(const R& reward, const RewardInputs& in) {
  { reward(in) } -> std::convertible_to<double>;
};

template <typename R>
std::string default_reward_name() {
  if constexpr (requires { R::kName; }) {
    return R::kName;
  } else {
    return "custom";
  }
}

// Type-erased reward function.  Cheap to copy; the wrapped model is shared
// and immutable.
class RewardFunction {
 public:
  template <RewardModel R>
    requires(!std::same_as<std::remove_cvref_t<R>, RewardFunction>)
  RewardFunction(R model, std::string name = default_reward_name<R>())  // NOLINT
      : eval_(std::make_shared<Holder<R>>(std::move(model))),
        name_(std::move(name)) {}

  double operator()(const RewardInputs& in) const { return eval_->call(in); }
  const std::string& name() const { return name_; }

 private:
  struct Base {
    virtual ~Base() = default;
    virtual double call(const RewardInputs& in) const = 0;
  };
  template <typename R>
  struct Holder final : Base {
    explicit Holder(R m) : model(std::move(m)) {}
    double call(const RewardInputs& in) const override { return model(in); }
    R model;
  };

  std::shared_ptr<const Base> eval_;
  std::string name_;
};

struct UtilityVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](PlayerIndex i) const { return values[i]; }
};

// How reliably an omission attempt succeeds.  Plain reward games always
// succeed when the attacker leads and never otherwise; aggregation lowers the
// first number and, when the attacker holds every aggregator, opens a path
// under other leaders (excluding the victim's own rounds).
struct OmissionSuccess {
  double when_attacker_leads = 1.0;
  double when_other_leads = 0.0;
};

// SigmaP for a round with the given leader, assuming every omission attempt
// succeeds.
inline double included_power(const PowerDistribution& dist,
                             const StrategyProfile& profile,
                             PlayerIndex leader) {
  dist.power(leader);
  profile.validate(dist);
  if (!profile.is_attack()) return 1.0;
  const PlayerIndex attacker = *profile.attacker();
  const PlayerIndex victim = *profile.victim();
  if (profile.omits_as_leader() && leader == attacker) {
    return 1.0 - dist[victim];
  }
  if (profile.delays_as_voter() && leader == victim) {
    return 1.0 - dist[attacker];
  }
  return 1.0;
}

namespace detail {

inline constexpr PlayerIndex kNobody = static_cast<PlayerIndex>(-1);

// One leader case seen from a fixed player: its probability, whether the
// player leads, and whose vote (if anyone's) is missing from the block.
struct LeaderCase {
  double weight;
  bool player_leads;
  PlayerIndex excluded;
};

// Enumerates leader cases analytically: the player itself, the attacker, the
// victim, and everyone else lumped together.  At most six cases.
template <typename Fn>
void for_each_leader_case(const PowerDistribution& dist,
                          const StrategyProfile& profile, PlayerIndex player,
                          const OmissionSuccess& success, Fn&& fn) {
  const double own = dist[player];
  if (!profile.is_attack()) {
    fn(LeaderCase{own, true, kNobody});
    fn(LeaderCase{1.0 - own, false, kNobody});
    return;
  }
  const PlayerIndex attacker = *profile.attacker();
  const PlayerIndex victim = *profile.victim();
  const double pa = dist[attacker];
  const double pv = dist[victim];

  // Splits a case into a successful-omission part and an untouched part.
  auto emit_omission = [&](double weight, bool leads, double p_success) {
    if (p_success > 0.0) fn(LeaderCase{weight * p_success, leads, victim});
    if (p_success < 1.0) {
      fn(LeaderCase{weight * (1.0 - p_success), leads, kNobody});
    }
  };

  // Attacker leads.
  if (profile.omits_as_leader()) {
    emit_omission(pa, player == attacker, success.when_attacker_leads);
  } else {
    fn(LeaderCase{pa, player == attacker, kNobody});
  }
  // Victim leads.
  fn(LeaderCase{pv, player == victim,
                profile.delays_as_voter() ? attacker : kNobody});

  const double via_aggs =
      profile.omits_as_leader() ? success.when_other_leads : 0.0;
  double rest = 1.0 - pa - pv;
  if (player != attacker && player != victim) {
    emit_omission(own, true, via_aggs);
    rest -= own;
  }
  emit_omission(std::max(rest, 0.0), false, via_aggs);
}

}  // namespace detail

// Leader-weighted expected reward of `player` under `profile`.
template <RewardModel R>
double expected_utility(const PowerDistribution& dist,
                        const StrategyProfile& profile, const R& reward,
                        PlayerIndex player,
                        const OmissionSuccess& success = {}) {
  dist.power(player);
  profile.validate(dist);
  const double own = dist[player];
  double utility = 0.0;
  detail::for_each_leader_case(
      dist, profile, player, success, [&](const detail::LeaderCase& c) {
        if (c.weight == 0.0) return;
        const double included =
            c.excluded == detail::kNobody ? 1.0 : 1.0 - dist[c.excluded];
        const RewardInputs in{c.player_leads, c.excluded != player, own,
                              included};
        utility += c.weight * static_cast<double>(reward(in));
      });
  return utility;
}

template <RewardModel R>
UtilityVector utilities_under_profile(const PowerDistribution& dist,
                                      const StrategyProfile& profile,
                                      const R& reward,
                                      const OmissionSuccess& success = {}) {
  UtilityVector out;
  out.values.reserve(dist.size());
  for (PlayerIndex p = 0; p < dist.size(); ++p) {
    out.values.push_back(expected_utility(dist, profile, reward, p, success));
  }
  return out;
}

// Checks U(p_i, s_e) = (P[i] / P[j]) U(p_j, s_e) for all pairs, i.e. that
// honest utility per unit of stake is the same for every player.
template <RewardModel R>
bool honest_utility_is_power_proportional(const PowerDistribution& dist,
                                          const R& reward,
                                          double tolerance = 1e-12) {
  const auto honest =
      utilities_under_profile(dist, StrategyProfile::honest(), reward);
  const double per_unit = honest[0] / dist[0];
  for (PlayerIndex p = 1; p < dist.size(); ++p) {
    if (std::abs(honest[p] / dist[p] - per_unit) >
        tolerance * std::max(1.0, std::abs(per_unit))) {
      return false;
    }
  }
  return true;
}

}  // namespace dop

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

// Reward functions for the individual protection mechanisms (bonus
// threshold, scaling rewards, inclusion window, base reward) on top of the
// simple leader-bonus scheme, and the aggregation feasibility models.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "dop/error.hpp"
#include "dop/game.hpp"

namespace dop {

struct SimpleParams {
  double bonus_fraction = 1.0;  // b
  double max_reward = 1.0;      // Rmax

  void validate() const {
    if (!(bonus_fraction >= 0.0) || !std::isfinite(bonus_fraction)) {
      throw InvalidArgument("bonus fraction b must be >= 0");
    }
    if (!(max_reward > 0.0) || !std::isfinite(max_reward)) {
      throw InvalidArgument("max reward must be > 0");
    }
  }
};

struct ThresholdParams {
  double threshold = 2.0 / 3.0;  // t
  SimpleParams base{};

  void validate() const {
    base.validate();
    if (!(threshold >= 0.0 && threshold < 1.0)) {
      throw InvalidArgument("threshold t must be in [0, 1)");
    }
  }
};

struct WindowParams {
  double late_fraction = 0.781;  // rho
  int window = 6;                // w
  SimpleParams base{};

  void validate() const {
    base.validate();
    if (!(late_fraction >= 0.0 && late_fraction <= 1.0)) {
      throw InvalidArgument("late fraction rho must be in [0, 1]");
    }
    if (window < 1) throw InvalidArgument("window w must be >= 1");
  }
};

struct BaseParams {
  double base_fraction = 0.9;  // a
  SimpleParams base{};

  void validate() const {
    base.validate();
    if (!(base_fraction >= 0.0 && base_fraction <= 1.0)) {
      throw InvalidArgument("base fraction a must be in [0, 1]");
    }
  }
};

// R = dl * SigmaP * bR + di * P_i * R
class SimpleReward {
 public:
  static constexpr const char* kName = "simple";

  explicit SimpleReward(SimpleParams params) : p_(params) { p_.validate(); }

  double operator()(const RewardInputs& in) const {
    const double r = p_.max_reward;
    return (in.is_leader ? in.included_power * p_.bonus_fraction * r : 0.0) +
           (in.is_included ? in.own_power * r : 0.0);
  }

  const SimpleParams& params() const { return p_; }

 private:
  SimpleParams p_;
};

// R = dl * (SigmaP - t) / (1 - t) * bR + di * P_i * R
//
// The bonus scale is clamped at 0 below the threshold.  With one attacker
// capped at 1/3 and t <= 2/3 that branch is never reached in the game; the
// rule that zeroes every reward below the threshold is not modelled.
class ThresholdReward {
 public:
  static constexpr const char* kName = "threshold";

  explicit ThresholdReward(ThresholdParams params) : p_(params) {
    p_.validate();
  }

  double bonus_scale(double included_power) const {
    return std::max(0.0,
                    (included_power - p_.threshold) / (1.0 - p_.threshold));
  }

  double operator()(const RewardInputs& in) const {
    const double r = p_.base.max_reward;
    return (in.is_leader ? bonus_scale(in.included_power) *
                               p_.base.bonus_fraction * r
                         : 0.0) +
           (in.is_included ? in.own_power * r : 0.0);
  }

  const ThresholdParams& params() const { return p_; }

 private:
  ThresholdParams p_;
};

// R = dl * SigmaP * bR + SigmaP * di * P_i * R
class ScalingReward {
 public:
  static constexpr const char* kName = "scaling";

  explicit ScalingReward(SimpleParams params) : p_(params) { p_.validate(); }

  double operator()(const RewardInputs& in) const {
    const double r = p_.max_reward;
    return (in.is_leader ? in.included_power * p_.bonus_fraction * r : 0.0) +
           (in.is_included ? in.included_power * in.own_power * r : 0.0);
  }

  const SimpleParams& params() const { return p_; }

 private:
  SimpleParams p_;
};

// R = dl * SigmaP * bR + rho * P_i * R + di * (1 - rho) * P_i * R
//
// Every excluded vote is assumed to land late, within the window, under a
// leader controlled by someone else.
class WindowReward {
 public:
  static constexpr const char* kName = "window";

  explicit WindowReward(WindowParams params) : p_(params) { p_.validate(); }

  double operator()(const RewardInputs& in) const {
    const double r = p_.base.max_reward;
    const double rho = p_.late_fraction;
    return (in.is_leader ? in.included_power * p_.base.bonus_fraction * r
                         : 0.0) +
           rho * in.own_power * r +
           (in.is_included ? (1.0 - rho) * in.own_power * r : 0.0);
  }

  const WindowParams& params() const { return p_; }

 private:
  WindowParams p_;
};

// R = dl * SigmaP * bR + a * P_i * R + di * (1 - a) * P_i * R
class BaseReward {
 public:
  static constexpr const char* kName = "base";

  explicit BaseReward(BaseParams params) : p_(params) { p_.validate(); }

  double operator()(const RewardInputs& in) const {
    const double r = p_.base.max_reward;
    const double a = p_.base_fraction;
    return (in.is_leader ? in.included_power * p_.base.bonus_fraction * r
                         : 0.0) +
           a * in.own_power * r +
           (in.is_included ? (1.0 - a) * in.own_power * r : 0.0);
  }

  const BaseParams& params() const { return p_; }

 private:
  BaseParams p_;
};

inline SimpleReward simple_reward(const SimpleParams& p) {
  return SimpleReward(p);
}
inline ThresholdReward threshold_reward(const ThresholdParams& p) {
  return ThresholdReward(p);
}
inline ScalingReward scaling_reward(const SimpleParams& p) {
  return ScalingReward(p);
}
inline WindowReward window_reward(const WindowParams& p) {
  return WindowReward(p);
}
inline BaseReward base_reward(const BaseParams& p) { return BaseReward(p); }

// Probability that an attacker with power P_a can omit a vote when k
// aggregators are each independently controlled with probability P_a:
// it must lead and hold one aggregator, or hold all of them.
//
// Taken literally the k = 1 value is P_a^2 + P_a, above the leader-only
// bound P_a; kept as written.
inline double feasibility_generic(double attacker_power, int aggregators) {
  if (!(attacker_power > 0.0 && attacker_power <= kPowerCap + kPowerCapSlack)) {
    throw InvalidArgument("attacker power must be in (0, 1/3]");
  }
  if (aggregators < 1) throw InvalidArgument("aggregator count k must be >= 1");
  const double pa = attacker_power;
  return pa * (1.0 - std::pow(1.0 - pa, aggregators)) +
         std::pow(pa, aggregators);
}

// p_agg = 1 - (1 - m / c)^(P_a * c): chance that the attacker's share of a
// size-c committee contains at least one aggregator when each validator is
// selected with probability m / c.  The all-aggregators term is dropped.
inline double feasibility_ethereum(double attacker_power, int committee_size,
                                   double mean_aggregators) {
  if (committee_size < 1) throw InvalidArgument("committee size must be >= 1");
  if (!(mean_aggregators > 0.0 && mean_aggregators < committee_size)) {
    throw InvalidArgument("mean aggregators must be in (0, c)");
  }
  if (!(attacker_power > 0.0) ||
      attacker_power * committee_size < 1.0 - 1e-9) {
    throw InvalidArgument(
        "attacker must hold at least one committee seat (P_a * c >= 1)");
  }
  const double q = mean_aggregators / committee_size;
  return 1.0 - std::pow(1.0 - q, attacker_power * committee_size);
}

// Committee-level aggregator model with integer seat counts, as sampled by the
// simulator.  Every validator is an aggregator with probability m / c.
class AggregatorModel {
 public:
  AggregatorModel(int committee_size, double mean_aggregators)
      : committee_size_(committee_size), mean_(mean_aggregators) {
    if (committee_size < 1) {
      throw InvalidArgument("committee size must be >= 1");
    }
    if (!(mean_aggregators > 0.0 && mean_aggregators < committee_size)) {
      throw InvalidArgument("mean aggregators must be in (0, c)");
    }
  }

  int committee_size() const { return committee_size_; }
  double mean_aggregators() const { return mean_; }
  double selection_probability() const { return mean_ / committee_size_; }

  // round(P_a * c), at least one.
  int attacker_seats(double attacker_power) const {
    return std::clamp(
        static_cast<int>(std::lround(attacker_power * committee_size_)), 1,
        committee_size_);
  }

  double p_any(int seats) const {
    return 1.0 - std::pow(1.0 - selection_probability(), seats);
  }

  // Attacker holds at least one aggregator and nobody else holds any.
  double p_all(int seats) const {
    return p_any(seats) *
           std::pow(1.0 - selection_probability(), committee_size_ - seats);
  }

  // Success probabilities for the analytic engine.  With
  // `include_all_aggregators` false this reproduces the closed-form
  // assumption that the attacker never holds every aggregator.
  OmissionSuccess omission_success(double attacker_power,
                                   bool include_all_aggregators) const {
    const int seats = attacker_seats(attacker_power);
    return OmissionSuccess{p_any(seats),
                           include_all_aggregators ? p_all(seats) : 0.0};
  }

 private:
  int committee_size_;
  double mean_;
};

}  // namespace dop

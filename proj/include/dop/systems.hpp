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

// Cosmos and Ethereum validator reward models with closed-form attack
// metrics.

#pragma once

#include <algorithm>
#include <cmath>

#include "dop/error.hpp"
#include "dop/game.hpp"
#include "dop/mechanisms.hpp"
#include "dop/metrics.hpp"

namespace dop {

// ---------------------------------------------------------------------------
// Cosmos

struct CosmosParams {
  double threshold = 2.0 / 3.0;  // t
  double base_fraction = 0.9;    // a: block reward paid to every validator
  double bonus_fraction = 0.05;  // b: proposer share of the fee part
  double max_reward = 1.0;

  void validate() const {
    if (!(threshold >= 0.0 && threshold < 1.0)) {
      throw InvalidArgument("threshold t must be in [0, 1)");
    }
    if (!(base_fraction >= 0.0 && base_fraction <= 1.0)) {
      throw InvalidArgument("base fraction a must be in [0, 1]");
    }
    if (!(bonus_fraction >= 0.0 && bonus_fraction <= 1.0)) {
      throw InvalidArgument("bonus fraction b must be in [0, 1]");
    }
    if (!(max_reward > 0.0) || !std::isfinite(max_reward)) {
      throw InvalidArgument("max reward must be > 0");
    }
  }
};

// Five summands: proposer bonus above the threshold, fee reward for included
// votes, unconditional block reward, and the two redistributions of whatever
// bonus and fee share the missing votes forfeit.  Per round the rewards of
// all players add up to Rmax.
class CosmosReward {
 public:
  static constexpr const char* kName = "cosmos";

  explicit CosmosReward(CosmosParams params) : p_(params) { p_.validate(); }

  double bonus_scale(double included_power) const {
    return std::clamp((included_power - p_.threshold) / (1.0 - p_.threshold),
                      0.0, 1.0);
  }

  double operator()(const RewardInputs& in) const {
    const double r = p_.max_reward;
    const double a = p_.base_fraction;
    const double b = p_.bonus_fraction;
    const double s = bonus_scale(in.included_power);
    const double bonus_pool = b * (1.0 - a) * r;
    const double fee_pool = (1.0 - a) * (1.0 - b) * r;
    return (in.is_leader ? s * bonus_pool : 0.0) +
           (in.is_included ? in.own_power * fee_pool : 0.0) +
           in.own_power * a * r + in.own_power * (1.0 - s) * bonus_pool +
           in.own_power * (1.0 - in.included_power) * fee_pool;
  }

  const CosmosParams& params() const { return p_; }

 private:
  CosmosParams p_;
};

inline CosmosReward cosmos_reward(const CosmosParams& p) {
  return CosmosReward(p);
}

namespace detail {

// Victim-side bracket (1-t)(1-b)(1-P_v) - P_v b.
inline double cosmos_victim_term(const CosmosParams& p, double victim_power) {
  const double t = p.threshold;
  const double b = p.bonus_fraction;
  return (1.0 - t) * (1.0 - b) * (1.0 - victim_power) - victim_power * b;
}

// Attacker-side bracket b(1-P_a) - P_a(1-t)(1-b).
inline double cosmos_attacker_term(const CosmosParams& p,
                                   double attacker_power) {
  const double t = p.threshold;
  const double b = p.bonus_fraction;
  return b * (1.0 - attacker_power) - attacker_power * (1.0 - t) * (1.0 - b);
}

inline void check_power(double power, const char* what) {
  if (!(power > 0.0 && power <= kPowerCap + kPowerCapSlack)) {
    throw InvalidArgument(std::string(what) + " power must be in (0, 1/3]");
  }
}

}  // namespace detail

// ((1-a)/(1-t)) [(1-t)(1-b)(1-P_j) - P_j b]; independent of attacker power.
inline double cosmos_omission_effectiveness(const CosmosParams& p,
                                            double victim_power) {
  p.validate();
  detail::check_power(victim_power, "victim");
  return (1.0 - p.base_fraction) / (1.0 - p.threshold) *
         detail::cosmos_victim_term(p, victim_power);
}

// (b(1-P_i) - P_i(1-t)(1-b)) / ((1-t)(1-b)(1-P_j) - P_j b)
inline double cosmos_omission_cost(const CosmosParams& p,
                                   double attacker_power,
                                   double victim_power) {
  p.validate();
  detail::check_power(attacker_power, "attacker");
  detail::check_power(victim_power, "victim");
  const double denom = detail::cosmos_victim_term(p, victim_power);
  if (denom == 0.0) {
    throw UndefinedMetric("cosmos omission cost: victim loss is zero");
  }
  return detail::cosmos_attacker_term(p, attacker_power) / denom;
}

inline AttackMetrics cosmos_omission_metrics(const CosmosParams& p,
                                             double attacker_power,
                                             double victim_power) {
  AttackMetrics m;
  m.effectiveness = cosmos_omission_effectiveness(p, victim_power);
  detail::check_power(attacker_power, "attacker");
  const double victim_loss =
      (1.0 - p.base_fraction) * detail::cosmos_victim_term(p, victim_power);
  m.cost_defined = victim_loss > 0.0;
  if (victim_loss != 0.0) {
    m.cost = detail::cosmos_attacker_term(p, attacker_power) /
             detail::cosmos_victim_term(p, victim_power);
  }
  return m;
}

// Vote delay S^v_{i->j} by an attacker of power P_i against a leader of power
// P_j.  Its cost is the reciprocal of the role-swapped omission cost
// cost(S^l_{j->i}), and its effectiveness follows from the effectiveness
// relation; both are written out so that neither divides by a vanishing
// omission cost.
inline AttackMetrics cosmos_delay_metrics(const CosmosParams& p,
                                          double attacker_power,
                                          double victim_power) {
  p.validate();
  detail::check_power(attacker_power, "attacker");
  detail::check_power(victim_power, "victim");
  const double scale = (1.0 - p.base_fraction) / (1.0 - p.threshold);
  // eff(S^l_{j->i}) * cost(S^l_{j->i}) with P_j as the omitting attacker.
  const double victim_term = detail::cosmos_attacker_term(p, victim_power);
  AttackMetrics m;
  m.effectiveness = scale * victim_term;
  const double victim_loss = (1.0 - p.base_fraction) * victim_term;
  m.cost_defined = victim_loss > 0.0;
  if (victim_loss != 0.0) {
    m.cost = detail::cosmos_victim_term(p, attacker_power) / victim_term;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Ethereum

struct EthereumParams {
  double late_fraction = 0.781;  // rho: share of the voter reward paid late
  double bonus_fraction = 0.125;  // b: proposer weight
  int committee_size = 500;       // c
  double mean_aggregators = 16.0;
  int window = 6;  // w
  double max_reward = 1.0;

  // Lighter proposer weight, b = 0.05.
  static EthereumParams text_preset() {
    EthereumParams p;
    p.bonus_fraction = 0.05;
    return p;
  }

  AggregatorModel aggregators() const {
    return AggregatorModel(committee_size, mean_aggregators);
  }

  void validate() const {
    if (!(late_fraction >= 0.0 && late_fraction <= 1.0)) {
      throw InvalidArgument("late fraction rho must be in [0, 1]");
    }
    if (!(bonus_fraction >= 0.0) || !std::isfinite(bonus_fraction)) {
      throw InvalidArgument("bonus fraction b must be >= 0");
    }
    if (committee_size < 1) throw InvalidArgument("committee size must be >= 1");
    if (!(mean_aggregators > 0.0 && mean_aggregators < committee_size)) {
      throw InvalidArgument("mean aggregators must be in (0, c)");
    }
    if (window < 1) throw InvalidArgument("window w must be >= 1");
    if (!(max_reward > 0.0) || !std::isfinite(max_reward)) {
      throw InvalidArgument("max reward must be > 0");
    }
  }
};

// R = rho P_i R + (1-rho) di SigmaP P_i R + dl b SigmaP R
//
// The late share rho is paid whether or not the vote is timely (every vote
// is assumed to land within the inclusion window); only the timely share is
// scaled by participation.
class EthereumReward {
 public:
  static constexpr const char* kName = "ethereum";

  explicit EthereumReward(EthereumParams params) : p_(params) {
    p_.validate();
  }

  double operator()(const RewardInputs& in) const {
    const double r = p_.max_reward;
    const double rho = p_.late_fraction;
    return rho * in.own_power * r +
           (in.is_included
                ? (1.0 - rho) * in.included_power * in.own_power * r
                : 0.0) +
           (in.is_leader ? p_.bonus_fraction * in.included_power * r : 0.0);
  }

  const EthereumParams& params() const { return p_; }

 private:
  EthereumParams p_;
};

inline EthereumReward ethereum_reward(const EthereumParams& p) {
  return EthereumReward(p);
}

// The Ethereum effectiveness closed forms measure a player's loss against its
// voter share P[p] * Rmax, i.e. LossBaseline::kStakeShare.  Against honest
// utility P[p] (1 + b) Rmax both are smaller by the factor 1 / (1 + b).  The
// costs do not depend on the baseline.  The attacker is assumed never to hold
// every aggregator, nor w + 1 consecutive proposers.

// p_agg(P_i) (1 - rho), or (1 - rho) with feasibility disabled.
inline double eth_omission_effectiveness(const EthereumParams& p,
                                         double attacker_power,
                                         bool with_feasibility = true) {
  p.validate();
  detail::check_power(attacker_power, "attacker");
  const double feasibility =
      with_feasibility ? feasibility_ethereum(attacker_power, p.committee_size,
                                              p.mean_aggregators)
                       : 1.0;
  return feasibility * (1.0 - p.late_fraction);
}

// ((1 - rho) P_i + b) / (1 - rho); independent of the victim.
inline double eth_omission_cost(const EthereumParams& p,
                                double attacker_power) {
  p.validate();
  detail::check_power(attacker_power, "attacker");
  const double late = 1.0 - p.late_fraction;
  if (late == 0.0) {
    throw UndefinedMetric("omission cost undefined for rho = 1");
  }
  return (late * attacker_power + p.bonus_fraction) / late;
}

// (1 - rho) P_j + b
inline double eth_delay_effectiveness(const EthereumParams& p,
                                      double victim_power) {
  p.validate();
  detail::check_power(victim_power, "victim");
  return (1.0 - p.late_fraction) * victim_power + p.bonus_fraction;
}

// (1 - rho) / ((1 - rho) P_j + b)
inline double eth_delay_cost(const EthereumParams& p, double victim_power) {
  const double denom = eth_delay_effectiveness(p, victim_power);
  if (denom == 0.0) {
    throw UndefinedMetric("delay cost undefined: victim loses nothing");
  }
  return (1.0 - p.late_fraction) / denom;
}

inline AttackMetrics eth_omission_metrics(const EthereumParams& p,
                                          double attacker_power,
                                          bool with_feasibility = true) {
  AttackMetrics m;
  m.effectiveness =
      eth_omission_effectiveness(p, attacker_power, with_feasibility);
  m.cost_defined = p.late_fraction < 1.0;
  if (m.cost_defined) m.cost = eth_omission_cost(p, attacker_power);
  return m;
}

inline AttackMetrics eth_delay_metrics(const EthereumParams& p,
                                       double victim_power) {
  AttackMetrics m;
  m.effectiveness = eth_delay_effectiveness(p, victim_power);
  m.cost_defined = m.effectiveness > 0.0;
  if (m.cost_defined) m.cost = eth_delay_cost(p, victim_power);
  return m;
}

// Options that make the generic pipeline reproduce the closed forms above.
inline MetricOptions eth_closed_form_options(const EthereumParams& p,
                                             double attacker_power,
                                             bool with_feasibility) {
  MetricOptions opts;
  opts.baseline = LossBaseline::kStakeShare;
  opts.max_reward = p.max_reward;
  if (with_feasibility) {
    opts.omission.when_attacker_leads = feasibility_ethereum(
        attacker_power, p.committee_size, p.mean_aggregators);
  }
  return opts;
}

}  // namespace dop

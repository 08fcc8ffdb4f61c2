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

// Parameter sweeps over attacker/victim power and the one-dimensional bonus
// and epsilon searches built on the closed forms.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "dop/error.hpp"
#include "dop/game.hpp"
#include "dop/mechanisms.hpp"
#include "dop/metrics.hpp"
#include "dop/systems.hpp"

namespace dop {

// step, 2 step, ... up to `upper`, with `upper` itself appended when the
// step does not land on it.
inline std::vector<double> power_grid(double step, double upper = kPowerCap) {
  if (!(step > 0.0) || step > upper) {
    throw InvalidArgument("grid step must be in (0, upper]");
  }
  std::vector<double> grid;
  for (long k = 1;; ++k) {
    const double x = static_cast<double>(k) * step;
    if (x > upper + 1e-12) break;
    grid.push_back(std::min(x, upper));
  }
  if (grid.back() < upper - 1e-12) grid.push_back(upper);
  return grid;
}

// Default attacker axis for sweeps: 0.01 .. 1/3 in steps of 0.005.
inline std::vector<double> default_attacker_grid() {
  std::vector<double> grid;
  for (int k = 2;; ++k) {
    const double x = 0.005 * k;
    if (x > kPowerCap) break;
    grid.push_back(x);
  }
  grid.push_back(kPowerCap);
  return grid;
}

inline std::vector<double> default_victim_values() { return {0.05, 0.15, 0.25}; }

struct SweepRow {
  double attacker_power = 0.0;
  double victim_power = 0.0;
  AttackKind attack = AttackKind::kOmission;
  double effectiveness = 0.0;
  double cost = 0.0;
  bool cost_defined = false;
  std::optional<int> aggregators;  // only set by aggregator_sweep

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

using SystemParams = std::variant<CosmosParams, EthereumParams>;

// Closed-form metrics for every (attacker, victim, kind), attacker-major.
inline SweepTable sweep(const SystemParams& system,
                        const std::vector<AttackKind>& kinds,
                        const std::vector<double>& attacker_grid,
                        const std::vector<double>& victim_values) {
  SweepTable table;
  table.rows.reserve(attacker_grid.size() * victim_values.size() *
                     kinds.size());
  for (double pa : attacker_grid) {
    for (double pv : victim_values) {
      for (AttackKind kind : kinds) {
        AttackMetrics m;
        if (const auto* cosmos = std::get_if<CosmosParams>(&system)) {
          switch (kind) {
            case AttackKind::kOmission:
              m = cosmos_omission_metrics(*cosmos, pa, pv);
              break;
            case AttackKind::kDelay:
              m = cosmos_delay_metrics(*cosmos, pa, pv);
              break;
            default:
              throw InvalidArgument(
                  "closed-form sweeps cover omission and delay only");
          }
        } else {
          const auto& eth = std::get<EthereumParams>(system);
          switch (kind) {
            case AttackKind::kOmission:
              m = eth_omission_metrics(eth, pa, /*with_feasibility=*/true);
              break;
            case AttackKind::kDelay:
              detail::check_power(pa, "attacker");
              m = eth_delay_metrics(eth, pv);
              break;
            default:
              throw InvalidArgument(
                  "closed-form sweeps cover omission and delay only");
          }
        }
        table.rows.push_back(SweepRow{pa, pv, kind, m.effectiveness, m.cost,
                                      m.cost_defined, std::nullopt});
      }
    }
  }
  return table;
}

// Same grid through the generic pipeline, for reward functions without
// closed forms.  Attacker is player 0, victim player 1, the rest fillers.
template <RewardModel R>
SweepTable sweep_generic(const R& reward, const std::vector<AttackKind>& kinds,
                         const std::vector<double>& attacker_grid,
                         const std::vector<double>& victim_values,
                         const MetricOptions& opts = {}) {
  SweepTable table;
  for (double pa : attacker_grid) {
    for (double pv : victim_values) {
      const auto dist = PowerDistribution::with_fillers(pa, pv);
      for (AttackKind kind : kinds) {
        const auto m =
            evaluate_attack(dist, StrategyProfile::attack(kind, 0, 1), reward,
                            opts);
        table.rows.push_back(SweepRow{pa, pv, kind, m.effectiveness, m.cost,
                                      m.cost_defined, std::nullopt});
      }
    }
  }
  return table;
}

// Omission effectiveness p_agg(P_i; mean = k) (1 - rho) for each k.  Cost is
// the (aggregation-independent) omission cost; both ignore the victim, whose
// power is carried through as given.
inline SweepTable aggregator_sweep(const EthereumParams& eth,
                                   const std::vector<int>& aggregator_counts,
                                   const std::vector<double>& attacker_grid,
                                   double victim_power = 0.05) {
  SweepTable table;
  for (double pa : attacker_grid) {
    for (int k : aggregator_counts) {
      EthereumParams p = eth;
      p.mean_aggregators = k;
      const auto m = eth_omission_metrics(p, pa, /*with_feasibility=*/true);
      table.rows.push_back(SweepRow{pa, victim_power, AttackKind::kOmission,
                                    m.effectiveness, m.cost, m.cost_defined,
                                    k});
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Bonus searches

enum class BonusCriterion { kNash, kBalanced };

inline const char* to_string(BonusCriterion c) {
  return c == BonusCriterion::kNash ? "nash" : "balanced";
}

struct BonusSearchResult {
  double b_star = std::numeric_limits<double>::quiet_NaN();
  BonusCriterion criterion = BonusCriterion::kNash;
  double epsilon = 0.0;  // band half-width for kBalanced
  bool feasible = false;
  // (attacker power, victim power) where the criterion is tightest at b_star.
  std::pair<double, double> worst_case_pair{0.0, 0.0};
  bool used_linear_scan = false;
};

namespace detail {

// Smallest b in [lo, hi] (to within tol) with criterion(b), for a criterion
// that splits into a part switching false -> true as b grows (`rising`) and
// a part switching true -> false (`falling`).  Bisection runs on `rising`;
// if sampling shows it is not monotone the search scans linearly for the
// full criterion instead.
struct MinimalBonus {
  std::optional<double> b;
  bool linear_scan = false;
};

inline MinimalBonus minimal_bonus(const std::function<bool(double)>& rising,
                                  const std::function<bool(double)>& falling,
                                  double lo, double hi, double tol) {
  constexpr int kSamples = 65;
  bool seen_true = false;
  bool monotone = true;
  for (int k = 0; k < kSamples; ++k) {
    const bool r = rising(lo + (hi - lo) * k / (kSamples - 1));
    if (seen_true && !r) monotone = false;
    seen_true = seen_true || r;
  }
  MinimalBonus out;
  if (!monotone) {
    out.linear_scan = true;
    const auto steps = static_cast<long>(std::ceil((hi - lo) / tol));
    for (long k = 0; k <= steps; ++k) {
      const double b = std::min(hi, lo + k * tol);
      if (rising(b) && falling(b)) {
        out.b = b;
        break;
      }
    }
    return out;
  }
  if (!rising(hi)) return out;
  if (rising(lo)) {
    if (falling(lo)) out.b = lo;
    return out;
  }
  double below = lo;
  double above = hi;
  auto narrow = [&](double width) {
    while (above - below > width) {
      const double mid = 0.5 * (below + above);
      (rising(mid) ? above : below) = mid;
    }
  };
  narrow(tol);
  // The feasible window may be narrower than tol; keep halving before giving
  // up on it.
  if (!falling(above)) narrow(1e-15 * std::max(1.0, std::abs(above)));
  if (falling(above)) out.b = above;
  return out;
}

}  // namespace detail

// Literal Nash check on the grid: every omission and delay cost defined and
// strictly positive.
inline bool cosmos_is_nash(const CosmosParams& p,
                           const std::vector<double>& grid) {
  for (double pi : grid) {
    for (double pj : grid) {
      const auto om = cosmos_omission_metrics(p, pi, pj);
      const auto de = cosmos_delay_metrics(p, pi, pj);
      if (!om.cost_defined || om.cost <= 0.0 || !de.cost_defined ||
          de.cost <= 0.0) {
        return false;
      }
    }
  }
  return true;
}

// Smallest bonus for which honest play is a Nash equilibrium of the Cosmos
// game over the (P_i, P_j) grid.  The base fraction a scales every loss but
// no cost, so the result does not depend on it.
inline BonusSearchResult find_min_bonus_nash_cosmos(double threshold,
                                                    double base_fraction,
                                                    double tolerance = 1e-4,
                                                    double grid_step = 0.001) {
  if (!(threshold < 1.0)) throw InvalidArgument("threshold must be < 1");
  const auto grid = power_grid(grid_step);
  auto params_at = [&](double b) {
    CosmosParams p;
    p.threshold = threshold;
    p.base_fraction = base_fraction;
    p.bonus_fraction = b;
    return p;
  };
  // Omission costs its attacker something: rises with b.
  auto rising = [&](double b) {
    const auto p = params_at(b);
    for (double pi : grid) {
      if (!(detail::cosmos_attacker_term(p, pi) > 0.0)) return false;
    }
    return true;
  };
  // Omission hurts its victim, equivalently delay costs its attacker
  // something: falls with b.
  auto falling = [&](double b) {
    const auto p = params_at(b);
    for (double pj : grid) {
      if (!(detail::cosmos_victim_term(p, pj) > 0.0)) return false;
    }
    return true;
  };
  BonusSearchResult out;
  out.criterion = BonusCriterion::kNash;
  const auto found = detail::minimal_bonus(rising, falling, 0.0, 1.0, tolerance);
  out.used_linear_scan = found.linear_scan;
  if (!found.b || !cosmos_is_nash(params_at(*found.b), grid)) return out;
  out.feasible = true;
  out.b_star = *found.b;
  const auto p = params_at(out.b_star);
  double tightest = std::numeric_limits<double>::infinity();
  for (double pi : grid) {
    for (double pj : grid) {
      const double c = std::min(cosmos_omission_metrics(p, pi, pj).cost,
                                cosmos_delay_metrics(p, pi, pj).cost);
      if (c < tightest) {
        tightest = c;
        out.worst_case_pair = {pi, pj};
      }
    }
  }
  return out;
}

inline bool eth_costs_within_band(const EthereumParams& p, double epsilon,
                                  const std::vector<double>& grid) {
  for (double pi : grid) {
    const double om = eth_omission_cost(p, pi);
    if (om < 1.0 - epsilon || om > 1.0 + epsilon) return false;
    const double de = eth_delay_cost(p, pi);
    if (de < 1.0 - epsilon || de > 1.0 + epsilon) return false;
  }
  return true;
}

// Smallest bonus keeping both Ethereum attack costs inside
// [1 - epsilon, 1 + epsilon] for every grid power.  Omission cost depends only
// on the attacker and delay cost only on the victim, so the pair grid reduces
// to the power axis.
inline BonusSearchResult find_min_bonus_balanced_eth(double late_fraction,
                                                     double epsilon,
                                                     double tolerance = 1e-4,
                                                     double grid_step = 0.001) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  const auto grid = power_grid(grid_step);
  auto params_at = [&](double b) {
    EthereumParams p;
    p.late_fraction = late_fraction;
    p.bonus_fraction = b;
    return p;
  };
  const double lo_band = 1.0 - epsilon;
  const double hi_band = 1.0 + epsilon;
  auto rising = [&](double b) {
    const auto p = params_at(b);
    for (double x : grid) {
      if (eth_omission_cost(p, x) < lo_band) return false;
      if (b + (1.0 - late_fraction) * x == 0.0) return false;
      if (eth_delay_cost(p, x) > hi_band) return false;
    }
    return true;
  };
  auto falling = [&](double b) {
    const auto p = params_at(b);
    for (double x : grid) {
      if (eth_omission_cost(p, x) > hi_band) return false;
      if (b + (1.0 - late_fraction) * x == 0.0) return false;
      if (eth_delay_cost(p, x) < lo_band) return false;
    }
    return true;
  };
  BonusSearchResult out;
  out.criterion = BonusCriterion::kBalanced;
  out.epsilon = epsilon;
  const auto found = detail::minimal_bonus(rising, falling, 0.0, 1.0, tolerance);
  out.used_linear_scan = found.linear_scan;
  if (!found.b || !eth_costs_within_band(params_at(*found.b), epsilon, grid)) {
    return out;
  }
  out.feasible = true;
  out.b_star = *found.b;
  const auto p = params_at(out.b_star);
  double worst_attacker = grid.front();
  double worst_victim = grid.front();
  double worst_om = -1.0;
  double worst_de = -1.0;
  for (double x : grid) {
    const double om = std::abs(eth_omission_cost(p, x) - 1.0);
    const double de = std::abs(eth_delay_cost(p, x) - 1.0);
    if (om > worst_om) {
      worst_om = om;
      worst_attacker = x;
    }
    if (de > worst_de) {
      worst_de = de;
      worst_victim = x;
    }
  }
  out.worst_case_pair = {worst_attacker, worst_victim};
  return out;
}

// Smallest epsilon for which some bonus balances the Ethereum costs.
inline double critical_epsilon_eth(double late_fraction,
                                   double tolerance = 1e-4,
                                   double grid_step = 0.001) {
  if (!(late_fraction > 0.0 && late_fraction < 1.0)) {
    throw InvalidArgument("rho must be in (0, 1)");
  }
  const double inner_tol = std::min(1e-6, tolerance);
  auto feasible = [&](double eps) {
    return find_min_bonus_balanced_eth(late_fraction, eps, inner_tol, grid_step)
        .feasible;
  };
  double below = 0.0;
  double above = 1.0;
  while (!feasible(above)) {
    below = above;
    above *= 2.0;
    if (above > 64.0) throw InvalidArgument("no feasible epsilon found");
  }
  while (above - below > tolerance) {
    const double mid = 0.5 * (below + above);
    (feasible(mid) ? above : below) = mid;
  }
  return above;
}

// Smallest omission and delay costs over the grid for a Cosmos bonus, under
// two readings of "all attackers and victims": independent powers, and
// attacker power equal to victim power.
struct CosmosCostFloor {
  double omission_all_pairs = std::numeric_limits<double>::infinity();
  double delay_all_pairs = std::numeric_limits<double>::infinity();
  double omission_equal_powers = std::numeric_limits<double>::infinity();
  double delay_equal_powers = std::numeric_limits<double>::infinity();
};

inline CosmosCostFloor cosmos_cost_floor(const CosmosParams& p,
                                         const std::vector<double>& grid) {
  CosmosCostFloor out;
  for (double pi : grid) {
    for (double pj : grid) {
      const auto om = cosmos_omission_metrics(p, pi, pj);
      const auto de = cosmos_delay_metrics(p, pi, pj);
      const double om_cost =
          om.cost_defined ? om.cost : -std::numeric_limits<double>::infinity();
      const double de_cost =
          de.cost_defined ? de.cost : -std::numeric_limits<double>::infinity();
      out.omission_all_pairs = std::min(out.omission_all_pairs, om_cost);
      out.delay_all_pairs = std::min(out.delay_all_pairs, de_cost);
      if (pi == pj) {
        out.omission_equal_powers = std::min(out.omission_equal_powers, om_cost);
        out.delay_equal_powers = std::min(out.delay_equal_powers, de_cost);
      }
    }
  }
  return out;
}

}  // namespace dop

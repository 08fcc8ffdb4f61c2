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

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dop/dop.hpp"

namespace dop::cli {
namespace {

using json = nlohmann::json;

// Bad input that should exit with kExitInvalidConfig.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kCommands = {
    "metrics",  "sweep",    "search-bonus", "critical-epsilon",
    "aggregators", "simulate", "robustness", "verify"};

const std::map<std::string, std::set<std::string>> kSystemParams = {
    {"simple", {"b", "rmax"}},
    {"threshold", {"t", "b", "rmax"}},
    {"scaling", {"b", "rmax"}},
    {"window", {"rho", "w", "b", "rmax"}},
    {"base", {"a", "b", "rmax"}},
    {"cosmos", {"t", "a", "b", "rmax"}},
    {"ethereum", {"rho", "b", "c", "mean-aggs", "w", "rmax"}},
};

const std::vector<std::string> kParamFlags = {"t", "a",         "b", "rho",
                                              "w", "c", "mean-aggs", "rmax"};

struct Options {
  std::string command;
  std::string config;
  std::string system;
  std::optional<double> t, a, b, rho, rmax, mean_aggs;
  std::optional<int> w, c;
  std::vector<double> powers;
  std::optional<double> attacker_power, victim_power;
  std::optional<int> fillers;
  std::size_t attacker = 0;
  std::size_t victim = 1;
  std::vector<std::string> attacks;
  std::optional<double> grid;
  std::vector<double> victims;
  std::string out;
  std::uint64_t seed = 0;
  std::uint64_t rounds = 1'000'000;
  std::optional<std::string> criterion;
  std::optional<double> epsilon;
  std::string suite = "theorems";
  std::optional<std::size_t> cases;
  std::vector<int> aggregators;
  std::optional<double> tolerance;
  unsigned threads = 0;
  std::optional<std::string> baseline;
};

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

// Tokens CLI11 would have seen had the value been given on the command line.
std::vector<std::string> json_tokens(const std::string& field, const json& v) {
  auto one = [&](const json& x) -> std::string {
    if (x.is_string()) return x.get<std::string>();
    if (x.is_boolean()) return x.get<bool>() ? "true" : "false";
    if (x.is_number()) return x.dump();
    throw ConfigError("config field '" + field + "' has an unsupported type");
  };
  std::vector<std::string> tokens;
  if (v.is_array()) {
    for (const auto& x : v) tokens.push_back(one(x));
  } else {
    tokens.push_back(one(v));
  }
  return tokens;
}

void merge_config(CLI::App& app, Options& o) {
  std::ifstream in(o.config);
  if (!in) throw ConfigError("cannot read config file '" + o.config + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [field, value] : doc.items()) {
    if (field == "command") {
      if (!value.is_string()) throw ConfigError("config field 'command' must be a string");
      if (o.command.empty()) o.command = value.get<std::string>();
      continue;
    }
    std::string flag = field;
    std::replace(flag.begin(), flag.end(), '_', '-');
    CLI::Option* opt = nullptr;
    if (flag != "config" && flag != "help") {
      try {
        opt = app.get_option("--" + flag);
      } catch (const CLI::OptionNotFound&) {
        opt = nullptr;
      }
    }
    if (opt == nullptr) throw ConfigError("unknown config field '" + field + "'");
    if (opt->count() > 0) continue;  // command line wins
    opt->add_result(json_tokens(field, value));
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError("config field '" + field + "': " + e.what());
    }
  }
}

bool given(const CLI::App& app, const std::string& flag) {
  return app.get_option("--" + flag)->count() > 0;
}

void check_params(const CLI::App& app, const Options& o) {
  if (o.system.empty()) {
    for (const auto& p : kParamFlags) {
      if (given(app, p)) {
        throw ConfigError("parameter --" + p + " needs --system");
      }
    }
    return;
  }
  const auto it = kSystemParams.find(o.system);
  if (it == kSystemParams.end()) {
    throw ConfigError("unknown system '" + o.system + "'");
  }
  for (const auto& p : kParamFlags) {
    if (given(app, p) && !it->second.count(p)) {
      throw ConfigError("parameter --" + p + " is not valid for system " +
                        o.system);
    }
  }
}

SimpleParams simple_params(const Options& o) {
  SimpleParams p;
  if (o.b) p.bonus_fraction = *o.b;
  if (o.rmax) p.max_reward = *o.rmax;
  return p;
}

CosmosParams cosmos_params(const Options& o) {
  CosmosParams p;
  if (o.t) p.threshold = *o.t;
  if (o.a) p.base_fraction = *o.a;
  if (o.b) p.bonus_fraction = *o.b;
  if (o.rmax) p.max_reward = *o.rmax;
  p.validate();
  return p;
}

EthereumParams ethereum_params(const Options& o) {
  EthereumParams p;
  if (o.rho) p.late_fraction = *o.rho;
  if (o.b) p.bonus_fraction = *o.b;
  if (o.c) p.committee_size = *o.c;
  if (o.mean_aggs) p.mean_aggregators = *o.mean_aggs;
  if (o.w) p.window = *o.w;
  if (o.rmax) p.max_reward = *o.rmax;
  p.validate();
  return p;
}

RewardFunction make_reward(const Options& o) {
  const auto& s = o.system;
  if (s == "simple") return simple_reward(simple_params(o));
  if (s == "scaling") return scaling_reward(simple_params(o));
  if (s == "threshold") {
    ThresholdParams p;
    p.base = simple_params(o);
    if (o.t) p.threshold = *o.t;
    return threshold_reward(p);
  }
  if (s == "window") {
    WindowParams p;
    p.base = simple_params(o);
    if (o.rho) p.late_fraction = *o.rho;
    if (o.w) p.window = *o.w;
    return window_reward(p);
  }
  if (s == "base") {
    BaseParams p;
    p.base = simple_params(o);
    if (o.a) p.base_fraction = *o.a;
    return base_reward(p);
  }
  if (s == "cosmos") return cosmos_reward(cosmos_params(o));
  if (s == "ethereum") return ethereum_reward(ethereum_params(o));
  throw ConfigError("command needs --system");
}

void require_system(const Options& o, std::initializer_list<const char*> allowed) {
  if (o.system.empty()) throw ConfigError(o.command + " needs --system");
  for (const char* s : allowed) {
    if (o.system == s) return;
  }
  std::string list;
  for (const char* s : allowed) list += (list.empty() ? "" : ", ") + std::string(s);
  throw ConfigError(o.command + " supports --system " + list);
}

struct Game {
  PowerDistribution dist;
  PlayerIndex attacker;
  PlayerIndex victim;
};

Game make_game(const CLI::App& app, const Options& o) {
  if (!o.powers.empty()) {
    if (o.attacker_power || o.victim_power || o.fillers) {
      throw ConfigError("--powers excludes --attacker-power/--victim-power/--fillers");
    }
    Game g{PowerDistribution(o.powers), o.attacker, o.victim};
    if (g.attacker >= g.dist.size() || g.victim >= g.dist.size() ||
        g.attacker == g.victim) {
      throw ConfigError("--attacker/--victim must be distinct player indices");
    }
    return g;
  }
  if (given(app, "attacker") || given(app, "victim")) {
    throw ConfigError("--attacker/--victim index into --powers");
  }
  if (!o.attacker_power || !o.victim_power) {
    throw ConfigError(o.command +
                      " needs --powers or --attacker-power and --victim-power");
  }
  if (!o.fillers) {
    return {PowerDistribution::with_fillers(*o.attacker_power, *o.victim_power),
            0, 1};
  }
  if (*o.fillers < 1) throw ConfigError("--fillers must be >= 1");
  std::vector<double> powers = {*o.attacker_power, *o.victim_power};
  const double rest = (1.0 - *o.attacker_power - *o.victim_power) / *o.fillers;
  powers.insert(powers.end(), static_cast<std::size_t>(*o.fillers), rest);
  return {PowerDistribution(std::move(powers)), 0, 1};
}

std::vector<AttackKind> attack_kinds(const Options& o,
                                     std::vector<AttackKind> fallback,
                                     bool allow_honest = false) {
  if (o.attacks.empty()) return fallback;
  std::vector<AttackKind> kinds;
  for (const auto& s : o.attacks) {
    const auto kind = attack_kind_from_string(s);
    if (!kind || (*kind == AttackKind::kHonest && !allow_honest)) {
      throw ConfigError("unknown --attack value '" + s + "'");
    }
    kinds.push_back(*kind);
  }
  return kinds;
}

MetricOptions metric_options(const Options& o, double attacker_power) {
  MetricOptions opts;
  if (o.system == "ethereum") {
    const auto eth = ethereum_params(o);
    opts = eth_closed_form_options(eth, attacker_power, true);
  }
  if (o.baseline) {
    if (*o.baseline == "honest") {
      opts.baseline = LossBaseline::kHonestUtility;
    } else if (*o.baseline == "stake") {
      opts.baseline = LossBaseline::kStakeShare;
    } else {
      throw ConfigError("--baseline must be honest or stake");
    }
  }
  if (o.rmax) opts.max_reward = *o.rmax;
  return opts;
}

std::vector<double> attacker_grid(const Options& o) {
  return o.grid ? power_grid(*o.grid) : default_attacker_grid();
}

void write_text(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write '" + o.out + "'");
}

json profile_json(const StrategyProfile& s) {
  return {{"kind", to_string(s.kind())},
          {"attacker", *s.attacker()},
          {"victim", *s.victim()}};
}

bool all_undefined(const SweepTable& t) {
  return !t.rows.empty() &&
         std::none_of(t.rows.begin(), t.rows.end(),
                      [](const SweepRow& r) { return r.cost_defined; });
}

int cmd_metrics(const CLI::App& app, const Options& o, std::ostream& out) {
  const auto reward = make_reward(o);
  const auto g = make_game(app, o);
  const auto opts = metric_options(o, g.dist[g.attacker]);
  SweepTable table;
  for (auto kind : attack_kinds(o, {AttackKind::kOmission, AttackKind::kDelay})) {
    const auto m = evaluate_attack(
        g.dist, StrategyProfile::attack(kind, g.attacker, g.victim), reward, opts);
    table.rows.push_back({g.dist[g.attacker], g.dist[g.victim], kind,
                          m.effectiveness, m.cost, m.cost_defined, std::nullopt});
  }
  write_text(o, out, format_csv(table));
  return all_undefined(table) ? kExitUndefined : kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  if (o.system.empty()) throw ConfigError("sweep needs --system");
  const auto kinds = attack_kinds(o, {AttackKind::kOmission, AttackKind::kDelay});
  const auto grid = attacker_grid(o);
  const auto victims = o.victims.empty() ? default_victim_values() : o.victims;
  SweepTable table;
  if (o.system == "cosmos") {
    table = sweep(cosmos_params(o), kinds, grid, victims);
  } else if (o.system == "ethereum") {
    table = sweep(ethereum_params(o), kinds, grid, victims);
  } else {
    table = sweep_generic(make_reward(o), kinds, grid, victims,
                          metric_options(o, grid.front()));
  }
  write_text(o, out, format_csv(table));
  return all_undefined(table) ? kExitUndefined : kExitOk;
}

int cmd_search_bonus(const Options& o, std::ostream& out) {
  require_system(o, {"cosmos", "ethereum"});
  if (o.b) throw ConfigError("search-bonus solves for b; drop --b");
  const double tol = o.tolerance.value_or(1e-4);
  const double step = o.grid.value_or(0.001);
  BonusSearchResult r;
  if (o.system == "cosmos") {
    if (o.criterion.value_or("nash") != "nash") {
      throw ConfigError("cosmos supports --criterion nash");
    }
    const auto p = cosmos_params(o);
    r = find_min_bonus_nash_cosmos(p.threshold, p.base_fraction, tol, step);
  } else {
    if (o.criterion.value_or("balanced") != "balanced") {
      throw ConfigError("ethereum supports --criterion balanced");
    }
    const auto p = ethereum_params(o);
    r = find_min_bonus_balanced_eth(p.late_fraction, o.epsilon.value_or(0.2),
                                    tol, step);
  }
  json j = {{"system", o.system},
            {"criterion", to_string(r.criterion)},
            {"feasible", r.feasible},
            {"b_star", r.feasible ? json(r.b_star) : json(nullptr)},
            {"worst_case_pair", r.feasible
                                    ? json::array({r.worst_case_pair.first,
                                                   r.worst_case_pair.second})
                                    : json(nullptr)},
            {"used_linear_scan", r.used_linear_scan}};
  if (r.criterion == BonusCriterion::kBalanced) j["epsilon"] = r.epsilon;
  write_text(o, out, j.dump(2) + "\n");
  return r.feasible ? kExitOk : kExitUndefined;
}

int cmd_critical_epsilon(const Options& o, std::ostream& out) {
  if (!o.system.empty()) require_system(o, {"ethereum"});
  const auto p = ethereum_params(o);
  const double tol = o.tolerance.value_or(1e-4);
  const double step = o.grid.value_or(0.001);
  const double eps = critical_epsilon_eth(p.late_fraction, tol, step);
  const auto at = find_min_bonus_balanced_eth(p.late_fraction, eps,
                                              std::min(1e-6, tol), step);
  json j = {{"rho", p.late_fraction},
            {"critical_epsilon", eps},
            {"b_star", at.feasible ? json(at.b_star) : json(nullptr)}};
  write_text(o, out, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_aggregators(const Options& o, std::ostream& out) {
  if (!o.system.empty()) require_system(o, {"ethereum"});
  if (o.mean_aggs) throw ConfigError("aggregators takes --aggregators, not --mean-aggs");
  const auto counts = o.aggregators.empty() ? std::vector<int>{8, 16} : o.aggregators;
  for (int k : counts) {
    if (k < 1) throw ConfigError("--aggregators values must be >= 1");
  }
  const auto table = aggregator_sweep(ethereum_params(o), counts,
                                      attacker_grid(o),
                                      o.victim_power.value_or(0.05));
  write_text(o, out, format_csv(table));
  return all_undefined(table) ? kExitUndefined : kExitOk;
}

std::string sim_json(const std::vector<double>& means,
                     const std::vector<double>& errors,
                     const std::vector<double>& z, bool pass, json extra = {}) {
  json j = {{"means", means}, {"std_errors", errors}, {"pass", pass}};
  json zs = json::array();
  for (double x : z) zs.push_back(std::isfinite(x) ? json(x) : json(nullptr));
  j["z_scores"] = zs;
  if (extra.is_object()) j.update(extra);
  return j.dump(2) + "\n";
}

int cmd_simulate(const CLI::App& app, const Options& o, std::ostream& out) {
  const auto reward = make_reward(o);
  const auto g = make_game(app, o);
  const auto kinds = attack_kinds(o, {AttackKind::kOmission}, true);
  if (kinds.size() != 1) throw ConfigError("simulate takes one --attack");
  const auto profile = kinds[0] == AttackKind::kHonest
                           ? StrategyProfile::honest()
                           : StrategyProfile::attack(kinds[0], g.attacker, g.victim);
  const SimConfig config{g.dist, profile, o.rounds, o.seed, o.threads};
  SimResult sim;
  UtilityVector analytic;
  if (o.system == "ethereum") {
    const auto eth = ethereum_params(o);
    OmissionSuccess success;
    if (profile.is_attack()) {
      success = eth.aggregators().omission_success(g.dist[g.attacker], true);
    }
    analytic = utilities_under_profile(g.dist, profile, reward, success);
    sim = simulate_ethereum(config, eth);
  } else {
    analytic = utilities_under_profile(g.dist, profile, reward);
    sim = simulate(config, reward);
  }
  const auto cmp = compare_to_closed_form(sim, analytic);
  write_text(o, out, sim_json(sim.mean_utility, sim.std_error, cmp.z_scores,
                              cmp.pass));
  return kExitOk;
}

RobustnessResult ethereum_robustness(const PowerDistribution& dist,
                                     const RewardFunction& reward,
                                     const std::vector<AttackKind>& kinds,
                                     const Options& o) {
  // Aggregation feasibility depends on the attacker, so scan per attacker.
  RobustnessResult total;
  bool first = true;
  for (PlayerIndex a = 0; a < dist.size(); ++a) {
    std::vector<AttackPair> pairs;
    for (PlayerIndex v = 0; v < dist.size(); ++v) {
      if (v != a) pairs.emplace_back(a, v);
    }
    const auto r =
        robustness_scan(dist, reward, kinds, pairs, metric_options(o, dist[a]));
    total.scanned += r.scanned;
    total.undefined_cost_count += r.undefined_cost_count;
    if (first || r.epsilon > total.epsilon ||
        (r.epsilon == total.epsilon &&
         detail::profile_key(r.worst_effectiveness_attack) <
             detail::profile_key(total.worst_effectiveness_attack))) {
      total.epsilon = r.epsilon;
      total.worst_effectiveness_attack = r.worst_effectiveness_attack;
      first = false;
    }
    if (r.gamma &&
        (!total.gamma || *r.gamma < *total.gamma ||
         (*r.gamma == *total.gamma &&
          detail::profile_key(*r.worst_cost_attack) <
              detail::profile_key(*total.worst_cost_attack)))) {
      total.gamma = r.gamma;
      total.worst_cost_attack = r.worst_cost_attack;
    }
  }
  return total;
}

int cmd_robustness(const CLI::App& app, const Options& o, std::ostream& out) {
  const auto reward = make_reward(o);
  PowerDistribution dist = o.powers.empty() ? make_game(app, o).dist
                                            : PowerDistribution(o.powers);
  const auto kinds = attack_kinds(
      o, {AttackKind::kOmission, AttackKind::kDelay, AttackKind::kCombined});
  const auto r = o.system == "ethereum"
                     ? ethereum_robustness(dist, reward, kinds, o)
                     : robustness_scan(dist, reward, kinds,
                                       all_attack_pairs(dist.size()),
                                       metric_options(o, 0.0));
  json j = {{"epsilon", r.epsilon},
            {"gamma", r.gamma ? json(*r.gamma) : json(nullptr)},
            {"worst_effectiveness_attack", profile_json(r.worst_effectiveness_attack)},
            {"worst_cost_attack",
             r.worst_cost_attack ? profile_json(*r.worst_cost_attack) : json(nullptr)},
            {"undefined_cost_count", r.undefined_cost_count},
            {"scanned", r.scanned}};
  write_text(o, out, j.dump(2) + "\n");
  return r.gamma ? kExitOk : kExitUndefined;
}

int cmd_verify(const Options& o, std::ostream& out) {
  if (!o.system.empty()) throw ConfigError("verify runs its own reward catalog; drop --system");
  VerifyReport r;
  if (o.suite == "theorems") {
    r = verify_cost_relations(o.grid.value_or(0.01));
  } else if (o.suite == "lemma") {
    r = verify_profile_equivalence(o.cases.value_or(1000), o.seed);
  } else if (o.suite == "balance") {
    r = verify_balance(o.grid.value_or(0.01));
  } else if (o.suite == "oracle") {
    r = verify_oracle(o.cases.value_or(25), o.rounds, o.seed);
  } else {
    throw ConfigError("unknown --suite '" + o.suite + "'");
  }
  json extra = {{"suite", r.suite},
                {"cases", r.cases},
                {"skipped", r.skipped},
                {"max_residual",
                 std::isfinite(r.max_residual) ? json(r.max_residual) : json(nullptr)},
                {"tolerance", r.tolerance}};
  write_text(o, out, sim_json(r.means, r.std_errors, r.z_scores, r.pass, extra));
  return r.pass ? kExitOk : kExitInternal;
}

const char* kFooter =
    "With --attacker-power/--victim-power the remaining stake is split\n"
    "equally across ceil(rest / (1/3)) filler players (or --fillers N).\n"
    "Attacker is player 0 and victim player 1.\n"
    "A --config JSON object may carry any flag name (dashes as underscores)\n"
    "plus \"command\"; flags on the command line override it.\n"
    "Exit status: 0 ok, 1 internal error or failed verify, 2 invalid\n"
    "configuration, 3 only undefined results.\n";

void build_app(CLI::App& app, Options& o) {
  app.footer(kFooter);
  app.fallthrough();
  app.require_subcommand(0, 1);
  const std::map<std::string, std::string> help = {
      {"metrics", "effectiveness and cost of single attacks"},
      {"sweep", "metrics over an attacker grid and victim values (CSV)"},
      {"search-bonus", "smallest bonus meeting --criterion"},
      {"critical-epsilon", "smallest balance band admitting a bonus (ethereum)"},
      {"aggregators", "omission effectiveness per aggregator count (ethereum)"},
      {"simulate", "Monte Carlo utilities against the analytic model (JSON)"},
      {"robustness", "worst effectiveness and cost over all attack pairs"},
      {"verify", "run a property suite (JSON)"},
  };
  for (const auto& name : kCommands) {
    app.add_subcommand(name, help.at(name))->callback([&o, name] { o.command = name; });
  }
  app.add_option("--config", o.config, "JSON config file");
  app.add_option("--system", o.system,
                 "simple|threshold|scaling|window|base|cosmos|ethereum");
  app.add_option("--t", o.t, "bonus threshold t");
  app.add_option("--a", o.a, "base fraction a");
  app.add_option("--b", o.b, "bonus fraction b");
  app.add_option("--rho", o.rho, "late-inclusion fraction rho");
  app.add_option("--w", o.w, "inclusion window w");
  app.add_option("--c", o.c, "committee size c");
  app.add_option("--mean-aggs", o.mean_aggs, "mean aggregators per committee");
  app.add_option("--rmax", o.rmax, "maximum reward per round");
  app.add_option("--powers", o.powers, "explicit stake shares")->delimiter(',');
  app.add_option("--attacker", o.attacker, "attacker index into --powers");
  app.add_option("--victim", o.victim, "victim index into --powers");
  app.add_option("--attacker-power", o.attacker_power, "attacker stake share");
  app.add_option("--victim-power", o.victim_power, "victim stake share");
  app.add_option("--fillers", o.fillers, "number of filler players");
  app.add_option("--attack", o.attacks, "honest|omission|delay|combined")
      ->delimiter(',');
  app.add_option("--grid", o.grid, "grid step over (0, 1/3]");
  app.add_option("--victims", o.victims, "victim stake shares for sweeps")
      ->delimiter(',');
  app.add_option("--out", o.out, "output file (default stdout)");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--rounds", o.rounds, "simulated rounds");
  app.add_option("--threads", o.threads, "worker threads (default DOP_THREADS)");
  app.add_option("--criterion", o.criterion, "nash|balanced");
  app.add_option("--epsilon", o.epsilon, "balance band half-width");
  app.add_option("--tolerance", o.tolerance, "search tolerance");
  app.add_option("--aggregators", o.aggregators, "aggregator counts")
      ->delimiter(',');
  app.add_option("--suite", o.suite, "theorems|lemma|balance|oracle");
  app.add_option("--cases", o.cases, "randomized cases for lemma/oracle");
  app.add_option("--baseline", o.baseline, "loss baseline: honest|stake");
}

int dispatch(const CLI::App& app, const Options& o, std::ostream& out) {
  const auto& c = o.command;
  if (c == "metrics") return cmd_metrics(app, o, out);
  if (c == "sweep") return cmd_sweep(o, out);
  if (c == "search-bonus") return cmd_search_bonus(o, out);
  if (c == "critical-epsilon") return cmd_critical_epsilon(o, out);
  if (c == "aggregators") return cmd_aggregators(o, out);
  if (c == "simulate") return cmd_simulate(app, o, out);
  if (c == "robustness") return cmd_robustness(app, o, out);
  if (c == "verify") return cmd_verify(o, out);
  if (c.empty()) throw ConfigError("no command given; see --help");
  throw ConfigError("unknown command '" + c + "'");
}

}  // namespace

std::string format_csv(const SweepTable& table) {
  const bool with_aggs =
      std::any_of(table.rows.begin(), table.rows.end(),
                  [](const SweepRow& r) { return r.aggregators.has_value(); });
  std::string s =
      "attacker_power,victim_power,attack,effectiveness,cost,cost_defined";
  s += with_aggs ? ",aggregators\n" : "\n";
  for (const auto& r : table.rows) {
    s += format_real(r.attacker_power) + ',' + format_real(r.victim_power) +
         ',' + to_string(r.attack) + ',' + format_real(r.effectiveness) + ',' +
         (r.cost_defined ? format_real(r.cost) : std::string("nan")) + ',' +
         (r.cost_defined ? "true" : "false");
    if (with_aggs) {
      s += ',' + (r.aggregators ? std::to_string(*r.aggregators) : std::string());
    }
    s += '\n';
  }
  return s;
}

void emit_csv(const SweepTable& table, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  f << format_csv(table);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
}

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app("Denial-of-profit attack metrics for vote-collecting "
               "proof-of-stake protocols.",
               "dop");
  Options o;
  build_app(app, o);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  }
  try {
    if (!o.config.empty()) merge_config(app, o);
    check_params(app, o);
    return dispatch(app, o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const UndefinedMetric& e) {
    err << "undefined: " << e.what() << "\n";
    return kExitUndefined;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace dop::cli

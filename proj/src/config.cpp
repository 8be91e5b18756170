#include "rbandit/config.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <sstream>
#include <type_traits>
#include <yaml-cpp/yaml.h>

#include "rbandit/errors.hpp"

namespace rbandit {

namespace {

struct Context {
  std::string source;
};

[[noreturn]] void fail(const Context& ctx, const YAML::Mark& mark, const std::string& message) {
  if (mark.is_null()) throw ConfigError(fmt::format("{}: {}", ctx.source, message));
  throw ConfigError(fmt::format("{}:{}:{}: {}", ctx.source, mark.line + 1, mark.column + 1, message));
}

[[noreturn]] void fail(const Context& ctx, const YAML::Node& node, const std::string& message) {
  fail(ctx, node.Mark(), message);
}

double as_double(const Context& ctx, const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail(ctx, node, fmt::format("'{}' must be a number", what));
  double value = 0.0;
  if (!YAML::convert<double>::decode(node, value) || !std::isfinite(value))
    fail(ctx, node, fmt::format("'{}' must be a finite number, got '{}'", what, node.Scalar()));
  return value;
}

std::uint64_t as_count(const Context& ctx, const YAML::Node& node, const std::string& what) {
  const double value = as_double(ctx, node, what);
  if (value < 0.0 || value != std::floor(value) || value > 9007199254740992.0)
    fail(ctx, node, fmt::format("'{}' must be a non-negative integer, got '{}'", what, node.Scalar()));
  return static_cast<std::uint64_t>(value);
}

std::string as_string(const Context& ctx, const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail(ctx, node, fmt::format("'{}' must be a string", what));
  return node.Scalar();
}

void require_map(const Context& ctx, const YAML::Node& node, const std::string& what) {
  if (!node.IsMap()) fail(ctx, node, fmt::format("'{}' must be a mapping", what));
}

std::string key_of(const YAML::const_iterator::value_type& item) { return item.first.Scalar(); }

ArmSpec parse_arm(const Context& ctx, const YAML::Node& node, std::size_t index) {
  const std::string where = fmt::format("scenario.arms[{}]", index);
  require_map(ctx, node, where);
  std::string dist = "gaussian";
  std::optional<double> mean;
  double sigma = 1.0;
  std::vector<std::pair<double, double>> knots;
  bool have_knots = false;
  for (const auto& item : node) {
    const std::string key = key_of(item);
    if (key == "dist") {
      dist = as_string(ctx, item.second, where + ".dist");
    } else if (key == "mean") {
      mean = as_double(ctx, item.second, where + ".mean");
    } else if (key == "sigma") {
      sigma = as_double(ctx, item.second, where + ".sigma");
    } else if (key == "knots") {
      if (!item.second.IsSequence()) fail(ctx, item.second, where + ".knots must be a list of [x, F(x)] pairs");
      for (const auto& knot : item.second) {
        if (!knot.IsSequence() || knot.size() != 2) fail(ctx, knot, where + ".knots entries must be [x, F(x)] pairs");
        knots.emplace_back(as_double(ctx, knot[0], where + ".knots"), as_double(ctx, knot[1], where + ".knots"));
      }
      have_knots = true;
    } else {
      fail(ctx, item.first, fmt::format("unknown key '{}' in {}", key, where));
    }
  }
  try {
    if (dist == "gaussian") {
      if (!mean) fail(ctx, node, where + ": gaussian arms need 'mean'");
      return ArmSpec::gaussian(*mean, sigma);
    }
    if (dist == "custom") {
      if (!have_knots) fail(ctx, node, where + ": custom arms need 'knots'");
      return ArmSpec::custom_cdf(std::move(knots));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(ctx, node, fmt::format("{}: {}", where, e.what()));
  }
  fail(ctx, node, fmt::format("{}: unknown dist '{}' (expected gaussian or custom)", where, dist));
}

ScenarioSpec parse_scenario(const Context& ctx, const YAML::Node& node) {
  require_map(ctx, node, "scenario");
  ScenarioSpec spec;
  for (const auto& item : node) {
    const std::string key = key_of(item);
    if (key == "preset") {
      spec.preset = as_string(ctx, item.second, "scenario.preset");
      const auto names = preset_names();
      if (std::find(names.begin(), names.end(), *spec.preset) == names.end())
        fail(ctx, item.second, fmt::format("unknown preset '{}'", *spec.preset));
    } else if (key == "arms") {
      if (!item.second.IsSequence()) fail(ctx, item.second, "'scenario.arms' must be a list");
      std::vector<ArmSpec> arms;
      for (std::size_t i = 0; i < item.second.size(); ++i) arms.push_back(parse_arm(ctx, item.second[i], i));
      spec.arms = std::move(arms);
    } else if (key == "horizon") {
      spec.horizon = as_count(ctx, item.second, "scenario.horizon");
    } else if (key == "attack") {
      require_map(ctx, item.second, "scenario.attack");
      for (const auto& sub : item.second) {
        const std::string k = key_of(sub);
        if (k == "rho") {
          spec.rho = as_double(ctx, sub.second, "scenario.attack.rho");
        } else if (k == "strategy") {
          try {
            spec.strategy = parse_attack_strategy(as_string(ctx, sub.second, "scenario.attack.strategy"));
          } catch (const InputError& e) {
            fail(ctx, sub.second, e.what());
          }
        } else if (k == "magnitude") {
          spec.magnitude = as_double(ctx, sub.second, "scenario.attack.magnitude");
        } else {
          fail(ctx, sub.first, fmt::format("unknown key '{}' in scenario.attack", k));
        }
      }
    } else {
      fail(ctx, item.first, fmt::format("unknown key '{}' in scenario", key));
    }
  }
  return spec;
}

// Sets one algorithm parameter; returns false for keys the algorithm lacks.
bool set_parameter(PolicyConfig& config, const std::string& key, double value) {
  return std::visit(
      [&](auto& p) -> bool {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MedEUcbParams>) {
          if (key == "b") return p.b = value, true;
          if (key == "omega") return p.omega = value, true;
          if (key == "group_size") {
            if (value < 1.0 || value != std::floor(value)) throw ParameterError("group_size must be a positive integer");
            return p.group_size = static_cast<std::uint64_t>(value), true;
          }
        } else if constexpr (std::is_same_v<T, MedEpsGreedyParams> || std::is_same_v<T, EpsGreedyParams>) {
          if (key == "c") return p.c = value, true;
        } else if constexpr (std::is_same_v<T, UcbParams>) {
          if (key == "alpha") return p.alpha = value, true;
        } else if constexpr (std::is_same_v<T, Exp3Params>) {
          if (key == "gamma") return p.gamma = value, true;
          if (key == "reward_lo") return p.reward_lo = value, true;
          if (key == "reward_hi") return p.reward_hi = value, true;
        } else if constexpr (std::is_same_v<T, RucbMabParams>) {
          if (key == "omega") return p.omega = value, true;
        } else if constexpr (std::is_same_v<T, CatoniUcbParams>) {
          if (key == "variance_guess") return p.variance_guess = value, true;
          if (key == "confidence_exponent") return p.confidence_exponent = value, true;
          if (key == "refresh_fraction") return p.refresh_fraction = value, true;
        } else if constexpr (std::is_same_v<T, TrimmedUcbParams>) {
          if (key == "alpha_trim") return p.alpha_trim = value, true;
          if (key == "alpha") return p.alpha = value, true;
        } else if constexpr (std::is_same_v<T, TrimmedEpsGreedyParams>) {
          if (key == "alpha_trim") return p.alpha_trim = value, true;
          if (key == "c") return p.c = value, true;
        }
        return false;
      },
      config);
}

PolicyEntry parse_policy(const Context& ctx, const YAML::Node& node, std::size_t index) {
  const std::string where = fmt::format("policies[{}]", index);
  try {
    if (node.IsScalar()) return policy_entry(node.Scalar());
  } catch (const InputError& e) {
    fail(ctx, node, e.what());
  }
  require_map(ctx, node, where);
  const YAML::Node algorithm = node["algorithm"];
  if (!algorithm) fail(ctx, node, where + ": missing 'algorithm'");
  PolicyEntry entry;
  try {
    entry = policy_entry(as_string(ctx, algorithm, where + ".algorithm"));
  } catch (const InputError& e) {
    fail(ctx, algorithm, e.what());
  }
  for (const auto& item : node) {
    const std::string key = key_of(item);
    if (key == "algorithm") continue;
    if (key == "label") {
      entry.label = as_string(ctx, item.second, where + ".label");
      continue;
    }
    const double value = as_double(ctx, item.second, where + "." + key);
    try {
      if (!set_parameter(entry.config, key, value))
        fail(ctx, item.first, fmt::format("unknown parameter '{}' for {}", key, algorithm_tag(entry.config)));
    } catch (const ParameterError& e) {
      fail(ctx, item.second, fmt::format("{}.{}: {}", where, key, e.what()));
    }
  }
  return entry;
}

void parse_experiment(const Context& ctx, const YAML::Node& node, ExperimentConfig& config) {
  require_map(ctx, node, "experiment");
  for (const auto& item : node) {
    const std::string key = key_of(item);
    if (key == "trials") {
      config.trials = as_count(ctx, item.second, "experiment.trials");
      if (config.trials < 1) fail(ctx, item.second, "'experiment.trials' must be >= 1");
    } else if (key == "seed") {
      config.seed = as_count(ctx, item.second, "experiment.seed");
    } else if (key == "parallelism") {
      const auto p = as_count(ctx, item.second, "experiment.parallelism");
      if (p > 4096) fail(ctx, item.second, "'experiment.parallelism' must be <= 4096");
      config.parallelism = static_cast<unsigned>(p);
    } else if (key == "output_dir") {
      config.output_dir = as_string(ctx, item.second, "experiment.output_dir");
    } else {
      fail(ctx, item.first, fmt::format("unknown key '{}' in experiment", key));
    }
  }
}

void parse_validation(const Context& ctx, const YAML::Node& node, ValidationSpec& spec) {
  require_map(ctx, node, "validation");
  for (const auto& item : node) {
    const std::string key = key_of(item);
    if (key == "reps") {
      spec.reps = as_count(ctx, item.second, "validation.reps");
    } else if (key == "coverage_worlds") {
      spec.coverage_worlds = as_count(ctx, item.second, "validation.coverage_worlds");
    } else if (key == "seed") {
      spec.seed = as_count(ctx, item.second, "validation.seed");
    } else {
      fail(ctx, item.first, fmt::format("unknown key '{}' in validation", key));
    }
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  const Context ctx{source};
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    fail(ctx, e.mark, e.msg);
  }
  ExperimentConfig config;
  if (root.IsNull()) return config;
  require_map(ctx, root, "top level");
  for (const auto& item : root) {
    const std::string key = key_of(item);
    if (key == "scenario") {
      config.scenario = parse_scenario(ctx, item.second);
    } else if (key == "experiment") {
      parse_experiment(ctx, item.second, config);
    } else if (key == "policies") {
      if (!item.second.IsSequence()) fail(ctx, item.second, "'policies' must be a list");
      for (std::size_t i = 0; i < item.second.size(); ++i)
        config.policies.push_back(parse_policy(ctx, item.second[i], i));
    } else if (key == "validation") {
      parse_validation(ctx, item.second, config.validation);
    } else {
      fail(ctx, item.first, fmt::format("unknown top-level key '{}'", key));
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

Scenario resolve_scenario(const ScenarioSpec& spec) {
  std::vector<ArmSpec> arms;
  AttackSpec attack;
  std::uint64_t horizon = 0;
  if (spec.preset) {
    const std::uint64_t preset_horizon = preset_default_horizon(*spec.preset);
    Scenario base = make_preset(*spec.preset, 0.0, preset_horizon);
    arms = base.arms();
    attack = base.attack();
    attack.rho = 0.125;
    horizon = preset_horizon;
  } else {
    if (!spec.arms) throw ConfigError("scenario: either 'preset' or 'arms' is required");
    if (!spec.horizon) throw ConfigError("scenario: 'horizon' is required without a preset");
  }
  if (spec.arms) arms = *spec.arms;
  if (spec.rho) attack.rho = *spec.rho;
  if (spec.strategy && *spec.strategy != attack.strategy) {
    attack.strategy = *spec.strategy;
    attack.magnitude = default_attack_magnitude(attack.strategy);
  }
  if (spec.magnitude) attack.magnitude = *spec.magnitude;
  if (spec.horizon) horizon = *spec.horizon;
  return Scenario(std::move(arms), attack, horizon);
}

std::string scenario_name(const ScenarioSpec& spec) { return spec.preset.value_or("custom"); }

PolicyEntry policy_entry(const std::string& tag) {
  return {tag, default_config(tag)};
}

std::vector<std::pair<std::string, double>> policy_parameters(const PolicyConfig& config) {
  return std::visit(
      [](const auto& p) -> std::vector<std::pair<std::string, double>> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MedEUcbParams>) {
          return {{"b", p.b}, {"omega", p.omega}, {"group_size", static_cast<double>(p.group_size)}};
        } else if constexpr (std::is_same_v<T, MedEpsGreedyParams> || std::is_same_v<T, EpsGreedyParams>) {
          return {{"c", p.c}};
        } else if constexpr (std::is_same_v<T, UcbParams>) {
          return {{"alpha", p.alpha}};
        } else if constexpr (std::is_same_v<T, Exp3Params>) {
          std::vector<std::pair<std::string, double>> out;
          if (p.gamma) out.emplace_back("gamma", *p.gamma);
          if (p.reward_lo) out.emplace_back("reward_lo", *p.reward_lo);
          if (p.reward_hi) out.emplace_back("reward_hi", *p.reward_hi);
          return out;
        } else if constexpr (std::is_same_v<T, RucbMabParams>) {
          return {{"omega", p.omega}};
        } else if constexpr (std::is_same_v<T, CatoniUcbParams>) {
          return {{"variance_guess", p.variance_guess},
                  {"confidence_exponent", p.confidence_exponent},
                  {"refresh_fraction", p.refresh_fraction}};
        } else if constexpr (std::is_same_v<T, TrimmedUcbParams>) {
          return {{"alpha_trim", p.alpha_trim}, {"alpha", p.alpha}};
        } else {
          return {{"alpha_trim", p.alpha_trim}, {"c", p.c}};
        }
      },
      config);
}

}  // namespace rbandit

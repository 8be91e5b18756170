#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbandit/env.hpp"
#include "rbandit/policies.hpp"

namespace rbandit {

/// Malformed or invalid configuration text. The message starts with
/// "source:line:column:" when the position is known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PolicyEntry {
  std::string label;  // defaults to the algorithm tag
  PolicyConfig config;
};

/// Scenario section before resolution. Explicit keys override the preset.
struct ScenarioSpec {
  std::optional<std::string> preset;
  std::optional<std::vector<ArmSpec>> arms;
  std::optional<double> rho;
  std::optional<AttackStrategy> strategy;
  std::optional<double> magnitude;
  std::optional<std::uint64_t> horizon;
};

struct ValidationSpec {
  std::optional<std::uint64_t> reps;
  std::optional<std::uint64_t> coverage_worlds;
  std::optional<std::uint64_t> seed;
};

struct ExperimentConfig {
  ScenarioSpec scenario;
  std::vector<PolicyEntry> policies;
  std::uint64_t trials = 20;
  std::uint64_t seed = 42;
  unsigned parallelism = 0;  // 0: hardware concurrency
  std::optional<std::string> output_dir;
  ValidationSpec validation;
};

/// Parses YAML text. `source` names the text in error messages.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Builds the scenario: preset defaults first, then explicit keys. Without a
/// preset, arms, attack strategy and horizon must all be given.
Scenario resolve_scenario(const ScenarioSpec& spec);

/// Name used in output file names: the preset name, or "custom".
std::string scenario_name(const ScenarioSpec& spec);

/// Policy entry from a tag with default parameters.
PolicyEntry policy_entry(const std::string& tag);

/// Algorithm parameters as (key, value) pairs, in a fixed order.
std::vector<std::pair<std::string, double>> policy_parameters(const PolicyConfig& config);

}  // namespace rbandit

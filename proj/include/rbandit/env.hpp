#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rbandit/random.hpp"

namespace rbandit {

/// Reward distribution of one arm. Either N(mean, sigma^2) or a piecewise
/// linear CDF given as a table of (x, F(x)) knots starting at F = 0 and
/// ending at F = 1.
class ArmSpec {
 public:
  enum class Kind { kGaussian, kCustomCdf };

  static ArmSpec gaussian(double mean, double sigma);
  static ArmSpec custom_cdf(std::vector<std::pair<double, double>> knots);

  Kind kind() const { return kind_; }
  double mean() const { return mean_; }
  // Standard deviation (computed from the table for custom arms).
  double sigma() const { return sigma_; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

  double cdf(double x) const;
  // Density; the segment slope for custom arms.
  double pdf(double x) const;
  // Generalized inverse inf{x : F(x) >= p}.
  double quantile(double p) const;

 private:
  ArmSpec() = default;

  Kind kind_ = Kind::kGaussian;
  double mean_ = 0.0;
  double sigma_ = 1.0;
  std::vector<std::pair<double, double>> knots_;
};

enum class AttackStrategy { kNone, kTargetedUniform, kConstantOffset, kMedianKiller };

std::string_view to_string(AttackStrategy strategy);
AttackStrategy parse_attack_strategy(std::string_view name);

inline constexpr double kDefaultMedianKillerMagnitude = 1e9;

struct AttackSpec {
  double rho = 0.0;
  AttackStrategy strategy = AttackStrategy::kNone;
  // M for targeted-uniform, c for constant-offset, B for median-killer.
  double magnitude = 0.0;

  void validate() const;
};

/// Full experiment definition. Validates on construction and caches the
/// optimal arm and the gaps.
class Scenario {
 public:
  Scenario(std::vector<ArmSpec> arms, AttackSpec attack, std::uint64_t horizon);

  const std::vector<ArmSpec>& arms() const { return arms_; }
  const AttackSpec& attack() const { return attack_; }
  std::uint64_t horizon() const { return horizon_; }
  std::size_t num_arms() const { return arms_.size(); }

  std::size_t optimal_arm() const { return optimal_; }
  double optimal_mean() const { return arms_[optimal_].mean(); }
  double gap(std::size_t arm) const { return optimal_mean() - arms_[arm].mean(); }
  double min_gap() const { return min_gap_; }
  double max_gap() const { return max_gap_; }

  Scenario with_attack(AttackSpec attack) const { return Scenario(arms_, attack, horizon_); }
  Scenario with_horizon(std::uint64_t horizon) const { return Scenario(arms_, attack_, horizon); }

 private:
  std::vector<ArmSpec> arms_;
  AttackSpec attack_;
  std::uint64_t horizon_;
  std::size_t optimal_ = 0;
  double min_gap_ = 0.0;
  double max_gap_ = 0.0;
};

struct Observation {
  std::uint64_t round = 0;
  std::size_t arm = 0;
  double clean_reward = 0.0;
  bool attacked = false;
  double observed_reward = 0.0;
};

struct AttackOutcome {
  double observed;
  bool attacked;
};

double sample_clean(const ArmSpec& arm, RandomStream& rng);

/// One Bernoulli(rho) occurrence draw per call, then the strategy's eta.
AttackOutcome apply_attack(const AttackSpec& spec, bool pulled_is_optimal, double clean,
                           RandomStream& rng);

/// Single-owner bandit environment. Clean rewards and attacks use separate
/// streams so attack occurrence never depends on which arm was pulled.
class Environment {
 public:
  Environment(const Scenario& scenario, std::uint64_t seed);

  Observation step(std::size_t arm);

  const Scenario& scenario() const { return *scenario_; }
  std::uint64_t round() const { return round_; }

 private:
  const Scenario* scenario_;
  RandomStream reward_rng_;
  RandomStream attack_rng_;
  std::uint64_t round_ = 0;
};

// Built-in presets.
Scenario preset_paper_k10(double rho = 0.125, std::uint64_t horizon = 100000);
Scenario preset_radio_sinr(double rho = 0.125, std::uint64_t horizon = 2000);
Scenario make_preset(std::string_view name, double rho, std::uint64_t horizon);
std::vector<std::string> preset_names();
std::uint64_t preset_default_horizon(std::string_view name);

/// Magnitude used when a strategy is chosen without one: M = 1800,
/// c = 40, B = 1e9.
double default_attack_magnitude(AttackStrategy strategy);

}  // namespace rbandit

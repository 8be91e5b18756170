#include "rbandit/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <fmt/format.h>

#include "rbandit/errors.hpp"
#include "rbandit/normal.hpp"

namespace rbandit {

ArmSpec ArmSpec::gaussian(double mean, double sigma) {
  if (!std::isfinite(mean)) throw ParameterError("gaussian arm: mean must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("gaussian arm: sigma must be > 0");
  ArmSpec arm;
  arm.kind_ = Kind::kGaussian;
  arm.mean_ = mean;
  arm.sigma_ = sigma;
  return arm;
}

ArmSpec ArmSpec::custom_cdf(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw ParameterError("custom-cdf arm: need at least two knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto [x, f] = knots[i];
    if (!std::isfinite(x) || !(f >= 0.0 && f <= 1.0))
      throw ParameterError("custom-cdf arm: knots must be finite with F in [0, 1]");
    if (i > 0 && !(x > knots[i - 1].first))
      throw ParameterError("custom-cdf arm: x must be strictly increasing");
    if (i > 0 && f < knots[i - 1].second)
      throw ParameterError("custom-cdf arm: F must be non-decreasing");
  }
  if (knots.front().second != 0.0 || knots.back().second != 1.0)
    throw ParameterError("custom-cdf arm: F must run from 0 to 1");

  // Piecewise-linear CDF: uniform mass on each segment.
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const auto [x0, f0] = knots[i - 1];
    const auto [x1, f1] = knots[i];
    const double w = f1 - f0;
    mean += w * 0.5 * (x0 + x1);
    second += w * (x0 * x0 + x0 * x1 + x1 * x1) / 3.0;
  }
  ArmSpec arm;
  arm.kind_ = Kind::kCustomCdf;
  arm.mean_ = mean;
  arm.sigma_ = std::sqrt(std::max(0.0, second - mean * mean));
  arm.knots_ = std::move(knots);
  return arm;
}

double ArmSpec::cdf(double x) const {
  if (kind_ == Kind::kGaussian) return normal_cdf((x - mean_) / sigma_);
  if (x <= knots_.front().first) return 0.0;
  if (x >= knots_.back().first) return 1.0;
  auto hi = std::upper_bound(knots_.begin(), knots_.end(), x,
                             [](double v, const auto& k) { return v < k.first; });
  auto lo = hi - 1;
  const double frac = (x - lo->first) / (hi->first - lo->first);
  return lo->second + frac * (hi->second - lo->second);
}

double ArmSpec::pdf(double x) const {
  if (kind_ == Kind::kGaussian) {
    const double z = (x - mean_) / sigma_;
    return std::exp(-0.5 * z * z) / (sigma_ * std::sqrt(2.0 * std::numbers::pi));
  }
  if (x < knots_.front().first || x >= knots_.back().first) return 0.0;
  auto hi = std::upper_bound(knots_.begin(), knots_.end(), x,
                             [](double v, const auto& k) { return v < k.first; });
  auto lo = hi - 1;
  return (hi->second - lo->second) / (hi->first - lo->first);
}

double ArmSpec::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("quantile: p must lie in (0, 1)");
  if (kind_ == Kind::kGaussian) return mean_ + sigma_ * normal_quantile(p);
  // First knot with F >= p; the infimum lies on the segment ending there.
  auto hi = std::lower_bound(knots_.begin(), knots_.end(), p,
                             [](const auto& k, double v) { return k.second < v; });
  auto lo = hi - 1;
  const double frac = (p - lo->second) / (hi->second - lo->second);
  return lo->first + frac * (hi->first - lo->first);
}

std::string_view to_string(AttackStrategy strategy) {
  switch (strategy) {
    case AttackStrategy::kNone: return "none";
    case AttackStrategy::kTargetedUniform: return "targeted-uniform";
    case AttackStrategy::kConstantOffset: return "constant-offset";
    case AttackStrategy::kMedianKiller: return "median-killer";
  }
  return "none";
}

AttackStrategy parse_attack_strategy(std::string_view name) {
  for (auto s : {AttackStrategy::kNone, AttackStrategy::kTargetedUniform,
                 AttackStrategy::kConstantOffset, AttackStrategy::kMedianKiller}) {
    if (name == to_string(s)) return s;
  }
  throw InputError(fmt::format("unknown attack strategy '{}'", name));
}

void AttackSpec::validate() const {
  if (!(rho >= 0.0 && rho < 1.0)) throw ParameterError("attack: rho must lie in [0, 1)");
  if (strategy != AttackStrategy::kNone && !(magnitude > 0.0 && std::isfinite(magnitude)))
    throw ParameterError(fmt::format("attack: {} needs a positive finite magnitude", to_string(strategy)));
}

Scenario::Scenario(std::vector<ArmSpec> arms, AttackSpec attack, std::uint64_t horizon)
    : arms_(std::move(arms)), attack_(attack), horizon_(horizon) {
  if (arms_.size() < 2) throw ParameterError("scenario: need at least 2 arms");
  if (horizon_ < arms_.size()) throw ParameterError("scenario: horizon must be >= number of arms");
  attack_.validate();

  optimal_ = 0;
  for (std::size_t i = 1; i < arms_.size(); ++i) {
    if (arms_[i].mean() > arms_[optimal_].mean()) optimal_ = i;
  }
  min_gap_ = std::numeric_limits<double>::infinity();
  max_gap_ = 0.0;
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    if (i == optimal_) continue;
    const double g = gap(i);
    if (!(g > 0.0)) throw ParameterError("scenario: the optimal arm must be unique");
    min_gap_ = std::min(min_gap_, g);
    max_gap_ = std::max(max_gap_, g);
  }
}

double sample_clean(const ArmSpec& arm, RandomStream& rng) {
  if (arm.kind() == ArmSpec::Kind::kGaussian) return arm.mean() + arm.sigma() * standard_normal(rng);
  const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  return arm.quantile(u);
}

AttackOutcome apply_attack(const AttackSpec& spec, bool pulled_is_optimal, double clean,
                           RandomStream& rng) {
  if (!rng.bernoulli(spec.rho)) return {clean, false};
  double eta = 0.0;
  switch (spec.strategy) {
    case AttackStrategy::kNone:
      break;
    case AttackStrategy::kTargetedUniform: {
      const double magnitude = spec.magnitude * rng.uniform();
      eta = pulled_is_optimal ? -magnitude : magnitude;
      break;
    }
    case AttackStrategy::kConstantOffset:
    case AttackStrategy::kMedianKiller:
      eta = pulled_is_optimal ? -spec.magnitude : 0.0;
      break;
  }
  return {clean + eta, true};
}

Environment::Environment(const Scenario& scenario, std::uint64_t seed)
    : scenario_(&scenario),
      reward_rng_(derive_seed(seed, static_cast<std::uint64_t>(StreamRole::kRewards))),
      attack_rng_(derive_seed(seed, static_cast<std::uint64_t>(StreamRole::kAttack))) {}

Observation Environment::step(std::size_t arm) {
  if (arm >= scenario_->num_arms())
    throw std::out_of_range(fmt::format("arm index {} out of range [0, {})", arm, scenario_->num_arms()));
  if (round_ >= scenario_->horizon())
    throw HorizonExhausted(fmt::format("horizon {} exhausted", scenario_->horizon()));
  Observation obs;
  obs.round = ++round_;
  obs.arm = arm;
  obs.clean_reward = sample_clean(scenario_->arms()[arm], reward_rng_);
  const auto outcome =
      apply_attack(scenario_->attack(), arm == scenario_->optimal_arm(), obs.clean_reward, attack_rng_);
  obs.attacked = outcome.attacked;
  obs.observed_reward = outcome.observed;
  return obs;
}

Scenario preset_paper_k10(double rho, std::uint64_t horizon) {
  std::vector<ArmSpec> arms;
  for (int i = 1; i <= 10; ++i) arms.push_back(ArmSpec::gaussian(2.0 * i, 1.0));
  return Scenario(std::move(arms), AttackSpec{rho, AttackStrategy::kTargetedUniform, 1800.0}, horizon);
}

Scenario preset_radio_sinr(double rho, std::uint64_t horizon) {
  std::vector<ArmSpec> arms;
  for (double mean : {41.0, 37.0, 35.0, 31.0, 28.0}) arms.push_back(ArmSpec::gaussian(mean, 1.0));
  return Scenario(std::move(arms), AttackSpec{rho, AttackStrategy::kConstantOffset, 40.0}, horizon);
}

Scenario make_preset(std::string_view name, double rho, std::uint64_t horizon) {
  if (name == "paper-k10") return preset_paper_k10(rho, horizon);
  if (name == "radio-sinr") return preset_radio_sinr(rho, horizon);
  throw InputError(fmt::format("unknown preset '{}'", name));
}

std::uint64_t preset_default_horizon(std::string_view name) {
  if (name == "paper-k10") return 100000;
  if (name == "radio-sinr") return 2000;
  throw InputError(fmt::format("unknown preset '{}'", name));
}

double default_attack_magnitude(AttackStrategy strategy) {
  switch (strategy) {
    case AttackStrategy::kNone: return 0.0;
    case AttackStrategy::kTargetedUniform: return 1800.0;
    case AttackStrategy::kConstantOffset: return 40.0;
    case AttackStrategy::kMedianKiller: return kDefaultMedianKillerMagnitude;
  }
  return 0.0;
}

std::vector<std::string> preset_names() { return {"paper-k10", "radio-sinr"}; }

}  // namespace rbandit

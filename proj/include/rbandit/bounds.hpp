#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rbandit/env.hpp"

namespace rbandit {

/// A CDF together with its generalized inverse inf{x : F(x) >= p}.
struct Distribution {
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;

  static Distribution normal(double mean = 0.0, double sigma = 1.0);
  static Distribution uniform(double lo = 0.0, double hi = 1.0);
  static Distribution of(const ArmSpec& arm);
};

struct TailBounds {
  double lower;  // P(quantile - theta_{p-s}(F) <= -a) <= lower
  double upper;  // P(quantile - theta_{p+s}(F) >= b) <= upper
};

/// Concentration of the sample p-quantile when at most a fraction s of the
/// n samples carry arbitrary corruption:
///   lower = exp(-2n [p - s - F(theta_{p-s}(F) - a)]^2)
///   upper = exp(-2n [F(theta_{p+s}(F) + b) - p - s]^2)
/// Requires n >= 1, a, b > 0, 0 <= s < 1/2 and p in (s, 1 - s). A negative
/// bracket term is a ParameterError; rounding noise below 1e-12 counts as 0.
TailBounds quantile_tail_bounds(std::uint64_t n, double s, double p, double a, double b,
                                const Distribution& F);

/// quantile_tail_bounds at p = 1/2.
TailBounds median_tail_bounds(std::uint64_t n, double s, double a, double b, const Distribution& F);

/// Which statement of the attacked-fraction sample size to use. The technical
/// lemma has log(K / (2 eps0^2 delta)); the high-probability proof restates it
/// with log(K / (eps0^2 delta)).
enum class Lemma3Variant { kTechnicalLemma, kTheoremProof };

/// N = ceil(log(K / (m eps0^2 delta)) / (2 eps0^2)) + 1 with m = 2 or 1.
std::uint64_t lemma3_min_samples(std::uint64_t num_arms, double epsilon0, double delta,
                                 Lemma3Variant variant = Lemma3Variant::kTechnicalLemma);

// -- Theorem conditions --------------------------------------------------------

enum class BoundMode { kChecked, kUnchecked };

enum class Theorem { kTheorem1, kTheorem2, kTheorem3, kTheorem4, kCorollary1, kCorollary2 };

std::string_view to_string(Theorem theorem);

/// Analysis constants. Fields not used by a theorem are ignored.
struct AnalysisParams {
  double s = 0.0;      // quantile gap
  double l = 0.0;      // density lower bound
  double xi = 1.0;     // neighbourhood width
  double x0 = 0.0;     // separating point
  double rho = 0.0;    // attack probability
  double b = 0.0;      // med-E-UCB exploration
  double omega = 0.0;  // med-E-UCB confidence
  double c = 0.0;      // med-eps-greedy exploration
  std::optional<double> horizon;
  std::optional<std::uint64_t> group_size;
};

struct ConditionVerdict {
  std::string inequality;
  double lhs;
  double rhs;
  bool passed;
};

/// Evaluates every inequality the theorem states for the given arms.
std::vector<ConditionVerdict> check_conditions(Theorem theorem, std::span<const ArmSpec> arms,
                                               const AnalysisParams& params);
std::vector<ConditionVerdict> check_conditions(Theorem theorem, const Scenario& scenario,
                                               const AnalysisParams& params);
std::vector<std::string> failed_inequalities(const std::vector<ConditionVerdict>& verdicts);

/// Smallest c with every finite term of the theorem's strict max{...}
/// condition; a valid c must exceed it.
double theorem3_c_threshold(std::span<const ArmSpec> arms, double s, double x0, double rho);
double theorem4_c_threshold(std::span<const ArmSpec> arms, double s, double x0, double rho);

// -- Regret bounds -------------------------------------------------------------

/// Pseudo-regret bound of med-E-UCB:
///   sum_j D_j b log(2T) + sum_j D_j 4 w log T / gap_j^2 + sum_j D_j (2 + 2 pi^2 / 3)
/// with gap_j = theta_{1/2-s}(F_*) - theta_{1/2+s}(F_j). Uses s, b, omega;
/// checked mode validates the kTheorem1 conditions first.
double pseudo_regret_bound_med_e_ucb(std::span<const ArmSpec> arms, const AnalysisParams& params,
                                     double horizon, BoundMode mode = BoundMode::kChecked);

/// High-probability regret bound of med-E-UCB: the pseudo-regret terms with
/// the constant replaced by e (bK/(2 delta))^{1/4} + 2K/delta + 3 + pi^2/3.
double regret_bound_highprob_med_e_ucb(std::span<const ArmSpec> arms, const AnalysisParams& params,
                                       double horizon, double delta, BoundMode mode = BoundMode::kChecked);

/// c sum_j D_j log T + 2 c K e mu* + sum_j (2 + 3c) D_j.
double pseudo_regret_bound_med_eps_greedy(std::span<const ArmSpec> arms, const AnalysisParams& params,
                                          double horizon, BoundMode mode = BoundMode::kChecked);

/// 6 ceil(c)^2 K^3 mu* / delta + sum_j 2 c D_j log T + sum_j 2 c D_j.
double regret_bound_highprob_med_eps_greedy(std::span<const ArmSpec> arms, const AnalysisParams& params,
                                            double horizon, double delta,
                                            BoundMode mode = BoundMode::kChecked);

// -- Gaussian arms -------------------------------------------------------------

/// Phi(delta_min / (4 sigma)) - 1/2, the largest tolerable attack probability.
double gaussian_threshold_rho(double delta_min, double sigma);

struct GaussianParams {
  double s;
  double l;
  double xi;
  double omega_min;  // 2 / l^2
  double b_min;      // max{omega_min, 2 / (s - rho)^2}
  double c_min;      // max{10, 1/(Phi(D/2s) - Phi(D/4s))^2, 1/(s - rho)^2}, strict
  double x0_offset;  // x0 = mu* - x0_offset
};

/// Theory-compliant constants for equal-variance Gaussian arms. Throws
/// ParameterError when rho is at or above the threshold.
GaussianParams gaussian_params(double delta_min, double sigma, double rho);

}  // namespace rbandit

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rbandit/bounds.hpp"
#include "rbandit/env.hpp"
#include "rbandit/policies.hpp"

namespace rbandit {

struct TracePoint {
  std::uint64_t t = 0;
  double regret = 0.0;  // cumulative, from the true means
  std::uint64_t optimal_pulls = 0;
};

struct TrialTrace {
  std::string policy;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<TracePoint> checkpoints;
};

struct CurvePoint {
  std::uint64_t t = 0;
  double mean_regret = 0.0;
  double std_regret = 0.0;  // sample standard deviation across trials
  double mean_optimal_pulls = 0.0;
  // mean_optimal_pulls / t, the cumulative fraction of optimal pulls.
  double optimal_pull_rate = 0.0;
};

struct AggregateCurve {
  std::string policy;
  std::uint64_t trials = 0;
  std::vector<CurvePoint> points;
};

/// Every round up to 1000, then a geometric grid with ratio 1.1, plus the
/// fixed fractions T/2, 3T/4, 9T/10 (floored) and T itself. Sorted, unique.
std::vector<std::uint64_t> checkpoint_grid(std::uint64_t horizon);

/// Plays `policy` against a fresh environment for the scenario horizon.
/// The policy only ever sees observed (possibly attacked) rewards.
TrialTrace run_trial(const Scenario& scenario, Policy& policy, std::uint64_t seed);

/// Builds the policy from `config` with the trial's policy stream and plays it.
TrialTrace run_trial(const Scenario& scenario, const PolicyConfig& config, std::uint64_t seed,
                     std::uint64_t trial = 0);

AggregateCurve aggregate(const std::vector<TrialTrace>& traces);

struct ExperimentResult {
  std::vector<AggregateCurve> curves;          // one per policy, in input order
  std::vector<std::vector<TrialTrace>> traces;  // [policy][trial], if kept
};

/// Runs `trials` independent trials of each policy. Trial i uses the seed
/// derive_seed(master_seed, i) for every policy, so all policies face the
/// same reward and attack draws. `parallelism` = 0 picks the hardware
/// concurrency. The result does not depend on `parallelism`.
ExperimentResult run_experiment(const Scenario& scenario, const std::vector<PolicyConfig>& policies,
                                std::uint64_t trials, std::uint64_t master_seed,
                                unsigned parallelism = 0, bool keep_traces = false);

/// Fraction of optimal pulls in rounds (t_from, t_to], both of which must be
/// checkpoints of the curve.
double window_optimal_rate(const AggregateCurve& curve, std::uint64_t t_from, std::uint64_t t_to);

/// Rate over the last `fraction` of the horizon, e.g. 0.1 for the last decile.
double tail_optimal_rate(const AggregateCurve& curve, double fraction);

enum class GrowthClass { kLogarithmic, kLinear, kIndeterminate };

std::string_view to_string(GrowthClass growth);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rss = 0.0;
  double r_squared = 0.0;
};

struct FitReport {
  LineFit log_model;     // regret ~ slope * ln t + intercept
  LineFit linear_model;  // regret ~ slope * t + intercept
  std::size_t points = 0;
  GrowthClass classification = GrowthClass::kIndeterminate;
};

inline constexpr double kFitMinRSquared = 0.95;

/// Least-squares fits of (t, regret) pairs over [t_min, t_max]. Needs at
/// least 10 points in the window.
FitReport fit_growth(const std::vector<std::uint64_t>& t, const std::vector<double>& regret,
                     std::uint64_t t_min, std::uint64_t t_max);
FitReport fit_growth(const AggregateCurve& curve, std::uint64_t t_min, std::uint64_t t_max);

struct DominanceRow {
  std::uint64_t t = 0;
  double bound = 0.0;
  double mean_regret = 0.0;
  double margin = 0.0;  // bound - mean_regret
};

struct DominanceReport {
  std::vector<DominanceRow> rows;
  bool dominated = true;
};

DominanceReport compare_bound(const AggregateCurve& curve, const std::function<double(double)>& bound);

/// Compares against the pseudo-regret bound tagged kTheorem1 (med-E-UCB) or
/// kTheorem3 (med-eps-greedy). Checked mode verifies the conditions once at
/// the scenario horizon and throws ConditionNotMet on failure; the formula is
/// then evaluated at every checkpoint.
DominanceReport compare_bound(const AggregateCurve& curve, Theorem theorem, const Scenario& scenario,
                              const AnalysisParams& params, BoundMode mode = BoundMode::kChecked);

}  // namespace rbandit

#include "rbandit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "rbandit/errors.hpp"
#include "rbandit/parallel.hpp"
#include "rbandit/random.hpp"

namespace rbandit {

std::vector<std::uint64_t> checkpoint_grid(std::uint64_t horizon) {
  constexpr std::uint64_t kDense = 1000;
  constexpr double kRatio = 1.1;
  std::vector<std::uint64_t> grid;
  for (std::uint64_t t = 1; t <= std::min(horizon, kDense); ++t) grid.push_back(t);
  double next = static_cast<double>(kDense) * kRatio;
  while (next < static_cast<double>(horizon)) {
    grid.push_back(static_cast<std::uint64_t>(next));
    next *= kRatio;
  }
  for (std::uint64_t t : {horizon / 2, horizon * 3 / 4, horizon * 9 / 10, horizon}) {
    if (t >= 1) grid.push_back(t);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

TrialTrace run_trial(const Scenario& scenario, Policy& policy, std::uint64_t seed) {
  if (policy.num_arms() != scenario.num_arms())
    throw ParameterError("run_trial: policy and scenario disagree on the number of arms");
  const std::size_t k = scenario.num_arms();
  std::vector<double> gaps(k);
  for (std::size_t i = 0; i < k; ++i) gaps[i] = scenario.gap(i);
  const std::size_t best = scenario.optimal_arm();

  TrialTrace trace;
  trace.policy = std::string(policy.name());
  trace.seed = seed;
  const auto grid = checkpoint_grid(scenario.horizon());
  trace.checkpoints.reserve(grid.size());

  Environment env(scenario, seed);
  double regret = 0.0;
  std::uint64_t optimal = 0;
  std::size_t next = 0;
  for (std::uint64_t t = 1; t <= scenario.horizon(); ++t) {
    const std::size_t arm = policy.select(t);
    const Observation obs = env.step(arm);
    policy.observe(arm, obs.observed_reward);
    regret += gaps[arm];
    if (arm == best) ++optimal;
    if (next < grid.size() && grid[next] == t) {
      trace.checkpoints.push_back({t, regret, optimal});
      ++next;
    }
  }
  return trace;
}

TrialTrace run_trial(const Scenario& scenario, const PolicyConfig& config, std::uint64_t seed,
                     std::uint64_t trial) {
  auto policy = make_policy(config, scenario, RandomStream(derive_seed(seed, static_cast<std::uint64_t>(StreamRole::kPolicy))));
  TrialTrace trace = run_trial(scenario, *policy, seed);
  trace.trial = trial;
  return trace;
}

AggregateCurve aggregate(const std::vector<TrialTrace>& traces) {
  if (traces.empty()) throw EmptyError("aggregate: no traces");
  const auto& first = traces.front().checkpoints;
  for (const auto& trace : traces) {
    if (trace.checkpoints.size() != first.size())
      throw ParameterError("aggregate: traces have different checkpoint grids");
  }
  AggregateCurve curve;
  curve.policy = traces.front().policy;
  curve.trials = traces.size();
  curve.points.resize(first.size());
  const auto n = static_cast<double>(traces.size());
  for (std::size_t c = 0; c < first.size(); ++c) {
    double sum = 0.0;
    double optimal = 0.0;
    for (const auto& trace : traces) {
      if (trace.checkpoints[c].t != first[c].t)
        throw ParameterError("aggregate: traces have different checkpoint grids");
      sum += trace.checkpoints[c].regret;
      optimal += static_cast<double>(trace.checkpoints[c].optimal_pulls);
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& trace : traces) {
      const double d = trace.checkpoints[c].regret - mean;
      ss += d * d;
    }
    CurvePoint& point = curve.points[c];
    point.t = first[c].t;
    point.mean_regret = mean;
    point.std_regret = traces.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    point.mean_optimal_pulls = optimal / n;
    point.optimal_pull_rate = point.mean_optimal_pulls / static_cast<double>(point.t);
  }
  return curve;
}

ExperimentResult run_experiment(const Scenario& scenario, const std::vector<PolicyConfig>& policies,
                                std::uint64_t trials, std::uint64_t master_seed, unsigned parallelism,
                                bool keep_traces) {
  if (trials < 1) throw ParameterError("run_experiment: trials must be >= 1");
  if (policies.empty()) throw ParameterError("run_experiment: no policies");
  for (const auto& config : policies) validate(config, scenario.num_arms());

  const std::size_t tasks = policies.size() * trials;
  std::vector<TrialTrace> results(tasks);
  parallel_for(tasks, parallelism, [&](std::size_t task) {
    const std::size_t p = task / trials;
    const std::uint64_t i = task % trials;
    results[task] = run_trial(scenario, policies[p], derive_seed(master_seed, i), i);
  });

  ExperimentResult result;
  for (std::size_t p = 0; p < policies.size(); ++p) {
    std::vector<TrialTrace> traces(std::make_move_iterator(results.begin() + static_cast<std::ptrdiff_t>(p * trials)),
                                   std::make_move_iterator(results.begin() + static_cast<std::ptrdiff_t>((p + 1) * trials)));
    result.curves.push_back(aggregate(traces));
    if (keep_traces) result.traces.push_back(std::move(traces));
  }
  return result;
}

namespace {

const CurvePoint& point_at(const AggregateCurve& curve, std::uint64_t t) {
  auto it = std::lower_bound(curve.points.begin(), curve.points.end(), t,
                             [](const CurvePoint& p, std::uint64_t v) { return p.t < v; });
  if (it == curve.points.end() || it->t != t)
    throw ParameterError(fmt::format("curve has no checkpoint at t = {}", t));
  return *it;
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    fit.rss += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - fit.rss / syy : 0.0;
  return fit;
}

}  // namespace

double window_optimal_rate(const AggregateCurve& curve, std::uint64_t t_from, std::uint64_t t_to) {
  if (t_to <= t_from) throw ParameterError("window_optimal_rate: empty window");
  const double before = t_from == 0 ? 0.0 : point_at(curve, t_from).mean_optimal_pulls;
  const double after = point_at(curve, t_to).mean_optimal_pulls;
  return (after - before) / static_cast<double>(t_to - t_from);
}

double tail_optimal_rate(const AggregateCurve& curve, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ParameterError("tail_optimal_rate: fraction must lie in (0, 1]");
  if (curve.points.empty()) throw EmptyError("tail_optimal_rate: empty curve");
  const std::uint64_t horizon = curve.points.back().t;
  const auto from = static_cast<std::uint64_t>(std::floor(static_cast<double>(horizon) * (1.0 - fraction) + 1e-9));
  return window_optimal_rate(curve, from, horizon);
}

std::string_view to_string(GrowthClass growth) {
  switch (growth) {
    case GrowthClass::kLogarithmic: return "logarithmic";
    case GrowthClass::kLinear: return "linear";
    case GrowthClass::kIndeterminate: return "indeterminate";
  }
  return "indeterminate";
}

FitReport fit_growth(const std::vector<std::uint64_t>& t, const std::vector<double>& regret, std::uint64_t t_min,
                     std::uint64_t t_max) {
  if (t.size() != regret.size()) throw InputError("fit_growth: t and regret lengths differ");
  std::vector<double> log_t;
  std::vector<double> lin_t;
  std::vector<double> y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || t[i] > t_max) continue;
    if (t[i] == 0) throw InputError("fit_growth: t must be >= 1");
    log_t.push_back(std::log(static_cast<double>(t[i])));
    lin_t.push_back(static_cast<double>(t[i]));
    y.push_back(regret[i]);
  }
  if (y.size() < 10)
    throw ParameterError(fmt::format("fit_growth: need at least 10 points in [{}, {}], got {}", t_min, t_max, y.size()));

  FitReport report;
  report.points = y.size();
  report.log_model = least_squares(log_t, y);
  report.linear_model = least_squares(lin_t, y);
  const bool constant = std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
  if (constant) return report;
  if (report.log_model.rss < report.linear_model.rss && report.log_model.r_squared >= kFitMinRSquared) {
    report.classification = GrowthClass::kLogarithmic;
  } else if (report.linear_model.rss < report.log_model.rss && report.linear_model.r_squared >= kFitMinRSquared) {
    report.classification = GrowthClass::kLinear;
  }
  return report;
}

FitReport fit_growth(const AggregateCurve& curve, std::uint64_t t_min, std::uint64_t t_max) {
  std::vector<std::uint64_t> t;
  std::vector<double> regret;
  for (const auto& p : curve.points) {
    t.push_back(p.t);
    regret.push_back(p.mean_regret);
  }
  return fit_growth(t, regret, t_min, t_max);
}

DominanceReport compare_bound(const AggregateCurve& curve, const std::function<double(double)>& bound) {
  DominanceReport report;
  for (const auto& p : curve.points) {
    const double b = bound(static_cast<double>(p.t));
    DominanceRow row{p.t, b, p.mean_regret, b - p.mean_regret};
    if (!(row.margin >= 0.0)) report.dominated = false;
    report.rows.push_back(row);
  }
  return report;
}

DominanceReport compare_bound(const AggregateCurve& curve, Theorem theorem, const Scenario& scenario,
                              const AnalysisParams& params, BoundMode mode) {
  if (theorem != Theorem::kTheorem1 && theorem != Theorem::kTheorem3)
    throw ParameterError("compare_bound: only the theorem 1 and theorem 3 pseudo-regret bounds apply");
  AnalysisParams p = params;
  if (!p.horizon) p.horizon = static_cast<double>(scenario.horizon());
  if (mode == BoundMode::kChecked) {
    auto failed = failed_inequalities(check_conditions(theorem, scenario, p));
    if (!failed.empty()) throw ConditionNotMet(std::move(failed));
  }
  const std::span<const ArmSpec> arms(scenario.arms());
  return compare_bound(curve, [&](double t) {
    return theorem == Theorem::kTheorem1 ? pseudo_regret_bound_med_e_ucb(arms, p, t, BoundMode::kUnchecked)
                                         : pseudo_regret_bound_med_eps_greedy(arms, p, t, BoundMode::kUnchecked);
  });
}

}  // namespace rbandit

#include "rbandit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>

#include "rbandit/errors.hpp"
#include "rbandit/normal.hpp"

namespace rbandit {

ConditionNotMet::ConditionNotMet(std::vector<std::string> failed)
    : std::runtime_error([&] {
        std::string msg = "theorem conditions not met:";
        for (const auto& f : failed) msg += " [" + f + "]";
        return msg;
      }()),
      failed_(std::move(failed)) {}

Distribution Distribution::normal(double mean, double sigma) {
  return {[=](double x) { return normal_cdf((x - mean) / sigma); },
          [=](double p) { return mean + sigma * normal_quantile(p); }};
}

Distribution Distribution::uniform(double lo, double hi) {
  return {[=](double x) { return std::clamp((x - lo) / (hi - lo), 0.0, 1.0); },
          [=](double p) { return lo + p * (hi - lo); }};
}

Distribution Distribution::of(const ArmSpec& arm) {
  return {[arm](double x) { return arm.cdf(x); }, [arm](double p) { return arm.quantile(p); }};
}

namespace {

constexpr double kRoundingSlack = 1e-12;

double bracket_term(double value, std::string_view which) {
  if (value >= 0.0) return value;
  if (value > -kRoundingSlack) return 0.0;
  throw ParameterError(fmt::format("tail bound: {} = {} is negative, the shift exceeds the bound's range", which, value));
}

std::size_t optimal_index(std::span<const ArmSpec> arms) {
  if (arms.empty()) throw ParameterError("bounds: need at least one arm");
  std::size_t best = 0;
  for (std::size_t i = 1; i < arms.size(); ++i) {
    if (arms[i].mean() > arms[best].mean()) best = i;
  }
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (i != best && !(arms[i].mean() < arms[best].mean()))
      throw ParameterError("bounds: the optimal arm must be unique");
  }
  return best;
}

void check_horizon(double horizon) {
  if (!(horizon >= 1.0)) throw ParameterError("bounds: horizon must be >= 1");
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("bounds: delta must lie in (0, 1)");
}

void enforce(Theorem theorem, std::span<const ArmSpec> arms, const AnalysisParams& params, BoundMode mode) {
  if (mode == BoundMode::kUnchecked) return;
  auto failed = failed_inequalities(check_conditions(theorem, arms, params));
  if (!failed.empty()) throw ConditionNotMet(std::move(failed));
}

// theta_{1/2-s}(F_*) - theta_{1/2+s}(F_j).
double median_gap(const ArmSpec& best, const ArmSpec& arm, double s) {
  return best.quantile(0.5 - s) - arm.quantile(0.5 + s);
}

struct ConditionList {
  std::vector<ConditionVerdict> items;

  void at_least(std::string name, double lhs, double rhs) {
    items.push_back({std::move(name), lhs, rhs, lhs >= rhs});
  }
  void greater(std::string name, double lhs, double rhs) {
    items.push_back({std::move(name), lhs, rhs, lhs > rhs});
  }
  void less(std::string name, double lhs, double rhs) {
    items.push_back({std::move(name), lhs, rhs, lhs < rhs});
  }
};

// Infimum of the density over the open interval (lo, hi), approximated on a
// grid that includes the endpoints as limits.
double density_infimum(const ArmSpec& arm, double lo, double hi) {
  constexpr int kGrid = 200;
  double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double x = lo + (hi - lo) * i / kGrid;
    inf = std::min(inf, arm.pdf(x));
  }
  return inf;
}

void med_e_ucb_conditions(ConditionList& out, std::span<const ArmSpec> arms, const AnalysisParams& p,
                          double omega_factor) {
  const std::size_t best = optimal_index(arms);
  out.less("rho < s", p.rho, p.s);
  out.greater("s > 0", p.s, 0.0);
  out.less("s < 1/2", p.s, 0.5);
  out.greater("l > 0", p.l, 0.0);
  out.greater("xi > 0", p.xi, 0.0);
  if (p.s > 0.0 && p.s < 0.5) {
    for (std::size_t j = 0; j < arms.size(); ++j) {
      if (j == best) continue;
      out.greater(fmt::format("theta_(1/2-s)(F_*) > theta_(1/2+s)(F_{})", j), arms[best].quantile(0.5 - p.s),
                  arms[j].quantile(0.5 + p.s));
    }
    if (p.xi > 0.0) {
      const double q_best = arms[best].quantile(0.5 - p.s);
      // Relative slack absorbs rounding when l is the exact infimum.
      const double slack = 1.0 - 1e-12;
      out.at_least("inf F_*' on (theta_(1/2-s) - xi, theta_(1/2-s)) >= l",
                   density_infimum(arms[best], q_best - p.xi, q_best) / slack, p.l);
      for (std::size_t j = 0; j < arms.size(); ++j) {
        if (j == best) continue;
        const double q = arms[j].quantile(0.5 + p.s);
        out.at_least(fmt::format("inf F_{}' on (theta_(1/2+s), theta_(1/2+s) + xi) >= l", j),
                     density_infimum(arms[j], q, q + p.xi) / slack, p.l);
      }
    }
  }
  out.at_least("b >= omega / xi^2", p.b, p.omega / (p.xi * p.xi));
  out.at_least("b >= 2 / (s - rho)^2", p.b, 2.0 / ((p.s - p.rho) * (p.s - p.rho)));
  out.at_least(omega_factor == 2.0 ? "omega >= 2 / l^2" : "omega >= 3.5 / l^2", p.omega,
               omega_factor / (p.l * p.l));
  if (p.horizon && p.group_size) out.greater("T > G", *p.horizon, static_cast<double>(*p.group_size));
}

// Terms of the max{...} condition on c for the med-eps-greedy theorems.
struct GreedyTerms {
  double floor;
  double arm_factor;
  double rho_factor;
};

double greedy_c_threshold(std::span<const ArmSpec> arms, double s, double x0, double rho, GreedyTerms terms) {
  const std::size_t best = optimal_index(arms);
  double threshold = terms.floor;
  for (std::size_t j = 0; j < arms.size(); ++j) {
    if (j == best) continue;
    const double m = arms[j].cdf(x0) - 0.5 - s;
    threshold = std::max(threshold, terms.arm_factor / (m * m));
  }
  const double m_best = 0.5 - s - arms[best].cdf(x0);
  threshold = std::max(threshold, terms.arm_factor / (m_best * m_best));
  threshold = std::max(threshold, terms.rho_factor / ((s - rho) * (s - rho)));
  return threshold;
}

void med_eps_greedy_conditions(ConditionList& out, std::span<const ArmSpec> arms, const AnalysisParams& p,
                               GreedyTerms terms) {
  const std::size_t best = optimal_index(arms);
  out.less("rho < s", p.rho, p.s);
  out.greater("s > 0", p.s, 0.0);
  out.less(fmt::format("F_*(x0) < 1/2 - s"), arms[best].cdf(p.x0), 0.5 - p.s);
  for (std::size_t j = 0; j < arms.size(); ++j) {
    if (j == best) continue;
    out.greater(fmt::format("F_{}(x0) > 1/2 + s", j), arms[j].cdf(p.x0), 0.5 + p.s);
  }
  out.greater(fmt::format("c > {}", terms.floor), p.c, terms.floor);
  for (std::size_t j = 0; j < arms.size(); ++j) {
    if (j == best) continue;
    const double m = arms[j].cdf(p.x0) - 0.5 - p.s;
    out.greater(fmt::format("c > {} / (F_{}(x0) - 1/2 - s)^2", terms.arm_factor, j), p.c,
                terms.arm_factor / (m * m));
  }
  const double m_best = 0.5 - p.s - arms[best].cdf(p.x0);
  out.greater(fmt::format("c > {} / (1/2 - s - F_*(x0))^2", terms.arm_factor), p.c,
              terms.arm_factor / (m_best * m_best));
  out.greater(fmt::format("c > {} / (s - rho)^2", terms.rho_factor), p.c,
              terms.rho_factor / ((p.s - p.rho) * (p.s - p.rho)));
}

struct GaussianShape {
  double sigma;
  double delta_min;
};

GaussianShape gaussian_shape(std::span<const ArmSpec> arms) {
  const std::size_t best = optimal_index(arms);
  double sigma = arms.front().sigma();
  double delta_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (arms[i].kind() != ArmSpec::Kind::kGaussian || arms[i].sigma() != sigma)
      throw ParameterError("corollary conditions need Gaussian arms with a common sigma");
    if (i != best) delta_min = std::min(delta_min, arms[best].mean() - arms[i].mean());
  }
  return {sigma, delta_min};
}

constexpr GreedyTerms kTheorem3Terms{20.0, 2.0, 2.0};
constexpr GreedyTerms kTheorem4Terms{40.0, 4.0, 1.0};

}  // namespace

TailBounds quantile_tail_bounds(std::uint64_t n, double s, double p, double a, double b, const Distribution& F) {
  if (n < 1) throw ParameterError("tail bound: n must be >= 1");
  if (!(a > 0.0 && b > 0.0)) throw ParameterError("tail bound: a and b must be > 0");
  if (!(s >= 0.0 && s < 0.5)) throw ParameterError("tail bound: s must lie in [0, 1/2)");
  if (!(p > s && p < 1.0 - s)) throw ParameterError("tail bound: p must lie in (s, 1 - s)");
  const double p1 = bracket_term(p - s - F.cdf(F.quantile(p - s) - a), "p1");
  const double p2 = bracket_term(F.cdf(F.quantile(p + s) + b) - p - s, "p2");
  const auto nn = static_cast<double>(n);
  return {std::exp(-2.0 * nn * p1 * p1), std::exp(-2.0 * nn * p2 * p2)};
}

TailBounds median_tail_bounds(std::uint64_t n, double s, double a, double b, const Distribution& F) {
  return quantile_tail_bounds(n, s, 0.5, a, b, F);
}

std::uint64_t lemma3_min_samples(std::uint64_t num_arms, double epsilon0, double delta, Lemma3Variant variant) {
  if (num_arms < 1) throw ParameterError("lemma3: K must be >= 1");
  if (!(epsilon0 > 0.0 && epsilon0 < 1.0)) throw ParameterError("lemma3: epsilon0 must lie in (0, 1)");
  check_delta(delta);
  const double e2 = epsilon0 * epsilon0;
  const double m = variant == Lemma3Variant::kTechnicalLemma ? 2.0 : 1.0;
  const double inner = std::log(static_cast<double>(num_arms) / (m * e2 * delta)) / (2.0 * e2);
  return static_cast<std::uint64_t>(std::max(0.0, std::ceil(inner))) + 1;
}

std::string_view to_string(Theorem theorem) {
  switch (theorem) {
    case Theorem::kTheorem1: return "theorem1";
    case Theorem::kTheorem2: return "theorem2";
    case Theorem::kTheorem3: return "theorem3";
    case Theorem::kTheorem4: return "theorem4";
    case Theorem::kCorollary1: return "corollary1";
    case Theorem::kCorollary2: return "corollary2";
  }
  return "theorem1";
}

std::vector<ConditionVerdict> check_conditions(Theorem theorem, std::span<const ArmSpec> arms,
                                               const AnalysisParams& params) {
  ConditionList out;
  switch (theorem) {
    case Theorem::kTheorem1:
      med_e_ucb_conditions(out, arms, params, 2.0);
      break;
    case Theorem::kTheorem2:
      med_e_ucb_conditions(out, arms, params, 3.5);
      break;
    case Theorem::kTheorem3:
      med_eps_greedy_conditions(out, arms, params, kTheorem3Terms);
      break;
    case Theorem::kTheorem4:
      med_eps_greedy_conditions(out, arms, params, kTheorem4Terms);
      break;
    case Theorem::kCorollary1: {
      const auto shape = gaussian_shape(arms);
      const double threshold = gaussian_threshold_rho(shape.delta_min, shape.sigma);
      const double l = std::exp(-(shape.delta_min + 4.0) * (shape.delta_min + 4.0) / (32.0 * shape.sigma * shape.sigma)) /
                       std::sqrt(2.0 * std::numbers::pi * shape.sigma * shape.sigma);
      out.less("rho < Phi(D_min / 4 sigma) - 1/2", params.rho, threshold);
      out.at_least("b >= omega", params.b, params.omega);
      out.at_least("b >= 2 / (Phi(D_min / 4 sigma) - 1/2 - rho)^2", params.b,
                   2.0 / ((threshold - params.rho) * (threshold - params.rho)));
      out.at_least("omega >= 2 / l^2", params.omega, 2.0 / (l * l));
      break;
    }
    case Theorem::kCorollary2: {
      const auto shape = gaussian_shape(arms);
      const double threshold = gaussian_threshold_rho(shape.delta_min, shape.sigma);
      const double spread =
          normal_cdf(shape.delta_min / (2.0 * shape.sigma)) - normal_cdf(shape.delta_min / (4.0 * shape.sigma));
      out.less("rho < Phi(D_min / 4 sigma) - 1/2", params.rho, threshold);
      out.greater("c > 10", params.c, 10.0);
      out.greater("c > 1 / (Phi(D_min / 2 sigma) - Phi(D_min / 4 sigma))^2", params.c, 1.0 / (spread * spread));
      out.greater("c > 1 / (Phi(D_min / 4 sigma) - 1/2 - rho)^2", params.c,
                  1.0 / ((threshold - params.rho) * (threshold - params.rho)));
      break;
    }
  }
  return out.items;
}

std::vector<ConditionVerdict> check_conditions(Theorem theorem, const Scenario& scenario,
                                               const AnalysisParams& params) {
  return check_conditions(theorem, std::span<const ArmSpec>(scenario.arms()), params);
}

std::vector<std::string> failed_inequalities(const std::vector<ConditionVerdict>& verdicts) {
  std::vector<std::string> failed;
  for (const auto& v : verdicts) {
    if (!v.passed) failed.push_back(fmt::format("{} (lhs {:.6g}, rhs {:.6g})", v.inequality, v.lhs, v.rhs));
  }
  return failed;
}

double theorem3_c_threshold(std::span<const ArmSpec> arms, double s, double x0, double rho) {
  return greedy_c_threshold(arms, s, x0, rho, kTheorem3Terms);
}

double theorem4_c_threshold(std::span<const ArmSpec> arms, double s, double x0, double rho) {
  return greedy_c_threshold(arms, s, x0, rho, kTheorem4Terms);
}

double pseudo_regret_bound_med_e_ucb(std::span<const ArmSpec> arms, const AnalysisParams& params,
                                     double horizon, BoundMode mode) {
  check_horizon(horizon);
  enforce(Theorem::kTheorem1, arms, params, mode);
  const std::size_t best = optimal_index(arms);
  double bound = 0.0;
  for (std::size_t j = 0; j < arms.size(); ++j) {
    if (j == best) continue;
    const double delta_j = arms[best].mean() - arms[j].mean();
    const double gap = median_gap(arms[best], arms[j], params.s);
    const double ucb_term = gap > 0.0 ? 4.0 * params.omega * std::log(horizon) / (gap * gap)
                                      : std::numeric_limits<double>::infinity();
    bound += delta_j * params.b * std::log(2.0 * horizon);
    bound += delta_j * ucb_term;
    bound += delta_j * (2.0 + 2.0 * std::numbers::pi * std::numbers::pi / 3.0);
  }
  return bound;
}

double regret_bound_highprob_med_e_ucb(std::span<const ArmSpec> arms, const AnalysisParams& params,
                                       double horizon, double delta, BoundMode mode) {
  check_horizon(horizon);
  check_delta(delta);
  enforce(Theorem::kTheorem2, arms, params, mode);
  const std::size_t best = optimal_index(arms);
  const auto k = static_cast<double>(arms.size());
  const double constant = std::numbers::e * std::pow(params.b * k / (2.0 * delta), 0.25) + 2.0 * k / delta + 3.0 +
                          std::numbers::pi * std::numbers::pi / 3.0;
  double bound = 0.0;
  for (std::size_t j = 0; j < arms.size(); ++j) {
    if (j == best) continue;
    const double delta_j = arms[best].mean() - arms[j].mean();
    const double gap = median_gap(arms[best], arms[j], params.s);
    const double ucb_term = gap > 0.0 ? 4.0 * params.omega * std::log(horizon) / (gap * gap)
                                      : std::numeric_limits<double>::infinity();
    bound += delta_j * params.b * std::log(2.0 * horizon);
    bound += delta_j * ucb_term;
    bound += delta_j * constant;
  }
  return bound;
}

double pseudo_regret_bound_med_eps_greedy(std::span<const ArmSpec> arms, const AnalysisParams& params,
                                          double horizon, BoundMode mode) {
  check_horizon(horizon);
  enforce(Theorem::kTheorem3, arms, params, mode);
  const std::size_t best = optimal_index(arms);
  const double c = params.c;
  const double mu_star = arms[best].mean();
  double bound = 2.0 * c * static_cast<double>(arms.size()) * std::numbers::e * mu_star;
  for (std::size_t j = 0; j < arms.size(); ++j) {
    if (j == best) continue;
    const double delta_j = mu_star - arms[j].mean();
    bound += c * delta_j * std::log(horizon);
    bound += (2.0 + 3.0 * c) * delta_j;
  }
  return bound;
}

double regret_bound_highprob_med_eps_greedy(std::span<const ArmSpec> arms, const AnalysisParams& params,
                                            double horizon, double delta, BoundMode mode) {
  check_horizon(horizon);
  check_delta(delta);
  enforce(Theorem::kTheorem4, arms, params, mode);
  const std::size_t best = optimal_index(arms);
  const double c = params.c;
  const double mu_star = arms[best].mean();
  const double k = static_cast<double>(arms.size());
  const double ceil_c = std::ceil(c);
  double bound = 6.0 * ceil_c * ceil_c * k * k * k * mu_star / delta;
  for (std::size_t j = 0; j < arms.size(); ++j) {
    if (j == best) continue;
    const double delta_j = mu_star - arms[j].mean();
    bound += 2.0 * c * delta_j * std::log(horizon);
    bound += 2.0 * c * delta_j;
  }
  return bound;
}

double gaussian_threshold_rho(double delta_min, double sigma) {
  if (!(delta_min >= 0.0)) throw ParameterError("gaussian_threshold_rho: delta_min must be >= 0");
  if (!(sigma > 0.0)) throw ParameterError("gaussian_threshold_rho: sigma must be > 0");
  if (std::isinf(delta_min)) return 0.5;
  return normal_cdf(delta_min / (4.0 * sigma)) - 0.5;
}

GaussianParams gaussian_params(double delta_min, double sigma, double rho) {
  const double s = gaussian_threshold_rho(delta_min, sigma);
  if (!(rho < s)) throw ParameterError(fmt::format("gaussian_params: rho = {} is not below the threshold {}", rho, s));
  GaussianParams out{};
  out.s = s;
  out.xi = 1.0;
  out.l = std::exp(-(delta_min + 4.0) * (delta_min + 4.0) / (32.0 * sigma * sigma)) /
          std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
  out.omega_min = 2.0 / (out.l * out.l);
  out.b_min = std::max(out.omega_min, 2.0 / ((s - rho) * (s - rho)));
  const double spread = normal_cdf(delta_min / (2.0 * sigma)) - normal_cdf(delta_min / (4.0 * sigma));
  out.c_min = std::max({10.0, 1.0 / (spread * spread), 1.0 / ((s - rho) * (s - rho))});
  out.x0_offset = delta_min / 2.0;
  return out;
}

}  // namespace rbandit

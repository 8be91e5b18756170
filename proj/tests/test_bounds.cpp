#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "rbandit/bounds.hpp"
#include "rbandit/errors.hpp"
#include "rbandit/normal.hpp"

using namespace rbandit;

namespace {

// Reference values from tests/oracles/derive_oracles.py.
constexpr double kThreshold = 0.19146246127401310364;
constexpr double kL = 0.12951759566589172761;
constexpr double kOmegaMin = 119.22640481081822849;
constexpr double kBMin = 452.76949105739437494;
constexpr double kCMin = 226.38474552869718747;

bool close(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

AnalysisParams paper_params() {
  AnalysisParams p;
  p.s = kThreshold;
  p.l = kL;
  p.xi = 1.0;
  p.rho = 0.125;
  p.b = kBMin;
  p.omega = kOmegaMin;
  p.x0 = 19.0;
  p.c = 10.0;
  return p;
}

bool mentions(const std::vector<std::string>& failed, const std::string& needle) {
  return std::any_of(failed.begin(), failed.end(), [&](const std::string& f) { return f.find(needle) != std::string::npos; });
}

}  // namespace

TEST_SUITE("bounds") {
  TEST_CASE("median tail bound") {
    const auto t = median_tail_bounds(100, 0.1, 0.2, 0.2, Distribution::normal());
    CHECK(close(t.lower, 0.32610946668265280609, 1e-12));
    CHECK(close(t.upper, 0.32610946668265280609, 1e-12));
  }

  TEST_CASE("quantile tail bound") {
    const auto t = quantile_tail_bounds(200, 0.2, 0.5, 0.3, 0.3, Distribution::normal());
    CHECK(close(t.lower, 0.026757207708175846176, 1e-12));
    CHECK(close(t.upper, 0.026757207708175846176, 1e-12));
  }

  TEST_CASE("tail bounds shrink with n and grow with s") {
    const auto F = Distribution::normal();
    double prev = 1.0;
    for (std::uint64_t n : {10, 50, 100, 500, 1000}) {
      const double v = median_tail_bounds(n, 0.1, 0.3, 0.3, F).lower;
      CHECK(v < prev);
      prev = v;
    }
    CHECK(median_tail_bounds(100, 0.2, 0.3, 0.3, F).lower >= median_tail_bounds(100, 0.1, 0.3, 0.3, F).lower);
  }

  TEST_CASE("uniform tail bound in closed form") {
    // For U(0, 1) the bracket is exactly a.
    const auto t = quantile_tail_bounds(50, 0.1, 0.3, 0.05, 0.05, Distribution::uniform());
    CHECK(t.lower == doctest::Approx(std::exp(-2.0 * 50 * 0.05 * 0.05)));
    CHECK(t.upper == doctest::Approx(std::exp(-2.0 * 50 * 0.05 * 0.05)));
  }

  TEST_CASE("tail bound argument errors") {
    const auto F = Distribution::normal();
    CHECK_THROWS_AS(median_tail_bounds(0, 0.1, 0.1, 0.1, F), ParameterError);
    CHECK_THROWS_AS(median_tail_bounds(10, 0.5, 0.1, 0.1, F), ParameterError);
    CHECK_THROWS_AS(median_tail_bounds(10, 0.1, 0.0, 0.1, F), ParameterError);
    CHECK_THROWS_AS(quantile_tail_bounds(10, 0.2, 0.1, 0.1, 0.1, F), ParameterError);
  }

  TEST_CASE("attacked-fraction sample size") {
    CHECK(lemma3_min_samples(10, 0.0665, 0.05) == 1135);
    CHECK(lemma3_min_samples(10, 0.0665, 0.05, Lemma3Variant::kTheoremProof) == 1213);
    CHECK(lemma3_min_samples(5, 0.1, 0.1) == 393);
    CHECK(lemma3_min_samples(5, 0.1, 0.1, Lemma3Variant::kTheoremProof) == 427);
    // log(1 / (2 * 0.25 * 0.5)) / 0.5 = 2 log 4 = 2.77, so N = 3 + 1.
    CHECK(lemma3_min_samples(1, 0.5, 0.5) == 4);
    CHECK_THROWS_AS(lemma3_min_samples(0, 0.1, 0.1), ParameterError);
    CHECK_THROWS_AS(lemma3_min_samples(3, 0.0, 0.1), ParameterError);
    CHECK_THROWS_AS(lemma3_min_samples(3, 0.1, 1.0), ParameterError);
  }

  TEST_CASE("gaussian constants") {
    CHECK(close(gaussian_threshold_rho(2.0, 1.0), kThreshold, 1e-14));
    const auto g = gaussian_params(2.0, 1.0, 0.125);
    CHECK(close(g.s, kThreshold, 1e-14));
    CHECK(close(g.l, kL, 1e-14));
    CHECK(close(g.omega_min, kOmegaMin, 1e-13));
    CHECK(close(g.b_min, kBMin, 1e-12));
    CHECK(close(g.c_min, kCMin, 1e-12));
    CHECK(g.x0_offset == 1.0);
    CHECK_THROWS_AS(gaussian_params(2.0, 1.0, 0.2), ParameterError);
  }

  TEST_CASE("c thresholds on the paper preset") {
    const Scenario s = preset_paper_k10();
    const auto arms = std::span<const ArmSpec>(s.arms());
    CHECK(close(theorem3_c_threshold(arms, kThreshold, 19.0, 0.125), kBMin, 1e-12));
    CHECK(close(theorem4_c_threshold(arms, kThreshold, 19.0, 0.125), kCMin, 1e-12));
  }

  TEST_CASE("regret bounds on the paper preset") {
    const Scenario s = preset_paper_k10();
    const auto arms = std::span<const ArmSpec>(s.arms());
    const AnalysisParams p = paper_params();
    CHECK(close(pseudo_regret_bound_med_e_ucb(arms, p, 1e5, BoundMode::kUnchecked), 516205.73338344802862, 1e-12));
    CHECK(close(regret_bound_highprob_med_e_ucb(arms, p, 1e5, 0.05, BoundMode::kUnchecked), 555568.31434868423659,
                1e-12));
    CHECK(close(pseudo_regret_bound_med_eps_greedy(arms, p, 1e5, BoundMode::kUnchecked), 24114.76023230938652, 1e-12));
    CHECK(close(regret_bound_highprob_med_eps_greedy(arms, p, 1e5, 0.05, BoundMode::kUnchecked),
                240022523.26583694641, 1e-12));
  }

  TEST_CASE("bounds increase with the horizon") {
    const Scenario s = preset_paper_k10();
    const auto arms = std::span<const ArmSpec>(s.arms());
    const AnalysisParams p = paper_params();
    double prev = 0.0;
    for (double T : {1e3, 1e4, 1e5, 1e6}) {
      const double v = pseudo_regret_bound_med_e_ucb(arms, p, T, BoundMode::kUnchecked);
      CHECK(v > prev);
      prev = v;
    }
    CHECK(pseudo_regret_bound_med_eps_greedy(arms, p, 1e6, BoundMode::kUnchecked) >
          pseudo_regret_bound_med_eps_greedy(arms, p, 1e5, BoundMode::kUnchecked));
  }

  TEST_CASE("checked mode lists every failed inequality") {
    const Scenario s = preset_paper_k10();
    AnalysisParams p = paper_params();
    p.b = 4.0;
    p.omega = 4.0;
    const auto failed = failed_inequalities(check_conditions(Theorem::kTheorem1, s, p));
    CHECK(failed.size() == 2);
    CHECK(mentions(failed, "b >= 2 / (s - rho)^2"));
    CHECK(mentions(failed, "omega >= 2 / l^2"));
    try {
      pseudo_regret_bound_med_e_ucb(std::span<const ArmSpec>(s.arms()), p, 1e5);
      FAIL("expected ConditionNotMet");
    } catch (const ConditionNotMet& e) {
      CHECK(e.failed().size() == 2);
      CHECK(std::string(e.what()).find("omega") != std::string::npos);
    }
  }

  TEST_CASE("compliant constants satisfy every condition") {
    const Scenario s = preset_paper_k10();
    // Computed rather than decimal constants: the b and omega conditions hold
    // with equality.
    const auto g = gaussian_params(2.0, 1.0, 0.125);
    AnalysisParams p = paper_params();
    p.s = g.s;
    p.l = g.l;
    p.b = g.b_min;
    p.omega = g.omega_min;
    CHECK(failed_inequalities(check_conditions(Theorem::kTheorem1, s, p)).empty());
    CHECK(failed_inequalities(check_conditions(Theorem::kCorollary1, s, p)).empty());
    p.c = kBMin * (1 + 1e-9);
    CHECK(failed_inequalities(check_conditions(Theorem::kTheorem3, s, p)).empty());
    CHECK(failed_inequalities(check_conditions(Theorem::kCorollary2, s, p)).empty());
    CHECK(std::isfinite(pseudo_regret_bound_med_eps_greedy(std::span<const ArmSpec>(s.arms()), p, 1e5)));
    p.c = kCMin * (1 + 1e-9);
    // Passes the Gaussian shortcut but not the general statement.
    CHECK(failed_inequalities(check_conditions(Theorem::kCorollary2, s, p)).empty());
    CHECK_FALSE(failed_inequalities(check_conditions(Theorem::kTheorem3, s, p)).empty());
  }

  TEST_CASE("attack above the threshold breaks the conditions") {
    const Scenario s = preset_paper_k10();
    AnalysisParams p = paper_params();
    p.rho = 0.2;
    const auto failed = failed_inequalities(check_conditions(Theorem::kTheorem1, s, p));
    CHECK(mentions(failed, "rho < s"));
  }

  TEST_CASE("corollaries need equal-variance gaussian arms") {
    const Scenario s({ArmSpec::gaussian(0.0, 1.0), ArmSpec::gaussian(1.0, 2.0)}, {}, 100);
    CHECK_THROWS_AS(check_conditions(Theorem::kCorollary1, s, paper_params()), ParameterError);
  }

  TEST_CASE("theorem names") {
    CHECK(to_string(Theorem::kTheorem1) == "theorem1");
    CHECK(to_string(Theorem::kCorollary2) == "corollary2");
  }
}

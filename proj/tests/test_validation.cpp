#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rbandit/validation.hpp"

using namespace rbandit;

namespace {

ValidationOptions quick_options() {
  ValidationOptions o;
  o.sample_sizes = {50, 100};
  o.attack_fractions = {0.1};
  o.deviations = {0.3};
  o.quantile_levels = {0.3};
  o.reps = 4000;
  o.coverage_worlds = 400;
  o.parallelism = 1;
  return o;
}

}  // namespace

TEST_SUITE("validation") {
  TEST_CASE("tail rows cover every cell and pass") {
    const auto rows = validate_quantile_tails(quick_options());
    // 2 sizes x 1 fraction x 1 deviation x (median + 1 level) x 2 tails.
    CHECK(rows.size() == 8);
    for (const auto& r : rows) {
      CAPTURE(r.formula);
      CAPTURE(r.params);
      CHECK(r.passed);
      CHECK(r.empirical >= 0.0);
      CHECK(r.empirical <= 1.0);
    }
    CHECK(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.formula == "median-tail-lower"; }) == 2);
  }

  TEST_CASE("inverted bounds make the tail rows fail") {
    ValidationOptions o = quick_options();
    o.invert_bounds = true;
    const auto rows = validate_quantile_tails(o);
    CHECK(std::none_of(rows.begin(), rows.end(), [](const auto& r) { return r.passed; }));
  }

  TEST_CASE("attacked fraction coverage") {
    const auto rows = validate_attack_fraction(quick_options(), default_coverage_cells());
    CHECK(rows.size() == 4);
    for (const auto& r : rows) {
      CAPTURE(r.params);
      CHECK(r.passed);
      CHECK(r.empirical >= r.bound);
    }
  }

  TEST_CASE("results are reproducible and thread independent") {
    ValidationOptions o = quick_options();
    const auto a = validate_quantile_tails(o);
    o.parallelism = 3;
    const auto b = validate_quantile_tails(o);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].empirical == b[i].empirical);
  }

  TEST_CASE("theory-compliant setup on the paper preset") {
    const Scenario s = preset_paper_k10();
    const auto setup = theory_compliant_setup(s);
    CHECK(setup.ucb_policy.group_size % 1000 == 0);
    CHECK(setup.ucb_policy.group_size >= 10 * exploration_target(setup.ucb_policy.b, setup.ucb_policy.group_size));
    CHECK(setup.ucb_policy.group_size - 1000 < 10 * exploration_target(setup.ucb_policy.b, setup.ucb_policy.group_size - 1000));
    CHECK(setup.greedy.x0 == 19.0);
    CHECK(setup.greedy_policy.c > 452.76949105739437494);
    CHECK(setup.greedy_policy.c < 452.77);
    for (const auto& r : validate_theory_conditions()) {
      CAPTURE(r.formula);
      CHECK(r.passed);
    }
  }
}

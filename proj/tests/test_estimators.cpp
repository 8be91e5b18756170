#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "rbandit/errors.hpp"
#include "rbandit/estimators.hpp"
#include "rbandit/random.hpp"

using namespace rbandit;

namespace {

double reference_trimmed(std::vector<double> v, double alpha) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const auto k = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n)));
  if (2 * k >= n) return v[(n + 1) / 2 - 1];
  double sum = 0.0;
  for (std::size_t i = k; i < n - k; ++i) sum += v[i];
  return sum / static_cast<double>(n - 2 * k);
}

// Dense-grid root of the Catoni equation, independent of the bisection.
double reference_catoni(const std::vector<double>& v, double scale) {
  auto f = [&](double theta) {
    double s = 0.0;
    for (double x : v) s += catoni_psi(scale * (x - theta));
    return s;
  };
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  double lo = *lo_it;
  double hi = *hi_it;
  for (int round = 0; round < 6; ++round) {
    const int steps = 2000;
    const double h = (hi - lo) / steps;
    for (int i = 0; i < steps; ++i) {
      const double a = lo + h * i;
      if (f(a) >= 0.0 && f(a + h) <= 0.0) {
        lo = a;
        hi = a + h;
        break;
      }
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("estimators") {
  TEST_CASE("quantile rank") {
    CHECK(quantile_rank(0.5, 1) == 1);
    CHECK(quantile_rank(0.5, 4) == 2);
    CHECK(quantile_rank(0.5, 5) == 3);
    CHECK(quantile_rank(0.3, 10) == 3);
    CHECK(quantile_rank(0.31, 10) == 4);
    CHECK(quantile_rank(1e-9, 10) == 1);
  }

  TEST_CASE("lower median on small samples") {
    ArmStats s;
    for (double x : {5.0, 1.0, 4.0, 2.0}) s.insert(x);
    CHECK(s.median() == 2.0);
    s.insert(3.0);
    CHECK(s.median() == 3.0);
    CHECK(s.min() == 1.0);
    CHECK(s.max() == 5.0);
    CHECK(s.mean() == 3.0);
    CHECK(s.order_statistic(5) == 5.0);
    CHECK_THROWS_AS(s.order_statistic(0), std::out_of_range);
    CHECK_THROWS_AS(s.order_statistic(6), std::out_of_range);
  }

  TEST_CASE("matches a sort-then-index reference across many chunks") {
    RandomStream rng(99);
    ArmStats s;
    std::vector<double> ref;
    for (int i = 0; i < 5000; ++i) {
      // Heavy ties and a few huge values.
      double x = std::floor(rng.uniform() * 50.0);
      if (i % 97 == 0) x = (i % 2 ? 1e12 : -1e12);
      s.insert(x);
      ref.push_back(x);
      if (i % 499 == 0 || i == 4999) {
        std::vector<double> sorted = ref;
        std::sort(sorted.begin(), sorted.end());
        REQUIRE(s.sorted() == sorted);
        const std::size_t n = sorted.size();
        CHECK(s.median() == sorted[(n + 1) / 2 - 1]);
        for (double p : {0.1, 0.25, 0.7, 0.99})
          CHECK(s.quantile(p) == sorted[quantile_rank(p, n) - 1]);
        CHECK(s.trimmed_mean(0.125) == reference_trimmed(ref, 0.125));
      }
    }
    CHECK(s.count() == 5000);
  }

  TEST_CASE("trimmed mean trims floor(alpha n) per side") {
    ArmStats s;
    for (double x : {100.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, -100.0}) s.insert(x);
    // n = 8, alpha = 0.125 drops one sample per side.
    CHECK(s.trimmed_mean(0.125) == doctest::Approx(3.5));
    CHECK(s.trimmed_mean(0.0) == doctest::Approx(21.0 / 8.0));
    ArmStats three;
    for (double x : {9.0, 1.0, 2.0}) three.insert(x);
    CHECK(three.trimmed_mean(0.4) == 2.0);
    CHECK_THROWS_AS(s.trimmed_mean(0.5), ParameterError);
    CHECK_THROWS_AS(s.trimmed_mean(-0.1), ParameterError);
  }

  TEST_CASE("catoni estimate agrees with a dense grid search") {
    RandomStream rng(5);
    ArmStats s;
    std::vector<double> v;
    for (int i = 0; i < 300; ++i) {
      double x = 3.0 + (rng.uniform() - 0.5) * 4.0;
      if (i % 10 == 0) x += 500.0;
      s.insert(x);
      v.push_back(x);
    }
    const double scale = catoni_default_scale(v.size(), 1000.0);
    CHECK(s.catoni_estimate(scale, 1e-10) == doctest::Approx(reference_catoni(v, scale)).epsilon(1e-7));
    // Robust to the outliers: far closer to 3 than the sample mean.
    CHECK(std::abs(s.catoni_estimate(scale) - 3.0) < std::abs(s.mean() - 3.0));
  }

  TEST_CASE("catoni influence function") {
    CHECK(catoni_psi(0.0) == 0.0);
    CHECK(catoni_psi(1.0) == doctest::Approx(std::log(2.5)));
    CHECK(catoni_psi(-1.0) == doctest::Approx(-std::log(2.5)));
    CHECK(catoni_default_scale(10, std::exp(1.0)) == doctest::Approx(std::sqrt(0.8)));
  }

  TEST_CASE("errors") {
    ArmStats s;
    CHECK_THROWS_AS(s.median(), EmptyError);
    CHECK_THROWS_AS(s.mean(), EmptyError);
    CHECK_THROWS_AS(s.insert(std::numeric_limits<double>::quiet_NaN()), InputError);
    CHECK_THROWS_AS(s.insert(std::numeric_limits<double>::infinity()), InputError);
    s.insert(1.0);
    CHECK_THROWS_AS(s.quantile(0.0), ParameterError);
    CHECK_THROWS_AS(s.quantile(1.0), ParameterError);
    CHECK_THROWS_AS(s.catoni_estimate(0.0), ParameterError);
  }
}

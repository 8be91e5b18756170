#include "rbandit/validation.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "rbandit/errors.hpp"
#include "rbandit/estimators.hpp"
#include "rbandit/normal.hpp"
#include "rbandit/parallel.hpp"
#include "rbandit/random.hpp"

namespace rbandit {

namespace {

std::uint64_t attacked_count(double s, std::uint64_t n) {
  return static_cast<std::uint64_t>(std::floor(s * static_cast<double>(n) + 1e-9));
}

double tolerance(double bound, std::uint64_t reps) {
  return 3.0 * std::sqrt(std::abs(bound) / static_cast<double>(reps));
}

struct TailCell {
  std::uint64_t n;
  double s;
};

struct TailQuery {
  double p;
  double a;
  double lower_threshold;  // theta_{p-s} - a
  double upper_threshold;  // theta_{p+s} + a
  std::size_t rank;        // ceil(p n), 1-based
  std::uint64_t lower_hits = 0;
  std::uint64_t upper_hits = 0;
};

std::vector<ValidationRow> run_tail_cell(const ValidationOptions& options, TailCell cell, std::uint64_t cell_index) {
  const std::uint64_t n = cell.n;
  const std::uint64_t m = attacked_count(cell.s, n);
  const std::uint64_t clean = n - m;

  std::vector<double> levels{0.5};
  for (double p : options.quantile_levels) {
    if (p > cell.s && p < 1.0 - cell.s && p != 0.5) levels.push_back(p);
  }
  std::vector<TailQuery> queries;
  for (double p : levels) {
    for (double a : options.deviations) {
      queries.push_back({p, a, normal_quantile(p - cell.s) - a, normal_quantile(p + cell.s) + a,
                         quantile_rank(p, n)});
    }
  }

  RandomStream rng(derive_seed(options.seed, cell_index, StreamRole::kMonteCarlo));
  std::vector<double> sample(clean);
  for (std::uint64_t rep = 0; rep < options.reps; ++rep) {
    for (auto& x : sample) x = standard_normal(rng);
    std::sort(sample.begin(), sample.end());
    for (auto& q : queries) {
      // With m samples at -B the k-th order statistic is -B for k <= m.
      const double low = q.rank <= m ? -options.magnitude : sample[q.rank - m - 1];
      // With m samples at +B it is +B once k exceeds the clean count.
      const double high = q.rank <= clean ? sample[q.rank - 1] : options.magnitude;
      if (low <= q.lower_threshold) ++q.lower_hits;
      if (high >= q.upper_threshold) ++q.upper_hits;
    }
  }

  std::vector<ValidationRow> rows;
  const auto reps = static_cast<double>(options.reps);
  for (const auto& q : queries) {
    TailBounds bounds = quantile_tail_bounds(n, cell.s, q.p, q.a, q.a, Distribution::normal());
    if (options.invert_bounds) {
      bounds.lower = -bounds.lower;
      bounds.upper = -bounds.upper;
    }
    const std::string family = q.p == 0.5 ? "median-tail" : "quantile-tail";
    const std::string params = fmt::format("n={} s={} p={} a={} reps={}", n, cell.s, q.p, q.a, options.reps);
    const double lower_emp = static_cast<double>(q.lower_hits) / reps;
    const double upper_emp = static_cast<double>(q.upper_hits) / reps;
    rows.push_back({family + "-lower", params, bounds.lower, lower_emp,
                    lower_emp <= bounds.lower + tolerance(bounds.lower, options.reps)});
    rows.push_back({family + "-upper", params, bounds.upper, upper_emp,
                    upper_emp <= bounds.upper + tolerance(bounds.upper, options.reps)});
  }
  return rows;
}

}  // namespace

std::vector<CoverageCell> default_coverage_cells() {
  return {{10, 0.125, 0.0665, 0.05}, {5, 0.2, 0.1, 0.1}};
}

std::vector<ValidationRow> validate_quantile_tails(const ValidationOptions& options) {
  if (options.reps < 1) throw ParameterError("validate: reps must be >= 1");
  std::vector<TailCell> cells;
  for (auto n : options.sample_sizes) {
    for (double s : options.attack_fractions) cells.push_back({n, s});
  }
  std::vector<std::vector<ValidationRow>> per_cell(cells.size());
  parallel_for(cells.size(), options.parallelism,
               [&](std::size_t i) { per_cell[i] = run_tail_cell(options, cells[i], i); });
  std::vector<ValidationRow> rows;
  for (auto& cell_rows : per_cell) rows.insert(rows.end(), cell_rows.begin(), cell_rows.end());
  return rows;
}

std::vector<ValidationRow> validate_attack_fraction(const ValidationOptions& options,
                                                    const std::vector<CoverageCell>& cells) {
  if (options.coverage_worlds < 1) throw ParameterError("validate: coverage worlds must be >= 1");
  std::vector<ValidationRow> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const CoverageCell& cell = cells[c];
    const std::uint64_t n_technical =
        lemma3_min_samples(cell.num_arms, cell.epsilon0, cell.delta, Lemma3Variant::kTechnicalLemma);
    const std::uint64_t n_proof =
        lemma3_min_samples(cell.num_arms, cell.epsilon0, cell.delta, Lemma3Variant::kTheoremProof);
    const std::uint64_t horizon = 10 * std::max(n_technical, n_proof);
    const auto threshold = static_cast<std::uint64_t>(std::ldexp(cell.rho, 64));
    const double limit = cell.rho + cell.epsilon0;

    // Largest sample count at which some arm exceeded the limit, per world.
    std::vector<std::uint64_t> last_violation(options.coverage_worlds, 0);
    const std::uint64_t cell_seed = derive_seed(options.seed, 1000 + c, StreamRole::kMonteCarlo);
    parallel_for(options.coverage_worlds, options.parallelism, [&](std::size_t w) {
      RandomStream rng(derive_seed(cell_seed, w));
      std::uint64_t worst = 0;
      for (std::uint64_t arm = 0; arm < cell.num_arms; ++arm) {
        std::uint64_t hits = 0;
        for (std::uint64_t m = 1; m <= horizon; ++m) {
          hits += rng() < threshold ? 1 : 0;
          if (static_cast<double>(hits) > limit * static_cast<double>(m)) worst = std::max(worst, m);
        }
      }
      last_violation[w] = worst;
    });

    const auto worlds = static_cast<double>(options.coverage_worlds);
    for (auto [label, n] : {std::pair{"technical", n_technical}, std::pair{"proof", n_proof}}) {
      const auto covered = std::count_if(last_violation.begin(), last_violation.end(),
                                         [n = n](std::uint64_t v) { return v < n; });
      const double coverage = static_cast<double>(covered) / worlds;
      rows.push_back({fmt::format("attack-fraction-coverage-{}", label),
                      fmt::format("K={} rho={} eps0={} delta={} N={} worlds={} horizon={}", cell.num_arms, cell.rho,
                                  cell.epsilon0, cell.delta, n, options.coverage_worlds, horizon),
                      1.0 - cell.delta, coverage, coverage >= 1.0 - cell.delta});
    }
  }
  return rows;
}

CompliantSetup theory_compliant_setup(const Scenario& scenario) {
  const auto& arms = scenario.arms();
  const double sigma = arms.front().sigma();
  const double rho = scenario.attack().rho;
  const GaussianParams g = gaussian_params(scenario.min_gap(), sigma, rho);

  CompliantSetup setup;
  AnalysisParams& ucb = setup.ucb;
  ucb.s = g.s;
  ucb.l = g.l;
  ucb.xi = g.xi;
  ucb.rho = rho;
  ucb.omega = g.omega_min;
  ucb.b = g.b_min;
  std::uint64_t group = 1000;
  const auto k = static_cast<double>(scenario.num_arms());
  while (static_cast<double>(group) < k * static_cast<double>(exploration_target(ucb.b, static_cast<double>(group))))
    group += 1000;
  ucb.group_size = group;
  ucb.horizon = static_cast<double>(scenario.horizon());
  setup.ucb_policy = {ucb.b, ucb.omega, group};

  AnalysisParams& greedy = setup.greedy;
  greedy.s = g.s;
  greedy.rho = rho;
  greedy.x0 = scenario.optimal_mean() - g.x0_offset;
  const double threshold = theorem3_c_threshold(arms, greedy.s, greedy.x0, rho);
  greedy.c = threshold * (1.0 + 1e-6);
  setup.greedy_policy = {greedy.c};
  return setup;
}

std::vector<ValidationRow> validate_theory_conditions() {
  const Scenario scenario = preset_paper_k10(0.125);
  const CompliantSetup setup = theory_compliant_setup(scenario);
  std::vector<ValidationRow> rows;
  auto append = [&](Theorem theorem, const AnalysisParams& params) {
    for (const auto& v : check_conditions(theorem, scenario, params)) {
      rows.push_back({fmt::format("condition-{}", to_string(theorem)), v.inequality, v.rhs, v.lhs, v.passed});
    }
  };
  append(Theorem::kTheorem1, setup.ucb);
  append(Theorem::kTheorem3, setup.greedy);
  append(Theorem::kCorollary1, setup.ucb);
  append(Theorem::kCorollary2, setup.greedy);
  return rows;
}

std::vector<ValidationRow> run_validation_suite(const ValidationOptions& options) {
  auto rows = validate_quantile_tails(options);
  auto coverage = validate_attack_fraction(options, default_coverage_cells());
  auto conditions = validate_theory_conditions();
  rows.insert(rows.end(), coverage.begin(), coverage.end());
  rows.insert(rows.end(), conditions.begin(), conditions.end());
  return rows;
}

}  // namespace rbandit

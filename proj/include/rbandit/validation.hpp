#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rbandit/bounds.hpp"
#include "rbandit/env.hpp"
#include "rbandit/policies.hpp"

namespace rbandit {

/// One line of the validate-bounds report.
struct ValidationRow {
  std::string formula;
  std::string params;
  double bound = 0.0;
  double empirical = 0.0;
  bool passed = false;
};

struct ValidationOptions {
  std::vector<std::uint64_t> sample_sizes{50, 100, 200};
  std::vector<double> attack_fractions{0.1, 0.2};
  std::vector<double> deviations{0.1, 0.3};
  // Quantile levels for the general quantile lemma (the median is covered
  // separately).
  std::vector<double> quantile_levels{0.3, 0.7};
  std::uint64_t reps = 100000;
  std::uint64_t coverage_worlds = 10000;
  // Corruption value: floor(s n) samples are replaced by -magnitude (lower tail)
  // or +magnitude (upper tail), the worst case for each tail.
  double magnitude = 1e9;
  std::uint64_t seed = 20240601;
  unsigned parallelism = 0;
  // Test hook: negates every analytical tail bound so the suite must fail.
  bool invert_bounds = false;
};

/// Attacked-fraction coverage cell: K arms attacked independently with
/// probability rho per sample.
struct CoverageCell {
  std::uint64_t num_arms;
  double rho;
  double epsilon0;
  double delta;
};

std::vector<CoverageCell> default_coverage_cells();

/// Monte Carlo tail probability of the corrupted sample quantile against the
/// analytical bounds, for standard normal data. A tail row passes when
/// empirical <= bound + 3 sqrt(bound / reps).
std::vector<ValidationRow> validate_quantile_tails(const ValidationOptions& options);

/// Fraction of replicate worlds in which every arm keeps its attacked
/// fraction at or below rho + epsilon0 for all sample counts m >= N. Counts
/// are followed up to 10 N; the Hoeffding tail beyond that is below 1e-6
/// for every default cell. Passes when the coverage is at least 1 - delta.
std::vector<ValidationRow> validate_attack_fraction(const ValidationOptions& options,
                                                    const std::vector<CoverageCell>& cells);

/// Constants satisfying the theorem conditions for equal-variance Gaussian
/// arms: s, l, omega and b at their minima from gaussian_params, x0 half a
/// minimum gap below the best mean, c just above theorem3_c_threshold, and
/// the smallest multiple of 1000 for G that keeps the initialization feasible.
struct CompliantSetup {
  AnalysisParams ucb;
  AnalysisParams greedy;
  MedEUcbParams ucb_policy;
  MedEpsGreedyParams greedy_policy;
};

CompliantSetup theory_compliant_setup(const Scenario& scenario);

/// Condition checks of the theory-compliant Gaussian parameters on the
/// paper-k10 arms at rho = 0.125; each inequality is one row.
std::vector<ValidationRow> validate_theory_conditions();

/// Everything above with the default coverage cells.
std::vector<ValidationRow> run_validation_suite(const ValidationOptions& options);

}  // namespace rbandit

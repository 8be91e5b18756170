#pragma once

#include <cstddef>
#include <vector>

namespace rbandit {

/// Streaming order-statistics accumulator for one arm.
///
/// Samples live in a list of sorted chunks of bounded size, so insert costs
/// O(log n + chunk) and selecting the k-th order statistic costs O(n / chunk).
/// Every location estimator below is computed from the stored multiset, and
/// matches a sort-then-index reference bit for bit.
class ArmStats {
 public:
  ArmStats() = default;

  /// Adds one sample. Throws InputError for NaN or infinite values.
  void insert(double x);

  std::size_t count() const { return count_; }
  bool empty() const { return count_ == 0; }
  double sum() const { return sum_; }
  double min() const;
  double max() const;

  /// k-th smallest sample, 1-based. Throws std::out_of_range outside [1, n].
  double order_statistic(std::size_t k) const;

  /// Empirical inf-quantile: the ceil(p n)-th order statistic, p in (0, 1).
  double quantile(double p) const;

  /// Lower median, i.e. quantile(1/2).
  double median() const;

  double mean() const;

  /// Mean of ranks floor(alpha n)+1 .. n-floor(alpha n), summed in ascending
  /// order. Falls back to the median if nothing is retained.
  double trimmed_mean(double alpha) const;

  /// Root of sum psi(scale (x_i - theta)) = 0 with Catoni's influence
  /// function psi(x) = sign(x) log(1 + |x| + x^2/2), by bisection to `tol`.
  double catoni_estimate(double scale, double tol = 1e-9) const;

  /// All samples in ascending order.
  std::vector<double> sorted() const;

 private:
  static constexpr std::size_t kMaxChunk = 512;

  // Sums the retained ranks [first, last), 0-based, in ascending order.
  double sum_ranks(std::size_t first, std::size_t last) const;

  std::vector<std::vector<double>> chunks_;
  std::size_t count_ = 0;
  double sum_ = 0.0;
};

/// Rank used by the inf-quantile: ceil(p n), clamped to [1, n].
std::size_t quantile_rank(double p, std::size_t n);

/// Catoni influence function.
double catoni_psi(double x);

/// Default Catoni scale sqrt(2 log(t^exponent) / (n v)).
double catoni_default_scale(std::size_t n, double t, double variance_guess = 1.0,
                            double confidence_exponent = 4.0);

}  // namespace rbandit

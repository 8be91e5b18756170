#include "rbandit/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

#include "rbandit/errors.hpp"

namespace rbandit {

std::size_t quantile_rank(double p, std::size_t n) {
  const double r = std::ceil(p * static_cast<double>(n));
  if (r < 1.0) return 1;
  if (r > static_cast<double>(n)) return n;
  return static_cast<std::size_t>(r);
}

double catoni_psi(double x) {
  return x >= 0.0 ? std::log1p(x + 0.5 * x * x) : -std::log1p(-x + 0.5 * x * x);
}

double catoni_default_scale(std::size_t n, double t, double variance_guess,
                            double confidence_exponent) {
  const double log_inv_conf = confidence_exponent * std::log(std::max(t, 2.0));
  return std::sqrt(2.0 * log_inv_conf / (static_cast<double>(n) * variance_guess));
}

void ArmStats::insert(double x) {
  if (!std::isfinite(x)) throw InputError("ArmStats::insert: sample must be finite");
  if (chunks_.empty()) {
    chunks_.emplace_back();
    chunks_.back().reserve(kMaxChunk);
  }
  // First chunk whose largest element exceeds x, else the last one.
  auto it = std::upper_bound(chunks_.begin(), chunks_.end(), x,
                             [](double v, const std::vector<double>& c) { return v < c.back(); });
  if (it == chunks_.end()) --it;
  if (it->empty()) {
    it->push_back(x);
  } else {
    it->insert(std::upper_bound(it->begin(), it->end(), x), x);
  }
  if (it->size() > kMaxChunk) {
    const auto half = static_cast<std::ptrdiff_t>(it->size() / 2);
    std::vector<double> upper(it->begin() + half, it->end());
    upper.reserve(kMaxChunk);
    it->resize(static_cast<std::size_t>(half));
    chunks_.insert(it + 1, std::move(upper));
  }
  ++count_;
  sum_ += x;
}

double ArmStats::min() const {
  if (empty()) throw EmptyError("ArmStats::min on empty stats");
  return chunks_.front().front();
}

double ArmStats::max() const {
  if (empty()) throw EmptyError("ArmStats::max on empty stats");
  return chunks_.back().back();
}

double ArmStats::order_statistic(std::size_t k) const {
  if (k < 1 || k > count_)
    throw std::out_of_range(fmt::format("order_statistic({}) with n = {}", k, count_));
  std::size_t idx = k - 1;
  if (idx >= count_ / 2) {
    std::size_t from_top = count_ - 1 - idx;
    for (auto c = chunks_.rbegin(); c != chunks_.rend(); ++c) {
      if (from_top < c->size()) return (*c)[c->size() - 1 - from_top];
      from_top -= c->size();
    }
  } else {
    for (const auto& c : chunks_) {
      if (idx < c.size()) return c[idx];
      idx -= c.size();
    }
  }
  throw std::logic_error("ArmStats: corrupted chunk sizes");
}

double ArmStats::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("quantile: p must lie in (0, 1)");
  if (empty()) throw EmptyError("quantile of empty stats");
  return order_statistic(quantile_rank(p, count_));
}

double ArmStats::median() const { return quantile(0.5); }

double ArmStats::mean() const {
  if (empty()) throw EmptyError("mean of empty stats");
  return sum_ / static_cast<double>(count_);
}

double ArmStats::sum_ranks(std::size_t first, std::size_t last) const {
  double acc = 0.0;
  std::size_t offset = 0;
  for (const auto& c : chunks_) {
    const std::size_t lo = offset;
    const std::size_t hi = offset + c.size();
    offset = hi;
    if (hi <= first) continue;
    if (lo >= last) break;
    const std::size_t b = std::max(first, lo) - lo;
    const std::size_t e = std::min(last, hi) - lo;
    for (std::size_t i = b; i < e; ++i) acc += c[i];
  }
  return acc;
}

double ArmStats::trimmed_mean(double alpha) const {
  if (!(alpha >= 0.0 && alpha < 0.5)) throw ParameterError("trimmed_mean: alpha must lie in [0, 0.5)");
  if (empty()) throw EmptyError("trimmed_mean of empty stats");
  const auto g = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(count_)));
  if (2 * g >= count_) return median();
  const std::size_t kept = count_ - 2 * g;
  return sum_ranks(g, count_ - g) / static_cast<double>(kept);
}

double ArmStats::catoni_estimate(double scale, double tol) const {
  if (!(scale > 0.0) || !(tol > 0.0)) throw ParameterError("catoni_estimate: scale and tol must be > 0");
  if (empty()) throw EmptyError("catoni_estimate of empty stats");
  auto objective = [&](double theta) {
    double acc = 0.0;
    for (const auto& c : chunks_)
      for (double x : c) acc += catoni_psi(scale * (x - theta));
    return acc;
  };
  double lo = min() - 1.0 / scale;
  double hi = max() + 1.0 / scale;
  constexpr int kMaxIterations = 2000;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= tol || mid <= lo || mid >= hi) return mid;
    const double f = objective(mid);
    if (f == 0.0) return mid;
    if (f > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw NumericalError("catoni_estimate: bisection did not converge");
}

std::vector<double> ArmStats::sorted() const {
  std::vector<double> out;
  out.reserve(count_);
  for (const auto& c : chunks_) out.insert(out.end(), c.begin(), c.end());
  return out;
}

}  // namespace rbandit

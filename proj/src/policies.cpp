#include "rbandit/policies.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>
#include <numeric>

#include "rbandit/env.hpp"
#include "rbandit/errors.hpp"

namespace rbandit {

namespace {

constexpr std::string_view kTags[] = {"med-e-ucb", "med-eps-greedy", "ucb",        "eps-greedy",        "exp3",
                                      "rucb-mab",  "catoni-ucb",     "trimmed-ucb", "trimmed-eps-greedy"};
static_assert(std::size(kTags) == std::variant_size_v<PolicyConfig>);

template <std::size_t I = 0>
PolicyConfig config_for_index(std::size_t index) {
  if constexpr (I < std::variant_size_v<PolicyConfig>) {
    if (index == I) return PolicyConfig(std::in_place_index<I>);
    return config_for_index<I + 1>(index);
  } else {
    throw std::logic_error("config_for_index out of range");
  }
}

void require(bool ok, std::string_view what) {
  if (!ok) throw ParameterError(std::string(what));
}

// Arms 0..K-1 pulled `per_arm` times each, in order.
std::size_t round_robin_arm(std::uint64_t t, std::uint64_t per_arm) {
  return static_cast<std::size_t>((t - 1) / per_arm);
}

std::uint64_t ceil_to_u64(double c) { return static_cast<std::uint64_t>(std::ceil(c)); }

// Shared epsilon-greedy step: uniform arm with probability min(1, cK/t),
// otherwise the greedy argmax of `values`.
std::size_t eps_greedy_choice(std::uint64_t t, double c, std::span<const double> values,
                              RandomStream& rng) {
  const auto k = values.size();
  const double explore = std::min(1.0, c * static_cast<double>(k) / static_cast<double>(t));
  if (rng.uniform() < explore) return static_cast<std::size_t>(rng.below(k));
  return greedy_argmax(values);
}

}  // namespace

std::string_view algorithm_tag(const PolicyConfig& config) { return kTags[config.index()]; }

std::vector<std::string> algorithm_tags() { return {std::begin(kTags), std::end(kTags)}; }

PolicyConfig default_config(std::string_view tag) {
  for (std::size_t i = 0; i < std::size(kTags); ++i) {
    if (kTags[i] == tag) return config_for_index(i);
  }
  throw InputError(fmt::format("unknown algorithm '{}'", tag));
}

std::uint64_t exploration_target(double b, double x) { return ceil_to_u64(b * std::log(x)); }

void validate(const PolicyConfig& config, std::size_t num_arms) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MedEUcbParams>) {
          require(p.b > 0.0, "med-e-ucb: b must be > 0");
          require(p.omega > 0.0, "med-e-ucb: omega must be > 0");
          require(p.group_size >= 2, "med-e-ucb: group size must be >= 2");
          const auto need = num_arms * exploration_target(p.b, static_cast<double>(p.group_size));
          require(p.group_size >= need,
                  fmt::format("med-e-ucb: infeasible group size, need G >= K ceil(b log G) = {} but G = {}",
                              need, p.group_size));
        } else if constexpr (std::is_same_v<T, MedEpsGreedyParams> || std::is_same_v<T, EpsGreedyParams>) {
          require(p.c > 0.0 && std::isfinite(p.c), "eps-greedy: c must be > 0");
        } else if constexpr (std::is_same_v<T, UcbParams>) {
          require(p.alpha > 0.0, "ucb: alpha must be > 0");
        } else if constexpr (std::is_same_v<T, Exp3Params>) {
          if (p.gamma) require(*p.gamma > 0.0 && *p.gamma <= 1.0, "exp3: gamma must lie in (0, 1]");
          if (p.reward_lo && p.reward_hi)
            require(*p.reward_lo < *p.reward_hi, "exp3: reward clip range must satisfy lo < hi");
        } else if constexpr (std::is_same_v<T, RucbMabParams>) {
          require(p.omega > 0.0, "rucb-mab: omega must be > 0");
        } else if constexpr (std::is_same_v<T, CatoniUcbParams>) {
          require(p.variance_guess > 0.0, "catoni-ucb: variance guess must be > 0");
          require(p.confidence_exponent > 0.0, "catoni-ucb: confidence exponent must be > 0");
          require(p.refresh_fraction >= 0.0, "catoni-ucb: refresh fraction must be >= 0");
        } else if constexpr (std::is_same_v<T, TrimmedUcbParams>) {
          require(p.alpha_trim >= 0.0 && p.alpha_trim < 0.5, "trimmed-ucb: alpha_trim must lie in [0, 0.5)");
          require(p.alpha > 0.0, "trimmed-ucb: alpha must be > 0");
        } else if constexpr (std::is_same_v<T, TrimmedEpsGreedyParams>) {
          require(p.alpha_trim >= 0.0 && p.alpha_trim < 0.5,
                  "trimmed-eps-greedy: alpha_trim must lie in [0, 0.5)");
          require(p.c > 0.0 && std::isfinite(p.c), "trimmed-eps-greedy: c must be > 0");
        }
      },
      config);
}

// -- Shared helpers ------------------------------------------------------------

std::size_t ucb_argmax(std::span<const double> center, std::span<const std::size_t> counts,
                       std::uint64_t t, double coef) {
  const double log_t = std::log(static_cast<double>(t));
  std::size_t best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < center.size(); ++j) {
    const double index = center[j] + std::sqrt(coef * log_t / static_cast<double>(counts[j]));
    if (j == 0 || index > best_index) {
      best = j;
      best_index = index;
    }
  }
  return best;
}

std::size_t greedy_argmax(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

double exp3_auto_gamma(std::size_t num_arms, std::uint64_t horizon) {
  const auto k = static_cast<double>(num_arms);
  return std::min(1.0, std::sqrt(k * std::log(k) / ((std::numbers::e - 1.0) * static_cast<double>(horizon))));
}

Phase med_e_ucb_phase(std::uint64_t t, std::size_t num_arms, std::uint64_t group_size, double b) {
  const std::uint64_t init = exploration_target(b, static_cast<double>(group_size));
  if (init > 0 && t <= num_arms * init) return {Phase::Kind::kInit, round_robin_arm(t, init)};
  const std::uint64_t k = t / group_size;
  if (k == 0) return {Phase::Kind::kUcb, 0};
  const auto g = static_cast<double>(group_size);
  const std::uint64_t d = exploration_target(b, static_cast<double>(k + 1) * g) -
                          exploration_target(b, static_cast<double>(k) * g);
  const std::uint64_t start = k * group_size;
  if (d > 0 && t >= start + 1 && t <= start + num_arms * d)
    return {Phase::Kind::kExplore, round_robin_arm(t - start, d)};
  return {Phase::Kind::kUcb, 0};
}

// -- Policy --------------------------------------------------------------------

void Policy::observe(std::size_t arm, double observed_reward) {
  stats_.at(arm).insert(observed_reward);
  on_observe(arm, observed_reward);
}

std::uint64_t Policy::total_pulls() const {
  std::uint64_t total = 0;
  for (const auto& s : stats_) total += s.count();
  return total;
}

// -- med-E-UCB -----------------------------------------------------------------

MedEUcb::MedEUcb(std::size_t num_arms, MedEUcbParams params)
    : Policy(num_arms), params_(params), medians_(num_arms, 0.0), counts_(num_arms, 0) {}

std::size_t MedEUcb::select(std::uint64_t t) {
  last_phase_ = med_e_ucb_phase(t, num_arms(), params_.group_size, params_.b);
  if (last_phase_.kind != Phase::Kind::kUcb) return last_phase_.arm;
  // Reachable only if initialization was empty (b log G <= 0); pull unseen arms first.
  for (std::size_t j = 0; j < num_arms(); ++j) {
    if (counts_[j] == 0) return j;
  }
  return ucb_argmax(medians_, counts_, t, params_.omega);
}

void MedEUcb::on_observe(std::size_t arm, double /*reward*/) {
  medians_[arm] = stats_[arm].median();
  counts_[arm] = stats_[arm].count();
}

// -- med-epsilon-greedy --------------------------------------------------------

MedEpsGreedy::MedEpsGreedy(std::size_t num_arms, MedEpsGreedyParams params, RandomStream rng)
    : Policy(num_arms), params_(params), rng_(rng), medians_(num_arms, 0.0) {}

double MedEpsGreedy::exploration_probability(std::uint64_t t) const {
  return std::min(1.0, params_.c * static_cast<double>(num_arms()) / static_cast<double>(t));
}

std::size_t MedEpsGreedy::select(std::uint64_t t) {
  const std::uint64_t init = ceil_to_u64(params_.c);
  if (t <= init * num_arms()) return round_robin_arm(t, init);
  return eps_greedy_choice(t, params_.c, medians_, rng_);
}

void MedEpsGreedy::on_observe(std::size_t arm, double /*reward*/) { medians_[arm] = stats_[arm].median(); }

// -- UCB -----------------------------------------------------------------------

Ucb::Ucb(std::size_t num_arms, UcbParams params)
    : Policy(num_arms), params_(params), means_(num_arms, 0.0), counts_(num_arms, 0) {}

std::size_t Ucb::select(std::uint64_t t) {
  if (t <= num_arms()) return static_cast<std::size_t>(t - 1);
  return ucb_argmax(means_, counts_, t, params_.alpha / 2.0);
}

void Ucb::on_observe(std::size_t arm, double /*reward*/) {
  means_[arm] = stats_[arm].mean();
  counts_[arm] = stats_[arm].count();
}

// -- epsilon-greedy ------------------------------------------------------------

EpsGreedy::EpsGreedy(std::size_t num_arms, EpsGreedyParams params, RandomStream rng)
    : Policy(num_arms), params_(params), rng_(rng), means_(num_arms, 0.0) {}

std::size_t EpsGreedy::select(std::uint64_t t) {
  const std::uint64_t init = ceil_to_u64(params_.c);
  if (t <= init * num_arms()) return round_robin_arm(t, init);
  return eps_greedy_choice(t, params_.c, means_, rng_);
}

void EpsGreedy::on_observe(std::size_t arm, double /*reward*/) { means_[arm] = stats_[arm].mean(); }

// -- EXP3 ----------------------------------------------------------------------

Exp3::Exp3(std::size_t num_arms, double gamma, double reward_lo, double reward_hi, RandomStream rng)
    : Policy(num_arms),
      gamma_(gamma),
      reward_lo_(reward_lo),
      reward_hi_(reward_hi),
      rng_(rng),
      log_weights_(num_arms, 0.0),
      last_probabilities_(num_arms, 1.0 / static_cast<double>(num_arms)) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ParameterError("exp3: gamma must lie in (0, 1]");
  if (!(reward_lo < reward_hi)) throw ParameterError("exp3: reward clip range must satisfy lo < hi");
}

std::vector<double> Exp3::probabilities() const {
  const auto k = static_cast<double>(num_arms());
  const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
  std::vector<double> p(num_arms());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(log_weights_[i] - top);
    total += p[i];
  }
  for (double& v : p) v = (1.0 - gamma_) * v / total + gamma_ / k;
  return p;
}

std::size_t Exp3::select(std::uint64_t /*t*/) {
  last_probabilities_ = probabilities();
  const double u = rng_.uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < last_probabilities_.size(); ++i) {
    cumulative += last_probabilities_[i];
    if (u < cumulative) return i;
  }
  return last_probabilities_.size() - 1;
}

void Exp3::on_observe(std::size_t arm, double reward) {
  const double clipped = std::clamp(reward, reward_lo_, reward_hi_);
  const double scaled = (clipped - reward_lo_) / (reward_hi_ - reward_lo_);
  const double estimate = scaled / last_probabilities_[arm];
  log_weights_[arm] += gamma_ * estimate / static_cast<double>(num_arms());
  const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
  for (double& w : log_weights_) w -= top;
}

// -- RUCB-MAB ------------------------------------------------------------------

RucbMab::RucbMab(std::size_t num_arms, RucbMabParams params)
    : Policy(num_arms), params_(params), medians_(num_arms, 0.0), counts_(num_arms, 0) {}

std::size_t RucbMab::select(std::uint64_t t) {
  if (t <= num_arms()) return static_cast<std::size_t>(t - 1);
  return ucb_argmax(medians_, counts_, t, params_.omega);
}

void RucbMab::on_observe(std::size_t arm, double /*reward*/) {
  medians_[arm] = stats_[arm].median();
  counts_[arm] = stats_[arm].count();
}

// -- Catoni UCB ----------------------------------------------------------------

CatoniUcb::CatoniUcb(std::size_t num_arms, CatoniUcbParams params)
    : Policy(num_arms), params_(params), estimates_(num_arms, 0.0), refreshed_at_(num_arms, 0) {}

std::size_t CatoniUcb::select(std::uint64_t t) {
  const double log_inv_conf = params_.confidence_exponent * std::log(static_cast<double>(std::max<std::uint64_t>(t, 2)));
  std::size_t best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < num_arms(); ++j) {
    const std::size_t n = stats_[j].count();
    if (static_cast<double>(n) < 4.0 * log_inv_conf) return j;
    const bool stale = refreshed_at_[j] == 0 ||
                       static_cast<double>(n) >= static_cast<double>(refreshed_at_[j]) * (1.0 + params_.refresh_fraction);
    if (n != refreshed_at_[j] && (stale || n <= 256)) {
      const double scale = catoni_default_scale(n, static_cast<double>(t), params_.variance_guess,
                                                params_.confidence_exponent);
      estimates_[j] = stats_[j].catoni_estimate(scale, 1e-9);
      refreshed_at_[j] = n;
    }
    const double index =
        estimates_[j] + 2.0 * std::sqrt(params_.variance_guess * log_inv_conf / static_cast<double>(n));
    if (j == 0 || index > best_index) {
      best = j;
      best_index = index;
    }
  }
  return best;
}

// -- alpha-trimmed variants ----------------------------------------------------

TrimmedUcb::TrimmedUcb(std::size_t num_arms, TrimmedUcbParams params)
    : Policy(num_arms), params_(params), trimmed_(num_arms, 0.0), counts_(num_arms, 0) {}

std::size_t TrimmedUcb::select(std::uint64_t t) {
  if (t <= num_arms()) return static_cast<std::size_t>(t - 1);
  return ucb_argmax(trimmed_, counts_, t, params_.alpha / 2.0);
}

void TrimmedUcb::on_observe(std::size_t arm, double /*reward*/) {
  trimmed_[arm] = stats_[arm].trimmed_mean(params_.alpha_trim);
  counts_[arm] = stats_[arm].count();
}

TrimmedEpsGreedy::TrimmedEpsGreedy(std::size_t num_arms, TrimmedEpsGreedyParams params, RandomStream rng)
    : Policy(num_arms), params_(params), rng_(rng), trimmed_(num_arms, 0.0) {}

std::size_t TrimmedEpsGreedy::select(std::uint64_t t) {
  const std::uint64_t init = ceil_to_u64(params_.c);
  if (t <= init * num_arms()) return round_robin_arm(t, init);
  return eps_greedy_choice(t, params_.c, trimmed_, rng_);
}

void TrimmedEpsGreedy::on_observe(std::size_t arm, double /*reward*/) {
  trimmed_[arm] = stats_[arm].trimmed_mean(params_.alpha_trim);
}

// -- Factory -------------------------------------------------------------------

std::unique_ptr<Policy> make_policy(const PolicyConfig& config, const Scenario& scenario, RandomStream rng) {
  const std::size_t k = scenario.num_arms();
  validate(config, k);
  return std::visit(
      [&](const auto& p) -> std::unique_ptr<Policy> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MedEUcbParams>) {
          return std::make_unique<MedEUcb>(k, p);
        } else if constexpr (std::is_same_v<T, MedEpsGreedyParams>) {
          return std::make_unique<MedEpsGreedy>(k, p, rng);
        } else if constexpr (std::is_same_v<T, UcbParams>) {
          return std::make_unique<Ucb>(k, p);
        } else if constexpr (std::is_same_v<T, EpsGreedyParams>) {
          return std::make_unique<EpsGreedy>(k, p, rng);
        } else if constexpr (std::is_same_v<T, Exp3Params>) {
          double lo = std::numeric_limits<double>::infinity();
          double hi = -std::numeric_limits<double>::infinity();
          for (const auto& arm : scenario.arms()) {
            lo = std::min(lo, arm.mean() - 5.0 * arm.sigma());
            hi = std::max(hi, arm.mean() + 5.0 * arm.sigma());
          }
          return std::make_unique<Exp3>(k, p.gamma.value_or(exp3_auto_gamma(k, scenario.horizon())),
                                        p.reward_lo.value_or(lo), p.reward_hi.value_or(hi), rng);
        } else if constexpr (std::is_same_v<T, RucbMabParams>) {
          return std::make_unique<RucbMab>(k, p);
        } else if constexpr (std::is_same_v<T, CatoniUcbParams>) {
          return std::make_unique<CatoniUcb>(k, p);
        } else if constexpr (std::is_same_v<T, TrimmedUcbParams>) {
          return std::make_unique<TrimmedUcb>(k, p);
        } else {
          return std::make_unique<TrimmedEpsGreedy>(k, p, rng);
        }
      },
      config);
}

}  // namespace rbandit

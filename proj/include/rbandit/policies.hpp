#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rbandit/estimators.hpp"
#include "rbandit/random.hpp"

namespace rbandit {

class Scenario;

// -- Configuration -------------------------------------------------------------

struct MedEUcbParams {
  double b = 4.0;
  double omega = 4.0;
  std::uint64_t group_size = 1000;
};

struct MedEpsGreedyParams {
  double c = 10.0;
};

struct UcbParams {
  double alpha = 4.0;
};

struct EpsGreedyParams {
  double c = 10.0;
};

struct Exp3Params {
  std::optional<double> gamma;      // unset: min{1, sqrt(K ln K / ((e-1) T))}
  std::optional<double> reward_lo;  // unset: min_i(mu_i - 5 sigma_i)
  std::optional<double> reward_hi;  // unset: max_i(mu_i + 5 sigma_i)
};

struct RucbMabParams {
  double omega = 4.0;
};

struct CatoniUcbParams {
  double variance_guess = 1.0;
  double confidence_exponent = 4.0;  // per-round confidence t^-exponent
  // An arm's estimate is recomputed once its count grew by this fraction.
  double refresh_fraction = 1.0 / 64.0;
};

struct TrimmedUcbParams {
  double alpha_trim = 0.125;
  double alpha = 4.0;
};

struct TrimmedEpsGreedyParams {
  double alpha_trim = 0.125;
  double c = 10.0;
};

using PolicyConfig =
    std::variant<MedEUcbParams, MedEpsGreedyParams, UcbParams, EpsGreedyParams, Exp3Params,
                 RucbMabParams, CatoniUcbParams, TrimmedUcbParams, TrimmedEpsGreedyParams>;

/// Algorithm tags, in PolicyConfig alternative order.
std::string_view algorithm_tag(const PolicyConfig& config);
std::vector<std::string> algorithm_tags();
/// Default-parameterized config for a tag. Throws InputError on unknown tags.
PolicyConfig default_config(std::string_view tag);

/// Checks every parameter range, plus G >= K ceil(b log G) for med-E-UCB.
/// Throws ParameterError naming the violated constraint.
void validate(const PolicyConfig& config, std::size_t num_arms);

// -- Policy interface ----------------------------------------------------------

/// Arm-selection algorithm. Rounds are 1-based; arms are 0-based.
/// `select(t)` is deterministic given the state and the policy's own stream.
class Policy {
 public:
  explicit Policy(std::size_t num_arms) : stats_(num_arms) {}
  virtual ~Policy() = default;

  virtual std::size_t select(std::uint64_t t) = 0;
  void observe(std::size_t arm, double observed_reward);
  virtual std::string_view name() const = 0;

  std::size_t num_arms() const { return stats_.size(); }
  const std::vector<ArmStats>& stats() const { return stats_; }
  // Sum of pull counts; equals the number of observed rounds.
  std::uint64_t total_pulls() const;

 protected:
  virtual void on_observe(std::size_t /*arm*/, double /*reward*/) {}

  std::vector<ArmStats> stats_;
};

std::unique_ptr<Policy> make_policy(const PolicyConfig& config, const Scenario& scenario,
                                    RandomStream rng);

// -- med-E-UCB schedule ----------------------------------------------------------

struct Phase {
  enum class Kind { kInit, kExplore, kUcb };
  Kind kind = Kind::kUcb;
  std::size_t arm = 0;  // 0-based; meaningful for kInit / kExplore

  bool operator==(const Phase&) const = default;
};

/// ceil(b log x), the per-arm exploration target after x rounds.
std::uint64_t exploration_target(double b, double x);

/// Block schedule of med-E-UCB. The first K ceil(b log G) rounds pull each
/// arm ceil(b log G) times in order. Afterwards, block k = floor(t / G) >= 1
/// opens with d_k = ceil(b log((k+1)G)) - ceil(b log(kG)) pulls per arm;
/// block 0 beyond initialization and empty slices (d_k = 0) are UCB rounds.
Phase med_e_ucb_phase(std::uint64_t t, std::size_t num_arms, std::uint64_t group_size, double b);

/// argmax_j center_j + sqrt(coef log t / n_j), ties to the lowest index.
std::size_t ucb_argmax(std::span<const double> center, std::span<const std::size_t> counts,
                       std::uint64_t t, double coef);

/// argmax with ties to the lowest index.
std::size_t greedy_argmax(std::span<const double> values);

/// min{1, sqrt(K ln K / ((e - 1) T))}.
double exp3_auto_gamma(std::size_t num_arms, std::uint64_t horizon);

// -- Concrete policies ---------------------------------------------------------

class MedEUcb final : public Policy {
 public:
  MedEUcb(std::size_t num_arms, MedEUcbParams params);
  std::size_t select(std::uint64_t t) override;
  std::string_view name() const override { return "med-e-ucb"; }
  Phase last_phase() const { return last_phase_; }

 private:
  void on_observe(std::size_t arm, double reward) override;

  MedEUcbParams params_;
  std::vector<double> medians_;
  std::vector<std::size_t> counts_;
  Phase last_phase_;
};

class MedEpsGreedy final : public Policy {
 public:
  MedEpsGreedy(std::size_t num_arms, MedEpsGreedyParams params, RandomStream rng);
  std::size_t select(std::uint64_t t) override;
  std::string_view name() const override { return "med-eps-greedy"; }
  double exploration_probability(std::uint64_t t) const;

 private:
  void on_observe(std::size_t arm, double reward) override;

  MedEpsGreedyParams params_;
  RandomStream rng_;
  std::vector<double> medians_;
};

class Ucb final : public Policy {
 public:
  Ucb(std::size_t num_arms, UcbParams params);
  std::size_t select(std::uint64_t t) override;
  std::string_view name() const override { return "ucb"; }

 private:
  void on_observe(std::size_t arm, double reward) override;

  UcbParams params_;
  std::vector<double> means_;
  std::vector<std::size_t> counts_;
};

class EpsGreedy final : public Policy {
 public:
  EpsGreedy(std::size_t num_arms, EpsGreedyParams params, RandomStream rng);
  std::size_t select(std::uint64_t t) override;
  std::string_view name() const override { return "eps-greedy"; }

 private:
  void on_observe(std::size_t arm, double reward) override;

  EpsGreedyParams params_;
  RandomStream rng_;
  std::vector<double> means_;
};

/// EXP3 on rewards clipped to [lo, hi] and mapped affinely onto [0, 1].
/// Weights are kept in the log domain and shifted by their maximum after every
/// update, which is the same as dividing all weights by the largest one.
class Exp3 final : public Policy {
 public:
  Exp3(std::size_t num_arms, double gamma, double reward_lo, double reward_hi, RandomStream rng);
  std::size_t select(std::uint64_t t) override;
  std::string_view name() const override { return "exp3"; }

  double gamma() const { return gamma_; }
  std::vector<double> probabilities() const;
  const std::vector<double>& log_weights() const { return log_weights_; }

 private:
  void on_observe(std::size_t arm, double reward) override;

  double gamma_;
  double reward_lo_;
  double reward_hi_;
  RandomStream rng_;
  std::vector<double> log_weights_;
  std::vector<double> last_probabilities_;
};

/// Median in place of the mean in UCB, one initial pull per arm.
class RucbMab final : public Policy {
 public:
  RucbMab(std::size_t num_arms, RucbMabParams params);
  std::size_t select(std::uint64_t t) override;
  std::string_view name() const override { return "rucb-mab"; }

 private:
  void on_observe(std::size_t arm, double reward) override;

  RucbMabParams params_;
  std::vector<double> medians_;
  std::vector<std::size_t> counts_;
};

/// Robust UCB with Catoni's M-estimator. With L = exponent * log t, arms
/// holding fewer than 4L samples get an infinite index; otherwise the index is
/// the Catoni estimate plus 2 sqrt(v L / n).
class CatoniUcb final : public Policy {
 public:
  CatoniUcb(std::size_t num_arms, CatoniUcbParams params);
  std::size_t select(std::uint64_t t) override;
  std::string_view name() const override { return "catoni-ucb"; }

 private:
  CatoniUcbParams params_;
  std::vector<double> estimates_;
  std::vector<std::size_t> refreshed_at_;
};

class TrimmedUcb final : public Policy {
 public:
  TrimmedUcb(std::size_t num_arms, TrimmedUcbParams params);
  std::size_t select(std::uint64_t t) override;
  std::string_view name() const override { return "trimmed-ucb"; }

 private:
  void on_observe(std::size_t arm, double reward) override;

  TrimmedUcbParams params_;
  std::vector<double> trimmed_;
  std::vector<std::size_t> counts_;
};

class TrimmedEpsGreedy final : public Policy {
 public:
  TrimmedEpsGreedy(std::size_t num_arms, TrimmedEpsGreedyParams params, RandomStream rng);
  std::size_t select(std::uint64_t t) override;
  std::string_view name() const override { return "trimmed-eps-greedy"; }

 private:
  void on_observe(std::size_t arm, double reward) override;

  TrimmedEpsGreedyParams params_;
  RandomStream rng_;
  std::vector<double> trimmed_;
};

}  // namespace rbandit

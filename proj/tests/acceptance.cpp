// End-to-end acceptance checks. Each criterion prints one PASS or FAIL line.
// Usage: acceptance [criterion ...]   (default: all of 1-9)

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rbandit/cli.hpp"
#include "rbandit/estimators.hpp"
#include "rbandit/harness.hpp"
#include "rbandit/normal.hpp"
#include "rbandit/output.hpp"
#include "rbandit/validation.hpp"

using namespace rbandit;

namespace {

constexpr std::uint64_t kTrials = 20;
constexpr std::uint64_t kSeed = 20240611;
constexpr std::uint64_t kHorizon = 100000;

struct Verdict {
  bool passed;
  std::string detail;
};

struct Run {
  std::string label;
  AggregateCurve curve;
};

std::vector<Run> run(const Scenario& scenario, const std::vector<std::pair<std::string, PolicyConfig>>& policies,
                     std::uint64_t trials = kTrials) {
  std::vector<PolicyConfig> configs;
  for (const auto& p : policies) configs.push_back(p.second);
  auto result = run_experiment(scenario, configs, trials, kSeed);
  std::vector<Run> out;
  for (std::size_t i = 0; i < policies.size(); ++i) out.push_back({policies[i].first, std::move(result.curves[i])});
  return out;
}

GrowthClass growth(const AggregateCurve& curve, std::uint64_t t_max = kHorizon) {
  return fit_growth(curve, 1000, t_max).classification;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

// Checks the last-decile rate and the growth class of every run.
Verdict robust_runs(const std::vector<Run>& runs, double min_rate) {
  bool ok = true;
  std::vector<std::string> parts;
  for (const auto& r : runs) {
    const double rate = tail_optimal_rate(r.curve, 0.1);
    const GrowthClass g = growth(r.curve);
    ok = ok && rate >= min_rate && g == GrowthClass::kLogarithmic;
    parts.push_back(fmt::format("{} last-decile rate {:.4f}, R_T {:.1f}, {}", r.label, rate,
                                r.curve.points.back().mean_regret, to_string(g)));
  }
  return {ok, join(parts)};
}

Verdict criterion1() {
  const Scenario s = preset_paper_k10(0.125, kHorizon);
  const auto runs = run(s, {{"med-e-ucb", MedEUcbParams{4.0, 4.0, 1000}},
                            {"med-eps-greedy", MedEpsGreedyParams{10.0}},
                            {"ucb", default_config("ucb")},
                            {"eps-greedy", default_config("eps-greedy")},
                            {"rucb-mab", default_config("rucb-mab")},
                            {"exp3", default_config("exp3")},
                            {"catoni-ucb", default_config("catoni-ucb")}});
  Verdict v = robust_runs({runs[0], runs[1]}, 0.95);
  const double reference = runs[0].curve.points.back().mean_regret;
  std::vector<std::string> parts{v.detail};
  for (std::size_t i = 2; i < runs.size(); ++i) {
    const double r = runs[i].curve.points.back().mean_regret;
    const GrowthClass g = growth(runs[i].curve);
    const bool ok = r >= 10.0 * reference && g == GrowthClass::kLinear;
    v.passed = v.passed && ok;
    parts.push_back(fmt::format("{} R_T {:.1f} ({:.1f}x), {}{}", runs[i].label, r, r / reference, to_string(g),
                                ok ? "" : " [not met]"));
  }
  return {v.passed, join(parts)};
}

Verdict criterion2() {
  const Scenario s = preset_paper_k10(0.3, kHorizon);
  return robust_runs(run(s, {{"med-e-ucb", MedEUcbParams{4.0, 4.0, 1000}}, {"med-eps-greedy", MedEpsGreedyParams{10.0}}}),
                     0.90);
}

Verdict criterion3() {
  const Scenario s =
      preset_paper_k10(0.3, kHorizon).with_attack({0.3, AttackStrategy::kMedianKiller, kDefaultMedianKillerMagnitude});
  const auto result =
      run_experiment(s, {default_config("rucb-mab"), MedEUcbParams{4.0, 4.0, 1000}}, kTrials, kSeed, 0, true);
  const double rucb = result.curves[0].points.back().optimal_pull_rate;
  const double med = result.curves[1].points.back().optimal_pull_rate;
  // A trial counts as abandoned when the optimal arm got under 1% of the pulls.
  std::uint64_t abandoned = 0;
  for (const auto& trace : result.traces[0]) {
    if (static_cast<double>(trace.checkpoints.back().optimal_pulls) < 0.01 * static_cast<double>(kHorizon)) ++abandoned;
  }
  return {rucb < 0.05 && med > 0.90,
          fmt::format("rucb-mab full-horizon optimal rate {:.4f} (need < 0.05), optimal arm abandoned in {} of {} "
                      "trials; med-e-ucb {:.4f} (need > 0.90)",
                      rucb, abandoned, kTrials, med)};
}

Verdict criterion4() {
  const Scenario s = preset_paper_k10(0.0, kHorizon).with_attack({});
  return robust_runs(run(s, {{"med-e-ucb", MedEUcbParams{4.0, 4.0, 1000}},
                             {"med-eps-greedy", MedEpsGreedyParams{10.0}},
                             {"ucb", default_config("ucb")}}),
                     0.99);
}

Verdict criterion5() {
  const Scenario s = preset_paper_k10(0.125, kHorizon);
  const CompliantSetup setup = theory_compliant_setup(s);
  const auto runs = run(s, {{"med-e-ucb", setup.ucb_policy}, {"med-eps-greedy", setup.greedy_policy}});
  const auto ucb = compare_bound(runs[0].curve, Theorem::kTheorem1, s, setup.ucb);
  const auto greedy = compare_bound(runs[1].curve, Theorem::kTheorem3, s, setup.greedy);
  auto worst = [](const DominanceReport& r) {
    return *std::min_element(r.rows.begin(), r.rows.end(),
                             [](const auto& a, const auto& b) { return a.margin < b.margin; });
  };
  const auto wu = worst(ucb);
  const auto wg = worst(greedy);
  return {ucb.dominated && greedy.dominated,
          fmt::format("med-e-ucb (b={:.2f}, omega={:.2f}, G={}) R_T {:.1f} vs bound {:.1f}, tightest at t={} "
                      "(margin {:.1f}); med-eps-greedy (c={:.3f}) R_T {:.1f} vs bound {:.1f}, tightest at t={} "
                      "(margin {:.1f})",
                      setup.ucb_policy.b, setup.ucb_policy.omega, setup.ucb_policy.group_size,
                      ucb.rows.back().mean_regret, ucb.rows.back().bound, wu.t, wu.margin, setup.greedy_policy.c,
                      greedy.rows.back().mean_regret, greedy.rows.back().bound, wg.t, wg.margin)};
}

Verdict criterion6() {
  const auto rows = run_validation_suite(ValidationOptions{});
  std::vector<std::string> failed;
  for (const auto& r : rows) {
    if (!r.passed) failed.push_back(fmt::format("{} [{}] bound {} empirical {}", r.formula, r.params, r.bound, r.empirical));
  }
  return {failed.empty(), failed.empty() ? fmt::format("{} rows passed", rows.size())
                                         : fmt::format("{} of {} rows failed: {}", failed.size(), rows.size(), join(failed))};
}

// Root of the Catoni equation by repeated dense scans of a shrinking bracket.
double grid_catoni(const std::vector<double>& v, double scale) {
  auto f = [&](double theta) {
    double s = 0.0;
    for (double x : v) s += catoni_psi(scale * (x - theta));
    return s;
  };
  double lo = *std::min_element(v.begin(), v.end());
  double hi = *std::max_element(v.begin(), v.end());
  constexpr int kSteps = 64;
  while (hi - lo > 1e-9) {
    const double h = (hi - lo) / kSteps;
    double a = lo;
    for (int i = 1; i <= kSteps; ++i) {
      const double b = lo + h * i;
      if (f(b) <= 0.0) {
        hi = b;
        lo = a;
        break;
      }
      a = b;
    }
    if (h < 1e-12) break;
  }
  return 0.5 * (lo + hi);
}

Verdict criterion7() {
  RandomStream rng(derive_seed(kSeed, 7));
  std::uint64_t queries = 0;
  double worst_catoni = 0.0;
  std::string mismatch;
  for (int seq = 0; seq < 10000 && mismatch.empty(); ++seq) {
    const std::size_t len = 1 + rng.below(1000);
    ArmStats stats;
    std::vector<double> ref;
    const bool ties = seq % 3 == 0;
    for (std::size_t i = 0; i < len; ++i) {
      double x = ties ? std::floor(rng.uniform() * 20.0) : normal_quantile(std::max(rng.uniform(), 1e-300)) * 3.0;
      if (rng.uniform() < 0.05) x += (rng.uniform() < 0.5 ? -1.0 : 1.0) * 1e6;
      stats.insert(x);
      ref.insert(std::upper_bound(ref.begin(), ref.end(), x), x);
      // Query after every insert while short, then at a spread of lengths.
      const std::size_t n = ref.size();
      if (n > 64 && n % 37 != 0 && n != len) continue;
      ++queries;
      const double median = ref[(n + 1) / 2 - 1];
      if (stats.median() != median) mismatch = fmt::format("median at sequence {} length {}", seq, n);
      // Levels in tenths so the rank ceil(p n) is exact integer arithmetic.
      for (std::size_t tenths : {1, 3, 7, 9}) {
        const std::size_t k = std::max<std::size_t>(1, (tenths * n + 9) / 10);
        const double p = static_cast<double>(tenths) / 10.0;
        if (stats.quantile(p) != ref[k - 1]) mismatch = fmt::format("quantile {} at sequence {} length {}", p, seq, n);
      }
      for (double alpha : {0.05, 0.125, 0.25}) {
        const auto cut = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n)));
        double sum = 0.0;
        for (std::size_t j = cut; j < n - cut; ++j) sum += ref[j];
        if (stats.trimmed_mean(alpha) != sum / static_cast<double>(n - 2 * cut))
          mismatch = fmt::format("trimmed mean {} at sequence {} length {}", alpha, seq, n);
      }
    }
    const double scale = catoni_default_scale(len, static_cast<double>(len) * 10.0);
    const double diff = std::abs(stats.catoni_estimate(scale, 1e-10) - grid_catoni(ref, scale));
    worst_catoni = std::max(worst_catoni, diff);
  }
  const bool ok = mismatch.empty() && worst_catoni <= 1e-6;
  return {ok, mismatch.empty() ? fmt::format("{} order-statistic checkpoints exact, worst catoni gap {:.3g}", queries,
                                             worst_catoni)
                               : "mismatch: " + mismatch};
}

Verdict criterion8() {
  const auto root = std::filesystem::temp_directory_path() / "rbandit_acceptance_determinism";
  std::filesystem::remove_all(root);
  auto make = [&](const std::string& name, unsigned threads) {
    RunRequest req;
    req.config.scenario.preset = "paper-k10";
    req.config.scenario.horizon = 20000;
    for (const auto& tag : algorithm_tags()) req.config.policies.push_back(policy_entry(tag));
    req.config.trials = 6;
    req.config.seed = kSeed;
    req.config.parallelism = threads;
    req.config.output_dir = (root / name).string();
    std::ostringstream log;
    return cmd_run(req, log);
  };
  const auto serial = make("serial", 1);
  const auto parallel = make("parallel", 4);
  std::size_t compared = 0;
  std::string diff;
  for (const auto& path : serial.files) {
    const auto rel = std::filesystem::relative(path, serial.output_dir);
    const auto other = std::filesystem::path(parallel.output_dir) / rel;
    const std::string a = read_text_file(path);
    std::string b = read_text_file(other.string());
    if (rel == "manifest.json") {
      // Only the output directory may differ.
      const auto pos = b.find(parallel.output_dir);
      if (pos != std::string::npos) b.replace(pos, parallel.output_dir.size(), serial.output_dir);
    }
    ++compared;
    if (a != b) diff += rel.string() + " ";
  }
  std::filesystem::remove_all(root);
  return {diff.empty() && compared > 0,
          diff.empty() ? fmt::format("{} files byte-identical between 1 and 4 threads", compared) : "differ: " + diff};
}

Verdict criterion9() {
  bool ok = true;
  std::vector<std::string> parts;
  for (double rho : {0.125, 0.3}) {
    const Scenario s = preset_radio_sinr(rho, 2000);
    const auto runs = run(s, {{"med-e-ucb", MedEUcbParams{4.0, 4.0, 200}}, {"med-eps-greedy", MedEpsGreedyParams{10.0}}});
    for (const auto& r : runs) {
      const double rate = window_optimal_rate(r.curve, 1500, 2000);
      ok = ok && rate >= 0.85;
      parts.push_back(fmt::format("rho={} {} last-quarter rate {:.4f}", rho, r.label, rate));
    }
  }
  return {ok, join(parts)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> selected;
  app.add_option("criteria", selected, "criteria to run (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  const std::map<int, std::function<Verdict()>> criteria{{1, criterion1}, {2, criterion2}, {3, criterion3},
                                                         {4, criterion4}, {5, criterion5}, {6, criterion6},
                                                         {7, criterion7}, {8, criterion8}, {9, criterion9}};
  bool all = true;
  for (int id : selected) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria.at(id)();
    } catch (const std::exception& e) {
      v = {false, fmt::format("error: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << fmt::format("criterion {}: {} ({:.1f}s) {}", id, v.passed ? "PASS" : "FAIL", secs, v.detail)
              << std::endl;
    all = all && v.passed;
  }
  return all ? 0 : 1;
}

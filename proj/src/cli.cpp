#include "rbandit/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <json.hpp>
#include <limits>
#include <ostream>
#include <set>

#include "rbandit/errors.hpp"
#include "rbandit/output.hpp"

#ifndef RBANDIT_VERSION
#define RBANDIT_VERSION "0.0.0"
#endif

namespace rbandit {

namespace {

using nlohmann::ordered_json;

ordered_json arm_json(const ArmSpec& arm) {
  ordered_json j;
  if (arm.kind() == ArmSpec::Kind::kGaussian) {
    j["dist"] = "gaussian";
    j["mean"] = arm.mean();
    j["sigma"] = arm.sigma();
  } else {
    j["dist"] = "custom";
    ordered_json knots = ordered_json::array();
    for (const auto& [x, f] : arm.knots()) knots.push_back({x, f});
    j["knots"] = knots;
  }
  return j;
}

std::string manifest_json(const RunRequest& request, const Scenario& scenario, const std::string& output_dir,
                          const std::vector<std::string>& files) {
  ordered_json j;
  j["tool"] = "rbandit";
  j["version"] = tool_version();
  j["config_path"] = request.config_path.empty() ? ordered_json(nullptr) : ordered_json(request.config_path);
  ordered_json s;
  s["name"] = scenario_name(request.config.scenario);
  s["arms"] = ordered_json::array();
  for (const auto& arm : scenario.arms()) s["arms"].push_back(arm_json(arm));
  s["attack"] = {{"strategy", std::string(to_string(scenario.attack().strategy))},
                 {"rho", scenario.attack().rho},
                 {"magnitude", scenario.attack().magnitude}};
  s["horizon"] = scenario.horizon();
  j["scenario"] = s;
  j["policies"] = ordered_json::array();
  for (const auto& entry : request.config.policies) {
    ordered_json p;
    p["label"] = entry.label;
    p["algorithm"] = std::string(algorithm_tag(entry.config));
    ordered_json params = ordered_json::object();
    for (const auto& [key, value] : policy_parameters(entry.config)) params[key] = value;
    p["params"] = params;
    j["policies"].push_back(p);
  }
  j["master_seed"] = request.config.seed;
  j["trials"] = request.config.trials;
  j["output_dir"] = output_dir;
  j["files"] = files;
  return j.dump(2) + "\n";
}

std::string resolve_output_dir(const std::optional<std::string>& configured) {
  if (configured) return *configured;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return "rbandit-out";
}

std::vector<PlotSeries> curve_series(const ExperimentResult& result, const std::vector<PolicyEntry>& policies,
                                     bool regret) {
  std::vector<PlotSeries> series;
  for (std::size_t i = 0; i < result.curves.size(); ++i) {
    PlotSeries s{policies[i].label, {}, {}};
    for (const auto& p : result.curves[i].points) {
      s.x.push_back(static_cast<double>(p.t));
      s.y.push_back(regret ? p.mean_regret : p.optimal_pull_rate);
    }
    series.push_back(std::move(s));
  }
  return series;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char ch : text + ",") {
    if (ch == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else if (ch != ' ') {
      item += ch;
    }
  }
  return out;
}

// Command line values that override the config file.
struct Overrides {
  std::string config_path;
  std::optional<std::string> preset;
  std::optional<double> rho;
  std::optional<std::uint64_t> horizon;
  std::optional<std::string> attack;
  std::optional<double> magnitude;
  std::optional<std::string> policies;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> parallelism;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> group_size;
  std::optional<double> b;
  std::optional<double> omega;
  std::optional<double> c;
  bool plot = false;
  bool per_trial = false;
};

void add_run_options(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--config", o.config_path, "YAML experiment file")->check(CLI::ExistingFile);
  cmd.add_option("--preset", o.preset, "built-in scenario (see 'presets')");
  cmd.add_option("--rho", o.rho, "attack probability")->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--horizon", o.horizon, "number of rounds T")->check(CLI::PositiveNumber);
  cmd.add_option("--attack", o.attack, "none, targeted-uniform, constant-offset or median-killer");
  cmd.add_option("--magnitude", o.magnitude, "attack magnitude (M, c or B)")->check(CLI::NonNegativeNumber);
  cmd.add_option("--policies", o.policies, "comma separated algorithm tags");
  cmd.add_option("--trials", o.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  cmd.add_option("--seed", o.seed, "master seed");
  cmd.add_option("--parallelism", o.parallelism, "worker threads, 0 for all cores")->check(CLI::Range(0u, 4096u));
  cmd.add_option("--output-dir", o.output_dir, fmt::format("output directory (default: ${} or ./rbandit-out)", kOutputDirEnv));
  cmd.add_option("--group-size", o.group_size, "med-e-ucb block length G")->check(CLI::PositiveNumber);
  cmd.add_option("--b", o.b, "med-e-ucb exploration constant")->check(CLI::PositiveNumber);
  cmd.add_option("--omega", o.omega, "med-e-ucb confidence constant")->check(CLI::PositiveNumber);
  cmd.add_option("--c", o.c, "med-eps-greedy exploration constant")->check(CLI::PositiveNumber);
  cmd.add_flag("--plot", o.plot, "also write SVG plots");
  cmd.add_flag("--per-trial", o.per_trial, "also write one CSV per trial");
}

RunRequest build_request(const Overrides& o, const std::vector<std::string>& default_policies) {
  RunRequest request;
  request.config_path = o.config_path;
  if (!o.config_path.empty()) request.config = load_config(o.config_path);
  ExperimentConfig& cfg = request.config;
  if (o.preset) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), *o.preset) == names.end())
      throw ConfigError(fmt::format("--preset: unknown preset '{}'", *o.preset));
    cfg.scenario.preset = o.preset;
  }
  if (o.rho) cfg.scenario.rho = o.rho;
  if (o.horizon) cfg.scenario.horizon = o.horizon;
  if (o.attack) {
    try {
      cfg.scenario.strategy = parse_attack_strategy(*o.attack);
    } catch (const InputError& e) {
      throw ConfigError(fmt::format("--attack: {}", e.what()));
    }
  }
  if (o.magnitude) cfg.scenario.magnitude = o.magnitude;
  if (o.policies) {
    cfg.policies.clear();
    for (const auto& tag : split_list(*o.policies)) {
      try {
        cfg.policies.push_back(policy_entry(tag));
      } catch (const InputError& e) {
        throw ConfigError(fmt::format("--policies: {}", e.what()));
      }
    }
  }
  if (cfg.policies.empty()) {
    for (const auto& tag : default_policies) cfg.policies.push_back(policy_entry(tag));
  }
  for (auto& entry : cfg.policies) {
    if (auto* p = std::get_if<MedEUcbParams>(&entry.config)) {
      if (o.group_size) p->group_size = *o.group_size;
      if (o.b) p->b = *o.b;
      if (o.omega) p->omega = *o.omega;
    } else if (auto* q = std::get_if<MedEpsGreedyParams>(&entry.config)) {
      if (o.c) q->c = *o.c;
    }
  }
  if (o.trials) cfg.trials = *o.trials;
  if (o.seed) cfg.seed = *o.seed;
  if (o.parallelism) cfg.parallelism = *o.parallelism;
  if (o.output_dir) cfg.output_dir = o.output_dir;
  if (!cfg.scenario.preset && !cfg.scenario.arms) cfg.scenario.preset = "paper-k10";
  request.plot = o.plot;
  request.per_trial = o.per_trial;
  return request;
}

void print_summary(const RunOutcome& outcome, const std::vector<PolicyEntry>& policies, std::ostream& out) {
  out << fmt::format("{:<22} {:>14} {:>14} {:>12} {:>14}\n", "policy", "final regret", "std", "last-10% opt",
                     "growth");
  for (std::size_t i = 0; i < outcome.result.curves.size(); ++i) {
    const auto& curve = outcome.result.curves[i];
    const auto& last = curve.points.back();
    std::string growth = "-";
    try {
      growth = std::string(to_string(fit_growth(curve, std::min<std::uint64_t>(1000, last.t / 10 + 1), last.t).classification));
    } catch (const ParameterError&) {
    }
    out << fmt::format("{:<22} {:>14.2f} {:>14.2f} {:>12.4f} {:>14}\n", policies[i].label, last.mean_regret,
                       last.std_regret, tail_optimal_rate(curve, 0.1), growth);
  }
}

}  // namespace

std::string tool_version() { return RBANDIT_VERSION; }

RunOutcome cmd_run(const RunRequest& request, std::ostream& log) {
  const ExperimentConfig& cfg = request.config;
  if (cfg.policies.empty()) throw ConfigError("no policies configured");
  std::set<std::string> labels;
  for (const auto& entry : cfg.policies) {
    if (!labels.insert(entry.label).second)
      throw ConfigError(fmt::format("duplicate policy label '{}'; set distinct 'label' keys", entry.label));
  }
  const Scenario scenario = resolve_scenario(cfg.scenario);
  std::vector<PolicyConfig> configs;
  for (const auto& entry : cfg.policies) {
    validate(entry.config, scenario.num_arms());
    configs.push_back(entry.config);
  }

  RunOutcome outcome;
  outcome.output_dir = resolve_output_dir(cfg.output_dir);
  log << fmt::format("running {} policies x {} trials on {} (K={}, T={}, rho={}, attack={})\n", configs.size(),
                     cfg.trials, scenario_name(cfg.scenario), scenario.num_arms(), scenario.horizon(),
                     scenario.attack().rho, to_string(scenario.attack().strategy));
  outcome.result = run_experiment(scenario, configs, cfg.trials, cfg.seed, cfg.parallelism, request.per_trial);

  const std::filesystem::path dir(outcome.output_dir);
  const std::string prefix = scenario_name(cfg.scenario);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
    const std::string name = fmt::format("{}_{}.csv", prefix, cfg.policies[i].label);
    write_text_file((dir / name).string(), curve_csv(outcome.result.curves[i]));
    names.push_back(name);
    if (request.per_trial) {
      for (const auto& trace : outcome.result.traces[i]) {
        const std::string trial_name = fmt::format("trials/{}_{}_trial{}.csv", prefix, cfg.policies[i].label, trace.trial);
        write_text_file((dir / trial_name).string(), trace_csv(trace));
        names.push_back(trial_name);
      }
    }
  }
  if (request.plot) {
    PlotOptions regret;
    regret.title = fmt::format("Mean cumulative regret, {} (rho = {})", prefix, scenario.attack().rho);
    regret.y_label = "mean regret over trials";
    write_text_file((dir / "regret.svg").string(), render_svg(curve_series(outcome.result, cfg.policies, true), regret));
    PlotOptions rate;
    rate.title = fmt::format("Optimal arm pull rate, {} (rho = {})", prefix, scenario.attack().rho);
    rate.y_label = "fraction of optimal pulls";
    write_text_file((dir / "optimal_pull_rate.svg").string(),
                    render_svg(curve_series(outcome.result, cfg.policies, false), rate));
    names.push_back("regret.svg");
    names.push_back("optimal_pull_rate.svg");
  }
  write_text_file((dir / "manifest.json").string(), manifest_json(request, scenario, outcome.output_dir, names));
  names.push_back("manifest.json");
  for (const auto& name : names) outcome.files.push_back((dir / name).string());
  return outcome;
}

int cmd_validate_bounds(const ValidationOptions& options, const std::string& report_path, std::ostream& out) {
  const auto rows = run_validation_suite(options);
  write_text_file(report_path, validation_csv(rows));
  std::size_t failed = 0;
  for (const auto& row : rows) {
    if (row.passed) continue;
    ++failed;
    out << fmt::format("FAIL {} [{}]: bound {} empirical {}\n", row.formula, row.params, row.bound, row.empirical);
  }
  out << fmt::format("{} of {} checks passed; report written to {}\n", rows.size() - failed, rows.size(), report_path);
  return failed == 0 ? kExitOk : kExitFailure;
}

FitReport cmd_fit(const std::string& csv_path, std::uint64_t t_min, std::uint64_t t_max) {
  const CurveColumns columns = read_curve_csv(csv_path);
  return fit_growth(columns.t, columns.mean_regret, t_min, t_max);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate stochastic bandits under probabilistic unbounded reward attacks", "rbandit"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  Overrides run_opts;
  auto* run = app.add_subcommand("run", "run an experiment and write curves and a manifest");
  add_run_options(*run, run_opts);

  Overrides compare_opts;
  auto* compare = app.add_subcommand("compare", "run every algorithm side by side, with plots and a summary");
  add_run_options(*compare, compare_opts);

  ValidationOptions validation;
  std::string validation_config;
  std::string report_path;
  std::optional<std::string> validation_dir;
  auto* validate_cmd =
      app.add_subcommand("validate-bounds", "Monte Carlo checks of the concentration bounds and theorem conditions");
  validate_cmd->add_option("--config", validation_config, "YAML file with a 'validation' section")
      ->check(CLI::ExistingFile);
  auto* reps_opt = validate_cmd->add_option("--reps", validation.reps, "Monte Carlo repetitions per cell")
                       ->check(CLI::PositiveNumber);
  auto* worlds_opt = validate_cmd->add_option("--worlds", validation.coverage_worlds, "replicate worlds for coverage")
                         ->check(CLI::PositiveNumber);
  auto* vseed_opt = validate_cmd->add_option("--seed", validation.seed, "master seed");
  validate_cmd->add_option("--parallelism", validation.parallelism, "worker threads, 0 for all cores")
      ->check(CLI::Range(0u, 4096u));
  validate_cmd->add_option("--output", report_path, "report CSV path (default: <output dir>/validate_bounds.csv)");
  validate_cmd->add_option("--output-dir", validation_dir, "output directory");
  validate_cmd->add_flag("--invert-bounds", validation.invert_bounds)->group("");

  std::string fit_path;
  std::uint64_t fit_min = 1000;
  std::uint64_t fit_max = std::numeric_limits<std::uint64_t>::max();
  bool fit_json = false;
  auto* fit = app.add_subcommand("fit", "classify the growth of a regret curve CSV");
  fit->add_option("csv", fit_path, "curve CSV written by 'run'")->required()->check(CLI::ExistingFile);
  fit->add_option("--t-min", fit_min, "window start");
  fit->add_option("--t-max", fit_max, "window end (default: last row)");
  fit->add_flag("--json", fit_json, "print the report as JSON");

  auto* presets = app.add_subcommand("presets", "list built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed() || compare->parsed()) {
      const bool is_compare = compare->parsed();
      RunRequest request = build_request(is_compare ? compare_opts : run_opts,
                                         is_compare ? algorithm_tags()
                                                    : std::vector<std::string>{"med-e-ucb", "med-eps-greedy"});
      if (is_compare) request.plot = true;
      const RunOutcome outcome = cmd_run(request, err);
      print_summary(outcome, request.config.policies, out);
      out << fmt::format("wrote {} files to {}\n", outcome.files.size(), outcome.output_dir);
      return kExitOk;
    }
    if (validate_cmd->parsed()) {
      if (!validation_config.empty()) {
        const ExperimentConfig cfg = load_config(validation_config);
        if (cfg.validation.reps && reps_opt->count() == 0) validation.reps = *cfg.validation.reps;
        if (cfg.validation.coverage_worlds && worlds_opt->count() == 0)
          validation.coverage_worlds = *cfg.validation.coverage_worlds;
        if (cfg.validation.seed && vseed_opt->count() == 0) validation.seed = *cfg.validation.seed;
        if (!validation_dir) validation_dir = cfg.output_dir;
      }
      if (report_path.empty())
        report_path = (std::filesystem::path(resolve_output_dir(validation_dir)) / "validate_bounds.csv").string();
      return cmd_validate_bounds(validation, report_path, out);
    }
    if (fit->parsed()) {
      const FitReport report = cmd_fit(fit_path, fit_min, fit_max);
      if (fit_json) {
        ordered_json j;
        j["classification"] = std::string(to_string(report.classification));
        j["points"] = report.points;
        j["log_model"] = {{"a", report.log_model.slope},
                          {"b", report.log_model.intercept},
                          {"rss", report.log_model.rss},
                          {"r_squared", report.log_model.r_squared}};
        j["linear_model"] = {{"slope", report.linear_model.slope},
                             {"intercept", report.linear_model.intercept},
                             {"rss", report.linear_model.rss},
                             {"r_squared", report.linear_model.r_squared}};
        out << j.dump(2) << "\n";
      } else {
        out << fmt::format("classification: {}\n", to_string(report.classification));
        out << fmt::format("points: {}\n", report.points);
        out << fmt::format("log model:    regret = {:.6g} ln t + {:.6g}  (rss {:.6g}, R^2 {:.6f})\n",
                           report.log_model.slope, report.log_model.intercept, report.log_model.rss,
                           report.log_model.r_squared);
        out << fmt::format("linear model: regret = {:.6g} t + {:.6g}  (rss {:.6g}, R^2 {:.6f})\n",
                           report.linear_model.slope, report.linear_model.intercept, report.linear_model.rss,
                           report.linear_model.r_squared);
      }
      return kExitOk;
    }
    if (presets->parsed()) {
      for (const auto& name : preset_names()) {
        const Scenario s = make_preset(name, 0.125, preset_default_horizon(name));
        std::string means;
        for (const auto& arm : s.arms()) means += fmt::format("{}{}", means.empty() ? "" : ", ", arm.mean());
        out << fmt::format("{:<12} K={} means=[{}] sigma={} attack={}({}) T={}\n", name, s.num_arms(), means,
                           s.arms().front().sigma(), to_string(s.attack().strategy), s.attack().magnitude,
                           s.horizon());
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace rbandit

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pdsafe/experiment.hpp"
#include "pdsafe/verify.hpp"

namespace fs = std::filesystem;
using namespace pdsafe;

namespace {

constexpr int kUsageError = 2;

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw std::invalid_argument("--seeds expects a..b, got '" + text + "'");
  std::size_t used = 0;
  const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
  const auto first = std::stoull(a, &used);
  if (used != a.size()) throw std::invalid_argument("--seeds expects a..b, got '" + text + "'");
  const auto last = std::stoull(b, &used);
  if (used != b.size() || last < first) throw std::invalid_argument("--seeds expects a..b, got '" + text + "'");
  return {first, last};
}

int run_train(const std::string& config_path, const std::string& mode_name, std::optional<std::uint64_t> seed,
              const std::string& out, const std::string& seeds) {
  experiment::RunConfig cfg;
  try {
    cfg = experiment::load_config(config_path);
  } catch (const experiment::ConfigError& e) {
    std::cerr << "invalid config " << config_path << ": " << e.what() << '\n';
    return kUsageError;
  }
  if (seed) cfg.seed = *seed;
  if (!out.empty()) cfg.out = out;
  const Mode mode = mode_name == "episodic" ? Mode::episodic : Mode::continuing;

  auto print = [](const experiment::TrainResult& r) {
    std::cout << r.out.string() << ": " << r.log.records.size() << " iterations\n";
    experiment::write_summary(std::cout, r.summary);
  };
  if (!seeds.empty()) {
    const auto [first, last] = parse_seed_range(seeds);
    for (const auto& r : experiment::train_seeds(cfg, mode, first, last)) print(r);
  } else {
    print(experiment::train(cfg, mode));
  }
  return 0;
}

int run_verify(const std::string& suite_name, const verify::SuiteOptions& options, const std::string& out) {
  verify::Suite suite;
  try {
    suite = verify::parse_suite(suite_name);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsageError;
  }
  verify::SuiteReport report;
  try {
    report = verify::run_suite(suite, options);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsageError;
  }
  fs::create_directories(out);
  const fs::path path = fs::path(out) / ("verify-" + suite_name + ".csv");
  std::ofstream os(path);
  verify::write_report(os, report);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  std::cout << suite_name << ": " << report.records.size() << " checks, " << report.violations
            << " violations, worst slack " << report.worst_slack << " (" << path.string() << ")\n";
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primal-dual safe policy learning without resets"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "Train on one continuing run and write trajectory, run log and checkpoint");
  std::string config_path, mode = "continuing", out, seeds;
  std::optional<std::uint64_t> seed;
  train->add_option("--config", config_path, "INI run configuration")->required()->check(CLI::ExistingFile);
  train->add_option("--mode", mode, "continuing or episodic")->check(CLI::IsMember({"continuing", "episodic"}));
  train->add_option("--seed", seed, "Override run.seed");
  train->add_option("--out", out, "Override run.out");
  train->add_option("--seeds", seeds, "Seed range a..b, run concurrently into <out>/seed-<n>");

  auto* ver = app.add_subcommand("verify", "Run a randomized tabular verification suite");
  std::string suite, verify_out = ".";
  verify::SuiteOptions vopts;
  std::optional<double> epsilon;
  ver->add_option("--suite", suite, "occupation | gradients | theorem1 | lemma | prop2 | prop3 | estimators")
      ->required();
  ver->add_option("--trials", vopts.trials, "Number of random instances")->check(CLI::NonNegativeNumber);
  ver->add_option("--seed", vopts.seed, "Root seed");
  ver->add_option("--out", verify_out, "Directory for verify-<suite>.csv");
  ver->add_option("--epsilon", epsilon, "Target TV level for prop2 / prop3");
  ver->add_option("--samples", vopts.samples, "Monte Carlo samples per estimator check");
  ver->add_option("--workers", vopts.workers, "Worker threads (0: all cores)");

  auto* rep = app.add_subcommand("report", "Summarize a training log");
  std::string log;
  experiment::ReportOptions ropts;
  std::vector<double> goal;
  rep->add_option("--log", log, "trajectory.csv or run.csv of a training run")->required()->check(CLI::ExistingFile);
  rep->add_option("--burnin", ropts.burnin, "Steps excluded from the minimum runtime safety");
  rep->add_option("--goal-radius", ropts.goal_radius, "Distance that counts as reaching the goal");
  rep->add_option("--goal", goal, "Goal position x y")->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*train) return run_train(config_path, mode, seed, out, seeds);
    if (*ver) {
      vopts.epsilon = epsilon;
      return run_verify(suite, vopts, verify_out);
    }
    if (*rep) {
      if (goal.size() == 2) ropts.goal = {goal[0], goal[1]};
      experiment::write_summary(std::cout, experiment::report(log, ropts));
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

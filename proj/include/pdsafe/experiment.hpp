#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdsafe/learner.hpp"
#include "pdsafe/nav_env.hpp"

/// Run configuration, training driver, CSV artifacts and run reports.
namespace pdsafe::experiment {

enum class EnvKind { nav, tabular };

struct PolicyConfig {
  double spacing = 0.25;
  double bandwidth = 0.5;
  Eigen::Vector2d covariance{0.5, 0.5};

  bool operator==(const PolicyConfig&) const = default;
};

/// INI file with sections [environment], [policy], [learner] and [run].
/// See configs/nav_default.ini for every key.
struct RunConfig {
  EnvKind kind = EnvKind::nav;
  NavConfig nav;
  /// Tabular MDP JSON, used when kind is tabular.
  std::filesystem::path mdp_path;
  PolicyConfig policy;
  LearnerConfig learner;
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";

  /// Throws ConfigError naming the offending key.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Invalid configuration; `key()` is "section.name".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// The navigation experiment: defaults of NavConfig and PolicyConfig, the
/// learner defaults, and a 2,000 step budget.
RunConfig default_config();

/// Parses and validates. Unknown sections or keys are errors. A relative
/// mdp path is resolved against `base_dir`.
RunConfig read_config(std::istream& is, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& os, const RunConfig& cfg);

struct Summary {
  std::uint64_t steps = 0;
  double final_runtime_safety = 1.0;
  std::uint64_t burnin = 0;
  /// Minimum runtime safety over t in [max(burnin, 1), steps]; 1.0 when that
  /// range is empty.
  double min_runtime_safety = 1.0;
  double goal_radius = 1.0;
  /// Smallest t with |s_t - goal| <= goal_radius.
  std::optional<std::uint64_t> first_goal_step;
  std::uint64_t unsafe_events = 0;
  std::optional<double> final_lambda;

  bool operator==(const Summary&) const = default;
};

struct ReportOptions {
  std::uint64_t burnin = 200;
  double goal_radius = 1.0;
  Eigen::Vector2d goal{9.0, 1.5};
};

/// One row per environment step.
struct StepRow {
  std::uint64_t t = 0;
  StateVec state;
  bool safe = true;
};

/// Reads trajectory.csv (t,<state labels>,safe). Throws std::runtime_error
/// naming the line on malformed input.
std::vector<StepRow> read_trajectory(std::istream& is, std::vector<std::string>* labels = nullptr);
/// Last lambda in run.csv; empty when the file has no records.
std::optional<double> read_final_lambda(std::istream& is);

Summary summarize(const std::vector<StepRow>& rows, const ReportOptions& options,
                  std::optional<double> final_lambda = std::nullopt);
/// step,runtime_safety,unsafe_flag; row t covers steps 0..t-1.
void write_safety_csv(std::ostream& os, const std::vector<StepRow>& rows);
void write_summary(std::ostream& os, const Summary& summary);

/// Reads a trajectory.csv or run.csv (the sibling file is picked up), writes
/// report.txt and safety.csv next to it, and returns the summary.
Summary report(const std::filesystem::path& log, const ReportOptions& options);

struct TrainResult {
  RunLog log;
  /// Summary computed online while training, with goal and burn-in taken
  /// from ReportOptions{} and the config's goal.
  Summary summary;
  std::filesystem::path out;
};

/// Trains and writes trajectory.csv, run.csv and theta.ckpt into cfg.out.
TrainResult train(const RunConfig& cfg, Mode mode);

/// Independent runs for each seed, concurrently; run i goes to
/// cfg.out / "seed-<seed>".
std::vector<TrainResult> train_seeds(const RunConfig& cfg, Mode mode, std::uint64_t first, std::uint64_t last);

}  // namespace pdsafe::experiment

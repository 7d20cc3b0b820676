#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdsafe/learner.hpp"
#include "pdsafe/policy.hpp"
#include "pdsafe/tabular.hpp"

/// Randomized verification suites over tabular instances.
namespace pdsafe::verify {

enum class Suite { occupation, gradients, theorem1, lemma, prop2, prop3, estimators };

/// Throws std::invalid_argument for an unknown name.
Suite parse_suite(const std::string& name);
std::string suite_name(Suite suite);
std::vector<std::string> suite_names();

struct TrialRecord {
  int trial = 0;
  bool pass = false;
  /// Margin by which the checked inequality holds. Trials at equality may show
  /// a margin slightly below zero and still pass within the suite tolerance.
  double slack = 0.0;
  std::vector<std::pair<std::string, double>> quantities;
};

struct SuiteReport {
  Suite suite = Suite::occupation;
  std::vector<TrialRecord> records;
  int violations = 0;
  double worst_slack = 0.0;

  bool ok() const { return violations == 0; }
};

struct SuiteOptions {
  int trials = 100;
  std::uint64_t seed = 0;
  /// prop2 / prop3 only. prop2 defaults to 0.5, prop3 to {0.3, 0.5}.
  std::optional<double> epsilon;
  /// Monte Carlo samples per estimator check.
  std::uint64_t samples = 100000;
  /// 0 picks the hardware concurrency.
  unsigned workers = 0;
};

/// Runs the suite; trial i draws from RngStream(seed).split(i), so the report
/// does not depend on the number of workers.
SuiteReport run_suite(Suite suite, const SuiteOptions& options);

/// CSV: suite,trial,pass,slack,quantities, then a closing row with trial
/// "worst" holding the overall result and worst slack.
void write_report(std::ostream& os, const SuiteReport& report);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;

  /// |mean - exact| <= k SE.
  bool within(double exact, double k = 3.0) const;
};

/// Mean of u_hat from state s (a ~ pi, T_Q ~ Geom(gamma)).
MeanEstimate estimate_u(const TabularEnv& env, const TabularPolicy& policy, DualVariable lambda, int s,
                        Discount gamma, std::uint64_t samples, RngStream& rng);
/// Mean of q_hat from the fixed pair (s, a).
MeanEstimate estimate_q(const TabularEnv& env, const TabularPolicy& policy, DualVariable lambda, int s, int a,
                        Discount gamma, std::uint64_t samples, RngStream& rng);

/// sum_{t<terms} (1 - gamma) gamma^t P^t, row z being rho_z.
Eigen::MatrixXd truncated_occupation(const Eigen::MatrixXd& P, double gamma, int terms);

/// Central finite differences of V_z with respect to the logits, flattened as
/// s * num_actions + a.
Eigen::VectorXd finite_difference_gradient(const TabularMdp& mdp, const TabularPolicy& policy, Discount gamma,
                                           double lambda, int z, double step = 1e-5);

}  // namespace pdsafe::verify

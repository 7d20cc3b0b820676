#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pdsafe/mdp.hpp"
#include "pdsafe/policy.hpp"
#include "pdsafe/safety.hpp"

namespace pdsafe {

/// Lagrange multiplier; never negative.
class DualVariable {
 public:
  explicit DualVariable(double value = 0.0);
  double value() const { return value_; }
  bool operator==(const DualVariable&) const = default;

 private:
  double value_;
};

/// r + lambda 1(safe).
double shaped_reward(double reward, bool safe, DualVariable lambda);

/// Constraint level c = (1 - delta [1 - gamma^T (1 - gamma)]) / (1 - gamma)
/// that makes a solution of the relaxed problem (1 - delta)-safe up to
/// horizon T.
double compute_threshold(double delta, std::uint64_t horizon, Discount gamma);

/// Safety requirement. Either derived from (delta, horizon) or given directly
/// as a threshold.
struct SafetySpec {
  double delta = 0.01;
  std::uint64_t horizon = 100;
  double threshold_c = 0.0;
  bool explicit_threshold = false;

  static SafetySpec from_delta(double delta, std::uint64_t horizon, Discount gamma);
  static SafetySpec from_threshold(double c);

  bool operator==(const SafetySpec&) const = default;
};

/// theta + eta grad.
Params primal_step(const Params& theta, const Params& grad, double eta_theta);
/// [lambda - eta (u_hat - c)]_+.
DualVariable dual_step(DualVariable lambda, double u_hat, double c, double eta_lambda);

struct LearnerConfig {
  double eta_theta = 0.01;
  double eta_lambda = 0.005;
  Discount gamma{0.95};
  double lambda_init = 20.0;
  SafetySpec safety = SafetySpec::from_delta(0.01, 100, Discount{0.95});
  /// Stop after this many iterations (unbounded when empty).
  std::optional<std::uint64_t> max_iterations;
  /// Stop after the iteration that reaches this many environment steps.
  std::optional<std::uint64_t> step_budget;
  /// (s, a) samples averaged per update.
  int batch_size = 1;
  /// Subtract the running mean of past q_hat from q_hat.
  bool baseline = false;

  void validate() const;
  /// The constraint level c in use: the explicit threshold, or the one
  /// derived from (delta, horizon) at this config's discount.
  double threshold() const;
  bool operator==(const LearnerConfig&) const = default;
};

struct LearnerState {
  DualVariable lambda;
  StateVec system_state;
  std::uint64_t iteration = 0;
  std::uint64_t elapsed_steps = 0;
  double q_sum = 0.0;  ///< running q_hat total, for the optional baseline
  std::uint64_t q_count = 0;
};

struct IterationEstimates {
  double q_hat = 0.0;
  double u_hat = 0.0;
  /// q_hat times the score at (s_k, a_k).
  Params grad;
  /// grad_theta log pi(a_k | s_k).
  Params score;
  StateVec sample_state;
  ActionVec sample_action;
};

/// One geometric-horizon rollout from a fixed (s, a).
struct RolloutEstimate {
  double q_hat = 0.0;
  double u_hat = 0.0;
  StateVec final_state;
  std::uint64_t steps = 0;
};

/// Takes a from s, then follows the policy: t = 0..horizon, so horizon + 1
/// transitions. q_hat sums the shaped rewards r(s_t, a_t) + lambda 1(s_t
/// safe), u_hat the indicators 1(s_t safe), both including t = 0.
RolloutEstimate rollout_estimate(const Environment& env, const StochasticPolicy& policy, DualVariable lambda,
                                 const StateVec& s, const ActionVec& a, std::uint64_t horizon,
                                 RngStream& rng, const StepVisitor& visit = {});

/// Samples a ~ pi(.|s) and rolls out T_Q ~ Geom(gamma). E[q_hat] = Q^lambda(s, a)
/// and E[u_hat] = U_s.
RolloutEstimate estimate_from(const Environment& env, const StochasticPolicy& policy, DualVariable lambda,
                              const StateVec& s, Discount gamma, RngStream& horizon_rng,
                              RngStream& step_rng, ActionVec* sampled_action = nullptr,
                              const StepVisitor& visit = {});

/// Advance T ~ Geom(gamma) steps from `from` to s_k, sample a_k, roll out
/// T_Q ~ Geom(gamma) more steps. Returns the estimates and the state the
/// system is left in; `steps` receives the number of transitions taken.
std::pair<IterationEstimates, StateVec> estimate_iteration(const Environment& env,
                                                           const StochasticPolicy& policy,
                                                           DualVariable lambda, const StateVec& from,
                                                           Discount gamma, RngStream& rng,
                                                           std::uint64_t* steps = nullptr,
                                                           const StepVisitor& visit = {});

enum class Mode { continuing, episodic };

struct IterationRecord {
  std::uint64_t iteration = 0;
  /// Environment steps elapsed at the end of the iteration.
  std::uint64_t steps = 0;
  StateVec start_state;   ///< system state when the iteration began
  StateVec sample_state;  ///< s_k
  StateVec state;         ///< system state when the iteration ended
  double lambda_used = 0.0;
  double lambda = 0.0;  ///< after the dual step
  double q_hat = 0.0;
  double u_hat = 0.0;
  double grad_norm = 0.0;
  double runtime_safety = 1.0;
  std::uint64_t unsafe_events = 0;
};

struct RunLog {
  std::vector<IterationRecord> records;
  SafetyLedger ledger;
  LearnerState final_state;
};

/// Primal-dual learner over one unbroken run of the environment.
///
/// Iteration k draws from rng.split(k), so a learner rebuilt from a saved
/// state (and the policy parameters) continues exactly like the original.
/// A resumed learner's ledger must cover the resumed state's elapsed steps.
class Learner {
 public:
  Learner(const Environment& env, StochasticPolicy& policy, LearnerConfig cfg, std::uint64_t seed,
          Mode mode = Mode::continuing);
  Learner(const Environment& env, StochasticPolicy& policy, LearnerConfig cfg, std::uint64_t seed,
          Mode mode, LearnerState resume, SafetyLedger ledger = {});

  /// Called for every environment step, in order.
  void set_step_observer(StepVisitor observer) { observer_ = std::move(observer); }

  IterationRecord iterate();
  bool done() const;
  RunLog run();

  const LearnerState& state() const { return state_; }
  const SafetyLedger& ledger() const { return ledger_; }
  const LearnerConfig& config() const { return cfg_; }

 private:
  const Environment& env_;
  StochasticPolicy& policy_;
  LearnerConfig cfg_;
  RngStream rng_;
  Mode mode_;
  LearnerState state_;
  SafetyLedger ledger_;
  StepVisitor observer_;
};

/// Runs until the config's iteration or step budget, capped at `iterations`.
RunLog run_continuing(const Environment& env, StochasticPolicy& policy, LearnerConfig cfg,
                      std::uint64_t iterations, std::uint64_t seed, StepVisitor observer = {});
/// As run_continuing, but the system restarts from env.initial_state() at the
/// start of every iteration.
RunLog run_episodic(const Environment& env, StochasticPolicy& policy, LearnerConfig cfg,
                    std::uint64_t iterations, std::uint64_t seed, StepVisitor observer = {});

}  // namespace pdsafe

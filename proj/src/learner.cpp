#include "pdsafe/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pdsafe {

DualVariable::DualVariable(double value) : value_(value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw std::domain_error("dual variable must be finite and nonnegative");
  }
}

double shaped_reward(double reward, bool safe, DualVariable lambda) {
  return safe ? reward + lambda.value() : reward;
}

double compute_threshold(double delta, std::uint64_t horizon, Discount gamma) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must lie in (0, 1)");
  if (horizon == 0) throw std::domain_error("safety horizon must be positive");
  const double g = gamma.value();
  const double gT = std::pow(g, static_cast<double>(horizon));
  return (1.0 - delta * (1.0 - gT * (1.0 - g))) / (1.0 - g);
}

SafetySpec SafetySpec::from_delta(double delta, std::uint64_t horizon, Discount gamma) {
  return SafetySpec{delta, horizon, compute_threshold(delta, horizon, gamma), false};
}

SafetySpec SafetySpec::from_threshold(double c) {
  if (!std::isfinite(c)) throw std::domain_error("safety threshold must be finite");
  SafetySpec spec;
  spec.threshold_c = c;
  spec.explicit_threshold = true;
  return spec;
}

Params primal_step(const Params& theta, const Params& grad, double eta_theta) {
  if (theta.rows() != grad.rows() || theta.cols() != grad.cols()) {
    throw std::invalid_argument("primal_step: shape mismatch");
  }
  return theta + eta_theta * grad;
}

DualVariable dual_step(DualVariable lambda, double u_hat, double c, double eta_lambda) {
  const double next = lambda.value() - eta_lambda * (u_hat - c);
  return DualVariable(next > 0.0 ? next : 0.0);
}

void LearnerConfig::validate() const {
  if (!(eta_theta > 0.0) || !std::isfinite(eta_theta)) throw std::invalid_argument("eta_theta must be positive");
  if (!(eta_lambda > 0.0) || !std::isfinite(eta_lambda)) throw std::invalid_argument("eta_lambda must be positive");
  if (!(lambda_init >= 0.0) || !std::isfinite(lambda_init)) {
    throw std::invalid_argument("lambda_init must be nonnegative");
  }
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  const double c = threshold();
  if (!std::isfinite(c) || c > 1.0 / (1.0 - gamma.value())) {
    throw std::invalid_argument("safety threshold must not exceed 1 / (1 - gamma)");
  }
}

double LearnerConfig::threshold() const {
  return safety.explicit_threshold ? safety.threshold_c
                                   : compute_threshold(safety.delta, safety.horizon, gamma);
}

RolloutEstimate rollout_estimate(const Environment& env, const StochasticPolicy& policy, DualVariable lambda,
                                 const StateVec& s, const ActionVec& a, std::uint64_t horizon,
                                 RngStream& rng, const StepVisitor& visit) {
  RolloutEstimate est;
  StateVec state = s;
  ActionVec action = a;
  bool safe = env.is_safe(state);
  for (std::uint64_t t = 0;; ++t) {
    StepOutcome out = env.step(state, action, rng);
    est.q_hat += shaped_reward(out.reward, safe, lambda);
    est.u_hat += safe ? 1.0 : 0.0;
    ++est.steps;
    if (visit) visit(TrajectoryRecord{state, action, out.reward, safe, out.next_state});
    state = std::move(out.next_state);
    safe = out.safe;
    if (t == horizon) break;
    action = policy.sample(state, rng);
  }
  est.final_state = std::move(state);
  return est;
}

RolloutEstimate estimate_from(const Environment& env, const StochasticPolicy& policy, DualVariable lambda,
                              const StateVec& s, Discount gamma, RngStream& horizon_rng,
                              RngStream& step_rng, ActionVec* sampled_action, const StepVisitor& visit) {
  ActionVec a = policy.sample(s, step_rng);
  const std::uint64_t horizon = sample_geometric(gamma, horizon_rng);
  RolloutEstimate est = rollout_estimate(env, policy, lambda, s, a, horizon, step_rng, visit);
  if (sampled_action) *sampled_action = std::move(a);
  return est;
}

std::pair<IterationEstimates, StateVec> estimate_iteration(const Environment& env,
                                                           const StochasticPolicy& policy,
                                                           DualVariable lambda, const StateVec& from,
                                                           Discount gamma, RngStream& rng,
                                                           std::uint64_t* steps, const StepVisitor& visit) {
  RngStream horizon_rng = rng.split(0);
  RngStream step_rng = rng.split(1);
  const std::uint64_t advance_steps = sample_geometric(gamma, horizon_rng);
  StateVec s_k = advance(env, policy, from, advance_steps, step_rng, visit);

  IterationEstimates est;
  RolloutEstimate roll = estimate_from(env, policy, lambda, s_k, gamma, horizon_rng, step_rng,
                                       &est.sample_action, visit);
  est.q_hat = roll.q_hat;
  est.u_hat = roll.u_hat;
  est.score = policy.score(s_k, est.sample_action);
  est.grad = est.q_hat * est.score;
  est.sample_state = std::move(s_k);
  if (steps) *steps = advance_steps + roll.steps;
  return {std::move(est), std::move(roll.final_state)};
}

Learner::Learner(const Environment& env, StochasticPolicy& policy, LearnerConfig cfg, std::uint64_t seed,
                 Mode mode)
    : Learner(env, policy, cfg, seed, mode,
              LearnerState{DualVariable(cfg.lambda_init), env.initial_state(), 0, 0, 0.0, 0}) {}

Learner::Learner(const Environment& env, StochasticPolicy& policy, LearnerConfig cfg, std::uint64_t seed,
                 Mode mode, LearnerState resume, SafetyLedger ledger)
    : env_(env),
      policy_(policy),
      cfg_(std::move(cfg)),
      rng_(seed),
      mode_(mode),
      state_(std::move(resume)),
      ledger_(std::move(ledger)) {
  cfg_.validate();
  check_state(env_, state_.system_state);
  if (ledger_.total_steps() != state_.elapsed_steps) {
    throw std::invalid_argument("resumed ledger covers " + std::to_string(ledger_.total_steps()) +
                                " steps, state has " + std::to_string(state_.elapsed_steps));
  }
}

bool Learner::done() const {
  if (cfg_.max_iterations && state_.iteration >= *cfg_.max_iterations) return true;
  if (cfg_.step_budget && state_.elapsed_steps >= *cfg_.step_budget) return true;
  return false;
}

IterationRecord Learner::iterate() {
  IterationRecord rec;
  rec.iteration = state_.iteration;
  rec.lambda_used = state_.lambda.value();
  if (mode_ == Mode::episodic) state_.system_state = env_.initial_state();
  rec.start_state = state_.system_state;

  std::uint64_t unsafe = 0;
  const StepVisitor visit = [&](const TrajectoryRecord& r) {
    ledger_.record(state_.elapsed_steps, r.safe);
    ++state_.elapsed_steps;
    if (!r.safe) ++unsafe;
    if (observer_) observer_(r);
  };

  const RngStream iteration_rng = rng_.split(state_.iteration);
  const Params& theta = policy_.parameters();
  Params grad = Params::Zero(theta.rows(), theta.cols());
  double q_total = 0.0, u_total = 0.0;
  const double baseline =
      (cfg_.baseline && state_.q_count > 0) ? state_.q_sum / static_cast<double>(state_.q_count) : 0.0;

  for (int j = 0; j < cfg_.batch_size; ++j) {
    RngStream sample_rng = iteration_rng.split(static_cast<std::uint64_t>(j));
    auto [est, next] =
        estimate_iteration(env_, policy_, state_.lambda, state_.system_state, cfg_.gamma, sample_rng, nullptr, visit);
    if (j == 0) rec.sample_state = est.sample_state;
    grad += cfg_.baseline ? Params((est.q_hat - baseline) * est.score) : est.grad;
    q_total += est.q_hat;
    u_total += est.u_hat;
    state_.system_state = std::move(next);
  }
  const double inv_batch = 1.0 / cfg_.batch_size;
  grad *= inv_batch;
  rec.q_hat = q_total * inv_batch;
  rec.u_hat = u_total * inv_batch;
  rec.grad_norm = grad.norm();

  policy_.set_parameters(primal_step(theta, grad, cfg_.eta_theta));
  state_.lambda = dual_step(state_.lambda, rec.u_hat, cfg_.threshold(), cfg_.eta_lambda);
  state_.q_sum += q_total;
  state_.q_count += static_cast<std::uint64_t>(cfg_.batch_size);
  ++state_.iteration;

  rec.lambda = state_.lambda.value();
  rec.state = state_.system_state;
  rec.steps = state_.elapsed_steps;
  rec.runtime_safety = ledger_.runtime_safety();
  rec.unsafe_events = unsafe;
  return rec;
}

RunLog Learner::run() {
  if (!cfg_.max_iterations && !cfg_.step_budget) {
    throw std::invalid_argument("learner run needs an iteration or step budget");
  }
  RunLog log;
  while (!done()) log.records.push_back(iterate());
  log.ledger = ledger_;
  log.final_state = state_;
  return log;
}

namespace {

RunLog run_mode(const Environment& env, StochasticPolicy& policy, LearnerConfig cfg, std::uint64_t iterations,
                std::uint64_t seed, StepVisitor observer, Mode mode) {
  cfg.max_iterations = cfg.max_iterations ? std::min(*cfg.max_iterations, iterations) : iterations;
  Learner learner(env, policy, std::move(cfg), seed, mode);
  learner.set_step_observer(std::move(observer));
  return learner.run();
}

}  // namespace

RunLog run_continuing(const Environment& env, StochasticPolicy& policy, LearnerConfig cfg,
                      std::uint64_t iterations, std::uint64_t seed, StepVisitor observer) {
  return run_mode(env, policy, std::move(cfg), iterations, seed, std::move(observer), Mode::continuing);
}

RunLog run_episodic(const Environment& env, StochasticPolicy& policy, LearnerConfig cfg,
                    std::uint64_t iterations, std::uint64_t seed, StepVisitor observer) {
  return run_mode(env, policy, std::move(cfg), iterations, seed, std::move(observer), Mode::episodic);
}

}  // namespace pdsafe

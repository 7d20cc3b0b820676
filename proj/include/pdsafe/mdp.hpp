#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pdsafe/rng.hpp"

namespace pdsafe {

using StateVec = Eigen::VectorXd;
using ActionVec = Eigen::VectorXd;

struct StepOutcome {
  StateVec next_state;
  double reward = 0.0;
  /// Safe-set membership of `next_state`.
  bool safe = true;
};

/// Discount factor, validated to lie in the open interval (0, 1).
class Discount {
 public:
  explicit Discount(double gamma);
  double value() const { return gamma_; }
  bool operator==(const Discount&) const = default;

 private:
  double gamma_;
};

/// Markovian environment. `step` may only depend on its arguments; all
/// randomness comes through the supplied stream.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Eigen::Index state_dim() const = 0;
  virtual Eigen::Index action_dim() const = 0;
  virtual StateVec initial_state() const = 0;
  virtual StepOutcome step(const StateVec& s, const ActionVec& a, RngStream& rng) const = 0;
  virtual bool is_safe(const StateVec& s) const = 0;
  virtual double reward(const StateVec& s, const ActionVec& a) const = 0;

  /// Column names used when states are written to CSV.
  virtual std::vector<std::string> state_labels() const;
};

/// Anything that can draw an action for a state.
class ActionSampler {
 public:
  virtual ~ActionSampler() = default;
  virtual ActionVec sample(const StateVec& s, RngStream& rng) const = 0;
};

/// One transition. `safe` is the membership of `state` (the state the action
/// was taken from), which is what runtime-safety accounting counts.
struct TrajectoryRecord {
  StateVec state;
  ActionVec action;
  double reward = 0.0;
  bool safe = true;
  StateVec next_state;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  StateVec final_state;

  std::size_t size() const { return records.size(); }
  /// Each record starts where the previous one ended and the last one ends
  /// at `final_state`.
  bool contiguous() const;
};

using StepVisitor = std::function<void(const TrajectoryRecord&)>;

/// Draws T with P(T = t) = (1 - gamma) gamma^t, t = 0, 1, 2, ...
///
/// Hence P(T >= t) = gamma^t: summing a per-step quantity over t = 0..T gives
/// an unbiased estimate of its discounted sum, and the state reached after T
/// steps is distributed according to the discounted occupation measure.
std::uint64_t sample_geometric(Discount gamma, RngStream& rng);

/// Throws std::domain_error unless `s` has the environment's state dimension
/// and finite entries.
void check_state(const Environment& env, const StateVec& s);
void check_action(const Environment& env, const ActionVec& a);

/// Steps `env` from `start` for exactly `steps` transitions, drawing actions
/// from `sampler`. Returns the final state; each transition is reported to
/// `visit` when it is set.
StateVec advance(const Environment& env, const ActionSampler& sampler, const StateVec& start,
                 std::uint64_t steps, RngStream& rng, const StepVisitor& visit);

/// Same as above but keeps every record.
Trajectory advance(const Environment& env, const ActionSampler& sampler, const StateVec& start,
                   std::uint64_t steps, RngStream& rng);

}  // namespace pdsafe

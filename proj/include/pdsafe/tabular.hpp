#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "pdsafe/mdp.hpp"

namespace pdsafe {

/// Finite MDP: transitions[a](s, s') = P(s' | s, a), rewards(s, a), and a
/// safe-state mask.
class TabularMdp {
 public:
  /// Validates every transition row (nonnegative, sums to 1 within 1e-12).
  TabularMdp(std::vector<Eigen::MatrixXd> transitions, Eigen::MatrixXd rewards,
             std::vector<bool> safe_mask, int initial_state = 0);

  int num_states() const { return static_cast<int>(rewards_.rows()); }
  int num_actions() const { return static_cast<int>(rewards_.cols()); }
  int initial_state() const { return initial_state_; }

  const Eigen::MatrixXd& transitions(int a) const { return transitions_.at(static_cast<std::size_t>(a)); }
  double transition(int s, int a, int next) const { return transitions_[static_cast<std::size_t>(a)](s, next); }
  const Eigen::MatrixXd& rewards() const { return rewards_; }
  const std::vector<bool>& safe_mask() const { return safe_; }
  bool safe(int s) const { return safe_.at(static_cast<std::size_t>(s)); }
  /// Safe mask as a 0/1 vector.
  Eigen::VectorXd safe_indicator() const;

 private:
  std::vector<Eigen::MatrixXd> transitions_;
  Eigen::MatrixXd rewards_;
  std::vector<bool> safe_;
  int initial_state_;
};

/// Reads a tabular MDP from JSON:
///   {"transitions": [[[...]]] indexed [s][a][s'], "rewards": [[...]] indexed
///    [s][a], "safe": [true, ...], "initial_state": 0}
TabularMdp read_tabular_mdp(std::istream& is);
void write_tabular_mdp(std::ostream& os, const TabularMdp& mdp);

/// Environment view of a TabularMdp. States and actions are one-component
/// vectors holding the index; the next state is drawn from P(.|s, a).
class TabularEnv final : public Environment {
 public:
  explicit TabularEnv(TabularMdp mdp);

  const TabularMdp& mdp() const { return mdp_; }

  Eigen::Index state_dim() const override { return 1; }
  Eigen::Index action_dim() const override { return 1; }
  StateVec initial_state() const override;
  StepOutcome step(const StateVec& s, const ActionVec& a, RngStream& rng) const override;
  bool is_safe(const StateVec& s) const override;
  double reward(const StateVec& s, const ActionVec& a) const override;
  std::vector<std::string> state_labels() const override { return {"state"}; }

  static StateVec state(int index) { return StateVec::Constant(1, index); }
  static ActionVec action(int index) { return ActionVec::Constant(1, index); }

 private:
  int state_index(const StateVec& s) const;
  int action_index(const ActionVec& a) const;
  TabularMdp mdp_;
};

}  // namespace pdsafe

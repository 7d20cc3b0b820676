#include "pdsafe/tabular.hpp"

#include <cmath>
#include <istream>
#include "json.hpp"
#include <ostream>
#include <stdexcept>
#include <string>

namespace pdsafe {

TabularMdp::TabularMdp(std::vector<Eigen::MatrixXd> transitions, Eigen::MatrixXd rewards,
                       std::vector<bool> safe_mask, int initial_state)
    : transitions_(std::move(transitions)),
      rewards_(std::move(rewards)),
      safe_(std::move(safe_mask)),
      initial_state_(initial_state) {
  const auto n = rewards_.rows();
  const auto m = rewards_.cols();
  if (n == 0 || m == 0) throw std::invalid_argument("tabular MDP needs states and actions");
  if (static_cast<Eigen::Index>(transitions_.size()) != m) {
    throw std::invalid_argument("expected one transition matrix per action");
  }
  if (static_cast<Eigen::Index>(safe_.size()) != n) throw std::invalid_argument("safe mask size mismatch");
  if (initial_state_ < 0 || initial_state_ >= n) throw std::invalid_argument("initial state out of range");
  if (!rewards_.allFinite()) throw std::invalid_argument("rewards must be finite");
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto& P = transitions_[static_cast<std::size_t>(a)];
    if (P.rows() != n || P.cols() != n) throw std::invalid_argument("transition matrix shape mismatch");
    if ((P.array() < 0.0).any() || !P.allFinite()) {
      throw std::invalid_argument("transition probabilities must be finite and nonnegative");
    }
    for (Eigen::Index s = 0; s < n; ++s) {
      if (std::abs(P.row(s).sum() - 1.0) > 1e-12) {
        throw std::invalid_argument("transition row (s=" + std::to_string(s) + ", a=" + std::to_string(a) +
                                    ") does not sum to 1");
      }
    }
  }
}

Eigen::VectorXd TabularMdp::safe_indicator() const {
  Eigen::VectorXd v(num_states());
  for (int s = 0; s < num_states(); ++s) v[s] = safe_[static_cast<std::size_t>(s)] ? 1.0 : 0.0;
  return v;
}

TabularMdp read_tabular_mdp(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
    const auto& jt = j.at("transitions");
    const auto& jr = j.at("rewards");
    const auto n = static_cast<Eigen::Index>(jt.size());
    if (n == 0) throw std::invalid_argument("tabular MDP: no states");
    const auto m = static_cast<Eigen::Index>(jt.at(0).size());
    std::vector<Eigen::MatrixXd> P(static_cast<std::size_t>(m), Eigen::MatrixXd::Zero(n, n));
    Eigen::MatrixXd r(n, m);
    for (Eigen::Index s = 0; s < n; ++s) {
      if (static_cast<Eigen::Index>(jt.at(s).size()) != m || static_cast<Eigen::Index>(jr.at(s).size()) != m) {
        throw std::invalid_argument("tabular MDP: ragged action dimension");
      }
      for (Eigen::Index a = 0; a < m; ++a) {
        const auto& row = jt.at(s).at(a);
        if (static_cast<Eigen::Index>(row.size()) != n) throw std::invalid_argument("tabular MDP: ragged row");
        for (Eigen::Index t = 0; t < n; ++t) P[static_cast<std::size_t>(a)](s, t) = row.at(t).get<double>();
        r(s, a) = jr.at(s).at(a).get<double>();
      }
    }
    std::vector<bool> safe;
    for (const auto& b : j.at("safe")) safe.push_back(b.get<bool>());
    const int init = j.value("initial_state", 0);
    return TabularMdp(std::move(P), std::move(r), std::move(safe), init);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("tabular MDP: ") + e.what());
  }
}

void write_tabular_mdp(std::ostream& os, const TabularMdp& mdp) {
  nlohmann::json j;
  for (int s = 0; s < mdp.num_states(); ++s) {
    nlohmann::json per_action = nlohmann::json::array();
    nlohmann::json rewards = nlohmann::json::array();
    for (int a = 0; a < mdp.num_actions(); ++a) {
      std::vector<double> row(static_cast<std::size_t>(mdp.num_states()));
      for (int t = 0; t < mdp.num_states(); ++t) row[static_cast<std::size_t>(t)] = mdp.transition(s, a, t);
      per_action.push_back(row);
      rewards.push_back(mdp.rewards()(s, a));
    }
    j["transitions"].push_back(per_action);
    j["rewards"].push_back(rewards);
    j["safe"].push_back(static_cast<bool>(mdp.safe(s)));
  }
  j["initial_state"] = mdp.initial_state();
  os << j.dump(2) << '\n';
}

TabularEnv::TabularEnv(TabularMdp mdp) : mdp_(std::move(mdp)) {}

StateVec TabularEnv::initial_state() const { return state(mdp_.initial_state()); }

int TabularEnv::state_index(const StateVec& s) const {
  if (s.size() != 1 || !(s[0] >= 0.0 && s[0] < mdp_.num_states()) || s[0] != std::floor(s[0])) {
    throw std::domain_error("invalid tabular state");
  }
  return static_cast<int>(s[0]);
}

int TabularEnv::action_index(const ActionVec& a) const {
  if (a.size() != 1 || !(a[0] >= 0.0 && a[0] < mdp_.num_actions()) || a[0] != std::floor(a[0])) {
    throw std::domain_error("invalid tabular action");
  }
  return static_cast<int>(a[0]);
}

StepOutcome TabularEnv::step(const StateVec& s, const ActionVec& a, RngStream& rng) const {
  const int si = state_index(s);
  const int ai = action_index(a);
  const auto row = mdp_.transitions(ai).row(si);
  // Inverse-CDF draw; rounding slack falls on the last reachable state.
  const double u = rng.uniform();
  int next = -1;
  double acc = 0.0;
  for (int t = 0; t < mdp_.num_states(); ++t) {
    if (row[t] <= 0.0) continue;
    next = t;
    acc += row[t];
    if (u < acc) break;
  }
  return StepOutcome{state(next), mdp_.rewards()(si, ai), mdp_.safe(next)};
}

bool TabularEnv::is_safe(const StateVec& s) const { return mdp_.safe(state_index(s)); }

double TabularEnv::reward(const StateVec& s, const ActionVec& a) const {
  return mdp_.rewards()(state_index(s), action_index(a));
}

}  // namespace pdsafe

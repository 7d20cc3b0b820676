#include "pdsafe/instances.hpp"

#include <random>
#include <vector>

namespace pdsafe::instances {

Eigen::VectorXd probability_vector(int n, RngStream& rng) {
  std::exponential_distribution<double> expo(1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = expo(rng) + 1e-12;
  return v / v.sum();
}

namespace {

Eigen::MatrixXd stochastic_rows(int n, RngStream& rng) {
  Eigen::MatrixXd P(n, n);
  for (int i = 0; i < n; ++i) P.row(i) = probability_vector(n, rng).transpose();
  // Renormalize once more so row sums are 1 to within an ulp or two.
  for (int i = 0; i < n; ++i) P.row(i) /= P.row(i).sum();
  return P;
}

}  // namespace

TabularMdp random_mdp(int num_states, int num_actions, RngStream& rng) {
  std::vector<Eigen::MatrixXd> P;
  for (int a = 0; a < num_actions; ++a) P.push_back(stochastic_rows(num_states, rng));
  Eigen::MatrixXd r(num_states, num_actions);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) r(s, a) = rng.normal();
  std::vector<bool> safe(static_cast<std::size_t>(num_states));
  bool any = false;
  for (auto&& b : safe) {
    b = rng.uniform() < 0.7;
    any = any || b;
  }
  if (!any) safe[0] = true;
  return TabularMdp(std::move(P), std::move(r), std::move(safe), 0);
}

TabularPolicy random_policy(int num_states, int num_actions, RngStream& rng, double scale) {
  Params logits(num_states, num_actions);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) logits(s, a) = scale * rng.normal();
  return TabularPolicy(std::move(logits));
}

InducedChain random_chain(int n, RngStream& rng) { return InducedChain(stochastic_rows(n, rng)); }

InducedChain random_ergodic_chain(int n, RngStream& rng) {
  if (n == 1 || rng.uniform() < 0.5) return random_chain(n, rng);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    W(i, (i + 1) % n) = 0.2 + rng.uniform();
    for (int j = 0; j < n; ++j) {
      if (rng.uniform() < 0.25) W(i, j) += rng.uniform();
    }
  }
  // The self-loop on state 0 together with the cycle makes the chain aperiodic.
  W(0, 0) += 0.2 + rng.uniform();
  for (int i = 0; i < n; ++i) W.row(i) /= W.row(i).sum();
  return InducedChain(std::move(W));
}

InducedChain metropolis_chain(const Eigen::VectorXd& target, RngStream& rng) {
  const auto n = target.size();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) K(i, j) = K(j, i) = 0.05 + rng.uniform();
  }
  const double scale = n > 1 ? K.rowwise().sum().maxCoeff() * (1.0 + rng.uniform()) : 1.0;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      P(i, j) = (K(i, j) / scale) * std::min(1.0, target[j] / target[i]);
      off += P(i, j);
    }
    P(i, i) = 1.0 - off;
  }
  return InducedChain(std::move(P));
}

TabularMdp reference_mdp() {
  // Action 0 drifts right, action 1 drifts left, on a ring of five states.
  const int n = 5;
  std::vector<Eigen::MatrixXd> P(2, Eigen::MatrixXd::Zero(n, n));
  for (int s = 0; s < n; ++s) {
    P[0](s, (s + 1) % n) = 0.7;
    P[0](s, s) = 0.2;
    P[0](s, (s + n - 1) % n) = 0.1;
    P[1](s, (s + n - 1) % n) = 0.6;
    P[1](s, s) = 0.3;
    P[1](s, (s + 1) % n) = 0.1;
  }
  Eigen::MatrixXd r(n, 2);
  r << -1.0, -0.5,  //
      0.0, -0.2,    //
      1.0, 0.5,     //
      -0.3, 2.0,    //
      0.4, -1.5;
  std::vector<bool> safe{true, true, false, true, false};
  return TabularMdp(std::move(P), std::move(r), std::move(safe), 0);
}

TabularPolicy reference_policy() {
  Params logits(5, 2);
  logits << 0.5, -0.5,  //
      0.0, 1.0,         //
      -1.0, 0.3,        //
      0.8, 0.8,         //
      -0.2, 0.6;
  return TabularPolicy(logits);
}

}  // namespace pdsafe::instances

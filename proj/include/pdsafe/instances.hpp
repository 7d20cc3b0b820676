#pragma once

#include <Eigen/Dense>

#include "pdsafe/analysis.hpp"
#include "pdsafe/policy.hpp"
#include "pdsafe/rng.hpp"
#include "pdsafe/tabular.hpp"

/// Random finite instances for the verification suites and tests.
namespace pdsafe::instances {

using analysis::InducedChain;

/// Flat Dirichlet draw of length n.
Eigen::VectorXd probability_vector(int n, RngStream& rng);

/// Dense random kernel, N(0, 1) rewards, each state safe with probability
/// 0.7 (at least one safe state).
TabularMdp random_mdp(int num_states, int num_actions, RngStream& rng);

TabularPolicy random_policy(int num_states, int num_actions, RngStream& rng, double scale = 1.0);

/// Random row-stochastic matrix; not necessarily ergodic.
InducedChain random_chain(int n, RngStream& rng);

/// Ergodic chain: either dense, or sparse rows threaded on a cycle with a
/// self-loop (slow mixing).
InducedChain random_ergodic_chain(int n, RngStream& rng);

/// Metropolis-Hastings chain targeting `target` under a random symmetric
/// proposal; reversible with respect to `target` by construction.
InducedChain metropolis_chain(const Eigen::VectorXd& target, RngStream& rng);

/// Fixed 5-state, 2-action MDP with two unsafe states, used by the estimator
/// checks.
TabularMdp reference_mdp();
/// Fixed non-uniform policy for reference_mdp().
TabularPolicy reference_policy();

}  // namespace pdsafe::instances

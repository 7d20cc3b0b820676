#pragma once

#include <Eigen/Dense>
#include <iosfwd>

#include "pdsafe/mdp.hpp"

namespace pdsafe {

/// Policy parameters. Shape is policy specific: (num_centers x action_dim)
/// for the RBF policy, (num_states x num_actions) for the tabular one.
using Params = Eigen::MatrixXd;

/// A differentiable stochastic policy: sampling plus the score function
/// grad_theta log pi(a|s).
class StochasticPolicy : public ActionSampler {
 public:
  virtual Params score(const StateVec& s, const ActionVec& a) const = 0;
  virtual const Params& parameters() const = 0;
  virtual void set_parameters(const Params& theta) = 0;
};

/// Gaussian radial-basis features over a set of centers.
class RbfBasis {
 public:
  /// `centers` holds one center per row.
  RbfBasis(Eigen::MatrixXd centers, double bandwidth, double spacing = 0.0);

  /// Square grid over [lo, hi]^dim with the given spacing, both boundaries
  /// included (41 x 41 centers for [0, 10] at spacing 0.25).
  static RbfBasis grid(double lo, double hi, double spacing, double bandwidth, int dim = 2);

  Eigen::Index size() const { return centers_.rows(); }
  Eigen::Index dim() const { return centers_.cols(); }
  double bandwidth() const { return bandwidth_; }
  /// Grid spacing; 0 for bases not built on a grid.
  double spacing() const { return spacing_; }
  const Eigen::MatrixXd& centers() const { return centers_; }

  /// phi_i(s) = exp(-|s - c_i|^2 / (2 sigma^2)).
  Eigen::VectorXd features(const StateVec& s) const;

 private:
  Eigen::MatrixXd centers_;
  double bandwidth_;
  double spacing_;
};

/// a ~ N(theta^T phi(s), diag(covariance)).
class GaussianRbfPolicy final : public StochasticPolicy {
 public:
  /// theta starts at zero.
  GaussianRbfPolicy(RbfBasis basis, Eigen::VectorXd covariance_diag);

  const RbfBasis& basis() const { return basis_; }
  const Eigen::VectorXd& covariance() const { return covariance_; }
  Eigen::Index action_dim() const { return covariance_.size(); }

  ActionVec mean(const StateVec& s) const;
  ActionVec sample_action(const StateVec& s, RngStream& rng) const;
  double log_density(const StateVec& s, const ActionVec& a) const;
  /// phi(s) (Sigma^{-1} (a - mean(s)))^T.
  Params log_prob_grad(const StateVec& s, const ActionVec& a) const;

  ActionVec sample(const StateVec& s, RngStream& rng) const override { return sample_action(s, rng); }
  Params score(const StateVec& s, const ActionVec& a) const override { return log_prob_grad(s, a); }
  const Params& parameters() const override { return theta_; }
  void set_parameters(const Params& theta) override;

 private:
  RbfBasis basis_;
  Eigen::VectorXd covariance_;
  Params theta_;
};

/// Softmax policy over a finite MDP. States and actions travel through the
/// generic interfaces as one-component vectors holding the index.
class TabularPolicy final : public StochasticPolicy {
 public:
  explicit TabularPolicy(Params logits);
  /// Uniform policy (zero logits).
  TabularPolicy(int num_states, int num_actions);

  int num_states() const { return static_cast<int>(logits_.rows()); }
  int num_actions() const { return static_cast<int>(logits_.cols()); }
  const Params& logits() const { return logits_; }

  /// pi(.|s), recomputed from the logits on every call.
  Eigen::VectorXd probabilities(int s) const;
  /// Row-stochastic (num_states x num_actions) matrix of pi(a|s).
  Eigen::MatrixXd probability_matrix() const;

  /// d log pi(a|s) / d logits: 1(s'=s) (1(a'=a) - pi(a'|s)).
  Params tabular_score(int s, int a) const;

  ActionVec sample(const StateVec& s, RngStream& rng) const override;
  Params score(const StateVec& s, const ActionVec& a) const override;
  const Params& parameters() const override { return logits_; }
  void set_parameters(const Params& theta) override;

 private:
  int state_index(const StateVec& s) const;
  Params logits_;
};

/// Plain-text parameter checkpoint:
///
///     theta <rows> <cols> <sigma> <spacing>
///     <row 0 values>
///     ...
///
/// Values are written with 17 significant digits, which round-trips doubles
/// exactly.
struct Checkpoint {
  Params theta;
  double sigma = 0.0;
  double spacing = 0.0;

  bool operator==(const Checkpoint& other) const;
};

Checkpoint make_checkpoint(const GaussianRbfPolicy& policy);
void write_checkpoint(std::ostream& os, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& is);

}  // namespace pdsafe

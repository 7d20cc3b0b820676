#include "pdsafe/policy.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pdsafe {

RbfBasis::RbfBasis(Eigen::MatrixXd centers, double bandwidth, double spacing)
    : centers_(std::move(centers)), bandwidth_(bandwidth), spacing_(spacing) {
  if (centers_.rows() == 0) throw std::invalid_argument("RBF basis needs at least one center");
  if (!(bandwidth_ > 0.0)) throw std::invalid_argument("RBF bandwidth must be positive");
  if (!centers_.allFinite()) throw std::invalid_argument("RBF centers must be finite");
}

RbfBasis RbfBasis::grid(double lo, double hi, double spacing, double bandwidth, int dim) {
  if (!(hi > lo) || !(spacing > 0.0) || dim < 1) {
    throw std::invalid_argument("invalid RBF grid specification");
  }
  const auto per_axis = static_cast<Eigen::Index>(std::llround((hi - lo) / spacing)) + 1;
  Eigen::Index total = 1;
  for (int d = 0; d < dim; ++d) total *= per_axis;
  Eigen::MatrixXd centers(total, dim);
  for (Eigen::Index k = 0; k < total; ++k) {
    Eigen::Index rem = k;
    // Last axis varies fastest.
    for (int d = dim - 1; d >= 0; --d) {
      centers(k, d) = lo + spacing * static_cast<double>(rem % per_axis);
      rem /= per_axis;
    }
  }
  return RbfBasis(std::move(centers), bandwidth, spacing);
}

Eigen::VectorXd RbfBasis::features(const StateVec& s) const {
  if (s.size() != dim()) {
    throw std::domain_error("state dimension " + std::to_string(s.size()) +
                            " does not match basis dimension " + std::to_string(dim()));
  }
  const double scale = -1.0 / (2.0 * bandwidth_ * bandwidth_);
  return ((centers_.rowwise() - s.transpose()).rowwise().squaredNorm() * scale).array().exp();
}

GaussianRbfPolicy::GaussianRbfPolicy(RbfBasis basis, Eigen::VectorXd covariance_diag)
    : basis_(std::move(basis)),
      covariance_(std::move(covariance_diag)),
      theta_(Params::Zero(basis_.size(), covariance_.size())) {
  if (covariance_.size() == 0 || !(covariance_.array() > 0.0).all()) {
    throw std::invalid_argument("policy covariance must be strictly positive");
  }
}

void GaussianRbfPolicy::set_parameters(const Params& theta) {
  if (theta.rows() != theta_.rows() || theta.cols() != theta_.cols()) {
    throw std::invalid_argument("parameter shape mismatch");
  }
  if (!theta.allFinite()) throw std::invalid_argument("parameters must be finite");
  theta_ = theta;
}

ActionVec GaussianRbfPolicy::mean(const StateVec& s) const {
  return theta_.transpose() * basis_.features(s);
}

ActionVec GaussianRbfPolicy::sample_action(const StateVec& s, RngStream& rng) const {
  ActionVec a = mean(s);
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] += std::sqrt(covariance_[i]) * rng.normal();
  return a;
}

double GaussianRbfPolicy::log_density(const StateVec& s, const ActionVec& a) const {
  const Eigen::ArrayXd diff = (a - mean(s)).array();
  const double quad = (diff.square() / covariance_.array()).sum();
  const double log_det = covariance_.array().log().sum();
  const double k = static_cast<double>(covariance_.size());
  return -0.5 * (quad + log_det + k * std::log(2.0 * std::numbers::pi));
}

Params GaussianRbfPolicy::log_prob_grad(const StateVec& s, const ActionVec& a) const {
  const Eigen::VectorXd phi = basis_.features(s);
  const Eigen::VectorXd m = theta_.transpose() * phi;
  const Eigen::VectorXd w = ((a - m).array() / covariance_.array()).matrix();
  return phi * w.transpose();
}

TabularPolicy::TabularPolicy(Params logits) : logits_(std::move(logits)) {
  if (logits_.rows() == 0 || logits_.cols() == 0) {
    throw std::invalid_argument("tabular policy needs at least one state and action");
  }
  if (!logits_.allFinite()) throw std::invalid_argument("logits must be finite");
}

TabularPolicy::TabularPolicy(int num_states, int num_actions)
    : TabularPolicy(Params::Zero(num_states, num_actions)) {}

Eigen::VectorXd TabularPolicy::probabilities(int s) const {
  if (s < 0 || s >= num_states()) throw std::domain_error("state index out of range");
  const Eigen::VectorXd row = logits_.row(s).transpose();
  Eigen::VectorXd p = (row.array() - row.maxCoeff()).exp();
  return p / p.sum();
}

Eigen::MatrixXd TabularPolicy::probability_matrix() const {
  Eigen::MatrixXd pi(num_states(), num_actions());
  for (int s = 0; s < num_states(); ++s) pi.row(s) = probabilities(s).transpose();
  return pi;
}

Params TabularPolicy::tabular_score(int s, int a) const {
  if (a < 0 || a >= num_actions()) throw std::domain_error("action index out of range");
  Params g = Params::Zero(num_states(), num_actions());
  g.row(s) = -probabilities(s).transpose();
  g(s, a) += 1.0;
  return g;
}

int TabularPolicy::state_index(const StateVec& s) const {
  if (s.size() != 1) throw std::domain_error("tabular state must be a single index");
  const double v = s[0];
  if (!(v >= 0.0 && v < num_states()) || v != std::floor(v)) {
    throw std::domain_error("tabular state index out of range");
  }
  return static_cast<int>(v);
}

ActionVec TabularPolicy::sample(const StateVec& s, RngStream& rng) const {
  const Eigen::VectorXd p = probabilities(state_index(s));
  std::discrete_distribution<int> dist(p.data(), p.data() + p.size());
  return ActionVec::Constant(1, static_cast<double>(dist(rng)));
}

Params TabularPolicy::score(const StateVec& s, const ActionVec& a) const {
  if (a.size() != 1) throw std::domain_error("tabular action must be a single index");
  return tabular_score(state_index(s), static_cast<int>(a[0]));
}

void TabularPolicy::set_parameters(const Params& theta) {
  if (theta.rows() != logits_.rows() || theta.cols() != logits_.cols()) {
    throw std::invalid_argument("parameter shape mismatch");
  }
  if (!theta.allFinite()) throw std::invalid_argument("logits must be finite");
  logits_ = theta;
}

bool Checkpoint::operator==(const Checkpoint& other) const {
  return theta.rows() == other.theta.rows() && theta.cols() == other.theta.cols() &&
         theta == other.theta && sigma == other.sigma && spacing == other.spacing;
}

Checkpoint make_checkpoint(const GaussianRbfPolicy& policy) {
  return Checkpoint{policy.parameters(), policy.basis().bandwidth(), policy.basis().spacing()};
}

namespace {

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt) {
  os << "theta " << ckpt.theta.rows() << ' ' << ckpt.theta.cols() << ' ' << exact(ckpt.sigma) << ' '
     << exact(ckpt.spacing) << '\n';
  for (Eigen::Index i = 0; i < ckpt.theta.rows(); ++i) {
    for (Eigen::Index j = 0; j < ckpt.theta.cols(); ++j) {
      if (j) os << ' ';
      os << exact(ckpt.theta(i, j));
    }
    os << '\n';
  }
}

Checkpoint read_checkpoint(std::istream& is) {
  std::string tag;
  Eigen::Index rows = 0, cols = 0;
  std::string sigma, spacing;
  if (!(is >> tag >> rows >> cols >> sigma >> spacing) || tag != "theta" || rows < 0 || cols < 0) {
    throw std::runtime_error("malformed checkpoint header");
  }
  Checkpoint ckpt;
  ckpt.sigma = std::stod(sigma);
  ckpt.spacing = std::stod(spacing);
  ckpt.theta.resize(rows, cols);
  std::string token;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(is >> token)) throw std::runtime_error("checkpoint truncated");
      ckpt.theta(i, j) = std::stod(token);
    }
  }
  return ckpt;
}

}  // namespace pdsafe

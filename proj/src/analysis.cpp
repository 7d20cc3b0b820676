#include "pdsafe/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pdsafe::analysis {

namespace {

Eigen::MatrixXd resolvent_lu_solve(const Eigen::MatrixXd& P, double gamma, const Eigen::MatrixXd& rhs) {
  const auto n = P.rows();
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - gamma * P;
  return A.partialPivLu().solve(rhs);
}

}  // namespace

InducedChain::InducedChain(Eigen::MatrixXd transition) : P(std::move(transition)) {
  if (P.rows() == 0 || P.rows() != P.cols()) throw std::invalid_argument("chain must be a square matrix");
  if ((P.array() < 0.0).any() || !P.allFinite()) throw std::invalid_argument("chain has invalid entries");
  for (Eigen::Index z = 0; z < P.rows(); ++z) {
    if (std::abs(P.row(z).sum() - 1.0) > 1e-12) {
      throw std::invalid_argument("chain row " + std::to_string(z) + " does not sum to 1");
    }
  }
}

InducedChain induced_chain(const TabularMdp& mdp, const TabularPolicy& policy) {
  if (policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions()) {
    throw std::domain_error("policy shape does not match the MDP");
  }
  const Eigen::MatrixXd pi = policy.probability_matrix();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(mdp.num_states(), mdp.num_states());
  for (int a = 0; a < mdp.num_actions(); ++a) P += pi.col(a).asDiagonal() * mdp.transitions(a);
  return InducedChain(std::move(P));
}

Eigen::MatrixXd occupation_matrix(const InducedChain& chain, Discount gamma) {
  const auto n = chain.P.rows();
  // Rows of (1 - gamma)(I - gamma P)^{-1} are the rho_z.
  return (1.0 - gamma.value()) *
         resolvent_lu_solve(chain.P, gamma.value(), Eigen::MatrixXd::Identity(n, n));
}

OccupationMeasure occupation_measure(const InducedChain& chain, int z, Discount gamma) {
  const auto n = chain.P.rows();
  if (z < 0 || z >= n) throw std::domain_error("start state out of range");
  // rho^T (I - gamma P) = (1 - gamma) e_z^T
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - gamma.value() * chain.P;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[z] = 1.0 - gamma.value();
  Eigen::VectorXd rho = A.transpose().partialPivLu().solve(rhs);
  if (!rho.allFinite()) throw std::runtime_error("occupation measure solve failed");
  return OccupationMeasure{z, std::move(rho)};
}

OccupancyMeasure occupancy_measure(const InducedChain& chain, const TabularPolicy& policy, int z,
                                   Discount gamma) {
  const OccupationMeasure occ = occupation_measure(chain, z, gamma);
  return OccupancyMeasure{z, occ.rho.asDiagonal() * policy.probability_matrix()};
}

double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw std::domain_error("tv_distance: length mismatch");
  return 0.5 * (p - q).cwiseAbs().sum();
}

ValueFunctions value_functions(const TabularMdp& mdp, const TabularPolicy& policy, Discount gamma,
                               double lambda) {
  const InducedChain chain = induced_chain(mdp, policy);
  const Eigen::MatrixXd pi = policy.probability_matrix();
  const Eigen::VectorXd safe = mdp.safe_indicator();
  const Eigen::MatrixXd shaped = mdp.rewards().colwise() + lambda * safe;
  const Eigen::VectorXd mean_reward = (pi.array() * shaped.array()).rowwise().sum();

  const auto n = mdp.num_states();
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - gamma.value() * chain.P;
  const auto lu = A.partialPivLu();

  ValueFunctions out;
  out.V = lu.solve(mean_reward);
  out.U = lu.solve(safe);
  out.Q.resize(n, mdp.num_actions());
  for (int a = 0; a < mdp.num_actions(); ++a) {
    out.Q.col(a) = shaped.col(a) + gamma.value() * mdp.transitions(a) * out.V;
  }
  return out;
}

double norm_inf2(const Eigen::MatrixXd& R) {
  if (R.rows() == 0) return 0.0;
  return R.cwiseAbs().colwise().maxCoeff().norm();
}

DField d_field(const TabularMdp& mdp, const TabularPolicy& policy, Discount gamma, double lambda) {
  const ValueFunctions vf = value_functions(mdp, policy, gamma, lambda);
  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  DField out;
  out.D = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(n) * m);
  for (int s = 0; s < n; ++s) {
    const Eigen::VectorXd p = policy.probabilities(s);
    Params acc = Params::Zero(n, m);
    // grad pi(a|s) = pi(a|s) grad log pi(a|s)
    for (int a = 0; a < m; ++a) acc += vf.Q(s, a) * p[a] * policy.tabular_score(s, a);
    for (int sp = 0; sp < n; ++sp) {
      for (int ap = 0; ap < m; ++ap) out.D(s, static_cast<Eigen::Index>(sp) * m + ap) = acc(sp, ap);
    }
  }
  out.norm_inf2 = norm_inf2(out.D);
  return out;
}

Theorem1Report theorem1_check(const TabularMdp& mdp, const TabularPolicy& policy, int z, int z_prime,
                              Discount gamma, double lambda, double tolerance) {
  const InducedChain chain = induced_chain(mdp, policy);
  const Eigen::VectorXd rho_z = occupation_measure(chain, z, gamma).rho;
  const Eigen::VectorXd rho_zp = occupation_measure(chain, z_prime, gamma).rho;
  const DField df = d_field(mdp, policy, gamma, lambda);
  const Eigen::VectorXd safe = mdp.safe_indicator();

  Theorem1Report r;
  r.z = z;
  r.z_prime = z_prime;
  r.tv = tv_distance(rho_z, rho_zp);
  r.d_norm = df.norm_inf2;

  r.g_z = df.weighted(rho_z);
  r.g_zp = df.weighted(rho_zp);
  const double g_norm = r.g_z.norm();
  r.grad_inner = r.g_z.dot(r.g_zp);
  r.grad_bound = g_norm * (g_norm - 2.0 * r.d_norm * r.tv);

  r.u_z = safe.dot(rho_z);
  r.u_zp = safe.dot(rho_zp);
  r.u_inner = r.u_z * r.u_zp;
  r.u_bound = r.u_z * (r.u_z - 2.0 * r.tv);

  const double grad_gap = r.grad_inner - r.grad_bound;
  const double u_gap = r.u_inner - r.u_bound;
  r.grad_holds = grad_gap >= -tolerance;
  r.u_holds = u_gap >= -tolerance;
  r.slack = std::min(grad_gap, u_gap);
  return r;
}

LemmaReport lemma_check(const Eigen::MatrixXd& R, const Eigen::VectorXd& rho_z,
                        const Eigen::VectorXd& rho_zprime, double tolerance) {
  if (R.rows() != rho_z.size() || rho_z.size() != rho_zprime.size()) {
    throw std::domain_error("lemma_check: inconsistent dimensions");
  }
  LemmaReport r;
  const Eigen::VectorXd mean_z = R.transpose() * rho_z;
  const Eigen::VectorXd mean_zp = R.transpose() * rho_zprime;
  // The double sum factorizes into the two weighted means.
  r.q = mean_z.dot(mean_zp);
  r.H = mean_z.norm();
  r.r_norm = norm_inf2(R);
  r.tv = tv_distance(rho_zprime, rho_z);
  r.bound = r.H * (r.H - 2.0 * r.r_norm * r.tv);
  r.slack = r.q - r.bound;
  r.holds = r.slack >= -tolerance;
  return r;
}

bool is_ergodic(const InducedChain& chain) {
  const auto n = chain.P.rows();
  const Eigen::MatrixXd B = (chain.P.array() > 0.0).cast<double>();
  Eigen::MatrixXd M = B;
  for (Eigen::Index t = 1; t <= n * n; ++t) {
    if ((M.array() > 0.0).all()) return true;
    M = ((M * B).array() > 0.0).cast<double>();
  }
  return false;
}

Eigen::VectorXd stationary_distribution(const InducedChain& chain) {
  const auto n = chain.P.rows();
  // p^T (I - P) = 0 with the last equation replaced by sum(p) = 1.
  Eigen::MatrixXd A = (Eigen::MatrixXd::Identity(n, n) - chain.P).transpose();
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b[n - 1] = 1.0;
  return A.fullPivLu().solve(b);
}

double mixing_distance(const InducedChain& chain, const Eigen::VectorXd& stationary, int t) {
  Eigen::MatrixXd Pt = Eigen::MatrixXd::Identity(chain.P.rows(), chain.P.cols());
  for (int i = 0; i < t; ++i) Pt = Pt * chain.P;
  double worst = 0.0;
  for (Eigen::Index z = 0; z < Pt.rows(); ++z) {
    worst = std::max(worst, tv_distance(Pt.row(z).transpose(), stationary));
  }
  return worst;
}

int mixing_time(std::span<const InducedChain> chains) {
  if (chains.empty()) throw std::domain_error("mixing_time: no chains");
  std::vector<Eigen::VectorXd> stationary;
  std::vector<Eigen::MatrixXd> powers;
  for (const auto& c : chains) {
    if (!is_ergodic(c)) throw std::domain_error("mixing_time: chain is not ergodic");
    stationary.push_back(stationary_distribution(c));
    powers.push_back(c.P);
  }
  constexpr int kMaxT = 10'000'000;
  for (int t = 1; t <= kMaxT; ++t) {
    double worst = 0.0;
    for (std::size_t i = 0; i < chains.size(); ++i) {
      for (Eigen::Index z = 0; z < powers[i].rows(); ++z) {
        worst = std::max(worst, tv_distance(powers[i].row(z).transpose(), stationary[i]));
      }
    }
    if (worst <= 0.25) return t;
    for (std::size_t i = 0; i < chains.size(); ++i) powers[i] = powers[i] * chains[i].P;
  }
  throw std::runtime_error("mixing_time: no convergence");
}

int mixing_time(const InducedChain& chain) { return mixing_time(std::span<const InducedChain>(&chain, 1)); }

double prop2_threshold(int tau, double epsilon) {
  if (tau < 1) throw std::domain_error("prop2_threshold: mixing time must be positive");
  if (!(epsilon > 0.25)) throw std::domain_error("prop2_threshold: epsilon must exceed 1/4");
  if (epsilon >= 1.0) return 0.0;
  return std::pow(4.0 * (1.0 - epsilon) / 3.0, 1.0 / tau);
}

Eigen::MatrixXd SpectralInfo::reconstruct_power(int t) const {
  const auto n = stationary.size();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index z = 0; z < n; ++z) {
    for (Eigen::Index s = 0; s < n; ++s) {
      double acc = 1.0;
      for (Eigen::Index i = 1; i < n; ++i) {
        acc += std::pow(eigenvalues[i], t) * eigenvectors(z, i) * eigenvectors(s, i);
      }
      out(z, s) = stationary[s] * acc;
    }
  }
  return out;
}

SpectralInfo spectral_info(const InducedChain& chain) {
  if (!is_ergodic(chain)) throw std::domain_error("spectral_info: chain is not ergodic");
  const auto n = chain.P.rows();
  SpectralInfo info;
  info.stationary = stationary_distribution(chain);
  const Eigen::VectorXd& p = info.stationary;
  for (Eigen::Index z = 0; z < n; ++z) {
    for (Eigen::Index s = z + 1; s < n; ++s) {
      if (std::abs(p[z] * chain.P(z, s) - p[s] * chain.P(s, z)) > 1e-10) {
        throw std::domain_error("spectral_info: detailed balance fails for pair (" + std::to_string(z) + ", " +
                                std::to_string(s) + ")");
      }
    }
  }
  const Eigen::VectorXd sq = p.cwiseSqrt();
  const Eigen::VectorXd inv_sq = sq.cwiseInverse();
  Eigen::MatrixXd A = sq.asDiagonal() * chain.P * inv_sq.asDiagonal();
  A = 0.5 * (A + A.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  if (solver.info() != Eigen::Success) throw std::runtime_error("spectral_info: eigen-solve failed");

  // Eigen returns ascending order.
  info.eigenvalues = solver.eigenvalues().reverse();
  info.eigenvectors = inv_sq.asDiagonal() * solver.eigenvectors().rowwise().reverse();
  if (info.eigenvectors.col(0).sum() < 0.0) info.eigenvectors.col(0) *= -1.0;
  info.lambda_star = n > 1 ? std::max(info.eigenvalues[1], 0.0) : 0.0;
  info.p_min = p.minCoeff();
  return info;
}

double prop3_threshold(double lambda_star, double p_min, double epsilon) {
  if (!(lambda_star >= 0.0 && lambda_star < 1.0)) {
    throw std::domain_error("prop3_threshold: lambda_star must lie in [0, 1)");
  }
  const double pe = p_min * epsilon;
  if (!(pe > 0.0 && pe < 1.0)) throw std::domain_error("prop3_threshold: p_min * epsilon must lie in (0, 1)");
  return (1.0 - pe) / (1.0 - lambda_star * pe);
}

double max_pairwise_tv(const InducedChain& chain, Discount gamma) {
  const Eigen::MatrixXd rho = occupation_matrix(chain, gamma);
  double worst = 0.0;
  for (Eigen::Index z = 0; z < rho.rows(); ++z) {
    for (Eigen::Index zp = z + 1; zp < rho.rows(); ++zp) {
      worst = std::max(worst, tv_distance(rho.row(z).transpose(), rho.row(zp).transpose()));
    }
  }
  return worst;
}

ImplicationReport implication_suite(const ChainGenerator& generator, Bound bound,
                                    std::span<const double> epsilons, int trials, RngStream& rng,
                                    double tolerance) {
  ImplicationReport report;
  report.worst_slack = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    RngStream trial_rng = rng.split(static_cast<std::uint64_t>(trial));
    for (double eps : epsilons) {
      ImplicationTrial rec;
      rec.trial = trial;
      rec.epsilon = eps;
      try {
        RngStream gen_rng = trial_rng;
        const InducedChain chain = generator(gen_rng);
        rec.states = chain.size();
        if (bound == Bound::prop2) {
          rec.gamma = prop2_threshold(mixing_time(chain), eps);
        } else {
          const SpectralInfo info = spectral_info(chain);
          rec.gamma = prop3_threshold(info.lambda_star, info.p_min, eps);
        }
        // A zero threshold (epsilon >= 1) is vacuous: TV never exceeds 1.
        rec.max_tv = rec.gamma > 0.0 ? max_pairwise_tv(chain, Discount(rec.gamma)) : 1.0;
        rec.slack = eps - rec.max_tv;
        rec.holds = rec.max_tv <= eps + tolerance;
        if (!rec.holds) ++report.violations;
        report.worst_slack = std::min(report.worst_slack, rec.slack);
      } catch (const std::domain_error& e) {
        rec.error = e.what();
        ++report.precondition_failures;
      }
      report.trials.push_back(std::move(rec));
    }
  }
  if (report.trials.empty()) report.worst_slack = 0.0;
  return report;
}

double exact_lagrangian(const TabularMdp& mdp, const TabularPolicy& policy, Discount gamma, double lambda,
                        double c, int z) {
  const ValueFunctions vf = value_functions(mdp, policy, gamma, 0.0);
  return vf.V[z] + lambda * (vf.U[z] - c);
}

}  // namespace pdsafe::analysis

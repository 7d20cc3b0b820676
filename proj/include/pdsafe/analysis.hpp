#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pdsafe/mdp.hpp"
#include "pdsafe/policy.hpp"
#include "pdsafe/tabular.hpp"

/// Exact computations on finite MDPs: occupation measures, value functions,
/// exact policy gradients, mixing and spectral quantities, and checkers for
/// the inner-product bounds that justify updating from the current state
/// instead of a reset state.
namespace pdsafe::analysis {

/// Row-stochastic P_pi(z, s) = sum_a pi(a|z) P(s|z, a).
struct InducedChain {
  Eigen::MatrixXd P;

  explicit InducedChain(Eigen::MatrixXd transition);
  int size() const { return static_cast<int>(P.rows()); }
};

InducedChain induced_chain(const TabularMdp& mdp, const TabularPolicy& policy);

struct OccupationMeasure {
  int start = 0;
  /// rho_z(s) = (1 - gamma) sum_t gamma^t P(s_t = s | s_0 = z).
  Eigen::VectorXd rho;
};

struct OccupancyMeasure {
  int start = 0;
  /// mu_z(s, a) = rho_z(s) pi(a|s).
  Eigen::MatrixXd mu;
};

/// Closed form (1 - gamma) e_z^T (I - gamma P)^{-1}.
OccupationMeasure occupation_measure(const InducedChain& chain, int z, Discount gamma);
/// All starts at once; row z is rho_z.
Eigen::MatrixXd occupation_matrix(const InducedChain& chain, Discount gamma);
OccupancyMeasure occupancy_measure(const InducedChain& chain, const TabularPolicy& policy, int z,
                                   Discount gamma);

/// Half the L1 distance between two probability vectors.
double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

struct ValueFunctions {
  Eigen::VectorXd V;  ///< value of the shaped reward r + lambda 1(s safe)
  Eigen::MatrixXd Q;  ///< Q(s, a) of the shaped reward
  Eigen::VectorXd U;  ///< discounted safe-state count, sum_t gamma^t 1(s_t safe)
};

ValueFunctions value_functions(const TabularMdp& mdp, const TabularPolicy& policy, Discount gamma,
                               double lambda);

/// D(s) = sum_a Q(s, a) grad pi(a|s), one row per state, columns indexed by
/// the flattened logits (s' * num_actions + a').
struct DField {
  Eigen::MatrixXd D;
  /// sqrt(sum_i (max_s |D(s)_i|)^2).
  double norm_inf2 = 0.0;

  /// sum_s D(s) rho(s), i.e. (1 - gamma) grad V_z when rho = rho_z.
  Eigen::VectorXd weighted(const Eigen::VectorXd& rho) const { return D.transpose() * rho; }
};

DField d_field(const TabularMdp& mdp, const TabularPolicy& policy, Discount gamma, double lambda);

/// sqrt(sum_i (max_s |R(s)_i|)^2) for per-state rows R(s).
double norm_inf2(const Eigen::MatrixXd& R);

struct Theorem1Report {
  int z = 0;
  int z_prime = 0;
  Eigen::VectorXd g_z, g_zp;  ///< sum_s D(s) rho(s) for each start
  double grad_inner = 0.0, grad_bound = 0.0;
  double u_z = 0.0, u_zp = 0.0;  ///< sum_s 1(s safe) rho(s)
  double u_inner = 0.0, u_bound = 0.0;
  double tv = 0.0, d_norm = 0.0;
  bool grad_holds = false, u_holds = false;
  /// min(lhs - rhs) over the two inequalities.
  double slack = 0.0;

  bool holds() const { return grad_holds && u_holds; }
};

/// Checks <g_z, g_z'> >= |g_z| (|g_z| - 2 |D|_{inf,2} TV) and
/// u_z u_z' >= u_z (u_z - 2 TV), each within `tolerance`.
///
/// g and u use the rho-weighted forms (rho carries the (1 - gamma) factor);
/// both sides scale together, so the inequality is unaffected.
Theorem1Report theorem1_check(const TabularMdp& mdp, const TabularPolicy& policy, int z, int z_prime,
                              Discount gamma, double lambda, double tolerance = 1e-9);

struct LemmaReport {
  double q = 0.0;
  double H = 0.0;
  double r_norm = 0.0;
  double tv = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool holds = false;
};

/// q = sum_{s,s'} R(s)^T R(s') rho_z(s) rho_z'(s') against
/// H (H - 2 |R|_{inf,2} TV(rho_z', rho_z)), with H = |sum_s R(s) rho_z(s)|.
/// Rows of R are the per-state vectors.
LemmaReport lemma_check(const Eigen::MatrixXd& R, const Eigen::VectorXd& rho_z,
                        const Eigen::VectorXd& rho_zprime, double tolerance = 1e-9);

/// True when some power P^t, t <= n^2, is entrywise positive.
bool is_ergodic(const InducedChain& chain);

Eigen::VectorXd stationary_distribution(const InducedChain& chain);

/// max_z TV(e_z^T P^t, stationary).
double mixing_distance(const InducedChain& chain, const Eigen::VectorXd& stationary, int t);

/// Smallest t >= 1 such that every chain, from every start, is within TV 1/4
/// of its stationary distribution. Throws std::domain_error for a
/// non-ergodic chain.
int mixing_time(std::span<const InducedChain> chains);
int mixing_time(const InducedChain& chain);

/// (4 (1 - epsilon) / 3)^{1/tau}; requires epsilon > 1/4. Returns 0 for
/// epsilon >= 1, where the bound holds for any discount.
double prop2_threshold(int tau, double epsilon);

struct SpectralInfo {
  Eigen::VectorXd stationary;
  /// Descending; eigenvalues(0) == 1.
  Eigen::VectorXd eigenvalues;
  /// Column i is q_i, orthonormal under <q, r>_p = sum_s q(s) r(s) p(s).
  Eigen::MatrixXd eigenvectors;
  /// Second eigenvalue bound used by the discount threshold: max(lambda_2, 0).
  double lambda_star = 0.0;
  double p_min = 0.0;

  /// p(s) [1 + sum_{i>=2} lambda_i^t q_i(z) q_i(s)] for all (z, s).
  Eigen::MatrixXd reconstruct_power(int t) const;
};

/// Throws std::domain_error naming the first detailed-balance pair that fails
/// by more than 1e-10, or when the chain is not ergodic.
SpectralInfo spectral_info(const InducedChain& chain);

/// (1 - p_min eps) / (1 - lambda_star p_min eps).
double prop3_threshold(double lambda_star, double p_min, double epsilon);

/// max over (z, z') of TV(rho_z, rho_z').
double max_pairwise_tv(const InducedChain& chain, Discount gamma);

enum class Bound { prop2, prop3 };

struct ImplicationTrial {
  int trial = 0;
  int states = 0;
  double epsilon = 0.0;
  double gamma = 0.0;
  double max_tv = 0.0;
  /// epsilon - max_tv.
  double slack = 0.0;
  bool holds = false;
  /// Non-empty when the generated chain failed the precondition.
  std::string error;
};

struct ImplicationReport {
  std::vector<ImplicationTrial> trials;
  double worst_slack = 0.0;
  int violations = 0;
  int precondition_failures = 0;
};

using ChainGenerator = std::function<InducedChain(RngStream&)>;

/// For each generated chain and each epsilon, sets gamma to the bound's
/// threshold and checks max TV(rho_z - rho_z') <= epsilon + tolerance.
ImplicationReport implication_suite(const ChainGenerator& generator, Bound bound,
                                    std::span<const double> epsilons, int trials, RngStream& rng,
                                    double tolerance = 1e-9);

/// V_z + lambda (U_z - c).
double exact_lagrangian(const TabularMdp& mdp, const TabularPolicy& policy, Discount gamma, double lambda,
                        double c, int z);

}  // namespace pdsafe::analysis

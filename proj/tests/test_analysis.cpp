#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "pdsafe/analysis.hpp"
#include "pdsafe/instances.hpp"
#include "pdsafe/learner.hpp"
#include "pdsafe/tabular.hpp"

using namespace pdsafe;
using namespace pdsafe::analysis;

namespace {

int uniform_int(RngStream& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

// Lazy random walk on a cycle.
Eigen::MatrixXd lazy_cycle(int n) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    P(i, i) = 0.5;
    P(i, (i + 1) % n) += 0.25;
    P(i, (i + n - 1) % n) += 0.25;
  }
  return P;
}

// Two actions with the same kernel and action-independent rewards, so Q is
// constant in a.
TabularMdp action_blind_mdp(RngStream& rng, int n) {
  const TabularMdp base = instances::random_mdp(n, 1, rng);
  Eigen::MatrixXd r(n, 2);
  r.col(0) = base.rewards().col(0);
  r.col(1) = base.rewards().col(0);
  return TabularMdp({base.transitions(0), base.transitions(0)}, r, base.safe_mask());
}

}  // namespace

TEST_CASE("tabular mdp validation and json") {
  const Eigen::MatrixXd good = mat2(0.5, 0.5, 1.0, 0.0);
  CHECK_THROWS_AS(TabularMdp({mat2(0.5, 0.6, 1.0, 0.0)}, Eigen::MatrixXd::Zero(2, 1), {true, true}),
                  std::invalid_argument);
  CHECK_THROWS_AS(TabularMdp({mat2(1.5, -0.5, 1.0, 0.0)}, Eigen::MatrixXd::Zero(2, 1), {true, true}),
                  std::invalid_argument);
  CHECK_THROWS_AS(TabularMdp({good}, Eigen::MatrixXd::Zero(2, 1), {true}), std::invalid_argument);
  CHECK_THROWS_AS(TabularMdp({good}, Eigen::MatrixXd::Zero(2, 2), {true, true}), std::invalid_argument);

  RngStream rng(1);
  const TabularMdp mdp = instances::random_mdp(4, 3, rng);
  std::stringstream ss;
  write_tabular_mdp(ss, mdp);
  const TabularMdp back = read_tabular_mdp(ss);
  CHECK(back.num_states() == 4);
  CHECK(back.num_actions() == 3);
  CHECK(back.rewards() == mdp.rewards());
  CHECK(back.safe_mask() == mdp.safe_mask());
  for (int a = 0; a < 3; ++a) CHECK(back.transitions(a) == mdp.transitions(a));

  std::stringstream bad(R"({"transitions": [[[0.5, 0.4]]], "rewards": [[0]], "safe": [true]})");
  CHECK_THROWS(read_tabular_mdp(bad));
}

TEST_CASE("tabular env samples the kernel") {
  const TabularEnv env(instances::reference_mdp());
  RngStream rng(2);
  const int n = 100000;
  std::vector<int> counts(5, 0);
  for (int i = 0; i < n; ++i) {
    const StepOutcome out = env.step(TabularEnv::state(1), TabularEnv::action(0), rng);
    ++counts[static_cast<int>(out.next_state[0])];
    CHECK(out.reward == env.mdp().rewards()(1, 0));
  }
  for (int s = 0; s < 5; ++s) {
    const double p = env.mdp().transition(1, 0, s);
    CHECK(std::abs(counts[s] / double(n) - p) <= 3.5 * std::sqrt(p * (1 - p) / n) + 1e-12);
  }
  CHECK_FALSE(env.is_safe(TabularEnv::state(2)));
  CHECK_THROWS_AS(env.step(TabularEnv::state(7), TabularEnv::action(0), rng), std::domain_error);
  CHECK_THROWS_AS(env.step(TabularEnv::state(0), TabularEnv::action(2), rng), std::domain_error);
}

TEST_CASE("induced chain") {
  RngStream rng(3);
  const TabularMdp one = instances::random_mdp(4, 1, rng);
  CHECK(induced_chain(one, TabularPolicy(4, 1)).P.isApprox(one.transitions(0)));

  const TabularMdp twin({one.transitions(0), one.transitions(0)}, Eigen::MatrixXd::Zero(4, 2), one.safe_mask());
  CHECK(induced_chain(twin, TabularPolicy(4, 2)).P.isApprox(one.transitions(0)));

  const TabularMdp mdp = instances::random_mdp(4, 3, rng);
  const TabularPolicy pi = instances::random_policy(4, 3, rng);
  const InducedChain chain = induced_chain(mdp, pi);
  CHECK((chain.P.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK((chain.P - oracle::induced(mdp, oracle::softmax_rows(pi.logits()))).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(induced_chain(mdp, TabularPolicy(3, 3)), std::domain_error);
  CHECK_THROWS_AS(induced_chain(mdp, TabularPolicy(4, 2)), std::domain_error);
  CHECK_THROWS_AS(InducedChain(mat2(0.5, 0.4, 0.5, 0.5)), std::invalid_argument);
}

TEST_CASE("occupation measure") {
  const Discount half(0.5);
  SUBCASE("identity chain") {
    const InducedChain id(Eigen::MatrixXd::Identity(3, 3));
    CHECK(occupation_measure(id, 1, half).rho.isApprox(Eigen::Vector3d(0, 1, 0)));
  }
  SUBCASE("swap chain") {
    const InducedChain swap(mat2(0, 1, 1, 0));
    const Eigen::VectorXd rho = occupation_measure(swap, 0, half).rho;
    CHECK(rho[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(rho[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("truncated series") {
    RngStream rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      const InducedChain chain = instances::random_chain(5, rng);
      for (double g : {0.5, 0.9, 0.95}) {
        const int z = trial % 5;
        const OccupationMeasure occ = occupation_measure(chain, z, Discount(g));
        CHECK((occ.rho - oracle::occupation_series(chain.P, z, g)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(occ.rho.minCoeff() >= 0.0);
        CHECK(std::abs(occ.rho.sum() - 1.0) < 1e-10);
        CHECK(occupation_matrix(chain, Discount(g)).row(z).transpose().isApprox(occ.rho));
      }
    }
  }
  CHECK_THROWS_AS(occupation_measure(InducedChain(mat2(0, 1, 1, 0)), 2, half), std::domain_error);
}

TEST_CASE("occupancy measure") {
  RngStream rng(5);
  const TabularMdp mdp = instances::random_mdp(4, 3, rng);
  const TabularPolicy pi = instances::random_policy(4, 3, rng);
  const Discount g(0.9);
  const InducedChain chain = induced_chain(mdp, pi);
  const OccupancyMeasure mu = occupancy_measure(chain, pi, 2, g);
  const Eigen::VectorXd rho = occupation_measure(chain, 2, g).rho;
  CHECK(std::abs(mu.mu.sum() - 1.0) < 1e-10);
  CHECK((mu.mu.rowwise().sum() - rho).cwiseAbs().maxCoeff() < 1e-14);

  Params logits = Params::Constant(4, 3, -1000.0);
  for (int s = 0; s < 4; ++s) logits(s, s % 3) = 0.0;
  const TabularPolicy det(logits);
  const InducedChain dchain = induced_chain(mdp, det);
  const OccupancyMeasure dmu = occupancy_measure(dchain, det, 0, g);
  const Eigen::VectorXd drho = occupation_measure(dchain, 0, g).rho;
  for (int s = 0; s < 4; ++s) {
    for (int a = 0; a < 3; ++a) CHECK(std::abs(dmu.mu(s, a) - (a == s % 3 ? drho[s] : 0.0)) < 1e-300);
  }
}

TEST_CASE("total variation") {
  CHECK(tv_distance(Eigen::Vector2d(0.3, 0.7), Eigen::Vector2d(0.3, 0.7)) == 0.0);
  CHECK(tv_distance(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 0, 1)) == 1.0);
  CHECK(tv_distance(Eigen::Vector2d(0.7, 0.3), Eigen::Vector2d(0.5, 0.5)) == doctest::Approx(0.2));
  CHECK_THROWS_AS(tv_distance(Eigen::Vector2d(1, 0), Eigen::Vector3d(1, 0, 0)), std::domain_error);
  RngStream rng(6);
  for (int i = 0; i < 500; ++i) {
    const int n = uniform_int(rng, 1, 8);
    const auto p = instances::probability_vector(n, rng);
    const auto q = instances::probability_vector(n, rng);
    const auto r = instances::probability_vector(n, rng);
    CHECK(tv_distance(p, q) == tv_distance(q, p));
    CHECK(tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-15);
    CHECK(tv_distance(p, q) >= 0.0);
    CHECK(tv_distance(p, q) <= 1.0 + 1e-15);
    CHECK(std::abs((p - q).sum()) < 1e-10);
  }
}

TEST_CASE("value functions") {
  RngStream rng(7);
  const Discount g(0.95);
  SUBCASE("zero rewards") {
    const TabularMdp base = instances::random_mdp(3, 2, rng);
    const TabularMdp mdp({base.transitions(0), base.transitions(1)}, Eigen::MatrixXd::Zero(3, 2), base.safe_mask());
    const ValueFunctions vf = value_functions(mdp, TabularPolicy(3, 2), g, 0.0);
    CHECK(vf.V.isZero());
    CHECK(vf.Q.isZero());
  }
  SUBCASE("all safe") {
    const TabularMdp base = instances::random_mdp(3, 2, rng);
    const TabularMdp mdp({base.transitions(0), base.transitions(1)}, base.rewards(), {true, true, true});
    const ValueFunctions vf = value_functions(mdp, TabularPolicy(3, 2), g, 0.0);
    for (int s = 0; s < 3; ++s) CHECK(vf.U[s] == doctest::Approx(20.0).epsilon(1e-12));
  }
  SUBCASE("bellman iteration and the occupation identity") {
    for (int trial = 0; trial < 30; ++trial) {
      const int n = uniform_int(rng, 2, 6), m = uniform_int(rng, 1, 3);
      const TabularMdp mdp = instances::random_mdp(n, m, rng);
      const TabularPolicy pi = instances::random_policy(n, m, rng);
      const double lambda = trial % 2 ? 3.0 : 0.0;
      const ValueFunctions vf = value_functions(mdp, pi, g, lambda);
      const auto ref = oracle::value_iteration(mdp, oracle::softmax_rows(pi.logits()), 0.95, lambda);
      CHECK((vf.V - ref.V).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((vf.Q - ref.Q).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((vf.U - ref.U).cwiseAbs().maxCoeff() < 1e-9);
      const InducedChain chain = induced_chain(mdp, pi);
      for (int z = 0; z < n; ++z) {
        const double u = mdp.safe_indicator().dot(occupation_measure(chain, z, g).rho) / (1.0 - 0.95);
        CHECK(std::abs(vf.U[z] - u) < 1e-10);
      }
    }
  }
  SUBCASE("monte carlo returns") {
    const TabularEnv env(instances::reference_mdp());
    const TabularPolicy pi = instances::reference_policy();
    const ValueFunctions vf = value_functions(env.mdp(), pi, g, 2.0);
    std::vector<double> returns;
    RngStream mc(8);
    for (int i = 0; i < 100000; ++i) {
      returns.push_back(estimate_from(env, pi, DualVariable(2.0), TabularEnv::state(3), g, mc, mc).q_hat);
    }
    const auto m = oracle::moments(returns);
    CHECK(std::abs(m.mean - vf.V[3]) <= 3.0 * m.se);
  }
}

TEST_CASE("d-field") {
  RngStream rng(9);
  SUBCASE("constant Q in a gives zero") {
    const TabularMdp mdp = action_blind_mdp(rng, 4);
    const DField d = d_field(mdp, instances::random_policy(4, 2, rng), Discount(0.9), 1.0);
    CHECK(d.D.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(d.norm_inf2 < 1e-12);
  }
  SUBCASE("linear in lambda") {
    const TabularMdp mdp = instances::random_mdp(4, 3, rng);
    const TabularPolicy pi = instances::random_policy(4, 3, rng);
    std::vector<Eigen::MatrixXd> P;
    for (int a = 0; a < 3; ++a) P.push_back(mdp.transitions(a));
    Eigen::MatrixXd indicator(4, 3);
    for (int a = 0; a < 3; ++a) indicator.col(a) = mdp.safe_indicator();
    const TabularMdp safety_reward(P, indicator, mdp.safe_mask());
    const DField d0 = d_field(mdp, pi, Discount(0.9), 0.0);
    const DField d5 = d_field(mdp, pi, Discount(0.9), 5.0);
    const DField dind = d_field(safety_reward, pi, Discount(0.9), 0.0);
    CHECK((d5.D - d0.D - 5.0 * dind.D).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("weighted field is the scaled gradient") {
    for (int trial = 0; trial < 30; ++trial) {
      const int n = uniform_int(rng, 2, 5), m = uniform_int(rng, 2, 3);
      const TabularMdp mdp = instances::random_mdp(n, m, rng);
      const TabularPolicy pi = instances::random_policy(n, m, rng);
      const double g = 0.9, lambda = trial % 3 == 0 ? 0.0 : 1.0;
      const int z = trial % n;
      const DField d = d_field(mdp, pi, Discount(g), lambda);
      const Eigen::VectorXd weighted = d.weighted(occupation_measure(induced_chain(mdp, pi), z, Discount(g)).rho);
      auto vz = [&](const Eigen::VectorXd& flat) {
        Eigen::MatrixXd logits(n, m);
        for (int s = 0; s < n; ++s)
          for (int a = 0; a < m; ++a) logits(s, a) = flat[s * m + a];
        return oracle::value_iteration(mdp, oracle::softmax_rows(logits), g, lambda, 1e-14).V[z];
      };
      Eigen::VectorXd flat(n * m);
      for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a) flat[s * m + a] = pi.logits()(s, a);
      const Eigen::VectorXd fd = (1.0 - g) * oracle::central_difference(vz, flat);
      CHECK(oracle::relative_error(weighted, fd) < 1e-4);
    }
  }
  SUBCASE("norm") {
    Eigen::MatrixXd R(3, 2);
    R << 1, -4, -3, 0, 2, 1;
    CHECK(norm_inf2(R) == doctest::Approx(5.0));
    CHECK(norm_inf2(Eigen::MatrixXd::Zero(3, 2)) == 0.0);
  }
}

TEST_CASE("misalignment inequalities") {
  RngStream rng(10);
  SUBCASE("equal starts are tight") {
    const TabularMdp mdp = instances::random_mdp(4, 2, rng);
    const Theorem1Report r = theorem1_check(mdp, instances::random_policy(4, 2, rng), 1, 1, Discount(0.9), 1.0);
    CHECK(r.tv == 0.0);
    CHECK(r.grad_inner == doctest::Approx(r.grad_bound).epsilon(1e-12));
    CHECK(r.u_inner == doctest::Approx(r.u_bound).epsilon(1e-12));
    CHECK(r.holds());
  }
  SUBCASE("random instances") {
    int violations = 0;
    for (int trial = 0; trial < 500; ++trial) {
      const int n = uniform_int(rng, 2, 6), m = uniform_int(rng, 1, 3);
      const TabularMdp mdp = instances::random_mdp(n, m, rng);
      const TabularPolicy pi = instances::random_policy(n, m, rng, 2.0);
      const double lambda = std::vector<double>{0.0, 1.0, 20.0}[static_cast<std::size_t>(trial % 3)];
      const Discount g(std::uniform_real_distribution<double>(0.3, 0.99)(rng));
      const auto r = theorem1_check(mdp, pi, uniform_int(rng, 0, n - 1), uniform_int(rng, 0, n - 1), g, lambda);
      violations += !r.holds();
    }
    CHECK(violations == 0);
  }
  SUBCASE("vacuous when the measures are far apart") {
    // Two absorbing states: rho_0 = e_0, rho_1 = e_1, TV = 1.
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd r(2, 2);
    r << 1.0, 0.0, 0.0, 1.0;
    const TabularMdp mdp({I, I}, r, {true, false});
    const Theorem1Report rep = theorem1_check(mdp, TabularPolicy(2, 2), 0, 1, Discount(0.5), 0.0);
    CHECK(rep.tv == doctest::Approx(1.0));
    CHECK(rep.u_bound < 0.0);
    CHECK(rep.grad_bound < 0.0);
    CHECK(rep.holds());
  }
}

TEST_CASE("lemma inequality") {
  RngStream rng(11);
  SUBCASE("equal measures are tight") {
    Eigen::MatrixXd R(3, 2);
    R << 1, 2, -1, 0, 3, 1;
    const Eigen::Vector3d rho(0.2, 0.5, 0.3);
    const LemmaReport rep = lemma_check(R, rho, rho);
    CHECK(rep.q == doctest::Approx(rep.H * rep.H));
    CHECK(rep.bound == doctest::Approx(rep.H * rep.H));
    CHECK(rep.holds);
  }
  SUBCASE("constant R") {
    const Eigen::MatrixXd R = Eigen::MatrixXd::Constant(4, 3, 1.5);
    const LemmaReport rep = lemma_check(R, instances::probability_vector(4, rng), instances::probability_vector(4, rng));
    CHECK(rep.q == doctest::Approx(rep.H * rep.H));
    CHECK(rep.holds);
  }
  SUBCASE("random triples") {
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
      const int n = uniform_int(rng, 1, 8), d = uniform_int(rng, 1, 4);
      Eigen::MatrixXd R(n, d);
      for (Eigen::Index k = 0; k < R.size(); ++k) R.data()[k] = rng.normal();
      violations += !lemma_check(R, instances::probability_vector(n, rng), instances::probability_vector(n, rng)).holds;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("mixing time") {
  const Eigen::Vector3d p(0.2, 0.3, 0.5);
  Eigen::MatrixXd rows(3, 3);
  rows.rowwise() = p.transpose();
  CHECK(mixing_time(InducedChain(rows)) == 1);
  CHECK_THROWS_AS(mixing_time(InducedChain(mat2(0, 1, 1, 0))), std::domain_error);
  CHECK_FALSE(is_ergodic(InducedChain(mat2(0, 1, 1, 0))));
  CHECK_FALSE(is_ergodic(InducedChain(Eigen::MatrixXd::Identity(2, 2))));

  const Eigen::MatrixXd P = lazy_cycle(5);
  int brute = 0;
  Eigen::MatrixXd Pt = Eigen::MatrixXd::Identity(5, 5);
  for (int t = 1; t < 1000; ++t) {
    Pt = Pt * P;
    double worst = 0.0;
    for (int z = 0; z < 5; ++z) worst = std::max(worst, 0.5 * (Pt.row(z).array() - 0.2).abs().sum());
    if (worst <= 0.25) {
      brute = t;
      break;
    }
  }
  CHECK(mixing_time(InducedChain(P)) == brute);
  CHECK(brute > 1);

  const std::vector<InducedChain> both{InducedChain(rows), InducedChain(P)};
  CHECK(mixing_time(both) == brute);
}

TEST_CASE("mixing-time discount threshold") {
  CHECK(prop2_threshold(50, 0.5) == doctest::Approx(0.991923489529502).epsilon(1e-14));
  CHECK(std::round(prop2_threshold(50, 0.5) * 100.0) / 100.0 == 0.99);
  CHECK(prop2_threshold(1, 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(prop2_threshold(7, 1.0) == 0.0);
  CHECK_THROWS_AS(prop2_threshold(10, 0.25), std::domain_error);
  CHECK_THROWS_AS(prop2_threshold(10, 0.2), std::domain_error);
  CHECK(prop2_threshold(10, 0.4) < prop2_threshold(20, 0.4));
}

TEST_CASE("spectral info") {
  SUBCASE("symmetric doubly stochastic") {
    const SpectralInfo info = spectral_info(InducedChain(lazy_cycle(6)));
    CHECK((info.stationary.array() - 1.0 / 6.0).abs().maxCoeff() < 1e-12);
    CHECK(info.p_min == doctest::Approx(1.0 / 6.0));
  }
  SUBCASE("two states") {
    const SpectralInfo info = spectral_info(InducedChain(mat2(0.9, 0.1, 0.2, 0.8)));
    CHECK(info.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(info.eigenvalues[1] == doctest::Approx(0.7));
    CHECK(info.lambda_star == doctest::Approx(0.7));
  }
  SUBCASE("negative second eigenvalue is clipped") {
    const SpectralInfo info = spectral_info(InducedChain(mat2(0.1, 0.9, 0.9, 0.1)));
    CHECK(info.eigenvalues[1] == doctest::Approx(-0.8));
    CHECK(info.lambda_star == 0.0);
  }
  SUBCASE("metropolis chains") {
    RngStream rng(12);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = uniform_int(rng, 4, 8);
      const Eigen::VectorXd target = instances::probability_vector(n, rng);
      const InducedChain chain = instances::metropolis_chain(target, rng);
      const SpectralInfo info = spectral_info(chain);
      CHECK((info.stationary - target).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((info.stationary.transpose() * chain.P - info.stationary.transpose()).cwiseAbs().maxCoeff() < 1e-10);
      const Eigen::MatrixXd gram = info.eigenvectors.transpose() * target.asDiagonal() * info.eigenvectors;
      CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-8);
      for (int i = 1; i < n; ++i) CHECK(info.eigenvalues[i] <= info.eigenvalues[i - 1]);
      Eigen::MatrixXd Pt = Eigen::MatrixXd::Identity(n, n);
      for (int t = 1; t <= 20; ++t) {
        Pt = Pt * chain.P;
        CHECK((info.reconstruct_power(t) - Pt).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }
  SUBCASE("irreversible chain") {
    Eigen::MatrixXd P(3, 3);
    P << 0.1, 0.8, 0.1, 0.1, 0.1, 0.8, 0.8, 0.1, 0.1;
    try {
      spectral_info(InducedChain(P));
      FAIL("expected a detailed-balance error");
    } catch (const std::domain_error& e) {
      CHECK(std::string(e.what()).find("(0, 1)") != std::string::npos);
    }
  }
}

TEST_CASE("spectral discount threshold") {
  CHECK(prop3_threshold(0.0, 0.25, 0.5) == doctest::Approx(0.875).epsilon(1e-15));
  CHECK(prop3_threshold(0.9, 0.1, 0.5) == doctest::Approx(0.994764397905759).epsilon(1e-14));
  double prev = 0.0;
  for (double l : {0.0, 0.5, 0.9, 0.99, 0.999999}) {
    const double t = prop3_threshold(l, 0.2, 0.5);
    CHECK(t > prev);
    CHECK(t < 1.0);
    prev = t;
  }
  CHECK(prev > 0.99999);
  CHECK_THROWS_AS(prop3_threshold(1.0, 0.2, 0.5), std::domain_error);
  CHECK_THROWS_AS(prop3_threshold(-0.1, 0.2, 0.5), std::domain_error);
  CHECK_THROWS_AS(prop3_threshold(0.5, 0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(prop3_threshold(0.5, 1.0, 1.0), std::domain_error);
}

TEST_CASE("pairwise tv") {
  RngStream rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const InducedChain chain = instances::random_ergodic_chain(uniform_int(rng, 2, 6), rng);
    CHECK(max_pairwise_tv(chain, Discount(0.8)) == doctest::Approx(oracle::max_pair_tv(chain.P, 0.8)).epsilon(1e-9));
  }
}

TEST_CASE("implication suites") {
  RngStream rng(14);
  const std::vector<double> none;
  const ChainGenerator ergodic = [](RngStream& g) { return instances::random_ergodic_chain(4, g); };
  CHECK(implication_suite(ergodic, Bound::prop2, std::vector<double>{0.5}, 0, rng).trials.empty());

  const ChainGenerator reversible = [](RngStream& g) {
    const int n = std::uniform_int_distribution<int>(4, 8)(g);
    return instances::metropolis_chain(instances::probability_vector(n, g), g);
  };
  const auto p3 = implication_suite(reversible, Bound::prop3, std::vector<double>{0.3, 0.5}, 200, rng);
  CHECK(p3.trials.size() == 400);
  CHECK(p3.violations == 0);
  CHECK(p3.precondition_failures == 0);

  const ChainGenerator random = [](RngStream& g) {
    return instances::random_ergodic_chain(std::uniform_int_distribution<int>(2, 8)(g), g);
  };
  const auto p2 = implication_suite(random, Bound::prop2, std::vector<double>{0.5}, 100, rng);
  CHECK(p2.trials.size() == 100);
  CHECK(p2.violations == 0);
  CHECK(p2.precondition_failures == 0);

  const ChainGenerator periodic = [](RngStream&) { return InducedChain(mat2(0, 1, 1, 0)); };
  const auto bad = implication_suite(periodic, Bound::prop2, std::vector<double>{0.5}, 3, rng);
  CHECK(bad.precondition_failures == 3);
  CHECK_FALSE(bad.trials[0].error.empty());
}

TEST_CASE("exact lagrangian") {
  RngStream rng(15);
  const Discount g(0.9);
  const TabularMdp mdp = instances::random_mdp(5, 2, rng);
  const TabularPolicy pi = instances::random_policy(5, 2, rng);
  const ValueFunctions plain = value_functions(mdp, pi, g, 0.0);
  CHECK(exact_lagrangian(mdp, pi, g, 0.0, 3.0, 1) == doctest::Approx(plain.V[1]));
  CHECK(exact_lagrangian(mdp, pi, g, 7.0, plain.U[1], 1) == doctest::Approx(plain.V[1]));
  for (double lambda : {0.5, 2.0, 20.0}) {
    const ValueFunctions shaped = value_functions(mdp, pi, g, lambda);
    CHECK(std::abs(exact_lagrangian(mdp, pi, g, lambda, 4.0, 3) - (shaped.V[3] - lambda * 4.0)) < 1e-10);
  }
}

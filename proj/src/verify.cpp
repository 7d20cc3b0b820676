#include "pdsafe/verify.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "pdsafe/analysis.hpp"
#include "pdsafe/instances.hpp"

namespace pdsafe::verify {

namespace {

using analysis::InducedChain;

constexpr std::array<Suite, 7> kSuites{Suite::occupation, Suite::gradients, Suite::theorem1, Suite::lemma,
                                       Suite::prop2,      Suite::prop3,     Suite::estimators};
constexpr double kSlackTol = 1e-9;
constexpr std::array<double, 3> kGammas{0.5, 0.9, 0.95};
constexpr std::array<double, 3> kLambdas{0.0, 1.0, 20.0};

int uniform_int(RngStream& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

using TrialFn = std::function<std::vector<TrialRecord>(int, RngStream&)>;

std::vector<TrialRecord> occupation_trial(int trial, RngStream& rng) {
  const int n = uniform_int(rng, 1, 10);
  const InducedChain chain = instances::random_chain(n, rng);
  TrialRecord rec;
  rec.trial = trial;
  rec.quantities.emplace_back("states", n);
  double worst = 0.0;
  for (double g : kGammas) {
    const Eigen::MatrixXd closed = analysis::occupation_matrix(chain, Discount(g));
    const Eigen::MatrixXd series = truncated_occupation(chain.P, g, 10000);
    const double diff = (closed - series).cwiseAbs().maxCoeff();
    rec.quantities.emplace_back("max_diff_gamma_" + format_double(g), diff);
    worst = std::max(worst, diff);
  }
  rec.slack = 1e-8 - worst;
  rec.pass = worst < 1e-8;
  return {rec};
}

std::vector<TrialRecord> gradients_trial(int trial, RngStream& rng) {
  const int n = uniform_int(rng, 2, 6);
  const int m = uniform_int(rng, 2, 3);
  const TabularMdp mdp = instances::random_mdp(n, m, rng);
  const TabularPolicy policy = instances::random_policy(n, m, rng);
  const Discount gamma{kGammas[static_cast<std::size_t>(trial % 3)]};
  const double lambda = kLambdas[static_cast<std::size_t>((trial / 3) % 3)];
  const int z = uniform_int(rng, 0, n - 1);

  const auto field = analysis::d_field(mdp, policy, gamma, lambda);
  const auto rho = analysis::occupation_measure(analysis::induced_chain(mdp, policy), z, gamma);
  const Eigen::VectorXd exact = field.weighted(rho.rho);
  const Eigen::VectorXd fd = (1.0 - gamma.value()) * finite_difference_gradient(mdp, policy, gamma, lambda, z);
  const double err = (exact - fd).norm();
  const double scale = std::max(fd.norm(), 1e-8);
  TrialRecord rec;
  rec.trial = trial;
  rec.quantities = {{"states", n}, {"actions", m}, {"gamma", gamma.value()}, {"lambda", lambda},
                    {"grad_norm", exact.norm()}, {"relative_error", err / scale}};
  rec.slack = 1e-4 - err / scale;
  rec.pass = err <= 1e-4 * scale;
  return {rec};
}

std::vector<TrialRecord> theorem1_trial(int trial, RngStream& rng) {
  const int n = uniform_int(rng, 2, 6);
  const int m = uniform_int(rng, 1, 3);
  const TabularMdp mdp = instances::random_mdp(n, m, rng);
  const TabularPolicy policy = instances::random_policy(n, m, rng, 2.0);
  const double lambda = kLambdas[static_cast<std::size_t>(trial % 3)];
  const Discount gamma(std::uniform_real_distribution<double>(0.3, 0.99)(rng));
  const int z = uniform_int(rng, 0, n - 1);
  const int zp = uniform_int(rng, 0, n - 1);
  const auto r = analysis::theorem1_check(mdp, policy, z, zp, gamma, lambda, kSlackTol);
  TrialRecord rec;
  rec.trial = trial;
  rec.quantities = {{"states", n},          {"actions", m},          {"gamma", gamma.value()},
                    {"lambda", lambda},     {"z", z},                {"z_prime", zp},
                    {"tv", r.tv},           {"d_norm", r.d_norm},    {"grad_inner", r.grad_inner},
                    {"grad_bound", r.grad_bound}, {"u_inner", r.u_inner}, {"u_bound", r.u_bound}};
  rec.slack = r.slack;
  rec.pass = r.holds();
  return {rec};
}

std::vector<TrialRecord> lemma_trial(int trial, RngStream& rng) {
  const int n = uniform_int(rng, 1, 8);
  const int d = uniform_int(rng, 1, 4);
  Eigen::MatrixXd R(n, d);
  const double scale = std::exp(std::uniform_real_distribution<double>(-3.0, 3.0)(rng));
  for (Eigen::Index i = 0; i < R.size(); ++i) R.data()[i] = scale * rng.normal();
  const Eigen::VectorXd rho_z = instances::probability_vector(n, rng);
  const Eigen::VectorXd rho_zp = instances::probability_vector(n, rng);
  const auto r = analysis::lemma_check(R, rho_z, rho_zp, kSlackTol);
  TrialRecord rec;
  rec.trial = trial;
  rec.quantities = {{"states", n},   {"dim", d},        {"q", r.q},          {"H", r.H},
                    {"r_norm", r.r_norm}, {"tv", r.tv}, {"bound", r.bound}};
  rec.slack = r.slack;
  rec.pass = r.holds;
  return {rec};
}

std::vector<TrialRecord> implication_records(const analysis::ImplicationReport& report, int trial) {
  std::vector<TrialRecord> out;
  for (const auto& t : report.trials) {
    TrialRecord rec;
    rec.trial = trial;
    rec.quantities = {{"states", t.states}, {"epsilon", t.epsilon}, {"gamma", t.gamma}, {"max_tv", t.max_tv}};
    rec.slack = t.error.empty() ? t.slack : -std::numeric_limits<double>::infinity();
    rec.pass = t.error.empty() && t.holds;
    out.push_back(std::move(rec));
  }
  return out;
}

TrialFn prop2_trial(double epsilon) {
  return [epsilon](int trial, RngStream& rng) {
    const analysis::ChainGenerator gen = [](RngStream& g) {
      return instances::random_ergodic_chain(uniform_int(g, 2, 8), g);
    };
    const std::array<double, 1> eps{epsilon};
    auto report = analysis::implication_suite(gen, analysis::Bound::prop2, eps, 1, rng, kSlackTol);
    auto records = implication_records(report, trial);
    RngStream again = rng.split(0);
    const InducedChain chain = gen(again);
    for (auto& r : records) r.quantities.emplace_back("tau", analysis::mixing_time(chain));
    return records;
  };
}

// Largest deviation of the spectral invariants: detailed balance,
// p-orthonormality and the reconstruction of P^t for t <= 20.
double spectral_residual(const InducedChain& chain, const analysis::SpectralInfo& info) {
  const int n = chain.size();
  const Eigen::VectorXd& p = info.stationary;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(p[i] * chain.P(i, j) - p[j] * chain.P(j, i)));
  }
  const Eigen::MatrixXd gram = info.eigenvectors.transpose() * p.asDiagonal() * info.eigenvectors;
  worst = std::max(worst, (gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  for (int t = 1; t <= 20; ++t) {
    power = power * chain.P;
    worst = std::max(worst, (info.reconstruct_power(t) - power).cwiseAbs().maxCoeff());
  }
  return worst;
}

TrialFn prop3_trial(std::vector<double> epsilons) {
  return [epsilons](int trial, RngStream& rng) {
    const analysis::ChainGenerator gen = [](RngStream& g) {
      const int n = uniform_int(g, 4, 8);
      return instances::metropolis_chain(instances::probability_vector(n, g), g);
    };
    auto report = analysis::implication_suite(gen, analysis::Bound::prop3, epsilons, 1, rng, kSlackTol);
    auto records = implication_records(report, trial);
    RngStream again = rng.split(0);
    const InducedChain chain = gen(again);
    double residual = std::numeric_limits<double>::infinity();
    double lambda_star = 0.0, p_min = 0.0;
    try {
      const auto info = analysis::spectral_info(chain);
      residual = spectral_residual(chain, info);
      lambda_star = info.lambda_star;
      p_min = info.p_min;
    } catch (const std::domain_error&) {
    }
    for (auto& r : records) {
      r.quantities.emplace_back("lambda_star", lambda_star);
      r.quantities.emplace_back("p_min", p_min);
      r.quantities.emplace_back("spectral_residual", residual);
      if (!(residual <= 1e-8)) {
        r.pass = false;
        r.slack = std::min(r.slack, 1e-8 - residual);
      }
    }
    return records;
  };
}

TrialFn estimators_trial(std::uint64_t samples) {
  return [samples](int trial, RngStream& rng) {
    const TabularEnv env(instances::reference_mdp());
    const TabularPolicy policy = instances::reference_policy();
    const Discount gamma(0.95);
    const DualVariable lambda(1.5);
    const int n = env.mdp().num_states();
    const int s = trial % n;
    const auto exact = analysis::value_functions(env.mdp(), policy, gamma, lambda.value());

    std::vector<TrialRecord> out;
    auto add = [&](const std::string& what, const MeanEstimate& est, double truth) {
      TrialRecord rec;
      rec.trial = trial;
      rec.quantities = {{"state", s}, {"mean", est.mean}, {"exact", truth}, {"std_error", est.std_error},
                        {"samples", static_cast<double>(est.samples)}};
      rec.quantities.emplace_back(what, 1.0);
      rec.slack = 3.0 * est.std_error - std::abs(est.mean - truth);
      rec.pass = est.within(truth);
      out.push_back(std::move(rec));
    };
    RngStream u_rng = rng.split(0);
    add("u", estimate_u(env, policy, lambda, s, gamma, samples, u_rng), exact.U[s]);
    for (int a = 0; a < env.mdp().num_actions(); ++a) {
      RngStream q_rng = rng.split(1 + static_cast<std::uint64_t>(a));
      add("q_action_" + std::to_string(a), estimate_q(env, policy, lambda, s, a, gamma, samples, q_rng),
          exact.Q(s, a));
    }
    return out;
  };
}

TrialFn trial_function(Suite suite, const SuiteOptions& options) {
  switch (suite) {
    case Suite::occupation:
      return occupation_trial;
    case Suite::gradients:
      return gradients_trial;
    case Suite::theorem1:
      return theorem1_trial;
    case Suite::lemma:
      return lemma_trial;
    case Suite::prop2: {
      const double eps = options.epsilon.value_or(0.5);
      if (!(eps > 0.25)) throw std::invalid_argument("prop2 needs epsilon > 1/4");
      return prop2_trial(eps);
    }
    case Suite::prop3: {
      std::vector<double> eps = options.epsilon ? std::vector<double>{*options.epsilon} : std::vector{0.3, 0.5};
      for (double e : eps) {
        if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("prop3 needs epsilon in (0, 1)");
      }
      return prop3_trial(eps);
    }
    case Suite::estimators:
      if (options.samples < 2) throw std::invalid_argument("estimators needs at least 2 samples");
      return estimators_trial(options.samples);
  }
  throw std::invalid_argument("unknown suite");
}

MeanEstimate summarize(double sum, double sum_sq, std::uint64_t count) {
  MeanEstimate est;
  est.samples = count;
  const double n = static_cast<double>(count);
  est.mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1.0));
  est.std_error = std::sqrt(var / n);
  return est;
}

}  // namespace

Suite parse_suite(const std::string& name) {
  for (Suite s : kSuites) {
    if (suite_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown suite '" + name + "'");
}

std::string suite_name(Suite suite) {
  switch (suite) {
    case Suite::occupation: return "occupation";
    case Suite::gradients: return "gradients";
    case Suite::theorem1: return "theorem1";
    case Suite::lemma: return "lemma";
    case Suite::prop2: return "prop2";
    case Suite::prop3: return "prop3";
    case Suite::estimators: return "estimators";
  }
  return "unknown";
}

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (Suite s : kSuites) out.push_back(suite_name(s));
  return out;
}

SuiteReport run_suite(Suite suite, const SuiteOptions& options) {
  if (options.trials < 0) throw std::invalid_argument("trials must be nonnegative");
  const TrialFn fn = trial_function(suite, options);
  const RngStream root(options.seed);

  std::vector<std::vector<TrialRecord>> results(static_cast<std::size_t>(options.trials));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < options.trials; i = next++) {
      try {
        RngStream rng = root.split(static_cast<std::uint64_t>(i));
        results[static_cast<std::size_t>(i)] = fn(i, rng);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(options.trials, 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  SuiteReport report;
  report.suite = suite;
  report.worst_slack = std::numeric_limits<double>::infinity();
  for (auto& batch : results) {
    for (auto& rec : batch) {
      if (!rec.pass) ++report.violations;
      report.worst_slack = std::min(report.worst_slack, rec.slack);
      report.records.push_back(std::move(rec));
    }
  }
  if (report.records.empty()) report.worst_slack = 0.0;
  return report;
}

void write_report(std::ostream& os, const SuiteReport& report) {
  const std::string name = suite_name(report.suite);
  os << "suite,trial,pass,slack,quantities\n";
  for (const auto& rec : report.records) {
    os << name << ',' << rec.trial << ',' << (rec.pass ? 1 : 0) << ',' << format_double(rec.slack) << ',';
    for (std::size_t i = 0; i < rec.quantities.size(); ++i) {
      if (i) os << ';';
      os << rec.quantities[i].first << '=' << format_double(rec.quantities[i].second);
    }
    os << '\n';
  }
  os << name << ",worst," << (report.ok() ? 1 : 0) << ',' << format_double(report.worst_slack)
     << ",violations=" << report.violations << ";records=" << report.records.size() << '\n';
}

bool MeanEstimate::within(double exact, double k) const { return std::abs(mean - exact) <= k * std_error; }

MeanEstimate estimate_u(const TabularEnv& env, const TabularPolicy& policy, DualVariable lambda, int s,
                        Discount gamma, std::uint64_t samples, RngStream& rng) {
  const StateVec start = TabularEnv::state(s);
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const auto est = estimate_from(env, policy, lambda, start, gamma, rng, rng);
    sum += est.u_hat;
    sum_sq += est.u_hat * est.u_hat;
  }
  return summarize(sum, sum_sq, samples);
}

MeanEstimate estimate_q(const TabularEnv& env, const TabularPolicy& policy, DualVariable lambda, int s, int a,
                        Discount gamma, std::uint64_t samples, RngStream& rng) {
  const StateVec start = TabularEnv::state(s);
  const ActionVec action = TabularEnv::action(a);
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const std::uint64_t horizon = sample_geometric(gamma, rng);
    const auto est = rollout_estimate(env, policy, lambda, start, action, horizon, rng);
    sum += est.q_hat;
    sum_sq += est.q_hat * est.q_hat;
  }
  return summarize(sum, sum_sq, samples);
}

Eigen::MatrixXd truncated_occupation(const Eigen::MatrixXd& P, double gamma, int terms) {
  const Eigen::Index n = P.rows();
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  double weight = 1.0 - gamma;
  for (int t = 0; t < terms; ++t) {
    sum += weight * power;
    power = power * P;
    weight *= gamma;
  }
  return sum;
}

Eigen::VectorXd finite_difference_gradient(const TabularMdp& mdp, const TabularPolicy& policy, Discount gamma,
                                           double lambda, int z, double step) {
  const Params base = policy.logits();
  const int m = policy.num_actions();
  Eigen::VectorXd grad(base.size());
  for (int s = 0; s < policy.num_states(); ++s) {
    for (int a = 0; a < m; ++a) {
      Params plus = base, minus = base;
      plus(s, a) += step;
      minus(s, a) -= step;
      const double vp = analysis::value_functions(mdp, TabularPolicy(plus), gamma, lambda).V[z];
      const double vm = analysis::value_functions(mdp, TabularPolicy(minus), gamma, lambda).V[z];
      grad[s * m + a] = (vp - vm) / (2.0 * step);
    }
  }
  return grad;
}

}  // namespace pdsafe::verify

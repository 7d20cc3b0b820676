#include "pdsafe/experiment.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pdsafe/policy.hpp"
#include "pdsafe/tabular.hpp"

namespace pdsafe::experiment {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>> kKeys{
    {"environment", {"kind", "ts", "bounds", "start", "goal", "obstacles", "mdp"}},
    {"policy", {"spacing", "bandwidth", "covariance"}},
    {"learner",
     {"gamma", "eta_theta", "eta_lambda", "lambda_init", "delta", "horizon", "threshold", "iterations", "steps",
      "batch", "baseline"}},
    {"run", {"seed", "out"}},
};

const std::set<std::string> kNavOnly{"ts", "bounds", "start", "goal", "obstacles"};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
  if (used != t.size() || !std::isfinite(v)) throw ConfigError(key, "expected a number, got '" + text + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  std::uint64_t v = 0;
  if (t.empty() || t[0] == '-' || t[0] == '+') throw ConfigError(key, "expected a nonnegative integer, got '" + text + "'");
  try {
    v = std::stoull(t, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a nonnegative integer, got '" + text + "'");
  }
  if (used != t.size()) throw ConfigError(key, "expected a nonnegative integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(parse_double(key, tok));
  return out;
}

Eigen::Vector2d parse_pair(const std::string& key, const std::string& text) {
  const auto v = parse_list(key, text);
  if (v.size() != 2) throw ConfigError(key, "expected two numbers, got '" + text + "'");
  return {v[0], v[1]};
}

std::vector<Obstacle> parse_obstacles(const std::string& key, const std::string& text) {
  std::vector<Obstacle> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (trim(item).empty()) continue;
    const auto v = parse_list(key, item);
    if (v.size() != 3) throw ConfigError(key, "each obstacle is 'x y radius', got '" + trim(item) + "'");
    out.push_back(Obstacle{Eigen::Vector2d{v[0], v[1]}, v[2]});
  }
  return out;
}

bool inside(const NavConfig& nav, const Eigen::Vector2d& p) {
  return p.x() >= nav.lo && p.x() <= nav.hi && p.y() >= nav.lo && p.y() <= nav.hi;
}

std::unique_ptr<Environment> make_env(const RunConfig& cfg) {
  if (cfg.kind == EnvKind::nav) return std::make_unique<NavEnv>(cfg.nav);
  std::ifstream in(cfg.mdp_path);
  if (!in) throw ConfigError("environment.mdp", "cannot open '" + cfg.mdp_path.string() + "'");
  try {
    return std::make_unique<TabularEnv>(read_tabular_mdp(in));
  } catch (const std::exception& e) {
    throw ConfigError("environment.mdp", e.what());
  }
}

std::unique_ptr<StochasticPolicy> make_policy(const RunConfig& cfg, const Environment& env) {
  if (cfg.kind == EnvKind::nav) {
    return std::make_unique<GaussianRbfPolicy>(
        RbfBasis::grid(cfg.nav.lo, cfg.nav.hi, cfg.policy.spacing, cfg.policy.bandwidth), cfg.policy.covariance);
  }
  const auto& mdp = static_cast<const TabularEnv&>(env).mdp();
  return std::make_unique<TabularPolicy>(mdp.num_states(), mdp.num_actions());
}

Checkpoint checkpoint_of(const RunConfig& cfg, const StochasticPolicy& policy) {
  if (cfg.kind == EnvKind::nav) return make_checkpoint(static_cast<const GaussianRbfPolicy&>(policy));
  return Checkpoint{policy.parameters(), 0.0, 0.0};
}

void write_state(std::ostream& os, const StateVec& s) {
  for (Eigen::Index i = 0; i < s.size(); ++i) os << ',' << fmt(s[i]);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// Online counterpart of summarize().
class SummaryTracker {
 public:
  SummaryTracker(const ReportOptions& options, bool track_goal) : options_(options), track_goal_(track_goal) {
    summary_.burnin = options.burnin;
    summary_.goal_radius = options.goal_radius;
  }

  void add(const StateVec& s, bool safe) {
    if (track_goal_ && !summary_.first_goal_step && (s - options_.goal).norm() <= options_.goal_radius) {
      summary_.first_goal_step = summary_.steps;
    }
    ++summary_.steps;
    if (safe) {
      ++safe_;
    } else {
      ++summary_.unsafe_events;
    }
    const double rs = static_cast<double>(safe_) / static_cast<double>(summary_.steps);
    summary_.final_runtime_safety = rs;
    if (summary_.steps >= std::max<std::uint64_t>(options_.burnin, 1)) {
      summary_.min_runtime_safety = std::min(summary_.min_runtime_safety, rs);
    }
  }

  Summary finish(std::optional<double> final_lambda) {
    summary_.final_lambda = final_lambda;
    return summary_;
  }

 private:
  ReportOptions options_;
  bool track_goal_;
  std::uint64_t safe_ = 0;
  Summary summary_;
};

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}

void RunConfig::validate() const {
  if (kind == EnvKind::nav) {
    if (!(nav.ts > 0.0) || !std::isfinite(nav.ts)) throw ConfigError("environment.ts", "must be positive");
    if (!(nav.lo < nav.hi)) throw ConfigError("environment.bounds", "lower bound must be below upper bound");
    if (!inside(nav, nav.start)) throw ConfigError("environment.start", "outside the domain");
    if (!inside(nav, nav.goal)) throw ConfigError("environment.goal", "outside the domain");
    for (const auto& o : nav.obstacles) {
      if (!(o.radius > 0.0)) throw ConfigError("environment.obstacles", "radius must be positive");
    }
    try {
      nav.validate();
    } catch (const std::exception& e) {
      throw ConfigError("environment", e.what());
    }
    if (!(policy.spacing > 0.0)) throw ConfigError("policy.spacing", "must be positive");
    if (!(policy.bandwidth > 0.0)) throw ConfigError("policy.bandwidth", "must be positive");
    if (!(policy.covariance.minCoeff() > 0.0)) throw ConfigError("policy.covariance", "entries must be positive");
  } else if (mdp_path.empty()) {
    throw ConfigError("environment.mdp", "required for tabular environments");
  }
  const auto& l = learner;
  if (!(l.eta_theta > 0.0)) throw ConfigError("learner.eta_theta", "must be positive");
  if (!(l.eta_lambda > 0.0)) throw ConfigError("learner.eta_lambda", "must be positive");
  if (!(l.lambda_init >= 0.0)) throw ConfigError("learner.lambda_init", "must be nonnegative");
  if (l.batch_size < 1) throw ConfigError("learner.batch", "must be at least 1");
  if (!l.max_iterations && !l.step_budget) throw ConfigError("learner.steps", "set steps or iterations");
  if (l.safety.explicit_threshold) {
    if (!(l.safety.threshold_c <= 1.0 / (1.0 - l.gamma.value()))) {
      throw ConfigError("learner.threshold", "must not exceed 1 / (1 - gamma)");
    }
  } else {
    if (!(l.safety.delta > 0.0 && l.safety.delta < 1.0)) throw ConfigError("learner.delta", "must lie in (0, 1)");
    if (l.safety.horizon == 0) throw ConfigError("learner.horizon", "must be positive");
  }
  try {
    l.validate();
  } catch (const std::exception& e) {
    throw ConfigError("learner", e.what());
  }
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.learner.step_budget = 2000;
  return cfg;
}

RunConfig read_config(std::istream& is, const fs::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [section, body] : tree) {
    const auto it = kKeys.find(section);
    if (it == kKeys.end()) throw ConfigError(section, "unknown section");
    if (!body.data().empty()) throw ConfigError(section, "expected a section");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError(section + "." + key, "unknown key");
    }
  }
  auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
    const auto child = tree.get_child_optional(pt::ptree::path_type(section + "/" + key, '/'));
    if (!child) return std::nullopt;
    return child->data();
  };

  RunConfig cfg = default_config();
  cfg.learner.step_budget.reset();

  if (auto v = get("environment", "kind")) {
    const std::string k = trim(*v);
    if (k == "nav") {
      cfg.kind = EnvKind::nav;
    } else if (k == "tabular") {
      cfg.kind = EnvKind::tabular;
    } else {
      throw ConfigError("environment.kind", "expected nav or tabular, got '" + *v + "'");
    }
  }
  if (cfg.kind == EnvKind::tabular) {
    for (const auto& key : kNavOnly) {
      if (get("environment", key)) throw ConfigError("environment." + key, "not used by tabular environments");
    }
    if (tree.get_child_optional("policy")) throw ConfigError("policy", "not used by tabular environments");
  } else if (get("environment", "mdp")) {
    throw ConfigError("environment.mdp", "only used by tabular environments");
  }
  if (auto v = get("environment", "ts")) cfg.nav.ts = parse_double("environment.ts", *v);
  if (auto v = get("environment", "bounds")) {
    const auto b = parse_pair("environment.bounds", *v);
    cfg.nav.lo = b[0];
    cfg.nav.hi = b[1];
  }
  if (auto v = get("environment", "start")) cfg.nav.start = parse_pair("environment.start", *v);
  if (auto v = get("environment", "goal")) cfg.nav.goal = parse_pair("environment.goal", *v);
  if (auto v = get("environment", "obstacles")) cfg.nav.obstacles = parse_obstacles("environment.obstacles", *v);
  if (auto v = get("environment", "mdp")) {
    fs::path p = trim(*v);
    cfg.mdp_path = (p.is_relative() && !base_dir.empty()) ? base_dir / p : p;
  }

  if (auto v = get("policy", "spacing")) cfg.policy.spacing = parse_double("policy.spacing", *v);
  if (auto v = get("policy", "bandwidth")) cfg.policy.bandwidth = parse_double("policy.bandwidth", *v);
  if (auto v = get("policy", "covariance")) cfg.policy.covariance = parse_pair("policy.covariance", *v);

  auto& l = cfg.learner;
  if (auto v = get("learner", "gamma")) {
    const double g = parse_double("learner.gamma", *v);
    if (!(g > 0.0 && g < 1.0)) throw ConfigError("learner.gamma", "must lie in (0, 1)");
    l.gamma = Discount(g);
  }
  if (auto v = get("learner", "eta_theta")) l.eta_theta = parse_double("learner.eta_theta", *v);
  if (auto v = get("learner", "eta_lambda")) l.eta_lambda = parse_double("learner.eta_lambda", *v);
  if (auto v = get("learner", "lambda_init")) l.lambda_init = parse_double("learner.lambda_init", *v);
  const auto threshold = get("learner", "threshold");
  if (threshold) {
    for (const char* key : {"delta", "horizon"}) {
      if (get("learner", key)) throw ConfigError(std::string("learner.") + key, "cannot be combined with threshold");
    }
    l.safety = SafetySpec::from_threshold(parse_double("learner.threshold", *threshold));
  } else {
    double delta = 0.01;
    std::uint64_t horizon = 100;
    if (auto v = get("learner", "delta")) delta = parse_double("learner.delta", *v);
    if (auto v = get("learner", "horizon")) horizon = parse_uint("learner.horizon", *v);
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("learner.delta", "must lie in (0, 1)");
    if (horizon == 0) throw ConfigError("learner.horizon", "must be positive");
    l.safety = SafetySpec::from_delta(delta, horizon, l.gamma);
  }
  if (auto v = get("learner", "iterations")) l.max_iterations = parse_uint("learner.iterations", *v);
  if (auto v = get("learner", "steps")) l.step_budget = parse_uint("learner.steps", *v);
  if (!l.max_iterations && !l.step_budget) l.step_budget = 2000;
  if (auto v = get("learner", "batch")) {
    const auto b = parse_uint("learner.batch", *v);
    if (b < 1 || b > 1000000) throw ConfigError("learner.batch", "must lie in [1, 1000000]");
    l.batch_size = static_cast<int>(b);
  }
  if (auto v = get("learner", "baseline")) l.baseline = parse_bool("learner.baseline", *v);

  if (auto v = get("run", "seed")) cfg.seed = parse_uint("run.seed", *v);
  if (auto v = get("run", "out")) {
    if (trim(*v).empty()) throw ConfigError("run.out", "must not be empty");
    cfg.out = trim(*v);
  }
  cfg.validate();
  if (cfg.kind == EnvKind::tabular) make_env(cfg);
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
  return read_config(in, path.parent_path());
}

void write_config(std::ostream& os, const RunConfig& cfg) {
  os << "[environment]\n";
  if (cfg.kind == EnvKind::nav) {
    const auto& n = cfg.nav;
    os << "kind = nav\n";
    os << "ts = " << fmt(n.ts) << '\n';
    os << "bounds = " << fmt(n.lo) << ' ' << fmt(n.hi) << '\n';
    os << "start = " << fmt(n.start.x()) << ' ' << fmt(n.start.y()) << '\n';
    os << "goal = " << fmt(n.goal.x()) << ' ' << fmt(n.goal.y()) << '\n';
    os << "obstacles =";
    for (std::size_t i = 0; i < n.obstacles.size(); ++i) {
      const auto& o = n.obstacles[i];
      os << (i ? ", " : " ") << fmt(o.center.x()) << ' ' << fmt(o.center.y()) << ' ' << fmt(o.radius);
    }
    os << "\n\n[policy]\n";
    os << "spacing = " << fmt(cfg.policy.spacing) << '\n';
    os << "bandwidth = " << fmt(cfg.policy.bandwidth) << '\n';
    os << "covariance = " << fmt(cfg.policy.covariance.x()) << ' ' << fmt(cfg.policy.covariance.y()) << '\n';
  } else {
    os << "kind = tabular\n";
    os << "mdp = " << cfg.mdp_path.string() << '\n';
  }
  const auto& l = cfg.learner;
  os << "\n[learner]\n";
  os << "gamma = " << fmt(l.gamma.value()) << '\n';
  os << "eta_theta = " << fmt(l.eta_theta) << '\n';
  os << "eta_lambda = " << fmt(l.eta_lambda) << '\n';
  os << "lambda_init = " << fmt(l.lambda_init) << '\n';
  if (l.safety.explicit_threshold) {
    os << "threshold = " << fmt(l.safety.threshold_c) << '\n';
  } else {
    os << "delta = " << fmt(l.safety.delta) << '\n';
    os << "horizon = " << l.safety.horizon << '\n';
  }
  if (l.max_iterations) os << "iterations = " << *l.max_iterations << '\n';
  if (l.step_budget) os << "steps = " << *l.step_budget << '\n';
  os << "batch = " << l.batch_size << '\n';
  os << "baseline = " << (l.baseline ? "true" : "false") << '\n';
  os << "\n[run]\n";
  os << "seed = " << cfg.seed << '\n';
  os << "out = " << cfg.out.string() << '\n';
}

std::vector<StepRow> read_trajectory(std::istream& is, std::vector<std::string>* labels) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("trajectory: missing header");
  const auto header = split_csv(line);
  if (header.size() < 3 || header.front() != "t" || header.back() != "safe") {
    throw std::runtime_error("trajectory: header must be t,<state columns>,safe");
  }
  const std::size_t dim = header.size() - 2;
  if (labels) labels->assign(header.begin() + 1, header.end() - 1);
  std::vector<StepRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    const std::string where = "trajectory line " + std::to_string(lineno);
    if (fields.size() != header.size()) throw std::runtime_error(where + ": expected " +
                                                                 std::to_string(header.size()) + " fields");
    StepRow row;
    try {
      std::size_t used = 0;
      row.t = std::stoull(fields[0], &used);
      if (used != fields[0].size()) throw std::invalid_argument("t");
      row.state.resize(static_cast<Eigen::Index>(dim));
      for (std::size_t i = 0; i < dim; ++i) {
        row.state[static_cast<Eigen::Index>(i)] = std::stod(fields[i + 1], &used);
        if (used != fields[i + 1].size()) throw std::invalid_argument("state");
      }
    } catch (const std::exception&) {
      throw std::runtime_error(where + ": malformed number");
    }
    if (fields.back() != "0" && fields.back() != "1") throw std::runtime_error(where + ": safe must be 0 or 1");
    row.safe = fields.back() == "1";
    if (row.t != rows.size()) throw std::runtime_error(where + ": steps are not contiguous");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::optional<double> read_final_lambda(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("run log: missing header");
  const auto header = split_csv(line);
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "lambda") col = i;
  }
  if (header.empty() || header.front() != "iteration" || col == header.size()) {
    throw std::runtime_error("run log: header must start with iteration and contain lambda");
  }
  std::optional<double> last;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error("run log line " + std::to_string(lineno) + ": wrong field count");
    }
    try {
      last = std::stod(fields[col]);
    } catch (const std::exception&) {
      throw std::runtime_error("run log line " + std::to_string(lineno) + ": malformed lambda");
    }
  }
  return last;
}

Summary summarize(const std::vector<StepRow>& rows, const ReportOptions& options, std::optional<double> final_lambda) {
  const bool track_goal = !rows.empty() && rows.front().state.size() == 2;
  SummaryTracker tracker(options, track_goal);
  for (const auto& r : rows) tracker.add(r.state, r.safe);
  return tracker.finish(final_lambda);
}

void write_safety_csv(std::ostream& os, const std::vector<StepRow>& rows) {
  os << "step,runtime_safety,unsafe_flag\n";
  std::uint64_t safe = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].safe) ++safe;
    os << i + 1 << ',' << fmt(static_cast<double>(safe) / static_cast<double>(i + 1)) << ','
       << (rows[i].safe ? 0 : 1) << '\n';
  }
}

void write_summary(std::ostream& os, const Summary& s) {
  os << "steps = " << s.steps << '\n';
  os << "final_runtime_safety = " << fmt(s.final_runtime_safety) << '\n';
  os << "burnin = " << s.burnin << '\n';
  os << "min_runtime_safety_after_burnin = " << fmt(s.min_runtime_safety) << '\n';
  os << "goal_radius = " << fmt(s.goal_radius) << '\n';
  os << "first_goal_step = " << (s.first_goal_step ? std::to_string(*s.first_goal_step) : "none") << '\n';
  os << "unsafe_events = " << s.unsafe_events << '\n';
  os << "final_lambda = " << (s.final_lambda ? fmt(*s.final_lambda) : "none") << '\n';
}

Summary report(const fs::path& log, const ReportOptions& options) {
  std::ifstream in(log);
  if (!in) throw std::runtime_error("cannot open '" + log.string() + "'");
  std::string header;
  std::getline(in, header);
  const fs::path dir = log.parent_path();
  fs::path trajectory = log, run;
  if (header.rfind("iteration", 0) == 0) {
    run = log;
    trajectory = dir / "trajectory.csv";
  } else if (fs::exists(dir / "run.csv")) {
    run = dir / "run.csv";
  }

  std::ifstream tin(trajectory);
  if (!tin) throw std::runtime_error("cannot open '" + trajectory.string() + "'");
  const auto rows = read_trajectory(tin);
  std::optional<double> lambda;
  if (!run.empty()) {
    std::ifstream rin(run);
    lambda = read_final_lambda(rin);
  }
  const Summary summary = summarize(rows, options, lambda);
  std::ofstream rep(dir / "report.txt");
  write_summary(rep, summary);
  std::ofstream safety(dir / "safety.csv");
  write_safety_csv(safety, rows);
  if (!rep || !safety) throw std::runtime_error("cannot write report files in '" + dir.string() + "'");
  return summary;
}

TrainResult train(const RunConfig& cfg, Mode mode) {
  cfg.validate();
  const auto env = make_env(cfg);
  const auto policy = make_policy(cfg, *env);
  fs::create_directories(cfg.out);

  const auto labels = env->state_labels();
  std::ofstream traj(cfg.out / "trajectory.csv");
  std::ofstream run(cfg.out / "run.csv");
  if (!traj || !run) throw std::runtime_error("cannot write into '" + cfg.out.string() + "'");
  traj << 't';
  run << "iteration,steps";
  for (const auto& l : labels) {
    traj << ',' << l;
    run << ',' << l;
  }
  traj << ",safe\n";
  run << ",lambda,q_hat,u_hat,grad_norm,runtime_safety,unsafe_events\n";

  ReportOptions options;
  options.goal = cfg.nav.goal;
  SummaryTracker tracker(options, cfg.kind == EnvKind::nav);
  std::uint64_t t = 0;

  Learner learner(*env, *policy, cfg.learner, cfg.seed, mode);
  learner.set_step_observer([&](const TrajectoryRecord& r) {
    traj << t++;
    write_state(traj, r.state);
    traj << ',' << (r.safe ? 1 : 0) << '\n';
    tracker.add(r.state, r.safe);
  });
  TrainResult result;
  result.log = learner.run();
  for (const auto& rec : result.log.records) {
    run << rec.iteration << ',' << rec.steps;
    write_state(run, rec.state);
    run << ',' << fmt(rec.lambda) << ',' << fmt(rec.q_hat) << ',' << fmt(rec.u_hat) << ',' << fmt(rec.grad_norm)
        << ',' << fmt(rec.runtime_safety) << ',' << rec.unsafe_events << '\n';
  }
  std::ofstream ckpt(cfg.out / "theta.ckpt");
  write_checkpoint(ckpt, checkpoint_of(cfg, *policy));
  traj.flush();
  run.flush();
  if (!traj || !run || !ckpt) throw std::runtime_error("failed writing artifacts in '" + cfg.out.string() + "'");

  std::optional<double> lambda;
  if (!result.log.records.empty()) lambda = result.log.records.back().lambda;
  result.summary = tracker.finish(lambda);
  result.out = cfg.out;
  return result;
}

std::vector<TrainResult> train_seeds(const RunConfig& cfg, Mode mode, std::uint64_t first, std::uint64_t last) {
  if (last < first) throw std::invalid_argument("seed range is empty");
  std::vector<std::future<TrainResult>> jobs;
  for (std::uint64_t seed = first; seed <= last; ++seed) {
    RunConfig run = cfg;
    run.seed = seed;
    run.out = cfg.out / ("seed-" + std::to_string(seed));
    jobs.push_back(std::async(std::launch::async, [run, mode] { return train(run, mode); }));
    if (seed == last) break;
  }
  std::vector<TrainResult> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace pdsafe::experiment

#include "pdsafe/mdp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pdsafe {

Discount::Discount(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::domain_error("discount must lie in (0, 1), got " + std::to_string(gamma));
  }
}

std::vector<std::string> Environment::state_labels() const {
  std::vector<std::string> labels;
  for (Eigen::Index i = 0; i < state_dim(); ++i) labels.push_back("s" + std::to_string(i));
  return labels;
}

bool Trajectory::contiguous() const {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].state != records[i - 1].next_state) return false;
  }
  if (!records.empty() && records.back().next_state != final_state) return false;
  return true;
}

std::uint64_t sample_geometric(Discount gamma, RngStream& rng) {
  // std::geometric_distribution(p) counts failures before the first success:
  // P(k) = p (1 - p)^k. With p = 1 - gamma that is exactly (1 - gamma) gamma^k.
  std::geometric_distribution<std::uint64_t> dist(1.0 - gamma.value());
  return dist(rng);
}

void check_state(const Environment& env, const StateVec& s) {
  if (s.size() != env.state_dim()) {
    throw std::domain_error("state has dimension " + std::to_string(s.size()) + ", expected " +
                            std::to_string(env.state_dim()));
  }
  if (!s.allFinite()) throw std::domain_error("state has non-finite components");
}

void check_action(const Environment& env, const ActionVec& a) {
  if (a.size() != env.action_dim()) {
    throw std::domain_error("action has dimension " + std::to_string(a.size()) + ", expected " +
                            std::to_string(env.action_dim()));
  }
  if (!a.allFinite()) throw std::domain_error("action has non-finite components");
}

StateVec advance(const Environment& env, const ActionSampler& sampler, const StateVec& start,
                 std::uint64_t steps, RngStream& rng, const StepVisitor& visit) {
  check_state(env, start);
  StateVec s = start;
  bool safe = env.is_safe(s);
  for (std::uint64_t t = 0; t < steps; ++t) {
    ActionVec a = sampler.sample(s, rng);
    StepOutcome out = env.step(s, a, rng);
    if (visit) visit(TrajectoryRecord{s, a, out.reward, safe, out.next_state});
    s = std::move(out.next_state);
    safe = out.safe;
  }
  return s;
}

Trajectory advance(const Environment& env, const ActionSampler& sampler, const StateVec& start,
                   std::uint64_t steps, RngStream& rng) {
  Trajectory traj;
  traj.records.reserve(steps);
  traj.final_state = advance(env, sampler, start, steps, rng,
                             [&](const TrajectoryRecord& r) { traj.records.push_back(r); });
  return traj;
}

}  // namespace pdsafe

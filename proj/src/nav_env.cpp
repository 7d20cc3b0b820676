#include "pdsafe/nav_env.hpp"

#include <stdexcept>
#include <string>

namespace pdsafe {

namespace {

bool inside(const NavConfig& cfg, const Eigen::Vector2d& p) {
  return (p.array() >= cfg.lo).all() && (p.array() <= cfg.hi).all();
}

}  // namespace

void NavConfig::validate() const {
  if (!(hi > lo)) throw std::invalid_argument("domain bounds must satisfy lo < hi");
  if (!(ts > 0.0)) throw std::invalid_argument("sampling time must be positive");
  for (std::size_t j = 0; j < obstacles.size(); ++j) {
    const auto& o = obstacles[j];
    if (!(o.radius > 0.0)) throw std::invalid_argument("obstacle " + std::to_string(j) + ": radius must be positive");
    if (!inside(*this, o.center)) {
      throw std::invalid_argument("obstacle " + std::to_string(j) + ": center outside the domain");
    }
  }
  if (!inside(*this, start)) throw std::invalid_argument("start lies outside the domain");
  if (!inside(*this, goal)) throw std::invalid_argument("goal lies outside the domain");
  if (!nav_safe(*this, start)) throw std::invalid_argument("start lies inside an obstacle");
  if (!nav_safe(*this, goal)) throw std::invalid_argument("goal lies inside an obstacle");
}

bool nav_safe(const NavConfig& cfg, const StateVec& s) {
  for (const auto& o : cfg.obstacles) {
    if ((s - o.center).norm() <= o.radius) return false;
  }
  return true;
}

double nav_reward(const NavConfig& cfg, const StateVec& s, const ActionVec&) {
  return -(s - cfg.goal).squaredNorm();
}

StepOutcome nav_step(const NavConfig& cfg, const StateVec& s, const ActionVec& a) {
  StateVec next = (s + cfg.ts * a).cwiseMax(cfg.lo).cwiseMin(cfg.hi);
  const bool safe = nav_safe(cfg, next);
  return StepOutcome{std::move(next), nav_reward(cfg, s, a), safe};
}

NavEnv::NavEnv(NavConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

StepOutcome NavEnv::step(const StateVec& s, const ActionVec& a, RngStream&) const {
  check_state(*this, s);
  check_action(*this, a);
  return nav_step(cfg_, s, a);
}

}  // namespace pdsafe

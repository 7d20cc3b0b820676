#pragma once

#include <vector>

#include "pdsafe/mdp.hpp"

namespace pdsafe {

struct Obstacle {
  Eigen::Vector2d center;
  double radius = 1.0;

  bool operator==(const Obstacle&) const = default;
};

/// Point-mass navigation on a square domain. Defaults: domain [0, 10]^2,
/// T_s = 0.05, start (1, 8.5), goal (9, 1.5), and three unit-radius
/// obstacles along the start-goal diagonal.
struct NavConfig {
  double lo = 0.0;
  double hi = 10.0;
  double ts = 0.05;
  Eigen::Vector2d goal{9.0, 1.5};
  Eigen::Vector2d start{1.0, 8.5};
  std::vector<Obstacle> obstacles{
      {Eigen::Vector2d{3.0, 7.0}, 1.0},
      {Eigen::Vector2d{5.5, 4.5}, 1.0},
      {Eigen::Vector2d{7.5, 2.5}, 1.0},
  };

  /// Throws std::invalid_argument describing the first problem found.
  void validate() const;

  bool operator==(const NavConfig&) const = default;
};

/// True iff s is strictly outside every obstacle; the boundary is unsafe.
bool nav_safe(const NavConfig& cfg, const StateVec& s);

/// -|s - goal|^2, independent of the action.
double nav_reward(const NavConfig& cfg, const StateVec& s, const ActionVec& a);

/// s' = clamp(s + T_s a) componentwise to the domain.
StepOutcome nav_step(const NavConfig& cfg, const StateVec& s, const ActionVec& a);

class NavEnv final : public Environment {
 public:
  explicit NavEnv(NavConfig cfg);

  const NavConfig& config() const { return cfg_; }

  Eigen::Index state_dim() const override { return 2; }
  Eigen::Index action_dim() const override { return 2; }
  StateVec initial_state() const override { return cfg_.start; }
  StepOutcome step(const StateVec& s, const ActionVec& a, RngStream& rng) const override;
  bool is_safe(const StateVec& s) const override { return nav_safe(cfg_, s); }
  double reward(const StateVec& s, const ActionVec& a) const override { return nav_reward(cfg_, s, a); }
  std::vector<std::string> state_labels() const override { return {"x", "y"}; }

 private:
  NavConfig cfg_;
};

}  // namespace pdsafe

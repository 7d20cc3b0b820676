#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "pdsafe/nav_env.hpp"

using namespace pdsafe;

namespace {

StateVec p(double x, double y) { return Eigen::Vector2d(x, y); }

}  // namespace

TEST_CASE("nav step") {
  const NavConfig cfg;
  CHECK(nav_step(cfg, p(4.0, 4.0), p(0.0, 0.0)).next_state == p(4.0, 4.0));
  CHECK(nav_step(cfg, p(1.0, 8.5), p(2.0, 0.0)).next_state.isApprox(p(1.1, 8.5)));
  CHECK(nav_step(cfg, p(9.99, 5.0), p(10.0, 0.0)).next_state == p(10.0, 5.0));
  CHECK(nav_step(cfg, p(0.01, 0.01), p(-100.0, -100.0)).next_state == p(0.0, 0.0));

  const StepOutcome out = nav_step(cfg, p(9.0, 2.5), p(40.0, 0.0));
  CHECK(out.reward == doctest::Approx(-1.0));
  CHECK(out.safe == nav_safe(cfg, out.next_state));

  // Step into an obstacle: safe refers to the next state.
  const StepOutcome into = nav_step(cfg, p(3.0, 5.5), p(0.0, 20.0));
  CHECK(into.next_state.isApprox(p(3.0, 6.5)));
  CHECK_FALSE(into.safe);
}

TEST_CASE("nav reward") {
  const NavConfig cfg;
  CHECK(nav_reward(cfg, cfg.goal, p(1.0, 1.0)) == 0.0);
  CHECK(nav_reward(cfg, p(9.0, 2.5), p(0.0, 0.0)) == doctest::Approx(-1.0));
  CHECK(nav_reward(cfg, p(9.0, 2.5), p(0.0, 0.0)) == nav_reward(cfg, p(9.0, 2.5), p(5.0, -3.0)));
  RngStream rng(1);
  for (int i = 0; i < 200; ++i) {
    const StateVec s = p(10.0 * rng.uniform(), 10.0 * rng.uniform());
    CHECK(nav_reward(cfg, s, p(0, 0)) <= 0.0);
    const Eigen::Vector2d dir = (s - cfg.goal).normalized();
    double prev = 0.0;
    for (double r = 0.5; r < 5.0; r += 0.5) {
      const double v = nav_reward(cfg, cfg.goal + r * dir, p(0, 0));
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("nav safety") {
  NavConfig cfg;
  for (const auto& o : cfg.obstacles) {
    CHECK_FALSE(nav_safe(cfg, o.center));
    CHECK_FALSE(nav_safe(cfg, o.center + Eigen::Vector2d(o.radius, 0.0)));
    CHECK(nav_safe(cfg, o.center + Eigen::Vector2d(o.radius + 1e-9, 0.0)));
  }
  CHECK(nav_safe(cfg, cfg.start));
  CHECK(nav_safe(cfg, cfg.goal));
  cfg.obstacles.clear();
  CHECK(nav_safe(cfg, p(3.0, 7.0)));
  CHECK(nav_safe(cfg, p(5.5, 4.5)));
}

TEST_CASE("nav config validation") {
  CHECK_NOTHROW(NavConfig{}.validate());
  NavConfig bad;
  bad.ts = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = NavConfig{};
  bad.start = p(3.0, 7.0);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = NavConfig{};
  bad.goal = p(11.0, 1.0);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = NavConfig{};
  bad.obstacles.push_back({Eigen::Vector2d(2.0, 2.0), -1.0});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(NavEnv{bad}, std::invalid_argument);
}

TEST_CASE("nav env clamps under arbitrary actions") {
  const NavEnv env{NavConfig{}};
  RngStream rng(2);
  StateVec s = env.initial_state();
  for (int t = 0; t < 5000; ++t) {
    const ActionVec a = p(200.0 * rng.normal(), 200.0 * rng.normal());
    const StepOutcome out = env.step(s, a, rng);
    CHECK(out.next_state.minCoeff() >= 0.0);
    CHECK(out.next_state.maxCoeff() <= 10.0);
    CHECK(out.safe == env.is_safe(out.next_state));
    CHECK(out.reward == env.reward(s, a));
    s = out.next_state;
  }
  CHECK(env.state_labels() == std::vector<std::string>{"x", "y"});
  CHECK_THROWS_AS(env.step(p(1, 1), Eigen::VectorXd::Zero(3), rng), std::domain_error);
}

#include <array>
#include <cmath>

#include "doctest.h"
#include "sparsebonus/envs.hpp"
#include "sparsebonus/error.hpp"

using namespace sparsebonus;

TEST_CASE("compute_reward: inclusive tolerance boundary") {
  const std::array<double, 2> origin{0.0, 0.0};
  CHECK(compute_reward(origin, origin, 0.05) == 0.0);
  const std::array<double, 2> far{1.0, 0.0};
  CHECK(compute_reward(far, origin, 0.05) == -1.0);
  // 0.03^2 + 0.04^2 = 0.0025 -> distance 0.05 exactly.
  const std::array<double, 2> edge{0.03, 0.04};
  CHECK(std::sqrt(0.03 * 0.03 + 0.04 * 0.04) <= 0.05);
  CHECK(compute_reward(edge, origin, 0.05) == 0.0);
  const std::array<double, 2> just_out{0.03, 0.0401};
  CHECK(compute_reward(just_out, origin, 0.05) == -1.0);
}

TEST_CASE("compute_reward: dimension mismatch is a contract violation") {
  const std::array<double, 2> a{0.0, 0.0};
  const std::array<double, 3> b{0.0, 0.0, 0.0};
  CHECK_THROWS_AS(compute_reward(a, b, 0.05), ContractViolation);
}

TEST_CASE("make_environment resolves names") {
  CHECK(make_environment("point_reach")->name() == "point_reach");
  CHECK(make_environment("puck_slide")->name() == "puck_slide");
  CHECK_THROWS_AS(make_environment("fetch_slide"), ConfigError);
}

TEST_CASE("reset: goal never initially achieved, deterministic") {
  for (const char* name : {"point_reach", "puck_slide"}) {
    auto env = make_environment(name);
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
      Rng r = Rng::seed_root(seed);
      const auto obs = env->reset(r);
      REQUIRE(obs.achieved_goal.size() == obs.desired_goal.size());
      CHECK(compute_reward(obs.achieved_goal, obs.desired_goal, env->spec().tolerance) == -1.0);
    }
    Rng a = Rng::seed_root(11), b = Rng::seed_root(11);
    CHECK(env->reset(a) == make_environment(name)->reset(b));
  }
}

TEST_CASE("PuckSlide: 1000 resets put every goal outside the effector's reach") {
  PuckSlide env;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng r = Rng::seed_root(seed).derive(7);
    const auto obs = env.reset(r);
    // The effector centre never passes kReachMaxX, so nothing it touches lies
    // beyond kReachMaxX + radius.
    CHECK(obs.desired_goal[0] > PuckSlide::kReachMaxX + physics::kRadius);
    CHECK(obs.desired_goal[0] - env.spec().tolerance > PuckSlide::kReachMaxX + physics::kRadius);
  }
}

TEST_CASE("PuckSlide: zero action leaves the puck at rest") {
  PuckSlide env;
  Rng r = Rng::seed_root(3);
  const auto start = env.reset(r);
  const std::array<double, 2> zero{0.0, 0.0};
  for (int t = 0; t < env.spec().horizon; ++t) {
    const auto step = env.step(zero);
    CHECK(step.base_reward == -1.0);
    CHECK(step.observation.achieved_goal == start.achieved_goal);
    CHECK(step.done == (t + 1 == env.spec().horizon));
  }
  CHECK_THROWS_AS(env.step(zero), ContractViolation);
}

TEST_CASE("PuckSlide: launched puck slides v^2 / (2 mu g)") {
  for (double v : {0.2, 0.5, 0.77, 1.0}) {
    PuckSlide env;
    env.launch_puck(-0.9, 0.0, v, 0.0);
    const std::array<double, 2> zero{0.0, 0.0};
    double x = -0.9;
    double prev_energy = 0.5 * v * v;
    for (int t = 0; t < env.spec().horizon; ++t) {
      const auto s = env.step(zero).observation.state;
      x = s[4];
      const double energy = 0.5 * (s[6] * s[6] + s[7] * s[7]);
      CHECK(energy <= prev_energy);
      prev_energy = energy;
    }
    const double expected = v * v / (2.0 * physics::kFrictionDecel);
    CHECK(std::abs((x + 0.9) - expected) <= 1e-6);
  }
}

TEST_CASE("PuckSlide: a pushed puck leaves the effector's reach") {
  PuckSlide env;
  Rng r = Rng::seed_root(21);
  auto obs = env.reset(r);
  // Drive at the puck, then keep pushing along +x until the wall stops the effector.
  double max_puck_x = obs.achieved_goal[0];
  for (int t = 0; t < env.spec().horizon; ++t) {
    const double dx = obs.state[4] - obs.state[0];
    const double dy = obs.state[5] - obs.state[1];
    const double n = std::hypot(dx, dy);
    const std::array<double, 2> a{n > 0 ? dx / n : 1.0, n > 0 ? dy / n : 0.0};
    obs = env.step(a).observation;
    max_puck_x = std::max(max_puck_x, obs.achieved_goal[0]);
    CHECK(obs.state[0] <= PuckSlide::kReachMaxX);
  }
  CHECK(max_puck_x > PuckSlide::kReachMaxX + 2 * physics::kRadius);
}

TEST_CASE("PointReach: drive to goal then hold -> reward 0 from then on") {
  PointReach env;
  Rng r = Rng::seed_root(8);
  auto obs = env.reset(r);
  bool reached = false;
  int zero_steps = 0, post_reach_steps = 0;
  for (int t = 0; t < env.spec().horizon; ++t) {
    const double dx = obs.desired_goal[0] - obs.achieved_goal[0];
    const double dy = obs.desired_goal[1] - obs.achieved_goal[1];
    const double step_len = physics::kMaxSpeed * physics::kDt;
    const double n = std::hypot(dx, dy);
    const double scale = n > step_len ? 1.0 / n : 1.0 / step_len;
    const std::array<double, 2> a{dx * scale, dy * scale};
    const auto s = env.step(a);
    if (reached) {
      ++post_reach_steps;
      zero_steps += s.base_reward == 0.0;
    }
    reached = reached || s.achieved;
    CHECK((s.base_reward == 0.0) == s.achieved);
    obs = s.observation;
  }
  CHECK(reached);
  CHECK(zero_steps == post_reach_steps);
}

TEST_CASE("physics determinism: same actions from same reset, same trajectory") {
  for (const char* name : {"point_reach", "puck_slide"}) {
    auto run = [&] {
      auto env = make_environment(name);
      Rng reset_rng = Rng::seed_root(4);
      Rng action_rng = Rng::seed_root(5);
      std::vector<Observation> traj{env->reset(reset_rng)};
      double ret = 0.0;
      for (int t = 0; t < env->spec().horizon; ++t) {
        const std::array<double, 2> a{2.0 * action_rng.next_uniform() - 1.0, 2.0 * action_rng.next_uniform() - 1.0};
        const auto s = env->step(a);
        ret += s.base_reward;
        traj.push_back(s.observation);
      }
      CHECK(ret >= -env->spec().horizon);
      CHECK(ret <= 0.0);
      return traj;
    };
    CHECK(run() == run());
  }
}

TEST_CASE("step: actions are clipped to the bound") {
  PointReach a, b;
  Rng r1 = Rng::seed_root(1), r2 = Rng::seed_root(1);
  a.reset(r1);
  b.reset(r2);
  const std::array<double, 2> big{50.0, -50.0};
  const std::array<double, 2> clipped{1.0, -1.0};
  CHECK(a.step(big).observation == b.step(clipped).observation);
  const std::array<double, 3> wrong{0, 0, 0};
  CHECK_THROWS_AS(a.step(wrong), ContractViolation);
}

#include "sparsebonus/envs.hpp"

#include <algorithm>
#include <cmath>

#include "sparsebonus/error.hpp"

namespace sparsebonus {

using namespace physics;

double compute_reward(std::span<const double> achieved_goal,
                      std::span<const double> desired_goal, double tolerance) {
  require(achieved_goal.size() == desired_goal.size(),
          "compute_reward: goal dimension mismatch");
  double sq = 0.0;
  for (std::size_t i = 0; i < achieved_goal.size(); ++i) {
    const double d = achieved_goal[i] - desired_goal[i];
    sq += d * d;
  }
  return std::sqrt(sq) <= tolerance ? 0.0 : -1.0;
}

namespace {

double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.next_uniform();
}

void clip_action(std::span<const double> in, double bound, double out[2]) {
  for (int i = 0; i < 2; ++i) out[i] = std::clamp(in[i], -bound, bound);
}

// Moves a point with constant velocity for one step, stopping components
// that hit [lo, hi].
void move_clamped(double pos[2], double vel[2], const double lo[2], const double hi[2]) {
  for (int i = 0; i < 2; ++i) {
    pos[i] += vel[i] * kDt;
    if (pos[i] < lo[i] || pos[i] > hi[i]) {
      pos[i] = std::clamp(pos[i], lo[i], hi[i]);
      vel[i] = 0.0;
    }
  }
}

double distance(const double a[2], const double b[2]) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

}  // namespace

// PointReach ----------------------------------------------------------------

PointReach::PointReach() {
  spec_.state_dim = 4;
  spec_.goal_dim = 2;
  spec_.action_dim = 2;
}

Observation PointReach::observe() const {
  return Observation{{pos_[0], pos_[1], vel_[0], vel_[1]},
                     {pos_[0], pos_[1]},
                     {goal_[0], goal_[1]}};
}

Observation PointReach::reset(Rng& rng) {
  t_ = 0;
  vel_[0] = vel_[1] = 0.0;
  do {
    for (int i = 0; i < 2; ++i) {
      pos_[i] = uniform_in(rng, -kBoxHalf, kBoxHalf);
      goal_[i] = uniform_in(rng, -kBoxHalf, kBoxHalf);
    }
  } while (distance(pos_, goal_) <= spec_.tolerance);
  return observe();
}

StepResult PointReach::step(std::span<const double> action) {
  require(t_ < spec_.horizon, "step: episode already done");
  require(static_cast<int>(action.size()) == spec_.action_dim,
          "step: action dimension mismatch");
  double a[2];
  clip_action(action, spec_.action_bound, a);
  for (int i = 0; i < 2; ++i) vel_[i] = a[i] * kMaxSpeed;
  const double lo[2] = {-kWorkspace, -kWorkspace};
  const double hi[2] = {kWorkspace, kWorkspace};
  move_clamped(pos_, vel_, lo, hi);
  ++t_;

  StepResult r;
  r.observation = observe();
  r.base_reward = compute_reward(r.observation.achieved_goal, r.observation.desired_goal,
                                 spec_.tolerance);
  r.achieved = r.base_reward == 0.0;
  r.done = t_ == spec_.horizon;
  return r;
}

std::unique_ptr<Environment> PointReach::clone() const {
  return std::make_unique<PointReach>(*this);
}

// PuckSlide -----------------------------------------------------------------

PuckSlide::PuckSlide() {
  spec_.state_dim = 8;
  spec_.goal_dim = 2;
  spec_.action_dim = 2;
}

Observation PuckSlide::observe() const {
  return Observation{{eff_[0], eff_[1], eff_vel_[0], eff_vel_[1], puck_[0], puck_[1],
                      puck_vel_[0], puck_vel_[1]},
                     {puck_[0], puck_[1]},
                     {goal_[0], goal_[1]}};
}

Observation PuckSlide::reset(Rng& rng) {
  t_ = 0;
  eff_vel_[0] = eff_vel_[1] = 0.0;
  puck_vel_[0] = puck_vel_[1] = 0.0;
  eff_[0] = uniform_in(rng, kEffectorStartX[0], kEffectorStartX[1]);
  eff_[1] = uniform_in(rng, -kBandY, kBandY);
  puck_[0] = uniform_in(rng, kPuckStartX[0], kPuckStartX[1]);
  puck_[1] = uniform_in(rng, -kBandY, kBandY);
  goal_[0] = uniform_in(rng, kGoalX[0], kGoalX[1]);
  goal_[1] = uniform_in(rng, -kBandY, kBandY);
  return observe();
}

void PuckSlide::launch_puck(double x, double y, double vx, double vy) {
  t_ = 0;
  eff_[0] = -kWorkspace;
  eff_[1] = -kWorkspace;
  eff_vel_[0] = eff_vel_[1] = 0.0;
  puck_[0] = x;
  puck_[1] = y;
  puck_vel_[0] = vx;
  puck_vel_[1] = vy;
}

StepResult PuckSlide::step(std::span<const double> action) {
  require(t_ < spec_.horizon, "step: episode already done");
  require(static_cast<int>(action.size()) == spec_.action_dim,
          "step: action dimension mismatch");
  double a[2];
  clip_action(action, spec_.action_bound, a);
  for (int i = 0; i < 2; ++i) eff_vel_[i] = a[i] * kMaxSpeed;
  const double eff_lo[2] = {-kWorkspace, -kWorkspace};
  const double eff_hi[2] = {kReachMaxX, kWorkspace};
  move_clamped(eff_, eff_vel_, eff_lo, eff_hi);

  if (distance(eff_, puck_) < 2.0 * kRadius) {
    puck_vel_[0] = eff_vel_[0];
    puck_vel_[1] = eff_vel_[1];
  }

  // Constant deceleration opposing motion, solved exactly over the step.
  const double speed = std::hypot(puck_vel_[0], puck_vel_[1]);
  if (speed > 0.0) {
    const double ux = puck_vel_[0] / speed;
    const double uy = puck_vel_[1] / speed;
    const double stop_time = speed / kFrictionDecel;
    double travelled = 0.0;
    double new_speed = 0.0;
    if (stop_time <= kDt) {
      travelled = speed * speed / (2.0 * kFrictionDecel);
    } else {
      travelled = speed * kDt - 0.5 * kFrictionDecel * kDt * kDt;
      new_speed = speed - kFrictionDecel * kDt;
    }
    puck_[0] += ux * travelled;
    puck_[1] += uy * travelled;
    puck_vel_[0] = ux * new_speed;
    puck_vel_[1] = uy * new_speed;
    for (int i = 0; i < 2; ++i) {
      if (std::abs(puck_[i]) > kWorkspace) {
        puck_[i] = std::clamp(puck_[i], -kWorkspace, kWorkspace);
        puck_vel_[i] = 0.0;
      }
    }
  }
  ++t_;

  StepResult r;
  r.observation = observe();
  r.base_reward = compute_reward(r.observation.achieved_goal, r.observation.desired_goal,
                                 spec_.tolerance);
  r.achieved = r.base_reward == 0.0;
  r.done = t_ == spec_.horizon;
  return r;
}

std::unique_ptr<Environment> PuckSlide::clone() const {
  return std::make_unique<PuckSlide>(*this);
}

std::unique_ptr<Environment> make_environment(std::string_view name) {
  if (name == "point_reach") return std::make_unique<PointReach>();
  if (name == "puck_slide") return std::make_unique<PuckSlide>();
  throw ConfigError("unknown environment '" + std::string(name) + "'");
}

}  // namespace sparsebonus

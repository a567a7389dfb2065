#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparsebonus/rng.hpp"

namespace sparsebonus {

using Vec = std::vector<double>;

struct Observation {
  Vec state;
  Vec achieved_goal;
  Vec desired_goal;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct EnvSpec {
  int state_dim = 0;
  int goal_dim = 0;
  int action_dim = 0;
  double action_bound = 1.0;
  int horizon = 60;
  double tolerance = 0.05;
};

struct StepResult {
  Observation observation;
  double base_reward = -1.0;
  bool achieved = false;
  bool done = false;
};

/// Sparse goal reward: 0 when ||ag - g|| <= tolerance, otherwise -1.
double compute_reward(std::span<const double> achieved_goal,
                      std::span<const double> desired_goal, double tolerance);

/// Constants shared by both toy environments.
namespace physics {
inline constexpr double kDt = 0.05;
inline constexpr double kFrictionDecel = 1.0;  // mu * g_grav
inline constexpr double kMaxSpeed = 1.0;
inline constexpr double kRadius = 0.05;
inline constexpr double kWorkspace = 1.0;  // [-1, 1]^2
}  // namespace physics

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string_view name() const = 0;
  virtual const EnvSpec& spec() const = 0;
  virtual Observation reset(Rng& rng) = 0;
  /// Actions are clipped to [-bound, bound] per component before integration.
  virtual StepResult step(std::span<const double> action) = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;

  int steps_taken() const noexcept { return t_; }

 protected:
  int t_ = 0;
};

/// Point-mass effector that must reach and hold a goal inside its workspace.
///
/// state = (x, y, vx, vy), achieved goal = effector position. Start and goal
/// are drawn from [-0.5, 0.5]^2, rejected until they are further apart than
/// the tolerance.
class PointReach final : public Environment {
 public:
  PointReach();

  std::string_view name() const override { return "point_reach"; }
  const EnvSpec& spec() const override { return spec_; }
  Observation reset(Rng& rng) override;
  StepResult step(std::span<const double> action) override;
  std::unique_ptr<Environment> clone() const override;

  static constexpr double kBoxHalf = 0.5;

 private:
  Observation observe() const;

  EnvSpec spec_;
  double pos_[2] = {0, 0};
  double vel_[2] = {0, 0};
  double goal_[2] = {0, 0};
};

/// Effector confined to x <= kReachMaxX pushes a puck toward a goal it can
/// never touch itself; the puck has to be launched and slide.
///
/// state = (ex, ey, evx, evy, px, py, pvx, pvy), achieved goal = puck
/// position. On overlap the puck takes the effector's velocity; between
/// contacts it decelerates at kFrictionDecel, integrated in closed form so a
/// launched puck slides exactly v^2 / (2 mu g). The puck stops dead on walls.
class PuckSlide final : public Environment {
 public:
  PuckSlide();

  std::string_view name() const override { return "puck_slide"; }
  const EnvSpec& spec() const override { return spec_; }
  Observation reset(Rng& rng) override;
  StepResult step(std::span<const double> action) override;
  std::unique_ptr<Environment> clone() const override;

  static constexpr double kReachMaxX = 0.0;
  static constexpr double kEffectorStartX[2] = {-0.9, -0.7};
  static constexpr double kPuckStartX[2] = {-0.5, -0.2};
  static constexpr double kGoalX[2] = {0.15, 0.45};
  static constexpr double kBandY = 0.3;

  /// Places the puck with a given velocity and parks the effector far away.
  /// Used to check the friction law in isolation.
  void launch_puck(double x, double y, double vx, double vy);

 private:
  Observation observe() const;

  EnvSpec spec_;
  double eff_[2] = {0, 0};
  double eff_vel_[2] = {0, 0};
  double puck_[2] = {0, 0};
  double puck_vel_[2] = {0, 0};
  double goal_[2] = {0, 0};
};

/// "point_reach" or "puck_slide"; anything else is a ConfigError.
std::unique_ptr<Environment> make_environment(std::string_view name);

}  // namespace sparsebonus

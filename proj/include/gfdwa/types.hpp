#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Core>

namespace gfdwa {

using Vec2 = Eigen::Vector2d;

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) {
    a += two_pi;
  } else if (a > std::numbers::pi) {
    a -= two_pi;
  }
  return a;
}

/// Planar pose of a unicycle robot. theta is kept in (-pi, pi].
struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
  bool operator==(const RobotState&) const = default;
};

/// Linear speed [m/s] and angular velocity [rad/s].
struct ControlInput {
  double v = 0.0;
  double omega = 0.0;

  bool operator==(const ControlInput&) const = default;
};

using Polyline = std::vector<Vec2>;

}  // namespace gfdwa

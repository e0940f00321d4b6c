#include "sphbot/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "sphbot/errors.hpp"

namespace sphbot {

void check_gimbal(double theta) {
  if (!std::isfinite(theta) ||
      std::abs(theta) >= std::numbers::pi / 2.0 - kGimbalMargin) {
    throw GimbalError("gimbal guard: |theta| = " + std::to_string(std::abs(theta)) +
                      " rad is within " + std::to_string(kGimbalMargin) +
                      " rad of pi/2");
  }
}

Mat3 rot_axis(Axis axis, double alpha) {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  Mat3 r;
  switch (axis) {
    case Axis::X:
      r << 1, 0, 0,
           0, c, -s,
           0, s, c;
      break;
    case Axis::Y:
      r << c, 0, s,
           0, 1, 0,
           -s, 0, c;
      break;
    case Axis::Z:
      r << c, -s, 0,
           s, c, 0,
           0, 0, 1;
      break;
  }
  return r;
}

FrameRotations frame_rotations(const EulerState& e) {
  const Mat3 yoke = rot_axis(Axis::Y, e.phi) * rot_axis(Axis::X, e.theta);
  return FrameRotations{
      .yoke = yoke,
      .pendulum = yoke * rot_axis(Axis::X, e.beta),
      .hull = yoke * rot_axis(Axis::Z, e.psi),
  };
}

Vec3 omega_yoke(const EulerState& e) {
  return {e.thetad, e.phid * std::cos(e.theta), -e.phid * std::sin(e.theta)};
}

Vec3 omega_pendulum(const EulerState& e) {
  const double alpha = e.beta + e.theta;
  return {e.betad + e.thetad, e.phid * std::cos(alpha), -e.phid * std::sin(alpha)};
}

Vec3 omega_hull(const EulerState& e) {
  const double cpsi = std::cos(e.psi);
  const double spsi = std::sin(e.psi);
  const double cth = std::cos(e.theta);
  const double sth = std::sin(e.theta);
  return {e.thetad * cpsi + e.phid * cth * spsi,
          e.phid * cpsi * cth - e.thetad * spsi,
          e.psid - e.phid * sth};
}

PointState pendulum_com_state(const EulerState& e, double X, double Z, double Xd,
                              double Zd, double sphere_radius,
                              double pendulum_offset) {
  const Mat3 r_gp = frame_rotations(e).pendulum;
  const Vec3 offset = r_gp * Vec3(0.0, -pendulum_offset, 0.0);
  const Vec3 omega_global = r_gp * omega_pendulum(e);
  return PointState{
      .position = Vec3(X, sphere_radius, Z) + offset,
      .velocity = Vec3(Xd, 0.0, Zd) + omega_global.cross(offset),
  };
}

}  // namespace sphbot

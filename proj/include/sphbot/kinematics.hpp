#pragma once

#include <Eigen/Core>

namespace sphbot {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

enum class Axis { X, Y, Z };

/// Orientation of the robot: YXZ Euler angles of the hull (phi, theta, psi)
/// plus the pendulum angle beta measured from the yoke, with their rates.
///
/// Global frame: Y is vertical, X-Z is the ground plane. Angles are kept
/// unwrapped so heading accumulates across full turns.
struct EulerState {
  double phi = 0.0;    ///< heading (precession) about global Y
  double theta = 0.0;  ///< lateral tilt (wobble) about the yoke x-axis
  double psi = 0.0;    ///< forward spin about the yoke z-axis
  double beta = 0.0;   ///< pendulum angle relative to the yoke
  double phid = 0.0;
  double thetad = 0.0;
  double psid = 0.0;
  double betad = 0.0;
};

/// Frames are rejected once |theta| reaches pi/2 minus this margin.
inline constexpr double kGimbalMargin = 1e-3;

/// Throws GimbalError when theta is inside the gimbal-lock margin or not finite.
void check_gimbal(double theta);

/// Right-handed rotation by `alpha` about a coordinate axis.
Mat3 rot_axis(Axis axis, double alpha);

struct FrameRotations {
  Mat3 yoke;      ///< R_Y(phi) R_X(theta)
  Mat3 pendulum;  ///< R_Y(phi) R_X(theta) R_X(beta)
  Mat3 hull;      ///< R_Y(phi) R_X(theta) R_Z(psi)
};

/// Rotations taking yoke, pendulum, and hull frame vectors into the global frame.
FrameRotations frame_rotations(const EulerState& e);

// Body angular velocities, each expressed in its own body frame.
Vec3 omega_yoke(const EulerState& e);
Vec3 omega_pendulum(const EulerState& e);
Vec3 omega_hull(const EulerState& e);

struct PointState {
  Vec3 position;
  Vec3 velocity;
};

/// Global position and velocity of the pendulum's center of mass, which sits
/// `pendulum_offset` below the hull center along the pendulum's -y axis.
/// The hull center is at (X, sphere_radius, Z).
PointState pendulum_com_state(const EulerState& e, double X, double Z, double Xd,
                              double Zd, double sphere_radius,
                              double pendulum_offset);

}  // namespace sphbot

#pragma once

#include <Eigen/Core>

#include "sphbot/kinematics.hpp"

namespace sphbot {

/// Physical parameters of the hull / yoke / pendulum assembly (SI units).
struct RobotParams {
  double m_hull = 1.5;
  double m_yoke = 1.0;
  double m_pendulum = 0.5;
  double sphere_radius = 0.15;
  double pendulum_offset = 0.10;  ///< distance of the pendulum COM from the hull center
  double gravity = 9.81;

  /// Reference desk-scale robot used by tests and the bundled scenarios.
  static RobotParams reference() { return {}; }

  /// Rotational inertia of the pendulum about its swing axis, m_P * R_p^2.
  double pendulum_swing_inertia() const {
    return m_pendulum * pendulum_offset * pendulum_offset;
  }

  /// Throws ValidationError naming the offending field. With `beta_frozen`
  /// the pendulum may be massless or sit at the center.
  void validate(bool beta_frozen = false) const;
};

/// Body-frame inertia tensors (all diagonal).
struct InertiaSet {
  Mat3 hull;
  Mat3 yoke;
  Mat3 pendulum;
};

InertiaSet inertia_set(const RobotParams& p);

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Generalized coordinates and rates, ordered (X, Z, phi, theta, psi, beta).
using GenCoords = Vec6;
using GenVel = Vec6;

namespace gen {
enum : Eigen::Index { X = 0, Z, Phi, Theta, Psi, Beta };
}  // namespace gen

/// Simulation state ordered (phi, theta, psi, X, Z, phid, thetad, psid, Xd,
/// Zd, beta, betad).
using StateVector = Eigen::Matrix<double, 12, 1>;

namespace st {
enum : Eigen::Index {
  Phi = 0, Theta, Psi, X, Z, Phid, Thetad, Psid, Xd, Zd, Beta, Betad
};
}  // namespace st

struct GeneralizedState {
  GenCoords q;
  GenVel qd;
};

GeneralizedState to_generalized(const StateVector& x);
StateVector to_state_vector(const GenCoords& q, const GenVel& qd);
EulerState euler_state(const GenCoords& q, const GenVel& qd);

/// Total kinetic energy, evaluated body by body from the kinematic velocities.
double kinetic_energy(const RobotParams& p, const GenCoords& q, const GenVel& qd);

/// Gravitational potential with the datum at the hull center.
double potential_energy(const RobotParams& p, const GenCoords& q);

/// Symmetric M(q) with K = 1/2 qd^T M qd (closed form).
Mat6 mass_matrix(const RobotParams& p, const GenCoords& q);

/// Velocity-product and gravity terms: d/dt(dL/dqd) - dL/dq = M qdd + b.
Vec6 bias_vector(const RobotParams& p, const GenCoords& q, const GenVel& qd);

/// Rolling-without-slipping constraint A(q) qd = 0 and its time derivative.
struct ConstraintRows {
  Eigen::Matrix<double, 2, 6> A;
  Eigen::Matrix<double, 2, 6> Adot;
};

ConstraintRows constraint_rows(const GenCoords& q, const GenVel& qd,
                               const RobotParams& p);

/// Drive torque on the hull spin and pendulum torque, as generalized forces.
Vec6 generalized_force(double hull_torque, double pendulum_torque);

enum class BetaMode { Free, Frozen };

struct EomSolution {
  Vec6 qdd;
  Eigen::Vector2d lambda;  ///< rolling contact multipliers (N)
  double beta_hold_torque = 0.0;  ///< multiplier of the beta lock; zero unless frozen
  double dynamics_residual = 0.0;    ///< |M qdd + b - Q - A^T lambda|
  double constraint_residual = 0.0;  ///< |A qdd + Adot qd|
};

/// Solves the saddle system [M A^T; A 0][qdd; -lambda] = [Q - b; -Adot qd].
/// Throws SingularSystemError when the system's reciprocal condition estimate
/// is below `kMinRcond`, GimbalError on a degenerate tilt.
EomSolution solve_accelerations(const RobotParams& p, const GenCoords& q,
                                const GenVel& qd, const Vec6& Q,
                                BetaMode beta_mode = BetaMode::Free);

inline constexpr double kMinRcond = 1e-14;

/// Time derivative of the simulation state under the given joint torques.
StateVector state_derivative(const StateVector& x, double hull_torque,
                             double pendulum_torque, const RobotParams& p,
                             BetaMode beta_mode = BetaMode::Free,
                             EomSolution* solution = nullptr);

/// Rolling constraint residuals (r_x, r_z) in m/s.
Eigen::Vector2d constraint_residual(const StateVector& x, const RobotParams& p);

/// (Xd, Zd) implied by rolling without slipping at the given orientation rates.
Eigen::Vector2d rolling_velocity(const StateVector& x, const RobotParams& p);

}  // namespace sphbot

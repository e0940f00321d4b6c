#pragma once

// Numerical reference computations used only by the tests. None of them touch
// the closed-form mass matrix or bias vector.

#include <functional>

#include <Eigen/Core>

#include "sphbot/dynamics.hpp"
#include "sphbot/kinematics.hpp"

namespace sphbot::testing {

inline constexpr double kFdStep = 1e-6;

inline Vec3 unskew(const Mat3& S) {
  return Vec3(0.5 * (S(2, 1) - S(1, 2)), 0.5 * (S(0, 2) - S(2, 0)),
              0.5 * (S(1, 0) - S(0, 1)));
}

/// Angles advanced by dt along their rates.
inline EulerState advance_angles(const EulerState& e, double dt) {
  EulerState out = e;
  out.phi += dt * e.phid;
  out.theta += dt * e.thetad;
  out.psi += dt * e.psid;
  out.beta += dt * e.betad;
  return out;
}

/// Body-frame angular velocity from R^T dR/dt, with dR/dt by central difference.
inline Vec3 fd_body_omega(const std::function<Mat3(const EulerState&)>& rot,
                          const EulerState& e, double h = kFdStep) {
  const Mat3 Rdot = (rot(advance_angles(e, h)) - rot(advance_angles(e, -h))) / (2.0 * h);
  return unskew(rot(e).transpose() * Rdot);
}

/// Lagrangian L = K - V built from the body-by-body kinetic energy.
inline double lagrangian(const RobotParams& p, const GenCoords& q, const GenVel& qd) {
  return kinetic_energy(p, q, qd) - potential_energy(p, q);
}

/// dL/dqd. K is quadratic in qd, so a central difference is exact for any
/// step; a unit step keeps rounding small.
inline Vec6 fd_momentum(const RobotParams& p, const GenCoords& q, const GenVel& qd) {
  Vec6 out;
  for (int i = 0; i < 6; ++i) {
    GenVel up = qd, dn = qd;
    up(i) += 1.0;
    dn(i) -= 1.0;
    out(i) = 0.5 * (lagrangian(p, q, up) - lagrangian(p, q, dn));
  }
  return out;
}

/// d/dt(dL/dqd) - dL/dq along q(t) = q + t qd + t^2/2 qdd.
inline Vec6 fd_euler_lagrange(const RobotParams& p, const GenCoords& q,
                              const GenVel& qd, const Vec6& qdd, double h = kFdStep) {
  auto at = [&](double t) {
    return fd_momentum(p, q + t * qd + 0.5 * t * t * qdd, qd + t * qdd);
  };
  const Vec6 dpdt = (at(h) - at(-h)) / (2.0 * h);
  Vec6 dLdq;
  for (int i = 0; i < 6; ++i) {
    GenCoords up = q, dn = q;
    up(i) += h;
    dn(i) -= h;
    dLdq(i) = (lagrangian(p, up, qd) - lagrangian(p, dn, qd)) / (2.0 * h);
  }
  return dpdt - dLdq;
}

/// Mass matrix recovered from K by polarization:
/// M_ij = K(e_i + e_j) - K(e_i) - K(e_j), M_ii = 2 K(e_i).
inline Mat6 polarized_mass_matrix(const RobotParams& p, const GenCoords& q) {
  auto K = [&](const GenVel& v) { return kinetic_energy(p, q, v); };
  Mat6 M;
  for (int i = 0; i < 6; ++i) {
    const GenVel ei = GenVel::Unit(i);
    M(i, i) = 2.0 * K(ei);
    for (int j = 0; j < i; ++j) {
      const GenVel ej = GenVel::Unit(j);
      M(i, j) = M(j, i) = K(ei + ej) - K(ei) - K(ej);
    }
  }
  return M;
}

/// dA/dt along the flow by central difference.
inline Eigen::Matrix<double, 2, 6> fd_constraint_rate(const GenCoords& q, const GenVel& qd,
                                                      const RobotParams& p,
                                                      double h = kFdStep) {
  return (constraint_rows(q + h * qd, qd, p).A - constraint_rows(q - h * qd, qd, p).A) /
         (2.0 * h);
}

/// Pendulum COM velocity by central difference of its position.
inline Vec3 fd_pendulum_velocity(const EulerState& e, double X, double Z, double Xd,
                                 double Zd, double Rs, double Rp, double h = kFdStep) {
  const Vec3 up =
      pendulum_com_state(advance_angles(e, h), X + h * Xd, Z + h * Zd, Xd, Zd, Rs, Rp)
          .position;
  const Vec3 dn =
      pendulum_com_state(advance_angles(e, -h), X - h * Xd, Z - h * Zd, Xd, Zd, Rs, Rp)
          .position;
  return (up - dn) / (2.0 * h);
}

}  // namespace sphbot::testing

#pragma once

#include <cstdint>
#include <random>

#include "sphbot/dynamics.hpp"
#include "sphbot/kinematics.hpp"

namespace sphbot::testing {

/// Seeded source of random robot states and parameter sets.
class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }

  /// Tilt stays well inside the gimbal guard.
  EulerState euler() {
    EulerState e;
    e.phi = uniform(-3.0, 3.0);
    e.theta = uniform(-1.2, 1.2);
    e.psi = uniform(-3.0, 3.0);
    e.beta = uniform(-1.5, 1.5);
    e.phid = uniform(-2.0, 2.0);
    e.thetad = uniform(-2.0, 2.0);
    e.psid = uniform(-3.0, 3.0);
    e.betad = uniform(-3.0, 3.0);
    return e;
  }

  GenCoords coords() {
    GenCoords q;
    q << uniform(-5.0, 5.0), uniform(-5.0, 5.0), uniform(-3.0, 3.0),
        uniform(-1.2, 1.2), uniform(-3.0, 3.0), uniform(-1.5, 1.5);
    return q;
  }

  GenVel rates(double scale = 2.0) {
    GenVel v;
    for (int i = 0; i < 6; ++i) v(i) = uniform(-scale, scale);
    return v;
  }

  /// Rates with (Xd, Zd) chosen to satisfy the rolling constraint at q.
  GenVel feasible_rates(const GenCoords& q, const RobotParams& p) {
    GenVel v = rates();
    const auto rows = constraint_rows(q, v, p);
    v(gen::X) -= rows.A.row(0).dot(v);
    v(gen::Z) -= rows.A.row(1).dot(v);
    return v;
  }

  /// Reference masses scaled independently by up to +-fraction, radii by
  /// half as much so the pendulum stays inside the hull.
  RobotParams params(double fraction) {
    RobotParams p = RobotParams::reference();
    p.m_hull *= 1.0 + uniform(-fraction, fraction);
    p.m_yoke *= 1.0 + uniform(-fraction, fraction);
    p.m_pendulum *= 1.0 + uniform(-fraction, fraction);
    p.sphere_radius *= 1.0 + uniform(-0.5 * fraction, 0.5 * fraction);
    p.pendulum_offset *= 1.0 + uniform(-0.5 * fraction, 0.5 * fraction);
    return p;
  }

private:
  std::mt19937_64 rng_;
};

}  // namespace sphbot::testing

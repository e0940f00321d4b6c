#include "sphbot/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/LU>

#include "sphbot/errors.hpp"

namespace sphbot {

namespace {

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    std::ostringstream msg;
    msg << "parameter " << name << " must be finite and > 0 (got " << value << ")";
    throw ValidationError(msg.str());
  }
}

void require_non_negative(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    std::ostringstream msg;
    msg << "parameter " << name << " must be finite and >= 0 (got " << value << ")";
    throw ValidationError(msg.str());
  }
}

// Scalar inertia groups that appear in the mass matrix.
struct InertiaGroups {
  double total_mass;
  double hull;           // (2/3) m_H R_s^2, isotropic
  double yoke;           // (1/4) m_Y R_s^2
  double pendulum;       // (4/3) m_P R_p^2: swing inertia about the hull center
  double pendulum_moment;  // m_P R_p
};

InertiaGroups inertia_groups(const RobotParams& p) {
  const double rs2 = p.sphere_radius * p.sphere_radius;
  return InertiaGroups{
      .total_mass = p.m_hull + p.m_yoke + p.m_pendulum,
      .hull = 2.0 / 3.0 * p.m_hull * rs2,
      .yoke = 0.25 * p.m_yoke * rs2,
      .pendulum = 4.0 / 3.0 * p.pendulum_swing_inertia(),
      .pendulum_moment = p.m_pendulum * p.pendulum_offset,
  };
}

void symmetrize_upper(Mat6& m) {
  m.triangularView<Eigen::StrictlyLower>() = m.transpose();
}

// Partial derivatives of the mass matrix w.r.t. phi, theta and beta. M does
// not depend on X, Z or psi.
struct MassMatrixPartials {
  Mat6 d_phi;
  Mat6 d_theta;
  Mat6 d_beta;
};

MassMatrixPartials mass_matrix_partials(const RobotParams& p, const GenCoords& q) {
  using namespace gen;
  const InertiaGroups in = inertia_groups(p);
  const double c = in.pendulum_moment;
  const double alpha = q(Theta) + q(Beta);
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  const double sphi = std::sin(q(Phi)), cphi = std::cos(q(Phi));
  const double sth = std::sin(q(Theta)), cth = std::cos(q(Theta));

  Mat6 d_alpha = Mat6::Zero();
  d_alpha(X, Phi) = -c * ca * cphi;
  d_alpha(X, Theta) = d_alpha(X, Beta) = c * sa * sphi;
  d_alpha(Z, Phi) = c * ca * sphi;
  d_alpha(Z, Theta) = d_alpha(Z, Beta) = c * sa * cphi;
  d_alpha(Phi, Phi) = 2.0 * in.pendulum * sa * ca;
  symmetrize_upper(d_alpha);

  Mat6 d_phi = Mat6::Zero();
  d_phi(X, Phi) = c * sa * sphi;
  d_phi(X, Theta) = d_phi(X, Beta) = -c * ca * cphi;
  d_phi(Z, Phi) = c * sa * cphi;
  d_phi(Z, Theta) = d_phi(Z, Beta) = c * ca * sphi;
  symmetrize_upper(d_phi);

  Mat6 d_theta = d_alpha;
  d_theta(Phi, Phi) += -2.0 * in.yoke * cth * sth;
  d_theta(Phi, Psi) = d_theta(Psi, Phi) = -in.hull * cth;

  return MassMatrixPartials{.d_phi = d_phi, .d_theta = d_theta, .d_beta = d_alpha};
}

}  // namespace

void RobotParams::validate(bool beta_frozen) const {
  require_positive(m_hull, "m_H");
  require_positive(m_yoke, "m_Y");
  require_positive(sphere_radius, "R_s");
  require_positive(gravity, "g");
  require_non_negative(m_pendulum, "m_P");
  require_non_negative(pendulum_offset, "R_p");
  if (pendulum_offset >= sphere_radius) {
    throw ValidationError("parameter R_p must be smaller than R_s (pendulum inside hull)");
  }
  if (!beta_frozen && pendulum_swing_inertia() <= 0.0) {
    throw ValidationError(
        "parameter m_P*R_p^2 is zero: the pendulum angle beta has no inertia; "
        "freeze beta or give the pendulum mass and offset");
  }
}

InertiaSet inertia_set(const RobotParams& p) {
  const double rs2 = p.sphere_radius * p.sphere_radius;
  const double rp2 = p.pendulum_offset * p.pendulum_offset;
  return InertiaSet{
      .hull = Vec3::Constant(2.0 / 3.0 * p.m_hull * rs2).asDiagonal(),
      .yoke = (0.25 * Vec3(p.m_yoke * rs2, 2.0 * p.m_yoke * rs2, p.m_yoke * rs2))
                  .asDiagonal(),
      .pendulum = (1.0 / 3.0 * Vec3(p.m_pendulum * rp2, 0.0, p.m_pendulum * rp2))
                      .asDiagonal(),
  };
}

GeneralizedState to_generalized(const StateVector& x) {
  GenCoords q;
  GenVel qd;
  q << x(st::X), x(st::Z), x(st::Phi), x(st::Theta), x(st::Psi), x(st::Beta);
  qd << x(st::Xd), x(st::Zd), x(st::Phid), x(st::Thetad), x(st::Psid), x(st::Betad);
  return {q, qd};
}

StateVector to_state_vector(const GenCoords& q, const GenVel& qd) {
  using namespace gen;
  StateVector x;
  x << q(Phi), q(Theta), q(Psi), q(X), q(Z), qd(Phi), qd(Theta), qd(Psi), qd(X),
      qd(Z), q(Beta), qd(Beta);
  return x;
}

EulerState euler_state(const GenCoords& q, const GenVel& qd) {
  using namespace gen;
  return EulerState{.phi = q(Phi),
                    .theta = q(Theta),
                    .psi = q(Psi),
                    .beta = q(Beta),
                    .phid = qd(Phi),
                    .thetad = qd(Theta),
                    .psid = qd(Psi),
                    .betad = qd(Beta)};
}

double kinetic_energy(const RobotParams& p, const GenCoords& q, const GenVel& qd) {
  using namespace gen;
  check_gimbal(q(Theta));
  const EulerState e = euler_state(q, qd);
  const InertiaSet inertia = inertia_set(p);

  const Vec3 v_center(qd(X), 0.0, qd(Z));
  const Vec3 v_pendulum =
      pendulum_com_state(e, q(X), q(Z), qd(X), qd(Z), p.sphere_radius,
                         p.pendulum_offset)
          .velocity;
  const Vec3 w_hull = omega_hull(e);
  const Vec3 w_yoke = omega_yoke(e);
  const Vec3 w_pendulum = omega_pendulum(e);

  const double translational = (p.m_hull + p.m_yoke) * v_center.squaredNorm() +
                               p.m_pendulum * v_pendulum.squaredNorm();
  const double rotational = w_hull.dot(inertia.hull * w_hull) +
                            w_yoke.dot(inertia.yoke * w_yoke) +
                            w_pendulum.dot(inertia.pendulum * w_pendulum);
  return 0.5 * (translational + rotational);
}

double potential_energy(const RobotParams& p, const GenCoords& q) {
  const EulerState e = euler_state(q, GenVel::Zero());
  const Vec3 pendulum_drop =
      frame_rotations(e).pendulum * Vec3(0.0, -p.pendulum_offset, 0.0);
  // The yoke's center of mass is at the datum, so it contributes nothing.
  const double yoke_height = 0.0;
  return p.m_pendulum * p.gravity * pendulum_drop.y() +
         p.m_yoke * p.gravity * yoke_height;
}

Mat6 mass_matrix(const RobotParams& p, const GenCoords& q) {
  using namespace gen;
  check_gimbal(q(Theta));
  const InertiaGroups in = inertia_groups(p);
  const double c = in.pendulum_moment;
  const double alpha = q(Theta) + q(Beta);
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  const double sphi = std::sin(q(Phi)), cphi = std::cos(q(Phi));
  const double sth = std::sin(q(Theta)), cth = std::cos(q(Theta));

  Mat6 m = Mat6::Zero();
  m(X, X) = in.total_mass;
  m(Z, Z) = in.total_mass;
  m(X, Phi) = -c * sa * cphi;
  m(X, Theta) = m(X, Beta) = -c * ca * sphi;
  m(Z, Phi) = c * sa * sphi;
  m(Z, Theta) = m(Z, Beta) = -c * ca * cphi;
  m(Phi, Phi) = in.hull + in.yoke * (1.0 + cth * cth) + in.pendulum * sa * sa;
  m(Phi, Psi) = -in.hull * sth;
  m(Theta, Theta) = in.hull + in.yoke + in.pendulum;
  m(Theta, Beta) = in.pendulum;
  m(Psi, Psi) = in.hull;
  m(Beta, Beta) = in.pendulum;
  symmetrize_upper(m);
  return m;
}

Vec6 bias_vector(const RobotParams& p, const GenCoords& q, const GenVel& qd) {
  using namespace gen;
  check_gimbal(q(Theta));
  const MassMatrixPartials dm = mass_matrix_partials(p, q);

  // b_i = sum_k (dM/dq_k qd)_i qd_k - 1/2 qd^T (dM/dq_i) qd + dV/dq_i
  const Vec6 mdot_qd =
      dm.d_phi * qd * qd(Phi) + dm.d_theta * qd * qd(Theta) + dm.d_beta * qd * qd(Beta);
  Vec6 grad_k = Vec6::Zero();
  grad_k(Phi) = 0.5 * qd.dot(dm.d_phi * qd);
  grad_k(Theta) = 0.5 * qd.dot(dm.d_theta * qd);
  grad_k(Beta) = 0.5 * qd.dot(dm.d_beta * qd);

  Vec6 grad_v = Vec6::Zero();
  const double gravity_torque = p.m_pendulum * p.gravity * p.pendulum_offset *
                                std::sin(q(Theta) + q(Beta));
  grad_v(Theta) = gravity_torque;
  grad_v(Beta) = gravity_torque;

  return mdot_qd - grad_k + grad_v;
}

ConstraintRows constraint_rows(const GenCoords& q, const GenVel& qd,
                               const RobotParams& p) {
  using namespace gen;
  const double rs = p.sphere_radius;
  const double sphi = std::sin(q(Phi)), cphi = std::cos(q(Phi));
  const double sth = std::sin(q(Theta)), cth = std::cos(q(Theta));
  const double phid = qd(Phi), thetad = qd(Theta);

  ConstraintRows rows;
  rows.A << 1, 0, 0, -rs * sphi, rs * cphi * cth, 0,
            0, 1, 0, -rs * cphi, -rs * sphi * cth, 0;
  rows.Adot << 0, 0, 0, -rs * cphi * phid, -rs * (sphi * cth * phid + cphi * sth * thetad), 0,
               0, 0, 0, rs * sphi * phid, -rs * (cphi * cth * phid - sphi * sth * thetad), 0;
  return rows;
}

Vec6 generalized_force(double hull_torque, double pendulum_torque) {
  Vec6 f = Vec6::Zero();
  f(gen::Psi) = hull_torque;
  f(gen::Beta) = pendulum_torque;
  return f;
}

namespace {

template <int N>
EomSolution solve_saddle(const Mat6& m, const Vec6& b, const Vec6& Q,
                         const Eigen::Matrix<double, N - 6, 6>& a,
                         const Eigen::Matrix<double, N - 6, 1>& a_rhs) {
  using Square = Eigen::Matrix<double, N, N>;
  using Vector = Eigen::Matrix<double, N, 1>;
  constexpr int kRows = N - 6;

  Square kkt = Square::Zero();
  kkt.template topLeftCorner<6, 6>() = m;
  kkt.template topRightCorner<6, kRows>() = a.transpose();
  kkt.template bottomLeftCorner<kRows, 6>() = a;

  Vector rhs;
  rhs.template head<6>() = Q - b;
  rhs.template tail<kRows>() = a_rhs;

  const Eigen::PartialPivLU<Square> lu(kkt);
  const double rcond = lu.rcond();
  if (!(rcond >= kMinRcond)) {
    std::ostringstream msg;
    msg << "singular saddle-point system (reciprocal condition estimate " << rcond << ")";
    throw SingularSystemError(msg.str(), rcond);
  }
  Vector sol = lu.solve(rhs);
  sol += lu.solve(rhs - kkt * sol);  // one step of iterative refinement

  EomSolution out;
  out.qdd = sol.template head<6>();
  const Eigen::Matrix<double, kRows, 1> multipliers = -sol.template tail<kRows>();
  out.lambda = multipliers.template head<2>();
  if constexpr (kRows > 2) out.beta_hold_torque = multipliers(2);
  out.dynamics_residual = (m * out.qdd + b - Q - a.transpose() * multipliers).norm();
  out.constraint_residual = (a * out.qdd - a_rhs).norm();
  return out;
}

}  // namespace

EomSolution solve_accelerations(const RobotParams& p, const GenCoords& q,
                                const GenVel& qd, const Vec6& Q, BetaMode beta_mode) {
  const Mat6 m = mass_matrix(p, q);
  const Vec6 b = bias_vector(p, q, qd);
  const ConstraintRows rows = constraint_rows(q, qd, p);
  const Eigen::Vector2d a_rhs = -rows.Adot * qd;

  if (beta_mode == BetaMode::Free) {
    return solve_saddle<8>(m, b, Q, rows.A, a_rhs);
  }
  Eigen::Matrix<double, 3, 6> a;
  a.topRows<2>() = rows.A;
  a.row(2) = Vec6::Unit(gen::Beta).transpose();
  const Eigen::Vector3d rhs(a_rhs(0), a_rhs(1), 0.0);
  return solve_saddle<9>(m, b, Q, a, rhs);
}

StateVector state_derivative(const StateVector& x, double hull_torque,
                             double pendulum_torque, const RobotParams& p,
                             BetaMode beta_mode, EomSolution* solution) {
  if (!x.allFinite()) throw NumericalError("state_derivative: non-finite state");
  check_gimbal(x(st::Theta));
  const GeneralizedState g = to_generalized(x);
  const EomSolution eom = solve_accelerations(
      p, g.q, g.qd, generalized_force(hull_torque, pendulum_torque), beta_mode);
  if (solution != nullptr) *solution = eom;
  return to_state_vector(g.qd, eom.qdd);
}

Eigen::Vector2d rolling_velocity(const StateVector& x, const RobotParams& p) {
  const double sphi = std::sin(x(st::Phi)), cphi = std::cos(x(st::Phi));
  const double cth = std::cos(x(st::Theta));
  const double thetad = x(st::Thetad), psid = x(st::Psid);
  return {p.sphere_radius * (thetad * sphi - psid * cphi * cth),
          p.sphere_radius * (thetad * cphi + psid * sphi * cth)};
}

Eigen::Vector2d constraint_residual(const StateVector& x, const RobotParams& p) {
  return Eigen::Vector2d(x(st::Xd), x(st::Zd)) - rolling_velocity(x, p);
}

}  // namespace sphbot

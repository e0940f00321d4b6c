#include "sphbot/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "sphbot/errors.hpp"

namespace sphbot {

namespace {

// Sample times closer than this to a breakpoint are taken to coincide with it.
constexpr double kEventSnap = 1e-9;

// The 13th entry of the integrated vector accumulates the motors' work.
constexpr Eigen::Index kWorkIndex = 12;

struct Torques {
  double hull = 0.0;
  double pendulum = 0.0;
};

Torques controller_torques(const StateVector& x, const Setpoint& sp,
                           const SimulationSetup& s) {
  Torques tq;
  tq.hull = speed_torque(x, sp.psid_ref, s.controllers.speed);
  if (s.beta_mode == BetaMode::Free) {
    tq.pendulum = pendulum_torque(x, sp.beta_ref, s.controllers.pendulum, s.params);
  }
  return tq;
}

void validate_setup(const SimulationSetup& s) {
  const bool frozen = s.beta_mode == BetaMode::Frozen;
  s.params.validate(frozen);
  s.controllers.pendulum.validate();
  s.controllers.speed.validate();
  s.integrator.validate();
  if (!std::isfinite(s.t_end) || s.t_end <= 0.0) {
    throw ValidationError("t_end must be finite and > 0");
  }
  if (!s.initial_state.allFinite()) throw ValidationError("initial state is not finite");
  try {
    check_gimbal(s.initial_state(st::Theta));
  } catch (const GimbalError& e) {
    throw ValidationError(std::string("initial state: ") + e.what());
  }
  if (frozen && s.initial_state(st::Betad) != 0.0) {
    throw ValidationError("initial betad must be 0 when beta is frozen");
  }
}

}  // namespace

StateVector project_velocities(const StateVector& x, const RobotParams& p) {
  StateVector out = x;
  const Eigen::Vector2d v = rolling_velocity(x, p);
  out(st::Xd) = v(0);
  out(st::Zd) = v(1);
  return out;
}

SimulationResult integrate(const SimulationSetup& s) {
  validate_setup(s);
  const RobotParams& p = s.params;
  const IntegratorConfig& cfg = s.integrator;

  StateVector x0 = s.initial_state;
  if (cfg.projection) x0 = project_velocities(x0, p);
  if (constraint_residual(x0, p).cwiseAbs().maxCoeff() > kInitialFeasibilityTol) {
    throw ValidationError(
        "initial state violates the rolling constraint; set Xd, Zd consistently or "
        "enable projection");
  }

  SimulationResult result;
  SimulationDiagnostics& diag = result.diagnostics;
  const auto& segments = s.schedule.segments();
  std::size_t segment = 0;
  Setpoint active = segments.front().setpoint;

  const OdeFunction rhs = [&](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    const StateVector x = y.head<12>();
    const Torques tq = controller_torques(x, active, s);
    EomSolution eom;
    dy.head<12>() = state_derivative(x, tq.hull, tq.pendulum, p, s.beta_mode, &eom);
    dy(kWorkIndex) = tq.hull * x(st::Psid) + tq.pendulum * x(st::Betad);
    ++diag.derivative_evaluations;
    diag.max_dynamics_residual = std::max(diag.max_dynamics_residual, eom.dynamics_residual);
    diag.max_acceleration_constraint_residual =
        std::max(diag.max_acceleration_constraint_residual, eom.constraint_residual);
  };

  StepHook project;
  if (cfg.projection) {
    project = [&p](double, Eigen::VectorXd& y) {
      y.head<12>() = project_velocities(y.head<12>(), p);
    };
  }

  const GeneralizedState g0 = to_generalized(x0);
  const double e0 = kinetic_energy(p, g0.q, g0.qd) + potential_energy(p, g0.q);

  auto record = [&](double t, const Eigen::VectorXd& y) {
    TrajectorySample sample;
    sample.t = t;
    sample.x = y.head<12>();
    const Torques tq = controller_torques(sample.x, active, s);
    sample.hull_torque = tq.hull;
    sample.pendulum_torque = tq.pendulum;
    const GeneralizedState g = to_generalized(sample.x);
    sample.kinetic = kinetic_energy(p, g.q, g.qd);
    sample.potential = potential_energy(p, g.q);
    sample.energy_residual = sample.kinetic + sample.potential - e0 - y(kWorkIndex);
    const Eigen::Vector2d r = constraint_residual(sample.x, p);
    sample.residual_x = r(0);
    sample.residual_z = r(1);
    result.trajectory.samples.push_back(sample);
  };

  Eigen::VectorXd y(13);
  y.head<12>() = x0;
  y(kWorkIndex) = 0.0;

  DormandPrince54 stepper(cfg.rtol, cfg.atol, cfg.h_max);
  StepStats stats;
  double t = 0.0;
  double h = cfg.h_init;

  auto next_breakpoint = [&]() {
    return segment + 1 < segments.size() ? segments[segment + 1].t_start
                                         : std::numeric_limits<double>::infinity();
  };
  auto enter_next_segment = [&]() {
    ++segment;
    active = segments[segment].setpoint;
    h = cfg.h_init;
    stepper.reset();
  };

  const auto n_samples =
      static_cast<std::size_t>(std::floor(s.t_end / cfg.sample_dt + kEventSnap));
  result.trajectory.samples.reserve(n_samples + 1);
  record(t, y);

  std::size_t i = 1;
  while (i <= n_samples) {
    double t_sample = static_cast<double>(i) * cfg.sample_dt;
    const double bp = next_breakpoint();
    if (bp < t_sample - kEventSnap) {
      advance(rhs, stepper, t, y, bp, h, stats, project);
      t = bp;
      enter_next_segment();
      continue;
    }
    const bool at_breakpoint = std::abs(bp - t_sample) <= kEventSnap;
    if (at_breakpoint) t_sample = bp;
    advance(rhs, stepper, t, y, t_sample, h, stats, project);
    t = t_sample;
    if (at_breakpoint) enter_next_segment();
    record(t, y);
    ++i;
  }

  diag.accepted_steps = stats.accepted;
  diag.rejected_steps = stats.rejected;
  return result;
}

}  // namespace sphbot

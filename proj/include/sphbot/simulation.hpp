#pragma once

#include <cstddef>
#include <vector>

#include "sphbot/control.hpp"
#include "sphbot/dynamics.hpp"
#include "sphbot/integrator.hpp"

namespace sphbot {

struct TrajectorySample {
  double t = 0.0;
  StateVector x = StateVector::Zero();
  double hull_torque = 0.0;       ///< T_s
  double pendulum_torque = 0.0;   ///< T_p
  double kinetic = 0.0;
  double potential = 0.0;
  /// K + V - (K0 + V0) minus the work done by both motors since t = 0.
  double energy_residual = 0.0;
  double residual_x = 0.0;  ///< rolling constraint residual r_x (m/s)
  double residual_z = 0.0;
};

/// Uniformly sampled run, strictly increasing in t.
struct Trajectory {
  std::vector<TrajectorySample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

struct SimulationDiagnostics {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t derivative_evaluations = 0;
  /// Largest saddle-system residuals seen over all derivative evaluations.
  double max_dynamics_residual = 0.0;
  double max_acceleration_constraint_residual = 0.0;
};

struct SimulationResult {
  Trajectory trajectory;
  SimulationDiagnostics diagnostics;
};

struct SimulationSetup {
  RobotParams params;
  SetpointSchedule schedule{{ScheduleSegment{}}};
  ControllerConfigs controllers;
  IntegratorConfig integrator;
  StateVector initial_state = StateVector::Zero();
  double t_end = 10.0;
  BetaMode beta_mode = BetaMode::Free;
};

/// Replaces (Xd, Zd) with the values the rolling constraint implies.
StateVector project_velocities(const StateVector& x, const RobotParams& p);

/// Maximum initial constraint violation accepted by `integrate`, in m/s.
inline constexpr double kInitialFeasibilityTol = 1e-9;

/// Runs the closed-loop simulation. Torques are recomputed from the
/// controllers at every derivative evaluation; the step size restarts at each
/// schedule breakpoint so no step straddles a setpoint jump.
SimulationResult integrate(const SimulationSetup& setup);

}  // namespace sphbot

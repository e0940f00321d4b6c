#pragma once

#include <vector>

#include "sphbot/dynamics.hpp"

namespace sphbot {

/// Gravity feedforward plus PD on the pendulum angle.
struct PendulumCtrlConfig {
  double kp = 20.0;  ///< N*m/rad
  double kd = 2.0;   ///< N*m*s/rad
  bool feedforward = true;
  double torque_limit = 50.0;  ///< N*m

  void validate() const;
};

/// Proportional control of the forward spin rate.
struct SpeedCtrlConfig {
  double kp = 10.0;  ///< N*m*s/rad
  double torque_limit = 50.0;

  void validate() const;
};

struct ControllerConfigs {
  PendulumCtrlConfig pendulum;
  SpeedCtrlConfig speed;
};

double pendulum_torque(const StateVector& x, double beta_ref,
                       const PendulumCtrlConfig& cfg, const RobotParams& p);

double speed_torque(const StateVector& x, double psid_ref, const SpeedCtrlConfig& cfg);

struct Setpoint {
  double beta_ref = 0.0;  ///< rad
  double psid_ref = 0.0;  ///< rad/s

  bool operator==(const Setpoint&) const = default;
};

struct ScheduleSegment {
  double t_start = 0.0;
  Setpoint setpoint;
};

/// Piecewise-constant, right-continuous setpoint schedule starting at t = 0.
class SetpointSchedule {
public:
  /// Throws ValidationError unless the list is non-empty, starts at 0 and has
  /// strictly increasing start times.
  explicit SetpointSchedule(std::vector<ScheduleSegment> segments);

  /// Setpoints active at time t. Throws ValidationError for t < 0.
  Setpoint lookup(double t) const;

  /// Index of the segment active at t.
  std::size_t segment_index(double t) const;

  const std::vector<ScheduleSegment>& segments() const { return segments_; }

private:
  std::vector<ScheduleSegment> segments_;
};

}  // namespace sphbot

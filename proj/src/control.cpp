#include "sphbot/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sphbot/errors.hpp"

namespace sphbot {

namespace {

double clamp_torque(double torque, double limit) {
  return std::clamp(torque, -limit, limit);
}

void check_gain(double value, const std::string& name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw ValidationError(name + " must be finite and >= 0");
  }
}

void check_limit(double value, const std::string& name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw ValidationError(name + " must be finite and > 0");
  }
}

}  // namespace

void PendulumCtrlConfig::validate() const {
  check_gain(kp, "pendulum kp");
  check_gain(kd, "pendulum kd");
  check_limit(torque_limit, "pendulum torque_limit");
}

void SpeedCtrlConfig::validate() const {
  check_gain(kp, "speed kp");
  check_limit(torque_limit, "speed torque_limit");
}

double pendulum_torque(const StateVector& x, double beta_ref,
                       const PendulumCtrlConfig& cfg, const RobotParams& p) {
  const double beta = x(st::Beta);
  // Static torque needed to hold the pendulum at its current angle from vertical.
  const double feedforward =
      cfg.feedforward ? p.m_pendulum * p.gravity * p.pendulum_offset *
                            std::sin(x(st::Theta) + beta)
                      : 0.0;
  const double feedback = cfg.kp * (beta_ref - beta) - cfg.kd * x(st::Betad);
  return clamp_torque(feedforward + feedback, cfg.torque_limit);
}

double speed_torque(const StateVector& x, double psid_ref, const SpeedCtrlConfig& cfg) {
  return clamp_torque(cfg.kp * (psid_ref - x(st::Psid)), cfg.torque_limit);
}

SetpointSchedule::SetpointSchedule(std::vector<ScheduleSegment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw ValidationError("schedule must have at least one segment");
  if (segments_.front().t_start != 0.0) {
    throw ValidationError("schedule must start at t = 0");
  }
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!std::isfinite(s.t_start) || !std::isfinite(s.setpoint.beta_ref) ||
        !std::isfinite(s.setpoint.psid_ref)) {
      throw ValidationError("schedule entry " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(s.t_start > segments_[i - 1].t_start)) {
      throw ValidationError("schedule start times must be strictly increasing");
    }
  }
}

std::size_t SetpointSchedule::segment_index(double t) const {
  if (!(t >= 0.0)) {
    throw ValidationError("schedule lookup before the first segment (t = " +
                          std::to_string(t) + ")");
  }
  const auto after = std::upper_bound(
      segments_.begin(), segments_.end(), t,
      [](double time, const ScheduleSegment& s) { return time < s.t_start; });
  return static_cast<std::size_t>(after - segments_.begin()) - 1;
}

Setpoint SetpointSchedule::lookup(double t) const {
  return segments_[segment_index(t)].setpoint;
}

}  // namespace sphbot

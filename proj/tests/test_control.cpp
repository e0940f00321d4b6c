#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "sphbot/control.hpp"
#include "sphbot/errors.hpp"
#include "support/generators.hpp"

using namespace sphbot;

namespace {

const RobotParams P0 = RobotParams::reference();
constexpr double kDeg = std::numbers::pi / 180.0;

SetpointSchedule turning_schedule() {
  return SetpointSchedule({{0.0, {0.0, 1.0}}, {5.0, {15.0 * kDeg, 1.0}}, {20.0, {0.0, 1.0}}});
}

}  // namespace

TEST(PendulumCtrl, ZeroAtSetpoint) {
  EXPECT_EQ(pendulum_torque(StateVector::Zero(), 0.0, PendulumCtrlConfig{}, P0), 0.0);
}

TEST(PendulumCtrl, ProportionalStep) {
  PendulumCtrlConfig cfg;
  cfg.feedforward = false;
  const double t = pendulum_torque(StateVector::Zero(), 15.0 * kDeg, cfg, P0);
  EXPECT_NEAR(t, 20.0 * 0.2617993877991494, 1e-12);
  EXPECT_NEAR(t, 5.236, 1e-3);
}

TEST(PendulumCtrl, FeedforwardCancelsGravityAtSetpoint) {
  StateVector x = StateVector::Zero();
  x(st::Theta) = 0.1;
  x(st::Beta) = 0.3;
  const double expected = 0.5 * 9.81 * 0.1 * std::sin(0.4);
  EXPECT_NEAR(pendulum_torque(x, 0.3, PendulumCtrlConfig{}, P0), expected, 1e-15);

  x(st::Theta) = -0.3;
  EXPECT_EQ(pendulum_torque(x, 0.3, PendulumCtrlConfig{}, P0), 0.0);
}

TEST(PendulumCtrl, DampingOpposesRate) {
  StateVector x = StateVector::Zero();
  x(st::Betad) = 0.5;
  EXPECT_NEAR(pendulum_torque(x, 0.0, PendulumCtrlConfig{}, P0), -1.0, 1e-15);
}

TEST(SpeedCtrl, Examples) {
  StateVector x = StateVector::Zero();
  x(st::Psid) = 1.0;
  EXPECT_EQ(speed_torque(x, 1.0, SpeedCtrlConfig{}), 0.0);
  x(st::Psid) = 0.0;
  EXPECT_DOUBLE_EQ(speed_torque(x, 1.0, SpeedCtrlConfig{}), 10.0);
}

TEST(Controllers, OutputsStayWithinLimit) {
  sphbot::testing::Gen g(41);
  PendulumCtrlConfig pc;
  pc.kp = 500.0;
  pc.kd = 50.0;
  pc.torque_limit = 3.0;
  SpeedCtrlConfig sc;
  sc.kp = 200.0;
  sc.torque_limit = 2.0;
  for (int i = 0; i < 500; ++i) {
    const GenCoords q = g.coords();
    const StateVector x = to_state_vector(q, g.rates(10.0));
    const double tp = pendulum_torque(x, g.uniform(-1, 1), pc, P0);
    const double ts = speed_torque(x, g.uniform(-5, 5), sc);
    EXPECT_LE(std::abs(tp), 3.0);
    EXPECT_LE(std::abs(ts), 2.0);
  }
  StateVector x = StateVector::Zero();
  EXPECT_EQ(speed_torque(x, 100.0, sc), 2.0);
  EXPECT_EQ(speed_torque(x, -100.0, sc), -2.0);
}

TEST(Controllers, ValidateGains) {
  PendulumCtrlConfig pc;
  pc.kd = -1.0;
  EXPECT_THROW(pc.validate(), ValidationError);
  pc = {};
  pc.torque_limit = 0.0;
  EXPECT_THROW(pc.validate(), ValidationError);
  SpeedCtrlConfig sc;
  sc.kp = -0.1;
  EXPECT_THROW(sc.validate(), ValidationError);
}

TEST(Schedule, TurningLookup) {
  const auto s = turning_schedule();
  EXPECT_EQ(s.lookup(2.0), (Setpoint{0.0, 1.0}));
  EXPECT_EQ(s.lookup(5.0), (Setpoint{15.0 * kDeg, 1.0}));
  EXPECT_EQ(s.lookup(19.999), (Setpoint{15.0 * kDeg, 1.0}));
  EXPECT_EQ(s.lookup(25.0), (Setpoint{0.0, 1.0}));
  EXPECT_EQ(s.segment_index(0.0), 0u);
  EXPECT_EQ(s.segment_index(20.0), 2u);
  EXPECT_EQ(s.segment_index(1e6), 2u);
}

TEST(Schedule, RejectsMalformedInput) {
  EXPECT_THROW(SetpointSchedule({}), ValidationError);
  EXPECT_THROW(SetpointSchedule(std::vector<ScheduleSegment>{{1.0, {}}}), ValidationError);
  EXPECT_THROW(SetpointSchedule({{0.0, {}}, {3.0, {}}, {3.0, {}}}), ValidationError);
  EXPECT_THROW(SetpointSchedule(std::vector<ScheduleSegment>{{0.0, {std::nan(""), 0.0}}}), ValidationError);
  EXPECT_THROW(turning_schedule().lookup(-0.1), ValidationError);
}

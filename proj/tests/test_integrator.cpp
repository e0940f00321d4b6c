#include <cmath>
#include <numbers>

#include <Eigen/Core>
#include <gtest/gtest.h>

#include "sphbot/errors.hpp"
#include "sphbot/integrator.hpp"

using namespace sphbot;
using Eigen::VectorXd;

TEST(DormandPrince, ConstantFieldIsExact) {
  DormandPrince54 dp(1e-8, 1e-10, 1.0);
  const OdeFunction f = [](double, const VectorXd&, VectorXd& dx) { dx.setZero(); };
  VectorXd x(3);
  x << 1.0, -2.0, 3.5;
  for (double h : {1e-6, 1e-2, 0.5, 1.0}) {
    const auto r = dp.step(f, 0.0, x, h);
    EXPECT_TRUE(r.accepted);
    EXPECT_EQ(r.x_next, x);
    EXPECT_EQ(r.error, 0.0);
  }
}

TEST(DormandPrince, ExponentialDecay) {
  const double rtol = 1e-8;
  DormandPrince54 dp(rtol, 1e-12, 0.1);
  const OdeFunction f = [](double, const VectorXd& x, VectorXd& dx) { dx = -x; };
  VectorXd x = VectorXd::Constant(1, 1.0);
  double h = 1e-4;
  StepStats stats;
  advance(f, dp, 0.0, x, 1.0, h, stats);
  EXPECT_NEAR(x(0), std::exp(-1.0), rtol * std::exp(-1.0));
  EXPECT_GT(stats.accepted, 0u);
}

TEST(DormandPrince, LandsExactlyOnTarget) {
  DormandPrince54 dp(1e-8, 1e-10, 0.3);
  double t_seen = -1.0;
  const OdeFunction f = [&](double t, const VectorXd&, VectorXd& dx) {
    t_seen = t;
    dx.setOnes();
  };
  VectorXd x = VectorXd::Zero(1);
  double h = 0.07;
  StepStats stats;
  advance(f, dp, 0.0, x, 1.0, h, stats);
  EXPECT_NEAR(x(0), 1.0, 1e-14);
  EXPECT_LE(t_seen, 1.0);
}

TEST(DormandPrince, HarmonicOscillatorEnergyDrift) {
  // 1000 periods of x'' = -x. Local errors stay within rtol, so the energy
  // may wander by at most a few rtol per period.
  const double rtol = 1e-8;
  DormandPrince54 dp(rtol, 1e-10, 0.1);
  const OdeFunction f = [](double, const VectorXd& x, VectorXd& dx) {
    dx(0) = x(1);
    dx(1) = -x(0);
  };
  VectorXd x(2);
  x << 1.0, 0.0;
  const double periods = 1000.0;
  double h = 1e-3;
  StepStats stats;
  advance(f, dp, 0.0, x, periods * 2.0 * std::numbers::pi, h, stats);
  const double energy = 0.5 * x.squaredNorm();
  EXPECT_LE(std::abs(energy - 0.5) / 0.5, periods * 10.0 * rtol);
}

TEST(DormandPrince, StageFailureRejectsStep) {
  DormandPrince54 dp(1e-8, 1e-10, 1.0);
  const OdeFunction f = [](double t, const VectorXd&, VectorXd& dx) {
    if (t > 0.5) throw NumericalError("outside domain");
    dx.setOnes();
  };
  VectorXd x = VectorXd::Zero(1);
  const auto r = dp.step(f, 0.0, x, 1.0);
  EXPECT_FALSE(r.accepted);
  EXPECT_LT(r.h_next, 1.0);
  EXPECT_EQ(dp.last_stage_failure(), "outside domain");
}

TEST(DormandPrince, UnreachableRegionUnderflows) {
  DormandPrince54 dp(1e-8, 1e-10, 1.0);
  const OdeFunction f = [](double t, const VectorXd&, VectorXd& dx) {
    if (t > 0.5) throw NumericalError("wall");
    dx.setOnes();
  };
  VectorXd x = VectorXd::Zero(1);
  double h = 0.1;
  StepStats stats;
  try {
    advance(f, dp, 0.0, x, 1.0, h, stats);
    FAIL() << "expected StepUnderflowError";
  } catch (const StepUnderflowError& e) {
    EXPECT_NE(std::string(e.what()).find("wall"), std::string::npos) << e.what();
  }
  EXPECT_GT(stats.rejected, 0u);
}

TEST(DormandPrince, StiffDecayUnderflows) {
  // Explicit stability bounds the step by about 3.3/lambda; once that falls
  // below the floor the integrator must give up rather than crawl.
  DormandPrince54 dp(1e-2, 1e-10, 1.0);
  const OdeFunction f = [](double, const VectorXd& x, VectorXd& dx) { dx = -1e14 * x; };
  VectorXd x = VectorXd::Constant(1, 1.0);
  double h = 1e-4;
  StepStats stats;
  EXPECT_THROW(advance(f, dp, 0.0, x, 1.0, h, stats), StepUnderflowError);
}

TEST(DormandPrince, StepHookRunsOnAcceptedSteps) {
  DormandPrince54 dp(1e-8, 1e-10, 0.1);
  const OdeFunction f = [](double, const VectorXd&, VectorXd& dx) { dx.setOnes(); };
  VectorXd x = VectorXd::Zero(1);
  double h = 0.1;
  StepStats stats;
  std::size_t calls = 0;
  advance(f, dp, 0.0, x, 1.0, h, stats, [&](double, VectorXd& y) {
    ++calls;
    y(0) = 0.0;
  });
  EXPECT_EQ(calls, stats.accepted);
  EXPECT_EQ(x(0), 0.0);
}

TEST(IntegratorConfig, Validation) {
  IntegratorConfig c;
  EXPECT_NO_THROW(c.validate());
  c.h_init = 0.1;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.rtol = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.sample_dt = -1.0;
  EXPECT_THROW(c.validate(), ValidationError);
}

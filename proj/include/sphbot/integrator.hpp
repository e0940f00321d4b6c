#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include <Eigen/Core>

namespace sphbot {

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_init = 1e-4;     ///< s, also used after every schedule breakpoint
  double h_max = 1e-2;      ///< s
  double sample_dt = 1e-2;  ///< s
  bool projection = true;   ///< snap (Xd, Zd) onto the rolling constraint after each step

  void validate() const;
};

/// Steps smaller than this are treated as a stiffness failure.
inline constexpr double kMinStep = 1e-12;

/// dx/dt = f(t, x). Writes into `dxdt`, which arrives sized like x.
using OdeFunction =
    std::function<void(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dxdt)>;

struct StepResult {
  Eigen::VectorXd x_next;
  double error = 0.0;  ///< scaled RMS error estimate; accepted when <= 1
  double h_next = 0.0;
  bool accepted = false;
};

/// Dormand-Prince 5(4) embedded pair with a PI step-size controller.
class DormandPrince54 {
public:
  DormandPrince54(double rtol, double atol, double h_max);

  /// One attempt of size h from (t, x). A NumericalError raised while
  /// evaluating an interior stage rejects the step; an error at (t, x) itself
  /// propagates.
  StepResult step(const OdeFunction& f, double t, const Eigen::VectorXd& x, double h);

  /// Forget the controller's error history (used after a discontinuity).
  void reset();

  /// Message of the most recent stage evaluation that threw, if any.
  const std::string& last_stage_failure() const { return last_stage_failure_; }

private:
  double rtol_;
  double atol_;
  double h_max_;
  double prev_error_ = 1e-4;
  std::string last_stage_failure_;
  Eigen::VectorXd k_[7];
  Eigen::VectorXd stage_;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Hook run on every accepted step; it may modify the state in place.
using StepHook = std::function<void(double t, Eigen::VectorXd& x)>;

/// Integrates from t to exactly t_target. `h` carries the proposed step size
/// in and out. Throws StepUnderflowError when the proposal drops below kMinStep.
void advance(const OdeFunction& f, DormandPrince54& stepper, double t,
             Eigen::VectorXd& x, double t_target, double& h, StepStats& stats,
             const StepHook& after_step = {});

}  // namespace sphbot

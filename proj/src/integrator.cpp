#include "sphbot/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sphbot/errors.hpp"

namespace sphbot {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;              // PI memory exponent
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kMaxGrowth = 5.0;
constexpr double kMaxShrink = 10.0;
constexpr double kFailedStageShrink = 0.2;

void check_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw ValidationError(std::string("integrator ") + name + " must be finite and > 0");
  }
}

}  // namespace

void IntegratorConfig::validate() const {
  check_positive(rtol, "rtol");
  check_positive(atol, "atol");
  check_positive(h_init, "h_init");
  check_positive(h_max, "h_max");
  check_positive(sample_dt, "sample_dt");
  if (h_init > h_max) throw ValidationError("integrator h_init must not exceed h_max");
}

DormandPrince54::DormandPrince54(double rtol, double atol, double h_max)
    : rtol_(rtol), atol_(atol), h_max_(h_max) {}

void DormandPrince54::reset() { prev_error_ = 1e-4; }

StepResult DormandPrince54::step(const OdeFunction& f, double t,
                                 const Eigen::VectorXd& x, double h) {
  const Eigen::Index n = x.size();
  for (auto& k : k_) k.resize(n);
  stage_.resize(n);

  f(t, x, k_[0]);

  StepResult result;
  try {
    stage_ = x + h * a21 * k_[0];
    f(t + c2 * h, stage_, k_[1]);
    stage_ = x + h * (a31 * k_[0] + a32 * k_[1]);
    f(t + c3 * h, stage_, k_[2]);
    stage_ = x + h * (a41 * k_[0] + a42 * k_[1] + a43 * k_[2]);
    f(t + c4 * h, stage_, k_[3]);
    stage_ = x + h * (a51 * k_[0] + a52 * k_[1] + a53 * k_[2] + a54 * k_[3]);
    f(t + c5 * h, stage_, k_[4]);
    stage_ = x + h * (a61 * k_[0] + a62 * k_[1] + a63 * k_[2] + a64 * k_[3] +
                      a65 * k_[4]);
    f(t + h, stage_, k_[5]);
    result.x_next =
        x + h * (b1 * k_[0] + b3 * k_[2] + b4 * k_[3] + b5 * k_[4] + b6 * k_[5]);
    f(t + h, result.x_next, k_[6]);
  } catch (const NumericalError& e) {
    last_stage_failure_ = e.what();
    result.x_next = x;
    result.error = std::numeric_limits<double>::infinity();
    result.h_next = h * kFailedStageShrink;
    result.accepted = false;
    return result;
  }

  const Eigen::VectorXd err_vec =
      h * (e1 * k_[0] + e3 * k_[2] + e4 * k_[3] + e5 * k_[4] + e6 * k_[5] + e7 * k_[6]);
  const Eigen::ArrayXd scale =
      atol_ + rtol_ * x.array().abs().max(result.x_next.array().abs());
  double err = std::sqrt((err_vec.array() / scale).square().mean());
  if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
  result.error = err;

  if (err <= 1.0) {
    const double fac11 = std::pow(err, kExpo);
    double fac = fac11 / std::pow(prev_error_, kBeta);
    fac = std::clamp(fac / kSafety, 1.0 / kMaxGrowth, kMaxShrink);
    prev_error_ = std::max(err, 1e-4);
    last_stage_failure_.clear();
    result.accepted = true;
    result.h_next = std::min(h / fac, h_max_);
  } else if (std::isfinite(err)) {
    const double fac11 = std::pow(err, kExpo);
    result.accepted = false;
    result.h_next = h / std::min(kMaxShrink, fac11 / kSafety);
  } else {
    result.accepted = false;
    result.h_next = h * kFailedStageShrink;
  }
  return result;
}

void advance(const OdeFunction& f, DormandPrince54& stepper, double t,
             Eigen::VectorXd& x, double t_target, double& h, StepStats& stats,
             const StepHook& after_step) {
  while (t < t_target) {
    const double remaining = t_target - t;
    const bool final_step = h >= remaining;
    const double h_try = final_step ? remaining : h;

    StepResult r = stepper.step(f, t, x, h_try);
    if (r.accepted) {
      ++stats.accepted;
      t = final_step ? t_target : t + h_try;
      x = std::move(r.x_next);
      if (after_step) after_step(t, x);
      // A step clipped to hit the target says little about the natural step size.
      h = final_step ? std::max(h, r.h_next) : r.h_next;
    } else {
      ++stats.rejected;
      h = r.h_next;
      if (!(h >= kMinStep)) {
        std::ostringstream msg;
        msg << "stiffness failure: step size underflow (h = " << h << " s) at t = " << t
            << " s";
        if (!stepper.last_stage_failure().empty()) {
          msg << "; last stage failure: " << stepper.last_stage_failure();
        }
        throw StepUnderflowError(msg.str());
      }
    }
  }
}

}  // namespace sphbot

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sphbot/control.hpp"
#include "sphbot/simulation.hpp"

namespace sphbot {

/// Default time excluded after each breakpoint before metrics are taken.
inline constexpr double kDefaultSettleMargin = 1.0;

/// Extrema must stand out from their neighbourhood by at least this much.
inline constexpr double kMinProminence = 1e-6;

/// Steady part of one schedule segment: samples [first, last).
struct PhaseWindow {
  std::string label;  ///< "straight-1", "circular", "straight-2", ...
  bool straight = true;
  std::size_t segment = 0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::size_t first = 0;
  std::size_t last = 0;
};

/// One window per schedule segment, each trimmed by `settle_margin` after its
/// breakpoint. Segments with beta_ref == 0 are labelled straight.
std::vector<PhaseWindow> segment_phases(const Trajectory& traj,
                                        const SetpointSchedule& schedule,
                                        double settle_margin = kDefaultSettleMargin);

struct Extremum {
  double t = 0.0;
  double value = 0.0;
  bool maximum = false;
};

/// Alternating local extrema with at least `prominence` swing between
/// neighbours, refined by parabolic interpolation. Window end points are
/// never reported.
std::vector<Extremum> find_extrema(std::span<const double> t, std::span<const double> y,
                                   double prominence = kMinProminence);

struct OscillationMetrics {
  double mean = 0.0;
  double amplitude = 0.0;            ///< half the median peak-to-trough swing
  std::optional<double> frequency;   ///< Hz; empty with fewer than 4 extrema
  std::size_t extrema = 0;
  /// At least 4 extrema, and the last swing is no less than half the first.
  bool sustained = false;
};

/// Mean, amplitude and frequency of a uniformly sampled oscillating signal.
OscillationMetrics oscillation_metrics(std::span<const double> t,
                                       std::span<const double> y);

/// Wobble is the oscillation of theta.
inline OscillationMetrics wobble_metrics(std::span<const double> t,
                                         std::span<const double> theta) {
  return oscillation_metrics(t, theta);
}

struct PrecessionMetrics {
  double phid_mean = 0.0;
  double phid_osc_amp = 0.0;
  double pend_mean = 0.0;  ///< mean pendulum angle from vertical, theta + beta
  /// Means of phid over the three thirds of the window share the overall sign.
  bool phid_sign_consistent = false;
};

PrecessionMetrics precession_metrics(std::span<const double> t,
                                     std::span<const double> phid,
                                     std::span<const double> pendulum_angle);

struct CircleFit {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.0;
  double rms = 0.0;  ///< RMS of radial residuals
};

/// Algebraic least-squares (Kasa) fit. Needs at least 10 points covering at
/// least 30 degrees of arc; throws AnalysisError otherwise or when the points
/// are collinear.
CircleFit circle_fit(std::span<const Eigen::Vector2d> points);

/// RMS perpendicular distance from the total-least-squares line.
double straightness(std::span<const Eigen::Vector2d> points);

struct PhaseMetrics {
  PhaseWindow window;
  OscillationMetrics wobble;
  PrecessionMetrics precession;
  std::optional<double> lateral_rms;  ///< straight phases
  std::optional<CircleFit> circle;    ///< circular phases, when the fit succeeds
  std::string path_error;             ///< why `circle` is empty
};

PhaseMetrics phase_metrics(const Trajectory& traj, const PhaseWindow& window);

/// Qualitative relations between the three phases of a turning maneuver.
struct TurningOrderings {
  bool straight1_quiet = false;
  bool circular_precesses = false;
  bool circular_pendulum_offset = false;
  bool circular_path_circular = false;  ///< circle-fit rms within 5% of radius
  bool straight2_precession_cancels = false;
  bool straight2_wobble_exceeds_circular = false;
  bool wobble_sustained = false;  ///< in both post-disturbance phases

  bool all() const {
    return straight1_quiet && circular_precesses && circular_pendulum_offset &&
           circular_path_circular && straight2_precession_cancels &&
           straight2_wobble_exceeds_circular && wobble_sustained;
  }
};

inline constexpr double kQuietTolerance = 1e-6;
inline constexpr double kCircleRmsFraction = 0.05;
inline constexpr double kPrecessionCancelFraction = 0.05;

/// Present only when the phases are labelled straight-1, circular, straight-2.
std::optional<TurningOrderings> turning_orderings(const std::vector<PhaseMetrics>& phases);

}  // namespace sphbot

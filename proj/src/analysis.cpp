#include "sphbot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "sphbot/errors.hpp"

namespace sphbot {

namespace {

constexpr double kTimeSnap = 1e-9;
constexpr std::size_t kMinCirclePoints = 10;
constexpr double kMinCircleArc = std::numbers::pi / 6.0;
constexpr double kCollinearRatio = 1e-10;

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

Extremum refine(std::span<const double> t, std::span<const double> y, std::size_t i,
                bool maximum) {
  Extremum e{t[i], y[i], maximum};
  if (i == 0 || i + 1 >= y.size()) return e;
  const double ym = y[i - 1], y0 = y[i], yp = y[i + 1];
  const double curvature = ym - 2.0 * y0 + yp;
  if (curvature == 0.0) return e;
  const double delta = 0.5 * (ym - yp) / curvature;
  if (std::abs(delta) > 1.0) return e;
  const double dt = delta >= 0.0 ? t[i + 1] - t[i] : t[i] - t[i - 1];
  e.t = t[i] + delta * dt;
  e.value = y0 - 0.25 * (ym - yp) * delta;
  return e;
}

std::vector<Eigen::Vector2d> ground_path(const Trajectory& traj, const PhaseWindow& w) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(w.last - w.first);
  for (std::size_t i = w.first; i < w.last; ++i) {
    const auto& x = traj.samples[i].x;
    pts.emplace_back(x(st::X), x(st::Z));
  }
  return pts;
}

}  // namespace

std::vector<PhaseWindow> segment_phases(const Trajectory& traj,
                                        const SetpointSchedule& schedule,
                                        double settle_margin) {
  if (traj.empty()) throw AnalysisError("empty trajectory");
  if (!(settle_margin >= 0.0)) throw AnalysisError("settle margin must be >= 0");
  const auto& segs = schedule.segments();
  const double t0 = traj.samples.front().t;
  const double t_final = traj.samples.back().t;

  std::size_t circular_total = 0;
  for (const auto& s : segs) circular_total += s.setpoint.beta_ref != 0.0 ? 1 : 0;

  std::vector<PhaseWindow> windows;
  std::size_t n_straight = 0, n_circular = 0;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const double start = segs[k].t_start;
    if (start < t0 - kTimeSnap || start > t_final + kTimeSnap) {
      std::ostringstream msg;
      msg << "schedule breakpoint t = " << start << " s lies outside the trajectory ["
          << t0 << ", " << t_final << "]";
      throw AnalysisError(msg.str());
    }
    const bool last_segment = k + 1 == segs.size();
    PhaseWindow w;
    w.segment = k;
    w.straight = segs[k].setpoint.beta_ref == 0.0;
    if (w.straight) {
      w.label = "straight-" + std::to_string(++n_straight);
    } else {
      ++n_circular;
      w.label = circular_total == 1 ? "circular" : "circular-" + std::to_string(n_circular);
    }
    w.t_begin = start + settle_margin;
    w.t_end = last_segment ? t_final : std::min(segs[k + 1].t_start, t_final);

    const auto begin_it = std::lower_bound(
        traj.samples.begin(), traj.samples.end(), w.t_begin - kTimeSnap,
        [](const TrajectorySample& s, double t) { return s.t < t; });
    auto end_it = last_segment
                      ? traj.samples.end()
                      : std::lower_bound(traj.samples.begin(), traj.samples.end(),
                                         w.t_end - kTimeSnap,
                                         [](const TrajectorySample& s, double t) {
                                           return s.t < t;
                                         });
    w.first = static_cast<std::size_t>(begin_it - traj.samples.begin());
    w.last = static_cast<std::size_t>(end_it - traj.samples.begin());
    if (w.first >= w.last || w.t_begin >= w.t_end + kTimeSnap) {
      std::ostringstream msg;
      msg << "phase " << w.label << " is empty after the " << settle_margin
          << " s settle margin";
      throw AnalysisError(msg.str());
    }
    windows.push_back(w);
  }
  return windows;
}

std::vector<Extremum> find_extrema(std::span<const double> t, std::span<const double> y,
                                   double prominence) {
  std::vector<Extremum> out;
  const std::size_t n = y.size();
  if (n < 3) return out;

  std::vector<std::pair<std::size_t, bool>> pivots;
  int direction = 0;  // +1 tracking a maximum, -1 tracking a minimum
  std::size_t hi = 0, lo = 0, cand = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (direction == 0) {
      if (y[i] > y[hi]) hi = i;
      if (y[i] < y[lo]) lo = i;
      if (y[hi] - y[lo] >= prominence) {
        if (hi > lo) {
          pivots.emplace_back(lo, false);
          direction = 1;
          cand = hi;
        } else {
          pivots.emplace_back(hi, true);
          direction = -1;
          cand = lo;
        }
      }
    } else if (direction > 0) {
      if (y[i] > y[cand]) {
        cand = i;
      } else if (y[cand] - y[i] >= prominence) {
        pivots.emplace_back(cand, true);
        direction = -1;
        cand = i;
      }
    } else {
      if (y[i] < y[cand]) {
        cand = i;
      } else if (y[i] - y[cand] >= prominence) {
        pivots.emplace_back(cand, false);
        direction = 1;
        cand = i;
      }
    }
  }

  for (const auto& [index, is_max] : pivots) {
    if (index == 0 || index + 1 >= n) continue;
    out.push_back(refine(t, y, index, is_max));
  }
  return out;
}

OscillationMetrics oscillation_metrics(std::span<const double> t,
                                       std::span<const double> y) {
  if (y.empty() || t.size() != y.size()) {
    throw AnalysisError("oscillation metrics need equally sized, non-empty series");
  }
  OscillationMetrics m;
  m.mean = mean(y);

  const std::vector<Extremum> ext = find_extrema(t, y);
  m.extrema = ext.size();
  if (ext.size() >= 2) {
    std::vector<double> swings;
    for (std::size_t i = 0; i + 1 < ext.size(); ++i) {
      swings.push_back(std::abs(ext[i + 1].value - ext[i].value));
    }
    m.amplitude = 0.5 * median(swings);
    if (ext.size() >= 4) {
      std::vector<double> periods;
      for (std::size_t i = 0; i + 2 < ext.size(); ++i) {
        periods.push_back(ext[i + 2].t - ext[i].t);
      }
      m.frequency = 1.0 / median(periods);
      m.sustained = swings.back() >= 0.5 * swings.front();
    }
  } else {
    // Too few turning points: fall back to half the range.
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    m.amplitude = 0.5 * (*hi - *lo);
  }
  return m;
}

PrecessionMetrics precession_metrics(std::span<const double> t,
                                     std::span<const double> phid,
                                     std::span<const double> pendulum_angle) {
  if (phid.empty() || phid.size() != t.size() || pendulum_angle.size() != t.size()) {
    throw AnalysisError("precession metrics need equally sized, non-empty series");
  }
  PrecessionMetrics m;
  const OscillationMetrics osc = oscillation_metrics(t, phid);
  m.phid_mean = osc.mean;
  m.phid_osc_amp = osc.amplitude;
  m.pend_mean = mean(pendulum_angle);

  const std::size_t n = phid.size();
  if (m.phid_mean != 0.0 && n >= 3) {
    m.phid_sign_consistent = true;
    for (std::size_t k = 0; k < 3; ++k) {
      const std::size_t a = k * n / 3, b = (k + 1) * n / 3;
      const double part = mean(phid.subspan(a, b - a));
      if (!(part * m.phid_mean > 0.0)) m.phid_sign_consistent = false;
    }
  }
  return m;
}

CircleFit circle_fit(std::span<const Eigen::Vector2d> points) {
  if (points.size() < kMinCirclePoints) {
    throw AnalysisError("circle fit needs at least 10 points");
  }
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  // Solve u^2 + v^2 + D u + E v + F = 0 in centred coordinates.
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixX3d design(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d d = points[static_cast<std::size_t>(i)] - centroid;
    design.row(i) << d.x(), d.y(), 1.0;
    rhs(i) = -d.squaredNorm();
  }
  const Eigen::JacobiSVD<Eigen::MatrixX3d> svd(design,
                                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(2) > kCollinearRatio * sv(0))) {
    throw AnalysisError("circle fit is degenerate: points are collinear");
  }
  const Eigen::Vector3d coef = svd.solve(rhs);
  const Eigen::Vector2d center_local(-0.5 * coef(0), -0.5 * coef(1));
  const double r2 = center_local.squaredNorm() - coef(2);
  if (!(r2 > 0.0)) throw AnalysisError("circle fit is degenerate: no real radius");

  CircleFit fit;
  fit.center = centroid + center_local;
  fit.radius = std::sqrt(r2);

  double sq = 0.0;
  double angle = 0.0, prev = 0.0, lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector2d d = points[i] - fit.center;
    const double res = d.norm() - fit.radius;
    sq += res * res;
    const double a = std::atan2(d.y(), d.x());
    if (i == 0) {
      angle = a;
    } else {
      angle += std::remainder(a - prev, 2.0 * std::numbers::pi);
    }
    prev = a;
    lo = i == 0 ? angle : std::min(lo, angle);
    hi = i == 0 ? angle : std::max(hi, angle);
  }
  fit.rms = std::sqrt(sq / static_cast<double>(points.size()));
  if (hi - lo < kMinCircleArc) {
    throw AnalysisError("circle fit needs samples spanning at least 30 degrees of arc");
  }
  return fit;
}

double straightness(std::span<const Eigen::Vector2d> points) {
  if (points.size() < 2) throw AnalysisError("straightness needs at least 2 points");
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector2d d = p - centroid;
    cov += d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  // Distances are measured directly along the normal; the square root of the
  // small eigenvalue would amplify rounding on near-exact lines.
  const Eigen::Vector2d normal = eig.eigenvectors().col(0);
  double sq = 0.0;
  for (const auto& p : points) {
    const double d = (p - centroid).dot(normal);
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(points.size()));
}

PhaseMetrics phase_metrics(const Trajectory& traj, const PhaseWindow& window) {
  const std::size_t n = window.last - window.first;
  std::vector<double> t(n), theta(n), phid(n), pend(n);
  for (std::size_t i = 0; i < n; ++i) {
    const TrajectorySample& s = traj.samples[window.first + i];
    t[i] = s.t;
    theta[i] = s.x(st::Theta);
    phid[i] = s.x(st::Phid);
    pend[i] = s.x(st::Theta) + s.x(st::Beta);
  }

  PhaseMetrics m;
  m.window = window;
  m.wobble = wobble_metrics(t, theta);
  m.precession = precession_metrics(t, phid, pend);
  const std::vector<Eigen::Vector2d> path = ground_path(traj, window);
  if (window.straight) {
    m.lateral_rms = path.size() >= 2 ? straightness(path) : 0.0;
  } else {
    try {
      m.circle = circle_fit(path);
    } catch (const AnalysisError& e) {
      m.path_error = e.what();
    }
  }
  return m;
}

std::optional<TurningOrderings> turning_orderings(const std::vector<PhaseMetrics>& phases) {
  if (phases.size() != 3 || phases[0].window.label != "straight-1" ||
      phases[1].window.label != "circular" || phases[2].window.label != "straight-2") {
    return std::nullopt;
  }
  const PhaseMetrics& s1 = phases[0];
  const PhaseMetrics& c = phases[1];
  const PhaseMetrics& s2 = phases[2];

  TurningOrderings o;
  o.straight1_quiet = std::abs(s1.precession.phid_mean) <= kQuietTolerance &&
                      std::abs(s1.precession.pend_mean) <= kQuietTolerance &&
                      s1.wobble.amplitude <= kQuietTolerance;
  o.circular_precesses = std::abs(c.precession.phid_mean) > kQuietTolerance &&
                         c.precession.phid_sign_consistent;
  o.circular_pendulum_offset = std::abs(c.precession.pend_mean) > kQuietTolerance;
  o.circular_path_circular =
      c.circle.has_value() && c.circle->rms <= kCircleRmsFraction * c.circle->radius;
  o.straight2_precession_cancels =
      std::abs(s2.precession.phid_mean) <=
      kPrecessionCancelFraction * std::abs(c.precession.phid_mean);
  o.straight2_wobble_exceeds_circular = s2.wobble.amplitude > c.wobble.amplitude;
  o.wobble_sustained = c.wobble.sustained && s2.wobble.sustained;
  return o;
}

}  // namespace sphbot

#include "sphbot/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "sphbot/analysis.hpp"
#include "sphbot/errors.hpp"

namespace sphbot {

namespace {

using ojson = nlohmann::ordered_json;

constexpr Eigen::Index kStateColumns[12] = {st::Phi,  st::Theta, st::Psi,    st::X,
                                            st::Z,    st::Phid,  st::Thetad, st::Psid,
                                            st::Xd,   st::Zd,    st::Beta,   st::Betad};

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ValidationError("trajectory CSV line " + std::to_string(line_no) +
                          ": malformed number '" + std::string(field) + "'");
  }
  return v;
}

ojson phase_to_json(const PhaseMetrics& m) {
  ojson j;
  j["label"] = m.window.label;
  j["t_begin_s"] = m.window.t_begin;
  j["t_end_s"] = m.window.t_end;
  j["samples"] = m.window.last - m.window.first;
  j["theta_mean_rad"] = m.wobble.mean;
  j["theta_amp_rad"] = m.wobble.amplitude;
  j["theta_freq_hz"] = m.wobble.frequency ? ojson(*m.wobble.frequency) : ojson(nullptr);
  j["theta_extrema"] = m.wobble.extrema;
  j["theta_sustained"] = m.wobble.sustained;
  j["phid_mean_rad_s"] = m.precession.phid_mean;
  j["phid_osc_amp_rad_s"] = m.precession.phid_osc_amp;
  j["phid_sign_consistent"] = m.precession.phid_sign_consistent;
  j["pend_mean_rad"] = m.precession.pend_mean;
  ojson path;
  if (m.lateral_rms) {
    path["lateral_rms_m"] = *m.lateral_rms;
  } else if (m.circle) {
    path["circle_center_m"] = {m.circle->center.x(), m.circle->center.y()};
    path["circle_radius_m"] = m.circle->radius;
    path["circle_rms_m"] = m.circle->rms;
  } else {
    path["error"] = m.path_error;
  }
  j["path"] = path;
  return j;
}

ojson orderings_to_json(const TurningOrderings& o) {
  return ojson{{"straight1_quiet", o.straight1_quiet},
               {"circular_precesses", o.circular_precesses},
               {"circular_pendulum_offset", o.circular_pendulum_offset},
               {"circular_path_circular", o.circular_path_circular},
               {"straight2_precession_cancels", o.straight2_precession_cancels},
               {"straight2_wobble_exceeds_circular", o.straight2_wobble_exceeds_circular},
               {"wobble_sustained", o.wobble_sustained},
               {"all", o.all()}};
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  for (std::size_t i = 0; i < kTrajectoryColumns.size(); ++i) {
    out << (i ? "," : "") << kTrajectoryColumns[i];
  }
  out << '\n';
  std::string line;
  for (const TrajectorySample& s : traj.samples) {
    line = format_double(s.t);
    for (const Eigen::Index idx : kStateColumns) {
      line += ',';
      line += format_double(s.x(idx));
    }
    for (const double v : {s.hull_torque, s.pendulum_torque, s.kinetic, s.potential,
                           s.energy_residual, s.residual_x, s.residual_z}) {
      line += ',';
      line += format_double(v);
    }
    line += '\n';
    out << line;
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_trajectory_csv(out, traj);
  if (!out) throw ValidationError("error writing " + path.string());
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("trajectory CSV is empty");
  const auto header = split(line, ',');
  if (!std::equal(header.begin(), header.end(), kTrajectoryColumns.begin(),
                  kTrajectoryColumns.end())) {
    throw ValidationError("trajectory CSV header does not match the expected columns");
  }

  Trajectory traj;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != kTrajectoryColumns.size()) {
      throw ValidationError("trajectory CSV line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(kTrajectoryColumns.size()));
    }
    TrajectorySample s;
    s.t = parse_double(fields[0], line_no);
    for (std::size_t k = 0; k < 12; ++k) s.x(kStateColumns[k]) = parse_double(fields[k + 1], line_no);
    s.hull_torque = parse_double(fields[13], line_no);
    s.pendulum_torque = parse_double(fields[14], line_no);
    s.kinetic = parse_double(fields[15], line_no);
    s.potential = parse_double(fields[16], line_no);
    s.energy_residual = parse_double(fields[17], line_no);
    s.residual_x = parse_double(fields[18], line_no);
    s.residual_z = parse_double(fields[19], line_no);
    if (!traj.empty() && !(s.t > traj.samples.back().t)) {
      throw ValidationError("trajectory CSV line " + std::to_string(line_no) +
                            ": time is not strictly increasing");
    }
    traj.samples.push_back(s);
  }
  if (traj.empty()) throw ValidationError("trajectory CSV has no samples");
  return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open trajectory " + path.string());
  return read_trajectory_csv(in);
}

nlohmann::ordered_json build_summary(const ScenarioConfig& config, const Trajectory& traj) {
  const auto windows = segment_phases(traj, config.setup.schedule, config.settle_margin);
  std::vector<PhaseMetrics> phases;
  phases.reserve(windows.size());
  for (const auto& w : windows) phases.push_back(phase_metrics(traj, w));

  double energy_max = 0.0, residual_max = 0.0;
  for (const auto& s : traj.samples) {
    energy_max = std::max(energy_max, std::abs(s.energy_residual));
    residual_max = std::max({residual_max, std::abs(s.residual_x), std::abs(s.residual_z)});
  }

  ojson doc;
  doc["schema"] = "sphbot.summary";
  doc["schema_version"] = kSummarySchemaVersion;
  doc["samples"] = traj.size();
  doc["t_final_s"] = traj.samples.back().t;
  ojson phase_list = ojson::array();
  for (const auto& m : phases) phase_list.push_back(phase_to_json(m));
  doc["phases"] = phase_list;
  const auto orderings = turning_orderings(phases);
  doc["turning_orderings"] = orderings ? orderings_to_json(*orderings) : ojson(nullptr);
  doc["energy_balance_max_abs_J"] = energy_max;
  doc["constraint_residual_max_abs_m_s"] = residual_max;
  doc["config"] = scenario_to_json(config);
  return doc;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw ValidationError("error writing " + path.string());
}

}  // namespace sphbot

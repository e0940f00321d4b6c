#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "json.hpp"
#include "sphbot/scenario.hpp"
#include "sphbot/simulation.hpp"

namespace sphbot {

/// Trajectory CSV header, in column order. The twelve state columns follow
/// the StateVector ordering.
inline constexpr std::array<std::string_view, 20> kTrajectoryColumns = {
    "t",  "phi", "theta", "psi", "X",  "Z",  "phid", "thetad", "psid", "Xd",
    "Zd", "beta", "betad", "T_s", "T_p", "KE", "PE",  "E_residual", "r_x", "r_z"};

inline constexpr int kSummarySchemaVersion = 1;

/// 17 significant digits: every value round-trips exactly and the text is
/// byte-stable across runs.
std::string format_double(double v);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Throws ValidationError on a header mismatch, a short or malformed row, or
/// non-increasing time.
Trajectory read_trajectory_csv(std::istream& in);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Versioned, machine-readable summary: per-phase metrics, turning-maneuver
/// orderings when applicable, energy and constraint bookkeeping, config echo.
/// Depends only on the config and the sampled trajectory, so re-analysing a
/// stored CSV reproduces it byte for byte.
nlohmann::ordered_json build_summary(const ScenarioConfig& config, const Trajectory& traj);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

}  // namespace sphbot

#include "sphbot/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sphbot/errors.hpp"
#include "sphbot/report.hpp"
#include "sphbot/scenario.hpp"
#include "sphbot/simulation.hpp"

namespace sphbot {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct SweepSpec {
  std::string key;
  double min = 0.0;
  double max = 0.0;
  int steps = 1;

  double value(int i) const {
    return steps == 1 ? min : min + (max - min) * i / (steps - 1);
  }
};

SweepSpec parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("--sweep expects <param=min:max:steps>, got '" + text + "'");
  }
  SweepSpec s;
  s.key = text.substr(0, eq);
  const std::string range = text.substr(eq + 1);
  std::vector<std::string> parts;
  std::stringstream ss(range);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 3) {
    throw ValidationError("--sweep range must be min:max:steps, got '" + range + "'");
  }
  auto number = [&](const std::string& p, auto& out) {
    const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), out);
    if (ec != std::errc() || ptr != p.data() + p.size()) {
      throw ValidationError("--sweep: malformed number '" + p + "'");
    }
  };
  number(parts[0], s.min);
  number(parts[1], s.max);
  number(parts[2], s.steps);
  if (s.steps < 1) throw ValidationError("--sweep steps must be >= 1");
  return s;
}

// "params.m_P_kg" or "schedule.1.beta_ref_deg"; a bare name refers to params.
json::json_pointer sweep_pointer(const std::string& key) {
  std::string path = key.find('.') == std::string::npos ? "params." + key : key;
  std::replace(path.begin(), path.end(), '.', '/');
  return json::json_pointer("/" + path);
}

json read_config_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
}

nlohmann::ordered_json diagnostics_json(const SimulationDiagnostics& d, double wall_s) {
  return {{"wall_clock_s", wall_s},
          {"accepted_steps", d.accepted_steps},
          {"rejected_steps", d.rejected_steps},
          {"derivative_evaluations", d.derivative_evaluations},
          {"max_dynamics_residual", d.max_dynamics_residual},
          {"max_acceleration_constraint_residual", d.max_acceleration_constraint_residual}};
}

int simulate_one(const json& doc, const fs::path& out_dir, std::ostream& out,
                 std::ostream& err) {
  try {
    const ScenarioConfig config = parse_scenario(doc);
    fs::create_directories(out_dir);

    const auto start = std::chrono::steady_clock::now();
    const SimulationResult result = integrate(config.setup);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_trajectory_csv(out_dir / "trajectory.csv", result.trajectory);
    write_json(out_dir / "summary.json", build_summary(config, result.trajectory));
    write_json(out_dir / "diagnostics.json", diagnostics_json(result.diagnostics, wall));
    out << "simulate: " << result.trajectory.size() << " samples written to "
        << out_dir.string() << '\n';
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidationError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const AnalysisError& e) {
    err << "analysis failure: " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const fs::filesystem_error& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidationError;
  }
}

int simulate_sweep(const json& doc, const SweepSpec& sweep, const fs::path& out_dir,
                   std::ostream& out, std::ostream& err) {
  const json::json_pointer ptr = sweep_pointer(sweep.key);
  std::vector<json> docs;
  for (int i = 0; i < sweep.steps; ++i) {
    json d = doc;
    try {
      d[ptr] = sweep.value(i);
    } catch (const json::exception& e) {
      throw ValidationError("--sweep: cannot set '" + sweep.key + "': " + e.what());
    }
    docs.push_back(std::move(d));
  }

  std::vector<int> codes(docs.size(), kExitOk);
  std::vector<std::string> outs(docs.size()), errs(docs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < docs.size(); i = next++) {
      char name[32];
      std::snprintf(name, sizeof name, "sweep_%03zu", i);
      std::ostringstream o, e;
      codes[i] = simulate_one(docs[i], out_dir / name, o, e);
      outs[i] = o.str();
      errs[i] = e.str();
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(
      std::thread::hardware_concurrency(), 1, docs.size());
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  pool.clear();

  nlohmann::ordered_json index;
  index["parameter"] = sweep.key;
  index["runs"] = nlohmann::ordered_json::array();
  int worst = kExitOk;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    out << outs[i];
    err << errs[i];
    char name[32];
    std::snprintf(name, sizeof name, "sweep_%03zu", i);
    index["runs"].push_back(
        {{"dir", name}, {"value", sweep.value(static_cast<int>(i))}, {"exit_code", codes[i]}});
    worst = std::max(worst, codes[i]);
  }
  fs::create_directories(out_dir);
  write_json(out_dir / "sweep.json", index);
  return worst;
}

int analyze(const fs::path& traj_path, const fs::path& config_path, const fs::path& out_dir,
            std::ostream& out, std::ostream& err) {
  try {
    const ScenarioConfig config = load_scenario(config_path);
    const Trajectory traj = read_trajectory_csv(traj_path);
    const auto summary = build_summary(config, traj);
    fs::create_directories(out_dir);
    write_json(out_dir / "summary.json", summary);
    out << "analyze: summary written to " << (out_dir / "summary.json").string() << '\n';
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
  } catch (const AnalysisError& e) {
    err << "validation error: trajectory does not fit the config: " << e.what() << '\n';
  } catch (const fs::filesystem_error& e) {
    err << "validation error: " << e.what() << '\n';
  }
  return kExitValidationError;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pendulum-actuated spherical robot simulator", "sphbot"};
  app.require_subcommand(1);

  std::string config, out_dir, sweep, traj;
  CLI::App* sim = app.add_subcommand("simulate", "Run a scenario and write trajectory + summary");
  sim->add_option("--config", config, "Scenario config file")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();
  sim->add_option("--sweep", sweep, "Sweep one config field: <param=min:max:steps>");

  CLI::App* ana = app.add_subcommand("analyze", "Recompute the summary of a stored trajectory");
  ana->add_option("--traj", traj, "trajectory.csv written by simulate")->required();
  ana->add_option("--config", config, "Scenario config the trajectory came from")->required();
  ana->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidationError;
  }

  if (ana->parsed()) return analyze(traj, config, out_dir, out, err);

  try {
    const json doc = read_config_json(config);
    if (!sweep.empty()) return simulate_sweep(doc, parse_sweep(sweep), out_dir, out, err);
    return simulate_one(doc, out_dir, out, err);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidationError;
  }
}

}  // namespace sphbot

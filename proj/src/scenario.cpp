#include "sphbot/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <set>
#include <sstream>

#include "sphbot/errors.hpp"

namespace sphbot {

namespace {

using nlohmann::json;

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

class Reader {
public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail("must be an object");
  }

  void allow_only(std::initializer_list<const char*> keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : obj_.items()) {
      if (!allowed.contains(key)) {
        throw ValidationError("unknown key '" + child_path(key) + "'");
      }
    }
  }

  bool has(const char* key) const { return obj_.contains(key); }

  void number(const char* key, double& out) const {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number()) throw ValidationError(child_path(key) + " must be a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ValidationError(child_path(key) + " must be finite");
  }

  void required_number(const char* key, double& out) const {
    if (!has(key)) throw ValidationError("missing required key '" + child_path(key) + "'");
    number(key, out);
  }

  void boolean(const char* key, bool& out) const {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) throw ValidationError(child_path(key) + " must be true or false");
    out = v.get<bool>();
  }

  Reader child(const char* key) const { return Reader(obj_.at(key), child_path(key)); }

  const json& raw(const char* key) const { return obj_.at(key); }

  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ValidationError((path_.empty() ? std::string("config") : path_) + " " + why);
  }

  const json& obj_;
  std::string path_;
};

void read_params(const Reader& r, RobotParams& p) {
  r.allow_only({"m_H_kg", "m_Y_kg", "m_P_kg", "R_s_m", "R_p_m", "g_m_s2"});
  r.number("m_H_kg", p.m_hull);
  r.number("m_Y_kg", p.m_yoke);
  r.number("m_P_kg", p.m_pendulum);
  r.number("R_s_m", p.sphere_radius);
  r.number("R_p_m", p.pendulum_offset);
  r.number("g_m_s2", p.gravity);
}

struct StateField {
  const char* key;
  Eigen::Index index;
};

constexpr StateField kStateFields[] = {
    {"phi_rad", st::Phi},        {"theta_rad", st::Theta},   {"psi_rad", st::Psi},
    {"X_m", st::X},              {"Z_m", st::Z},             {"phid_rad_s", st::Phid},
    {"thetad_rad_s", st::Thetad}, {"psid_rad_s", st::Psid},  {"Xd_m_s", st::Xd},
    {"Zd_m_s", st::Zd},          {"beta_rad", st::Beta},     {"betad_rad_s", st::Betad},
};

void read_initial_state(const Reader& r, StateVector& x) {
  r.allow_only({"phi_rad", "theta_rad", "psi_rad", "X_m", "Z_m", "phid_rad_s",
                "thetad_rad_s", "psid_rad_s", "Xd_m_s", "Zd_m_s", "beta_rad",
                "betad_rad_s"});
  for (const auto& f : kStateFields) r.number(f.key, x(f.index));
}

SetpointSchedule read_schedule(const json& arr) {
  if (!arr.is_array()) throw ValidationError("schedule must be an array");
  std::vector<ScheduleSegment> segs;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const Reader r(arr[i], "schedule[" + std::to_string(i) + "]");
    r.allow_only({"t_start_s", "beta_ref_deg", "psid_ref_rad_s"});
    ScheduleSegment s;
    double beta_deg = 0.0;
    r.required_number("t_start_s", s.t_start);
    r.required_number("beta_ref_deg", beta_deg);
    r.required_number("psid_ref_rad_s", s.setpoint.psid_ref);
    s.setpoint.beta_ref = beta_deg / kDegPerRad;
    segs.push_back(s);
  }
  return SetpointSchedule(std::move(segs));
}

void read_controllers(const Reader& r, ControllerConfigs& c) {
  r.allow_only({"pendulum", "speed"});
  if (r.has("pendulum")) {
    const Reader p = r.child("pendulum");
    p.allow_only({"kp", "kd", "feedforward", "torque_limit"});
    p.number("kp", c.pendulum.kp);
    p.number("kd", c.pendulum.kd);
    p.boolean("feedforward", c.pendulum.feedforward);
    p.number("torque_limit", c.pendulum.torque_limit);
  }
  if (r.has("speed")) {
    const Reader s = r.child("speed");
    s.allow_only({"kp", "torque_limit"});
    s.number("kp", c.speed.kp);
    s.number("torque_limit", c.speed.torque_limit);
  }
}

void read_integrator(const Reader& r, IntegratorConfig& c) {
  r.allow_only({"rtol", "atol", "h_init_s", "h_max_s", "sample_dt_s", "projection"});
  r.number("rtol", c.rtol);
  r.number("atol", c.atol);
  r.number("h_init_s", c.h_init);
  r.number("h_max_s", c.h_max);
  r.number("sample_dt_s", c.sample_dt);
  r.boolean("projection", c.projection);
}

// Everything that can be checked without running the simulation.
void validate(const ScenarioConfig& c) {
  const SimulationSetup& s = c.setup;
  s.params.validate(s.beta_mode == BetaMode::Frozen);
  s.controllers.pendulum.validate();
  s.controllers.speed.validate();
  s.integrator.validate();
  if (!(s.t_end > 0.0)) throw ValidationError("t_end_s must be > 0");
  if (!(c.settle_margin >= 0.0)) throw ValidationError("analysis.settle_margin_s must be >= 0");
  try {
    check_gimbal(s.initial_state(st::Theta));
  } catch (const GimbalError& e) {
    throw ValidationError(std::string("initial_state.theta_rad: ") + e.what());
  }
  if (s.beta_mode == BetaMode::Frozen && s.initial_state(st::Betad) != 0.0) {
    throw ValidationError("initial_state.betad_rad_s must be 0 when freeze_beta is set");
  }
  const auto& segs = s.schedule.segments();
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const double end = k + 1 < segs.size() ? segs[k + 1].t_start : s.t_end;
    if (segs[k].t_start >= s.t_end) {
      throw ValidationError("schedule[" + std::to_string(k) + "] starts at or after t_end_s");
    }
    if (c.settle_margin >= end - segs[k].t_start) {
      throw ValidationError("analysis.settle_margin_s leaves schedule[" + std::to_string(k) +
                            "] without a steady window");
    }
  }
}

}  // namespace

ScenarioConfig parse_scenario(const nlohmann::json& doc) {
  const Reader root(doc, "");
  root.allow_only({"params", "initial_state", "schedule", "controllers", "integrator",
                   "t_end_s", "freeze_beta", "analysis"});

  ScenarioConfig c;
  SimulationSetup& s = c.setup;
  if (root.has("params")) read_params(root.child("params"), s.params);
  if (root.has("initial_state")) read_initial_state(root.child("initial_state"), s.initial_state);
  if (!root.has("schedule")) throw ValidationError("missing required key 'schedule'");
  s.schedule = read_schedule(root.raw("schedule"));
  if (root.has("controllers")) read_controllers(root.child("controllers"), s.controllers);
  if (root.has("integrator")) read_integrator(root.child("integrator"), s.integrator);
  root.required_number("t_end_s", s.t_end);
  bool freeze = false;
  root.boolean("freeze_beta", freeze);
  s.beta_mode = freeze ? BetaMode::Frozen : BetaMode::Free;
  if (root.has("analysis")) {
    const Reader a = root.child("analysis");
    a.allow_only({"settle_margin_s"});
    a.number("settle_margin_s", c.settle_margin);
  }
  validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

nlohmann::ordered_json scenario_to_json(const ScenarioConfig& c) {
  const SimulationSetup& s = c.setup;
  nlohmann::ordered_json out;
  out["params"] = {{"m_H_kg", s.params.m_hull},       {"m_Y_kg", s.params.m_yoke},
                   {"m_P_kg", s.params.m_pendulum},   {"R_s_m", s.params.sphere_radius},
                   {"R_p_m", s.params.pendulum_offset}, {"g_m_s2", s.params.gravity}};
  nlohmann::ordered_json init;
  for (const auto& f : kStateFields) init[f.key] = s.initial_state(f.index);
  out["initial_state"] = init;
  nlohmann::ordered_json sched = nlohmann::ordered_json::array();
  for (const auto& seg : s.schedule.segments()) {
    sched.push_back({{"t_start_s", seg.t_start},
                     {"beta_ref_deg", seg.setpoint.beta_ref * kDegPerRad},
                     {"psid_ref_rad_s", seg.setpoint.psid_ref}});
  }
  out["schedule"] = sched;
  const auto& pc = s.controllers.pendulum;
  const auto& sc = s.controllers.speed;
  out["controllers"] = {
      {"pendulum",
       {{"kp", pc.kp}, {"kd", pc.kd}, {"feedforward", pc.feedforward},
        {"torque_limit", pc.torque_limit}}},
      {"speed", {{"kp", sc.kp}, {"torque_limit", sc.torque_limit}}}};
  const auto& ic = s.integrator;
  out["integrator"] = {{"rtol", ic.rtol},         {"atol", ic.atol},
                       {"h_init_s", ic.h_init},   {"h_max_s", ic.h_max},
                       {"sample_dt_s", ic.sample_dt}, {"projection", ic.projection}};
  out["t_end_s"] = s.t_end;
  out["freeze_beta"] = s.beta_mode == BetaMode::Frozen;
  out["analysis"] = {{"settle_margin_s", c.settle_margin}};
  return out;
}

}  // namespace sphbot

#include "followsim/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace followsim {

using nlohmann::json;

std::int64_t Scenario::max_ticks() const { return std::llround(max_sim_time / dt); }

std::int64_t Scenario::activation_timeout_ticks() const {
  return std::llround(control.activation_timeout_s / dt);
}

WorldState Scenario::initial_world() const {
  WorldState w;
  w.agents = agents;
  for (AgentState& a : w.agents) {
    const auto [x, y] = agent_position_at(a.script, 0.0);
    a.x = x;
    a.y = y;
  }
  return w;
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing required key '" + key + "' in " + where);
  if (!obj[key].is_number()) throw ConfigError(where + "." + key + " must be a number");
  return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError(where + "." + key + " must be a number");
  return obj[key].get<double>();
}

int int_or(const json& obj, const std::string& key, const std::string& where, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return obj[key].get<int>();
}

std::string format_distance(double d) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", d);
  return buf;
}

}  // namespace

Scenario scenario_from_json(const json& root) {
  if (!root.is_object()) throw ConfigError("scenario file must contain a JSON object");
  reject_unknown_keys(root, {"scenario", "agents", "noise", "control"}, "top level");

  Scenario s;
  if (root.contains("scenario")) {
    const json& sc = root["scenario"];
    if (!sc.is_object()) throw ConfigError("'scenario' must be an object");
    reject_unknown_keys(
        sc, {"dt", "max_sim_time", "activation_distance", "seed", "passerby_offset"}, "scenario");
    s.dt = number_or(sc, "dt", "scenario", s.dt);
    s.max_sim_time = number_or(sc, "max_sim_time", "scenario", s.max_sim_time);
    s.activation_distance = number_or(sc, "activation_distance", "scenario", s.activation_distance);
    s.passerby_offset = number_or(sc, "passerby_offset", "scenario", s.passerby_offset);
    if (sc.contains("seed")) {
      if (!sc["seed"].is_number_integer() && !sc["seed"].is_number_unsigned()) {
        throw ConfigError("scenario.seed must be an integer");
      }
      s.seed = sc["seed"].get<std::uint64_t>();
    }
  }
  if (s.dt <= 0.0) throw ConfigError("scenario.dt must be > 0");
  if (s.max_sim_time < 30.0) {
    throw ConfigError("scenario.max_sim_time must be >= 30 (activation window)");
  }
  if (s.activation_distance != 1.5 && s.activation_distance != 2.5 &&
      s.activation_distance != 3.5) {
    throw ConfigError("activation_distance not in {1.5,2.5,3.5}");
  }

  if (root.contains("agents")) {
    if (!root["agents"].is_array()) throw ConfigError("'agents' must be an array");
    std::set<int> seen_ids;
    int users = 0;
    for (const json& ja : root["agents"]) {
      const std::string where = "agents[" + std::to_string(s.agents.size()) + "]";
      if (!ja.is_object()) throw ConfigError(where + " must be an object");
      reject_unknown_keys(ja, {"id", "role", "width_m", "height_m", "hand_raised", "waypoints"},
                          where);
      AgentState a;
      if (!ja.contains("id") || !ja["id"].is_number_integer()) {
        throw ConfigError(where + ".id must be an integer");
      }
      a.agent_id = ja["id"].get<int>();
      if (!seen_ids.insert(a.agent_id).second) {
        throw ConfigError(where + ".id duplicates agent id " + std::to_string(a.agent_id));
      }
      if (!ja.contains("role") || !ja["role"].is_string()) {
        throw ConfigError(where + ".role must be 'user' or 'passerby'");
      }
      const std::string role = ja["role"].get<std::string>();
      if (role == "user") {
        a.is_user = true;
        ++users;
      } else if (role == "passerby") {
        a.is_user = false;
      } else {
        throw ConfigError(where + ".role must be 'user' or 'passerby', got '" + role + "'");
      }
      a.width_m = number_or(ja, "width_m", where, a.width_m);
      a.height_m = number_or(ja, "height_m", where, a.height_m);
      if (a.width_m <= 0.0 || a.height_m <= 0.0) {
        throw ConfigError(where + " width_m/height_m must be > 0");
      }
      if (ja.contains("hand_raised")) {
        const json& hr = ja["hand_raised"];
        if (!hr.is_array() || hr.size() != 2 || !hr[0].is_number() || !hr[1].is_number()) {
          throw ConfigError(where + ".hand_raised must be [start_s, end_s]");
        }
        const double start = hr[0].get<double>();
        const double end = hr[1].get<double>();
        if (!(start < end)) throw ConfigError(where + ".hand_raised start must be < end");
        a.hand_raised_interval = {start, end};
      }
      if (!ja.contains("waypoints") || !ja["waypoints"].is_array() || ja["waypoints"].empty()) {
        throw ConfigError(where + ".waypoints must be a non-empty array of [t, x, y]");
      }
      double prev_t = -1.0;
      bool first = true;
      for (const json& jw : ja["waypoints"]) {
        if (!jw.is_array() || jw.size() != 3 || !jw[0].is_number() || !jw[1].is_number() ||
            !jw[2].is_number()) {
          throw ConfigError(where + ".waypoints entries must be [t, x, y]");
        }
        WaypointScript::Waypoint wp{jw[0].get<double>(), jw[1].get<double>(), jw[2].get<double>()};
        if (!first && !(wp.t > prev_t)) {
          throw ConfigError(where + ".waypoints times must be strictly increasing");
        }
        prev_t = wp.t;
        first = false;
        a.script.waypoints.push_back(wp);
      }
      s.agents.push_back(a);
    }
    if (users > 1) throw ConfigError("at most one agent may have role 'user'");
  }

  if (root.contains("noise")) {
    const json& jn = root["noise"];
    if (!jn.is_object()) throw ConfigError("'noise' must be an object");
    reject_unknown_keys(jn,
                        {"box_jitter_sigma_px", "confidence_base", "confidence_noise_sigma",
                         "drop_occlusion_threshold", "min_confidence"},
                        "noise");
    NoiseParams& n = s.noise;
    n.box_jitter_sigma_px = number_or(jn, "box_jitter_sigma_px", "noise", n.box_jitter_sigma_px);
    n.confidence_base = number_or(jn, "confidence_base", "noise", n.confidence_base);
    n.confidence_noise_sigma =
        number_or(jn, "confidence_noise_sigma", "noise", n.confidence_noise_sigma);
    n.drop_occlusion_threshold =
        number_or(jn, "drop_occlusion_threshold", "noise", n.drop_occlusion_threshold);
    n.min_confidence = number_or(jn, "min_confidence", "noise", n.min_confidence);
    if (n.box_jitter_sigma_px < 0.0 || n.confidence_noise_sigma < 0.0) {
      throw ConfigError("noise sigmas must be >= 0");
    }
    if (n.drop_occlusion_threshold < 0.0 || n.drop_occlusion_threshold > 1.0 ||
        n.min_confidence < 0.0 || n.min_confidence > 1.0 || n.confidence_base < 0.0 ||
        n.confidence_base > 1.0) {
      throw ConfigError("noise thresholds must be within [0,1]");
    }
  }

  if (root.contains("control")) {
    const json& jc = root["control"];
    if (!jc.is_object()) throw ConfigError("'control' must be an object");
    reject_unknown_keys(jc,
                        {"n_adjust", "omega_max", "v_max", "k_v", "r_stop", "center_tol_px",
                         "raise_frames_K", "patience_frames", "activation_timeout_s",
                         "search_omega"},
                        "control");
    ControlParams& c = s.control;
    c.n_adjust = number_or(jc, "n_adjust", "control", c.n_adjust);
    c.omega_max = number_or(jc, "omega_max", "control", c.omega_max);
    c.v_max = number_or(jc, "v_max", "control", c.v_max);
    c.k_v = number_or(jc, "k_v", "control", c.k_v);
    c.r_stop = number_or(jc, "r_stop", "control", c.r_stop);
    c.center_tol_px = number_or(jc, "center_tol_px", "control", c.center_tol_px);
    c.raise_frames_k = int_or(jc, "raise_frames_K", "control", c.raise_frames_k);
    c.patience_frames = int_or(jc, "patience_frames", "control", c.patience_frames);
    c.activation_timeout_s =
        number_or(jc, "activation_timeout_s", "control", c.activation_timeout_s);
    c.search_omega = number_or(jc, "search_omega", "control", c.search_omega);
    if (c.omega_max <= 0.0 || c.v_max <= 0.0 || c.k_v <= 0.0 || c.r_stop <= 0.0 ||
        c.center_tol_px <= 0.0 || c.raise_frames_k < 1 || c.patience_frames < 1 ||
        c.activation_timeout_s <= 0.0 || c.search_omega <= 0.0) {
      throw ConfigError("control thresholds must be positive");
    }
  }
  return s;
}

Scenario load_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }
  return scenario_from_json(root);
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  Scenario s = load_scenario(ss.str());
  s.scenario_id = path;
  return s;
}

json scenario_to_json(const Scenario& s) {
  json root;
  root["scenario"] = {{"dt", s.dt},
                      {"max_sim_time", s.max_sim_time},
                      {"activation_distance", s.activation_distance},
                      {"seed", s.seed},
                      {"passerby_offset", s.passerby_offset}};
  json agents = json::array();
  for (const AgentState& a : s.agents) {
    json ja;
    ja["id"] = a.agent_id;
    ja["role"] = a.is_user ? "user" : "passerby";
    ja["width_m"] = a.width_m;
    ja["height_m"] = a.height_m;
    if (a.hand_raised_interval) {
      ja["hand_raised"] = {a.hand_raised_interval->first, a.hand_raised_interval->second};
    }
    json wps = json::array();
    for (const auto& wp : a.script.waypoints) {
      wps.push_back({wp.t, wp.x, wp.y});
    }
    ja["waypoints"] = wps;
    agents.push_back(ja);
  }
  root["agents"] = agents;
  root["noise"] = {{"box_jitter_sigma_px", s.noise.box_jitter_sigma_px},
                   {"confidence_base", s.noise.confidence_base},
                   {"confidence_noise_sigma", s.noise.confidence_noise_sigma},
                   {"drop_occlusion_threshold", s.noise.drop_occlusion_threshold},
                   {"min_confidence", s.noise.min_confidence}};
  root["control"] = {{"n_adjust", s.control.n_adjust},
                     {"omega_max", s.control.omega_max},
                     {"v_max", s.control.v_max},
                     {"k_v", s.control.k_v},
                     {"r_stop", s.control.r_stop},
                     {"center_tol_px", s.control.center_tol_px},
                     {"raise_frames_K", s.control.raise_frames_k},
                     {"patience_frames", s.control.patience_frames},
                     {"activation_timeout_s", s.control.activation_timeout_s},
                     {"search_omega", s.control.search_omega}};
  return root;
}

namespace {

// Standing user at (D, 0), robot at the origin looking down +x. The
// passer-by shuttles across the robot-user line 0.5 m in front of the
// user at 1 m/s, crossing the optical axis at roughly t = 2.8, 6.4 and
// 10.0 s.
Scenario make_default_scenario(double distance) {
  Scenario s;
  s.activation_distance = distance;
  s.scenario_id = "default@" + format_distance(distance);

  AgentState user;
  user.agent_id = 1;
  user.is_user = true;
  user.hand_raised_interval = {{1.0, 5.0}};
  user.script.waypoints = {{0.0, distance, 0.0}};
  s.agents.push_back(user);

  AgentState passerby;
  passerby.agent_id = 2;
  passerby.is_user = false;
  const double xp = distance - s.passerby_offset;
  passerby.script.waypoints = {{1.0, xp, 1.8},
                               {4.6, xp, -1.8},
                               {8.2, xp, 1.8},
                               {11.8, xp, -1.8}};
  s.agents.push_back(passerby);
  return s;
}

}  // namespace

bool is_builtin_scenario_name(const std::string& name) {
  const auto at = name.find('@');
  if (at == std::string::npos) return false;
  const std::string base = name.substr(0, at);
  return base == "default" || base == "crossing" || base == "clear" || base == "timeout";
}

Scenario builtin_scenario(const std::string& name) {
  const auto at = name.find('@');
  if (at == std::string::npos) {
    throw ConfigError("not a builtin scenario name: '" + name + "'");
  }
  const std::string base = name.substr(0, at);
  const std::string dist_str = name.substr(at + 1);
  double distance = 0.0;
  try {
    distance = std::stod(dist_str);
  } catch (...) {
    throw ConfigError("bad distance in builtin scenario name '" + name + "'");
  }
  if (distance != 1.5 && distance != 2.5 && distance != 3.5) {
    throw ConfigError("activation_distance not in {1.5,2.5,3.5}");
  }
  Scenario s = make_default_scenario(distance);
  if (base == "default") {
    // noise defaults as-is
  } else if (base == "crossing") {
    s.noise.box_jitter_sigma_px = 0.0;
    s.noise.confidence_noise_sigma = 0.0;
  } else if (base == "clear") {
    s.agents.pop_back();  // user only
    s.noise.box_jitter_sigma_px = 0.0;
    s.noise.confidence_noise_sigma = 0.0;
  } else if (base == "timeout") {
    s.agents.pop_back();
    s.agents[0].hand_raised_interval.reset();  // nobody ever raises
  } else {
    throw ConfigError("not a builtin scenario name: '" + name + "'");
  }
  s.scenario_id = base + "@" + format_distance(distance);
  return s;
}

Scenario load_scenario_arg(const std::string& path_or_builtin) {
  if (is_builtin_scenario_name(path_or_builtin)) return builtin_scenario(path_or_builtin);
  return load_scenario_file(path_or_builtin);
}

}  // namespace followsim

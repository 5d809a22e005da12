#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "followsim/behavior.hpp"
#include "followsim/perception.hpp"
#include "followsim/world.hpp"

namespace followsim {

// Everything a trial needs: world script, activation distance, noise and
// control parameters, RNG seed.
struct Scenario {
  std::string scenario_id = "unnamed";
  double dt = 0.1;
  double max_sim_time = 60.0;
  double activation_distance = 2.5;  // one of 1.5, 2.5, 3.5
  std::uint64_t seed = 0;
  double passerby_offset = 0.5;
  std::vector<AgentState> agents;
  NoiseParams noise;
  ControlParams control;

  std::int64_t max_ticks() const;
  std::int64_t activation_timeout_ticks() const;
  WorldState initial_world() const;
};

// Parses and validates scenario JSON. Unknown keys are rejected;
// violations name the offending field.
Scenario load_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

// Accepts a file path or a builtin name (default@D, crossing@D, clear@D,
// timeout@D with D in {1.5, 2.5, 3.5}).
Scenario load_scenario_arg(const std::string& path_or_builtin);
bool is_builtin_scenario_name(const std::string& name);
Scenario builtin_scenario(const std::string& name);

nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

}  // namespace followsim

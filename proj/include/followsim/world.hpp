#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "followsim/motion.hpp"

namespace followsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RobotPose {
  double x = 0.0;        // m
  double y = 0.0;        // m
  double heading = 0.0;  // rad, (-pi, pi], 0 = +x
  double linear_v = 0.0;
  double angular_v = 0.0;
};

// Piecewise-linear timed path. Before the first waypoint an agent stands at
// the first point, after the last it stands at the last.
struct WaypointScript {
  struct Waypoint {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
  };
  std::vector<Waypoint> waypoints;
};

std::pair<double, double> agent_position_at(const WaypointScript& script, double t);

struct AgentState {
  int agent_id = 0;
  double x = 0.0;
  double y = 0.0;
  WaypointScript script;
  std::optional<std::pair<double, double>> hand_raised_interval;  // [start_s, end_s)
  double width_m = 0.5;
  double height_m = 1.7;
  bool is_user = false;
};

struct WorldState {
  double sim_time = 0.0;  // always tick_index * dt
  RobotPose robot;
  std::vector<AgentState> agents;
  std::int64_t tick_index = 0;
};

// Unicycle step: rotate first, then translate along the new heading.
// Agents are re-sampled from their scripts at the new sim time.
WorldState step_world(const WorldState& world, const MotionCommand& cmd, double dt);

// FNV-1a over the pose/agent doubles; used by determinism checks.
std::uint64_t world_state_hash(const WorldState& world);

}  // namespace followsim

#include "followsim/world.hpp"

#include <cmath>
#include <cstring>

#include "followsim/geometry.hpp"

namespace followsim {

std::pair<double, double> agent_position_at(const WaypointScript& script, double t) {
  const auto& wps = script.waypoints;
  if (wps.empty()) {
    throw ConfigError("waypoint script is empty");
  }
  if (t <= wps.front().t) return {wps.front().x, wps.front().y};
  if (t >= wps.back().t) return {wps.back().x, wps.back().y};
  for (std::size_t i = 1; i < wps.size(); ++i) {
    if (t <= wps[i].t) {
      const auto& a = wps[i - 1];
      const auto& b = wps[i];
      const double f = (t - a.t) / (b.t - a.t);
      return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
    }
  }
  return {wps.back().x, wps.back().y};
}

WorldState step_world(const WorldState& world, const MotionCommand& cmd, double dt) {
  WorldState next = world;
  next.tick_index = world.tick_index + 1;
  next.sim_time = static_cast<double>(next.tick_index) * dt;

  RobotPose& r = next.robot;
  r.heading = wrap_angle(r.heading + cmd.omega * dt);
  r.x += cmd.v * std::cos(r.heading) * dt;
  r.y += cmd.v * std::sin(r.heading) * dt;
  r.linear_v = cmd.v;
  r.angular_v = cmd.omega;

  for (AgentState& agent : next.agents) {
    const auto [ax, ay] = agent_position_at(agent.script, next.sim_time);
    agent.x = ax;
    agent.y = ay;
  }
  return next;
}

namespace {

void hash_double(std::uint64_t& h, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) {
    h ^= (bits >> (8 * i)) & 0xffu;
    h *= 1099511628211ull;
  }
}

}  // namespace

std::uint64_t world_state_hash(const WorldState& world) {
  std::uint64_t h = 14695981039346656037ull;
  hash_double(h, world.sim_time);
  hash_double(h, static_cast<double>(world.tick_index));
  hash_double(h, world.robot.x);
  hash_double(h, world.robot.y);
  hash_double(h, world.robot.heading);
  hash_double(h, world.robot.linear_v);
  hash_double(h, world.robot.angular_v);
  for (const AgentState& a : world.agents) {
    hash_double(h, static_cast<double>(a.agent_id));
    hash_double(h, a.x);
    hash_double(h, a.y);
  }
  return h;
}

}  // namespace followsim

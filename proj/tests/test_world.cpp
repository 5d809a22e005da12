#include <doctest.h>

#include <random>

#include "followsim/geometry.hpp"
#include "followsim/scenario.hpp"
#include "followsim/world.hpp"

using namespace followsim;

namespace {

WaypointScript script(std::initializer_list<WaypointScript::Waypoint> wps) {
  WaypointScript s;
  s.waypoints = wps;
  return s;
}

}  // namespace

TEST_CASE("step_world zero-motion identity") {
  WorldState w;
  const WorldState next = step_world(w, MotionCommand{}, 0.1);
  CHECK(next.robot.x == 0.0);
  CHECK(next.robot.y == 0.0);
  CHECK(next.robot.heading == 0.0);
  CHECK(next.sim_time == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(next.tick_index == 1);
}

TEST_CASE("step_world axis-aligned straight motion") {
  WorldState w;
  MotionCommand cmd;
  cmd.v = 1.0;
  const WorldState next = step_world(w, cmd, 0.1);
  CHECK(next.robot.x == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(next.robot.y == 0.0);
}

TEST_CASE("step_world heading wraps to (-pi, pi]") {
  WorldState w;
  w.robot.heading = kPi - 0.05;
  MotionCommand cmd;
  cmd.omega = 1.0;
  const WorldState next = step_world(w, cmd, 0.1);
  CHECK(next.robot.heading == doctest::Approx(-kPi + 0.05).epsilon(1e-12));
  CHECK(next.robot.heading <= kPi);
  CHECK(next.robot.heading > -kPi);
}

TEST_CASE("step_world rotates before translating") {
  WorldState w;
  MotionCommand cmd;
  cmd.v = 1.0;
  cmd.omega = kPi / 2.0 / 0.1;  // quarter turn in one tick
  const WorldState next = step_world(w, cmd, 0.1);
  CHECK(next.robot.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(next.robot.y == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("agent_position_at interpolates and clamps") {
  const auto s = script({{0, 0, 0}, {10, 10, 0}});
  CHECK(agent_position_at(s, 5.0) == std::pair{5.0, 0.0});
  CHECK(agent_position_at(s, -1.0) == std::pair{0.0, 0.0});
  CHECK(agent_position_at(s, 99.0) == std::pair{10.0, 0.0});

  const auto s2 = script({{0, 0, 0}, {4, 2, 2}, {8, 2, 6}});
  const auto [x, y] = agent_position_at(s2, 6.0);
  CHECK(x == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(y == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("agent_position_at rejects empty script") {
  CHECK_THROWS_AS(agent_position_at(WaypointScript{}, 0.0), ConfigError);
}

TEST_CASE("determinism: identical runs produce identical state streams") {
  const Scenario scenario = builtin_scenario("default@2.5");
  auto run_hashes = [&] {
    WorldState w = scenario.initial_world();
    std::mt19937_64 rng(42);
    std::vector<std::uint64_t> hashes;
    for (int i = 0; i < 200; ++i) {
      MotionCommand cmd;
      cmd.v = std::uniform_real_distribution<double>(0.0, 0.35)(rng);
      cmd.omega = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
      w = step_world(w, cmd, scenario.dt);
      hashes.push_back(world_state_hash(w));
    }
    return hashes;
  };
  CHECK(run_hashes() == run_hashes());
}

TEST_CASE("time consistency over many steps") {
  WorldState w;
  const double dt = 0.1;
  for (int i = 0; i < 1000; ++i) w = step_world(w, MotionCommand{}, dt);
  CHECK(w.tick_index == 1000);
  CHECK(std::abs(w.sim_time - 1000 * dt) <= 1e-9);
  CHECK(w.sim_time == 1000 * dt);  // product, not accumulation
}

TEST_CASE("script conformance at every tick") {
  const Scenario scenario = builtin_scenario("default@2.5");
  WorldState w = scenario.initial_world();
  for (int i = 0; i < 150; ++i) {
    w = step_world(w, MotionCommand{}, scenario.dt);
    for (std::size_t a = 0; a < w.agents.size(); ++a) {
      const auto [x, y] = agent_position_at(scenario.agents[a].script, w.sim_time);
      CHECK(w.agents[a].x == x);
      CHECK(w.agents[a].y == y);
    }
  }
}

TEST_CASE("load_scenario applies defaults") {
  const Scenario s = load_scenario(R"({"scenario": {"activation_distance": 2.5}})");
  CHECK(s.dt == 0.1);
  CHECK(s.passerby_offset == 0.5);
  CHECK(s.max_sim_time == 60.0);
  CHECK(s.activation_distance == 2.5);
  CHECK(s.agents.empty());
  CHECK(s.noise.box_jitter_sigma_px == 1.0);
  CHECK(s.control.n_adjust == 0.9);
}

TEST_CASE("load_scenario rejects bad activation distance") {
  CHECK_THROWS_WITH_AS(load_scenario(R"({"scenario": {"activation_distance": 4.0}})"),
                       "activation_distance not in {1.5,2.5,3.5}", ConfigError);
}

TEST_CASE("load_scenario rejects non-monotone waypoints") {
  const std::string text = R"({
    "scenario": {"activation_distance": 2.5},
    "agents": [{"id": 1, "role": "user", "waypoints": [[0, 1, 0], [5, 2, 0], [3, 3, 0]]}]
  })";
  try {
    load_scenario(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("strictly increasing") != std::string::npos);
  }
}

TEST_CASE("load_scenario rejects unknown keys") {
  CHECK_THROWS_AS(load_scenario(R"({"scenario": {"activation_distance": 2.5}, "extra": 1})"),
                  ConfigError);
  CHECK_THROWS_AS(load_scenario(R"({"scenario": {"activation_distance": 2.5, "warp": 9}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      load_scenario(
          R"({"scenario": {"activation_distance": 2.5}, "noise": {"sigma_box": 1.0}})"),
      ConfigError);
}

TEST_CASE("load_scenario validates agent fields") {
  CHECK_THROWS_AS(
      load_scenario(
          R"({"agents": [{"id": 1, "role": "robot", "waypoints": [[0, 1, 0]]}]})"),
      ConfigError);
  CHECK_THROWS_AS(
      load_scenario(
          R"({"agents": [{"id": 1, "role": "user", "hand_raised": [5, 2], "waypoints": [[0, 1, 0]]}]})"),
      ConfigError);
  CHECK_THROWS_AS(
      load_scenario(
          R"({"agents": [{"id": 1, "role": "user", "waypoints": [[0,1,0]]},
                          {"id": 1, "role": "passerby", "waypoints": [[0,2,0]]}]})"),
      ConfigError);
}

TEST_CASE("scenario json round-trips") {
  const Scenario s = builtin_scenario("default@3.5");
  const Scenario back = scenario_from_json(scenario_to_json(s));
  CHECK(back.activation_distance == s.activation_distance);
  CHECK(back.agents.size() == s.agents.size());
  CHECK(back.agents[1].script.waypoints.size() == s.agents[1].script.waypoints.size());
  CHECK(scenario_to_json(back) == scenario_to_json(s));
}

TEST_CASE("scenario parse error names the location") {
  try {
    load_scenario("{\"scenario\": [}");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("parse error") != std::string::npos);
  }
}

#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "followsim/perception.hpp"
#include "followsim/tracker.hpp"

using namespace followsim;

namespace {

Detection det_at(double cx, double cy, double w, double h, double conf, int truth_id = 0) {
  Detection d;
  d.box = ImageBox{cx, cy, w, h};
  d.confidence = conf;
  d.truth_agent_id = truth_id;
  return d;
}

AgentState moving_agent(int id, double x, double y0, double y1, double t1) {
  AgentState a;
  a.agent_id = id;
  a.x = x;
  a.y = y0;
  a.script.waypoints = {{0.0, x, y0}, {t1, x, y1}};
  return a;
}

NoiseParams zero_noise() {
  NoiseParams n;
  n.box_jitter_sigma_px = 0.0;
  n.confidence_noise_sigma = 0.0;
  return n;
}

// Replays a static-robot world for `frames` ticks and feeds each policy
// the zero-noise detections; returns the per-frame confirmed tracks.
std::vector<std::vector<Track>> replay(Tracker& tracker, WorldState world, int frames,
                                       double dt = 0.1) {
  std::vector<std::vector<Track>> out;
  GaussianRng rng(1);
  const CameraModel cam;
  for (int f = 0; f < frames; ++f) {
    const FrameObservation obs = render_frame(world, cam);
    const auto dets = detect(obs, zero_noise(), rng);
    out.push_back(tracker.update(dets, EgoMotionHint{0.0, dt}));
    world = step_world(world, MotionCommand{}, dt);
  }
  return out;
}

}  // namespace

TEST_CASE("iou identities") {
  const ImageBox a{10, 10, 10, 10};
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, ImageBox{100, 100, 10, 10}) == 0.0);
  // corners (0,0,10,10) and (5,0,15,10): 50 / 150
  const ImageBox b = ImageBox::from_corners(0, 0, 10, 10);
  const ImageBox c = ImageBox::from_corners(5, 0, 15, 10);
  CHECK(iou(b, c) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("iou symmetry and translation invariance") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(1.0, 50.0);
  for (int i = 0; i < 200; ++i) {
    const ImageBox a{u(rng), u(rng), u(rng), u(rng)};
    const ImageBox b{u(rng), u(rng), u(rng), u(rng)};
    const double ab = iou(a, b);
    CHECK(ab == iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    const double dx = u(rng), dy = u(rng);
    const ImageBox a2{a.cx + dx, a.cy + dy, a.w, a.h};
    const ImageBox b2{b.cx + dx, b.cy + dy, b.w, b.h};
    CHECK(iou(a2, b2) == doctest::Approx(ab).epsilon(1e-9));
  }
}

TEST_CASE("ego_compensate shifts cx by omega*dt*(W/hfov)") {
  const CameraModel cam;
  const std::vector<ImageBox> boxes = {{80, 60, 30, 90}};
  CHECK(ego_compensate(boxes, 0.0, 0.1, cam)[0].cx == 80.0);
  const auto shifted = ego_compensate(boxes, 0.3, 0.1, cam);
  CHECK(shifted[0].cx == doctest::Approx(80.0 + 4.583662361046586).epsilon(1e-12));
  CHECK(shifted[0].w == 30.0);
  CHECK(shifted[0].cy == 60.0);
}

TEST_CASE("ego compensation tracks a world-stationary agent through a pan") {
  const CameraModel cam;
  const double omega = 0.3, dt = 0.1;
  AgentState agent;
  agent.agent_id = 1;
  agent.x = 2.5;
  agent.y = 0.3;
  RobotPose robot;
  for (int f = 0; f < 8; ++f) {
    const auto before = project_agent(robot, agent, cam);
    RobotPose rotated = robot;
    rotated.heading = wrap_angle(robot.heading + omega * dt);
    const auto after = project_agent(rotated, agent, cam);
    REQUIRE(before.has_value());
    REQUIRE(after.has_value());
    const auto compensated = ego_compensate({*before}, omega, dt, cam);
    CHECK(std::abs(compensated[0].cx - after->cx) < 1.0);
    robot = rotated;
  }
}

TEST_CASE("genesis: first detection spawns track id 1") {
  for (TrackerKind kind : all_tracker_kinds()) {
    Tracker tracker(kind, TrackerParams{});
    const auto tracks = tracker.update({det_at(80, 60, 30, 90, 0.9)}, EgoMotionHint{});
    REQUIRE(tracks.size() == 1);
    CHECK(tracks[0].track_id == 1);
    CHECK(tracks[0].time_since_update == 0);
    CHECK(tracks[0].hits == 1);
  }
}

TEST_CASE("persistence: stationary detection keeps one id") {
  for (TrackerKind kind : all_tracker_kinds()) {
    Tracker tracker(kind, TrackerParams{});
    for (int f = 0; f < 5; ++f) {
      const auto tracks = tracker.update({det_at(80, 60, 30, 90, 0.9)}, EgoMotionHint{});
      REQUIRE(tracks.size() == 1);
      CHECK(tracks[0].track_id == 1);
      CHECK(tracks[0].time_since_update == 0);
    }
  }
}

TEST_CASE("low-confidence detections do not spawn tracks") {
  Tracker tracker(TrackerKind::kByteTrack, TrackerParams{});
  CHECK(tracker.update({det_at(80, 60, 30, 90, 0.3)}, EgoMotionHint{}).empty());
  // but they sustain an existing track through stage 2
  Tracker t2(TrackerKind::kByteTrack, TrackerParams{});
  t2.update({det_at(80, 60, 30, 90, 0.9)}, EgoMotionHint{});
  const auto tracks = t2.update({det_at(81, 60, 30, 90, 0.3)}, EgoMotionHint{});
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].track_id == 1);
  CHECK(tracks[0].confidence_last == 0.3);
}

TEST_CASE("tracks expire after max_age unmatched frames") {
  TrackerParams params;
  params.max_age = 3;
  Tracker tracker(TrackerKind::kOcSort, params);
  tracker.update({det_at(80, 60, 30, 90, 0.9)}, EgoMotionHint{});
  for (int f = 0; f < 4; ++f) CHECK(tracker.update({}, EgoMotionHint{}).empty());
  // Re-detection now spawns a fresh id: the old track is gone.
  const auto tracks = tracker.update({det_at(80, 60, 30, 90, 0.9)}, EgoMotionHint{});
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].track_id == 2);
}

TEST_CASE("id uniqueness and strictly increasing allocation under churn") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (TrackerKind kind : all_tracker_kinds()) {
    Tracker tracker(kind, TrackerParams{});
    int max_seen = 0;
    for (int f = 0; f < 120; ++f) {
      std::vector<Detection> dets;
      const int n = static_cast<int>(rng() % 4);
      for (int i = 0; i < n; ++i) {
        dets.push_back(det_at(20 + 40 * i + u(rng) * 8, 60, 25, 80, 0.3 + 0.7 * u(rng)));
      }
      const auto tracks = tracker.update(dets, EgoMotionHint{});
      std::set<int> ids;
      for (const Track& t : tracks) {
        CHECK(ids.insert(t.track_id).second);  // pairwise distinct
        max_seen = std::max(max_seen, t.track_id);
      }
      for (const Track& t : tracks) CHECK(t.track_id <= max_seen);
    }
  }
}

TEST_CASE("zero-noise persistence on moving agents for every policy") {
  WorldState world;
  world.agents = {moving_agent(1, 2.5, -0.5, 0.5, 4.0), moving_agent(2, 1.5, 0.5, -0.5, 4.0)};
  for (TrackerKind kind : all_tracker_kinds()) {
    Tracker tracker(kind, TrackerParams{});
    const auto frames = replay(tracker, world, 30);
    std::map<int, std::set<int>> ids_by_truth;
    for (std::size_t f = 0; f < frames.size(); ++f) {
      CHECK(frames[f].size() == 2);
    }
    // Constant identity per agent across the run: recover which truth
    // agent each track follows via the last detection index geometry.
    GaussianRng rng(1);
    WorldState w = world;
    const CameraModel cam;
    for (std::size_t f = 0; f < frames.size(); ++f) {
      const FrameObservation obs = render_frame(w, cam);
      const auto dets = detect(obs, zero_noise(), rng);
      for (const Track& t : frames[f]) {
        REQUIRE(t.last_det_index >= 0);
        REQUIRE(t.last_det_index < static_cast<int>(dets.size()));
        ids_by_truth[dets[t.last_det_index].truth_agent_id].insert(t.track_id);
      }
      w = step_world(w, MotionCommand{}, 0.1);
    }
    for (const auto& [truth_id, ids] : ids_by_truth) {
      CHECK(ids.size() == 1);  // one stable track id per agent
    }
  }
}

TEST_CASE("crossing fixture: ocsort holds identity through occlusion, baseline does not") {
  // Two agents swap lateral positions over ~10 frames; the farther one is
  // fully occluded (dropped) for 3 frames around the crossing.
  WorldState world;
  world.agents = {moving_agent(2, 2.0, -0.4, 0.4, 0.9), moving_agent(1, 3.0, 0.4, -0.4, 0.9)};

  // First verify the fixture shape itself: exactly 3 dropped frames.
  {
    WorldState w = world;
    GaussianRng rng(1);
    int dropped = 0;
    for (int f = 0; f < 12; ++f) {
      const FrameObservation obs = render_frame(w, CameraModel{});
      const auto dets = detect(obs, zero_noise(), rng);
      bool far_present = false;
      for (const Detection& d : dets) {
        if (d.truth_agent_id == 1) far_present = true;
      }
      if (!far_present) ++dropped;
      w = step_world(w, MotionCommand{}, 0.1);
    }
    CHECK(dropped == 3);
  }

  const auto final_id_on_far_agent = [&](TrackerKind kind) {
    Tracker tracker(kind, TrackerParams{});
    WorldState w = world;
    GaussianRng rng(1);
    const CameraModel cam;
    int first_far_id = -1;
    int last_far_id = -1;
    for (int f = 0; f < 12; ++f) {
      const FrameObservation obs = render_frame(w, cam);
      const auto dets = detect(obs, zero_noise(), rng);
      const auto tracks = tracker.update(dets, EgoMotionHint{});
      for (const Track& t : tracks) {
        if (t.last_det_index >= 0 && dets[t.last_det_index].truth_agent_id == 1) {
          if (first_far_id < 0) first_far_id = t.track_id;
          last_far_id = t.track_id;
        }
      }
      w = step_world(w, MotionCommand{}, 0.1);
    }
    return std::pair{first_far_id, last_far_id};
  };

  const auto [oc_first, oc_last] = final_id_on_far_agent(TrackerKind::kOcSort);
  CHECK(oc_first > 0);
  CHECK(oc_first == oc_last);  // identity retained through the crossing

  const auto [bl_first, bl_last] = final_id_on_far_agent(TrackerKind::kBaseline);
  CHECK(bl_first > 0);
  CHECK(bl_first != bl_last);  // id stolen or re-spawned
}

TEST_CASE("kalman covariance stays PSD through tracker use") {
  WorldState world;
  world.agents = {moving_agent(1, 2.5, -0.5, 0.5, 3.0), moving_agent(2, 1.8, 0.5, -0.5, 3.0)};
  Tracker tracker(TrackerKind::kOcSort, TrackerParams{});
  WorldState w = world;
  GaussianRng rng(1);
  for (int f = 0; f < 40; ++f) {
    const FrameObservation obs = render_frame(w, CameraModel{});
    const auto dets = detect(obs, zero_noise(), rng);
    const auto tracks = tracker.update(dets, EgoMotionHint{});
    for (const Track& t : tracks) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 8, 8>> solver(t.kalman.covariance);
      CHECK(solver.eigenvalues().minCoeff() >= -1e-9);
    }
    w = step_world(w, MotionCommand{}, 0.1);
  }
}

TEST_CASE("tracker name round-trips") {
  for (TrackerKind kind : all_tracker_kinds()) {
    const auto parsed = parse_tracker_name(tracker_name(kind));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == kind);
  }
  CHECK_FALSE(parse_tracker_name("warp9").has_value());
}

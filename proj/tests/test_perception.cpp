#include <doctest.h>

#include "followsim/perception.hpp"
#include "followsim/rng.hpp"

using namespace followsim;

namespace {

AgentState standing_agent(int id, double x, double y, bool raised = false) {
  AgentState a;
  a.agent_id = id;
  a.x = x;
  a.y = y;
  a.script.waypoints = {{0.0, x, y}};
  if (raised) a.hand_raised_interval = {{0.0, 1e9}};
  return a;
}

NoiseParams zero_noise() {
  NoiseParams n;
  n.box_jitter_sigma_px = 0.0;
  n.confidence_noise_sigma = 0.0;
  return n;
}

}  // namespace

TEST_CASE("project_agent centers a dead-ahead agent") {
  const CameraModel cam;
  RobotPose robot;
  for (double d : {0.5, 1.0, 2.5, 3.5}) {
    const auto box = project_agent(robot, standing_agent(1, d, 0.0), cam);
    REQUIRE(box.has_value());
    CHECK(box->cx == doctest::Approx(80.0).epsilon(1e-12));
    CHECK(box->cy == doctest::Approx(60.0).epsilon(1e-12));
  }
}

TEST_CASE("project_agent pinhole dimensions at 2.5 m") {
  const CameraModel cam;
  CHECK(cam.focal_px() == doctest::Approx(138.5640646055102).epsilon(1e-12));
  const auto box = project_agent(RobotPose{}, standing_agent(1, 2.5, 0.0), cam);
  REQUIRE(box.has_value());
  CHECK(box->w == doctest::Approx(27.71281292110204).epsilon(1e-9));
  CHECK(box->h == doctest::Approx(94.22356393174694).epsilon(1e-9));
}

TEST_CASE("project_agent rejects out-of-FOV and too-close agents") {
  const CameraModel cam;
  // bearing 40 degrees with a 60 degree FOV
  const double b = 40.0 * kPi / 180.0;
  CHECK_FALSE(project_agent(RobotPose{}, standing_agent(1, 2.0 * std::cos(b), 2.0 * std::sin(b)), cam)
                  .has_value());
  CHECK_FALSE(project_agent(RobotPose{}, standing_agent(1, 0.1, 0.0), cam).has_value());
}

TEST_CASE("project_agent left-positive bearing lands left of centre") {
  const CameraModel cam;
  const auto box = project_agent(RobotPose{}, standing_agent(1, 2.0, 0.5), cam);
  REQUIRE(box.has_value());
  CHECK(box->cx < 80.0);
}

TEST_CASE("occlusion_fraction interval arithmetic") {
  const auto box_x = [](double x1, double x2) {
    return ImageBox{(x1 + x2) / 2.0, 60.0, x2 - x1, 100.0};
  };
  CHECK(occlusion_fraction(box_x(0, 10), box_x(20, 30)) == 0.0);
  CHECK(occlusion_fraction(box_x(0, 100), box_x(20, 30)) == 1.0);
  CHECK(occlusion_fraction(box_x(70, 110), box_x(90, 130)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("occlusion_fraction is x-translation invariant and within range") {
  GaussianRng rng(7);
  for (int i = 0; i < 200; ++i) {
    const double a1 = rng.uniform01() * 100.0;
    const double aw = rng.uniform01() * 50.0 + 1.0;
    const double b1 = rng.uniform01() * 100.0;
    const double bw = rng.uniform01() * 50.0 + 1.0;
    const ImageBox near_box{a1 + aw / 2, 60, aw, 90};
    const ImageBox far_box{b1 + bw / 2, 60, bw, 90};
    const double f = occlusion_fraction(near_box, far_box);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    const double shift = rng.uniform01() * 40.0 - 20.0;
    const ImageBox near2{near_box.cx + shift, 60, aw, 90};
    const ImageBox far2{far_box.cx + shift, 60, bw, 90};
    CHECK(occlusion_fraction(near2, far2) == doctest::Approx(f).epsilon(1e-9));
  }
}

TEST_CASE("render_frame on empty world") {
  WorldState w;
  CHECK(render_frame(w, CameraModel{}).agents.empty());
}

TEST_CASE("render_frame collinear full occlusion") {
  WorldState w;
  w.agents = {standing_agent(1, 1.5, 0.0), standing_agent(2, 3.0, 0.0)};
  const FrameObservation obs = render_frame(w, CameraModel{});
  REQUIRE(obs.agents.size() == 2);
  CHECK(obs.agents[0].agent_id == 1);  // sorted by distance
  CHECK(obs.agents[0].occlusion_fraction == 0.0);
  CHECK(obs.agents[1].agent_id == 2);
  CHECK(obs.agents[1].occlusion_fraction == 1.0);
}

TEST_CASE("render_frame partial occlusion matches the interval oracle") {
  const CameraModel cam;
  WorldState w;
  w.agents = {standing_agent(1, 2.0, 0.25), standing_agent(2, 2.5, 0.0)};
  const auto near_box = project_agent(w.robot, w.agents[0], cam);
  const auto far_box = project_agent(w.robot, w.agents[1], cam);
  REQUIRE(near_box.has_value());
  REQUIRE(far_box.has_value());
  const double expected = occlusion_fraction(*near_box, *far_box);
  CHECK(expected > 0.0);
  CHECK(expected < 1.0);
  const FrameObservation obs = render_frame(w, cam);
  REQUIRE(obs.agents.size() == 2);
  CHECK(obs.agents[1].occlusion_fraction == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("render_frame combines occluders by interval union") {
  const CameraModel cam;
  WorldState w;
  // Two near agents covering the far agent's left and right halves.
  w.agents = {standing_agent(1, 2.0, 0.12), standing_agent(2, 2.0, -0.12),
              standing_agent(3, 3.0, 0.0)};
  const FrameObservation obs = render_frame(w, cam);
  REQUIRE(obs.agents.size() == 3);
  const auto& far_agent = obs.agents[2];
  CHECK(far_agent.agent_id == 3);
  // Each individually covers under 100%, together they cover fully.
  const auto near1 = project_agent(w.robot, w.agents[0], cam);
  const auto far_box = project_agent(w.robot, w.agents[2], cam);
  CHECK(occlusion_fraction(*near1, *far_box) < 1.0);
  CHECK(far_agent.occlusion_fraction == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("detect zero-noise passthrough keeps geometry") {
  WorldState w;
  w.agents = {standing_agent(1, 2.5, 0.0)};
  const FrameObservation obs = render_frame(w, CameraModel{});
  GaussianRng rng(1);
  const auto dets = detect(obs, zero_noise(), rng);
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].box.cx == obs.agents[0].box.cx);
  CHECK(dets[0].box.w == doctest::Approx(obs.agents[0].box.w).epsilon(1e-12));
  CHECK(dets[0].confidence == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(dets[0].truth_agent_id == 1);
  // Wrists hang below shoulders when not raised (image y grows down).
  CHECK(dets[0].left_wrist.y > dets[0].left_shoulder.y);
}

TEST_CASE("detect raised pose puts wrists above shoulders") {
  WorldState w;
  w.agents = {standing_agent(1, 2.5, 0.0, /*raised=*/true)};
  const FrameObservation obs = render_frame(w, CameraModel{});
  REQUIRE(obs.agents[0].hand_raised_truth);
  GaussianRng rng(1);
  const auto dets = detect(obs, zero_noise(), rng);
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].left_wrist.y < dets[0].left_shoulder.y);
  CHECK(dets[0].right_wrist.y < dets[0].right_shoulder.y);
}

TEST_CASE("detect drops agents above the occlusion threshold") {
  FrameObservation obs;
  ObservedAgent a;
  a.agent_id = 5;
  a.box = ImageBox{80, 60, 30, 90};
  a.distance_m = 2.0;
  a.occlusion_fraction = 0.8;
  obs.agents = {a};
  NoiseParams noise = zero_noise();
  GaussianRng rng(1);
  CHECK(detect(obs, noise, rng).empty());  // 0.8 > 0.7 threshold
  a.occlusion_fraction = 0.7;
  obs.agents = {a};
  CHECK(detect(obs, noise, rng).size() == 1);  // boundary kept
}

TEST_CASE("detect emits low-confidence detections down to the floor") {
  FrameObservation obs;
  ObservedAgent a;
  a.agent_id = 1;
  a.box = ImageBox{80, 60, 30, 90};
  a.distance_m = 2.0;
  a.occlusion_fraction = 0.65;  // confidence 0.9 * 0.35 = 0.315, below conf_high
  obs.agents = {a};
  GaussianRng rng(1);
  const auto dets = detect(obs, zero_noise(), rng);
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].confidence == doctest::Approx(0.315).epsilon(1e-12));
}

TEST_CASE("detect is pure with zero sigmas") {
  WorldState w;
  w.agents = {standing_agent(1, 2.5, 0.0), standing_agent(2, 1.5, 0.4)};
  const FrameObservation obs = render_frame(w, CameraModel{});
  GaussianRng rng_a(1), rng_b(999);
  const auto dets_a = detect(obs, zero_noise(), rng_a);
  const auto dets_b = detect(obs, zero_noise(), rng_b);
  REQUIRE(dets_a.size() == dets_b.size());
  for (std::size_t i = 0; i < dets_a.size(); ++i) {
    CHECK(dets_a[i].box.cx == dets_b[i].box.cx);
    CHECK(dets_a[i].confidence == dets_b[i].confidence);
  }
}

TEST_CASE("keypoints stay within the unjittered box x-extent under noise") {
  WorldState w;
  w.agents = {standing_agent(1, 2.5, 0.0, true)};
  const FrameObservation obs = render_frame(w, CameraModel{});
  NoiseParams noise;  // defaults: jitter 1 px
  GaussianRng rng(3);
  for (int i = 0; i < 300; ++i) {
    const auto dets = detect(obs, noise, rng);
    if (dets.empty()) continue;
    const ImageBox& truth = obs.agents[0].box;
    for (const Keypoint& kp :
         {dets[0].left_shoulder, dets[0].right_shoulder, dets[0].left_wrist, dets[0].right_wrist}) {
      CHECK(kp.x >= truth.x1());
      CHECK(kp.x <= truth.x2());
    }
  }
}

TEST_CASE("detect confidence decays with occlusion and clamps to [0,1]") {
  NoiseParams noise;
  GaussianRng rng(11);
  for (int i = 0; i < 200; ++i) {
    FrameObservation obs;
    ObservedAgent a;
    a.agent_id = 1;
    a.box = ImageBox{80, 60, 30, 90};
    a.distance_m = 2.0;
    a.occlusion_fraction = (i % 8) * 0.1;
    if (a.occlusion_fraction > noise.drop_occlusion_threshold) continue;
    obs.agents = {a};
    for (const Detection& d : detect(obs, noise, rng)) {
      CHECK(d.confidence >= 0.0);
      CHECK(d.confidence <= 1.0);
      CHECK(d.confidence > 0.01);
    }
  }
}

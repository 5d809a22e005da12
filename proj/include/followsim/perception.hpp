#pragma once

#include <vector>

#include "followsim/camera.hpp"
#include "followsim/geometry.hpp"
#include "followsim/rng.hpp"
#include "followsim/world.hpp"

namespace followsim {

// Detector noise model. Low-confidence detections are deliberately kept
// (the two-stage trackers consume them); only confidence <= 0.01 is
// discarded at the source.
struct NoiseParams {
  double box_jitter_sigma_px = 1.0;
  double confidence_base = 0.9;
  double confidence_noise_sigma = 0.05;
  double drop_occlusion_threshold = 0.7;
  double min_confidence = 0.1;
};

// Ground-truth view of one agent as seen from the camera this tick.
struct ObservedAgent {
  int agent_id = 0;
  ImageBox box;
  double distance_m = 0.0;
  double occlusion_fraction = 0.0;  // in [0, 1]
  bool hand_raised_truth = false;
};

struct FrameObservation {
  std::int64_t tick_index = 0;
  std::vector<ObservedAgent> agents;  // ascending distance_m, agent_id tie-break
};

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
};

// ID-free detector output. truth_agent_id is carried for harness scoring
// only; trackers and behavior never read it.
struct Detection {
  ImageBox box;
  double confidence = 0.0;
  Keypoint left_shoulder, right_shoulder, left_wrist, right_wrist;
  int truth_agent_id = 0;
};

// Fraction of `far`'s horizontal extent covered by `near`. Pedestrian
// boxes are vertically coextensive at this camera geometry, so a 1D
// interval model is exact for our purposes.
double occlusion_fraction(const ImageBox& near_box, const ImageBox& far_box);

FrameObservation render_frame(const WorldState& world, const CameraModel& cam);

std::vector<Detection> detect(const FrameObservation& obs, const NoiseParams& noise,
                              GaussianRng& rng);

}  // namespace followsim

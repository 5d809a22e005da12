#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "followsim/camera.hpp"
#include "followsim/kalman.hpp"
#include "followsim/perception.hpp"

namespace followsim {

enum class TrackerKind { kBaseline, kByteTrack, kOcSort, kBotSortLite };

const char* tracker_name(TrackerKind kind);
std::optional<TrackerKind> parse_tracker_name(const std::string& name);
std::vector<TrackerKind> all_tracker_kinds();  // table column order

struct TrackerParams {
  double iou_gate_stage1 = 0.3;
  double iou_gate_stage2 = 0.5;
  double conf_high = 0.5;
  double conf_low = 0.1;
  int max_age = 30;  // frames; kept equal to the behavior patience
  int min_hits_to_confirm = 2;
  double ocm_weight = 0.2;
};

// Commanded rotation of the previous tick, surfaced so the client can
// compensate predicted boxes for camera pan.
struct EgoMotionHint {
  double omega_applied_last_tick = 0.0;  // rad/s
  double dt = 0.1;                       // s
};

struct Track {
  int track_id = 0;
  KalmanState kalman;
  ImageBox last_observation;
  std::optional<ImageBox> prev_observation;
  int hits = 0;
  int time_since_update = 0;
  double confidence_last = 0.0;
  int last_det_index = -1;  // index into this frame's detections, -1 when unmatched
  std::int64_t spawn_frame = 0;
};

// Shift predicted boxes to undo the camera's own rotation: a pan of
// omega*dt rad maps to omega*dt*(width_px/hfov) pixels of apparent
// horizontal motion.
std::vector<ImageBox> ego_compensate(std::vector<ImageBox> boxes, double omega, double dt,
                                     const CameraModel& cam);

// Tracking-by-detection with persistent IDs and interchangeable
// association policies:
//   baseline     greedy nearest-center on zero-velocity predictions,
//                single stage, no recovery
//   bytetrack    two-stage association: confident detections first, then
//                leftovers in [conf_low, conf_high) against the rest
//   ocsort       bytetrack stages plus direction-consistency cost (OCM),
//                last-observation recovery (OCR) and re-update on
//                re-match after a gap (ORU)
//   botsort_lite bytetrack stages preceded by ego-motion compensation
class Tracker {
 public:
  Tracker(TrackerKind kind, TrackerParams params, CameraModel cam = {});

  // Call exactly once per frame, in frame order. Returns confirmed tracks
  // matched this frame, ascending track_id.
  std::vector<Track> update(const std::vector<Detection>& detections, const EgoMotionHint& ego);

  TrackerKind kind() const { return kind_; }
  const TrackerParams& params() const { return params_; }
  std::int64_t frame_count() const { return frame_count_; }

 private:
  TrackerKind kind_;
  TrackerParams params_;
  CameraModel cam_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
  std::int64_t frame_count_ = 0;
};

}  // namespace followsim

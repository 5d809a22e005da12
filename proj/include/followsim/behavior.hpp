#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "followsim/geometry.hpp"
#include "followsim/motion.hpp"
#include "followsim/perception.hpp"
#include "followsim/tracker.hpp"

namespace followsim {

inline constexpr const char* kActivationPhrase = "target detected";
inline constexpr const char* kGreetingPhrase = "Hello, I'm Pepper, do you require my assistance?";

struct ControlParams {
  double n_adjust = 0.9;        // angular adjustment constant
  double omega_max = 1.0;       // rad/s
  double v_max = 0.35;          // m/s
  double k_v = 0.02;            // m/s per unit area ratio
  double r_stop = 0.30;         // stop when box/frame area ratio reaches this
  double center_tol_px = 16.0;  // |cx - centre| to consider the target centered
  int raise_frames_k = 5;       // consecutive raised frames before activation
  int patience_frames = 30;     // occlusion patience
  double activation_timeout_s = 30.0;
  double search_omega = 0.3;    // rad/s recovery turn
};

struct FrameGeometry {
  double frame_width_px = 160.0;
  double frame_height_px = 120.0;

  double x_frame_centre() const { return frame_width_px / 2.0; }
};

enum class Phase { kIdle, kTracking, kApproach, kOccluded, kArrived, kFailed };
enum class FailureCause { kTimeout, kLost, kIdSwitch };

const char* phase_name(Phase p);
std::optional<Phase> parse_phase_name(const std::string& s);
const char* failure_cause_name(FailureCause c);
std::optional<FailureCause> parse_failure_cause_name(const std::string& s);

struct SpeechEvent {
  double time_s = 0.0;
  std::string text;
};

struct BehaviorState {
  Phase phase = Phase::kIdle;
  Phase resume_to = Phase::kTracking;  // meaningful while phase == kOccluded
  std::optional<FailureCause> failure_cause;
  std::optional<int> target_track_id;
  std::map<int, int> raise_counters;  // track_id -> consecutive raised frames
  int occluded_counter = 0;           // frames in the current occlusion episode
  int total_occluded_frames = 0;      // across all episodes; the harness metric
  std::optional<ImageBox> last_target_box;
  std::optional<double> activation_time_s;
  double elapsed_s = 0.0;
  std::int64_t frames_seen = 0;
  std::vector<SpeechEvent> speech_log;
};

// True iff the lower wrist sits strictly above the lower shoulder
// (image y grows downward). Equality is "not raised".
bool detect_hand_raise(const Detection& d);

// ((x_centre - cx) / frame_width) * n * omega_max, clamped to
// +-omega_max. Positive is anti-clockwise, so a target left of centre
// turns the robot left.
double angular_velocity(const ImageBox& box, const FrameGeometry& geo, const ControlParams& p);

// Frame-clipped box area over frame area.
double box_area_ratio(const ImageBox& box, const FrameGeometry& geo);

// 0 at or past the stop ratio, otherwise min(v_max, k_v / area_ratio);
// a degenerate zero ratio just means "far": full speed.
double linear_velocity(double area_ratio, const ControlParams& p);

// Search rotation toward the side the target was last seen on; dead
// centre breaks toward the left (+).
double recovery_turn_direction(const ImageBox& last_box, const FrameGeometry& geo,
                               const ControlParams& p);

// Debounced hand-raise activation: per-track consecutive-raise counters;
// once one or more reach raise_frames_k the highest-confidence candidate
// becomes the target (ties to the lowest track id).
void update_activation(BehaviorState& state, const std::vector<Track>& tracks,
                       const std::vector<Detection>& detections, const ControlParams& p);

// The follower state machine. One step() per frame, after the tracker.
class BehaviorMachine {
 public:
  explicit BehaviorMachine(ControlParams params = {}, FrameGeometry geo = {});

  MotionCommand step(const std::vector<Track>& tracks, const std::vector<Detection>& detections,
                     double dt);

  const BehaviorState& state() const { return state_; }
  const ControlParams& params() const { return params_; }

 private:
  MotionCommand run_follow(const Track& target, MotionCommand cmd);

  ControlParams params_;
  FrameGeometry geo_;
  BehaviorState state_;
};

}  // namespace followsim

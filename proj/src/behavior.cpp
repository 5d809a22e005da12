#include "followsim/behavior.hpp"

#include <algorithm>
#include <cmath>

namespace followsim {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::kIdle:
      return "Idle";
    case Phase::kTracking:
      return "Tracking";
    case Phase::kApproach:
      return "Approach";
    case Phase::kOccluded:
      return "Occluded";
    case Phase::kArrived:
      return "Arrived";
    case Phase::kFailed:
      return "Failed";
  }
  return "Unknown";
}

std::optional<Phase> parse_phase_name(const std::string& s) {
  if (s == "Idle") return Phase::kIdle;
  if (s == "Tracking") return Phase::kTracking;
  if (s == "Approach") return Phase::kApproach;
  if (s == "Occluded") return Phase::kOccluded;
  if (s == "Arrived") return Phase::kArrived;
  if (s == "Failed") return Phase::kFailed;
  return std::nullopt;
}

const char* failure_cause_name(FailureCause c) {
  switch (c) {
    case FailureCause::kTimeout:
      return "timeout";
    case FailureCause::kLost:
      return "lost";
    case FailureCause::kIdSwitch:
      return "id_switch";
  }
  return "unknown";
}

std::optional<FailureCause> parse_failure_cause_name(const std::string& s) {
  if (s == "timeout") return FailureCause::kTimeout;
  if (s == "lost") return FailureCause::kLost;
  if (s == "id_switch") return FailureCause::kIdSwitch;
  return std::nullopt;
}

bool detect_hand_raise(const Detection& d) {
  const double wrist_y = std::min(d.left_wrist.y, d.right_wrist.y);
  const double shoulder_y = std::min(d.left_shoulder.y, d.right_shoulder.y);
  return wrist_y < shoulder_y;
}

double angular_velocity(const ImageBox& box, const FrameGeometry& geo, const ControlParams& p) {
  const double omega =
      ((geo.x_frame_centre() - box.cx) / geo.frame_width_px) * p.n_adjust * p.omega_max;
  return std::clamp(omega, -p.omega_max, p.omega_max);
}

double box_area_ratio(const ImageBox& box, const FrameGeometry& geo) {
  const double frame_area = geo.frame_width_px * geo.frame_height_px;
  return std::clamp(clipped_area(box, geo.frame_width_px, geo.frame_height_px) / frame_area, 0.0,
                    1.0);
}

double linear_velocity(double area_ratio, const ControlParams& p) {
  if (area_ratio >= p.r_stop) return 0.0;
  if (area_ratio <= 0.0) return p.v_max;
  return std::min(p.v_max, p.k_v / area_ratio);
}

double recovery_turn_direction(const ImageBox& last_box, const FrameGeometry& geo,
                               const ControlParams& p) {
  return last_box.cx > geo.x_frame_centre() ? -p.search_omega : p.search_omega;
}

void update_activation(BehaviorState& state, const std::vector<Track>& tracks,
                       const std::vector<Detection>& detections, const ControlParams& p) {
  std::map<int, int> next_counters;
  std::vector<int> reached;
  for (const Track& t : tracks) {
    bool raised = false;
    if (t.last_det_index >= 0 && t.last_det_index < static_cast<int>(detections.size())) {
      raised = detect_hand_raise(detections[t.last_det_index]);
    }
    if (!raised) continue;  // counter resets by omission
    auto it = state.raise_counters.find(t.track_id);
    const int count = (it == state.raise_counters.end() ? 0 : it->second) + 1;
    next_counters[t.track_id] = count;
    if (count >= p.raise_frames_k) reached.push_back(t.track_id);
  }
  state.raise_counters = std::move(next_counters);
  if (reached.empty()) return;

  // Highest current confidence wins; ties go to the lowest track id.
  int best_id = -1;
  double best_conf = -1.0;
  for (const Track& t : tracks) {
    if (std::find(reached.begin(), reached.end(), t.track_id) == reached.end()) continue;
    if (t.confidence_last > best_conf) {
      best_conf = t.confidence_last;
      best_id = t.track_id;
    }
  }
  state.target_track_id = best_id;
  state.phase = Phase::kTracking;
  state.raise_counters.clear();
}

BehaviorMachine::BehaviorMachine(ControlParams params, FrameGeometry geo)
    : params_(params), geo_(geo) {}

MotionCommand BehaviorMachine::run_follow(const Track& target, MotionCommand cmd) {
  const ImageBox& box = target.last_observation;
  state_.last_target_box = box;
  if (state_.phase == Phase::kTracking) {
    cmd.omega = angular_velocity(box, geo_, params_);
    cmd.v = 0.0;
    if (std::abs(box.cx - geo_.x_frame_centre()) <= params_.center_tol_px) {
      state_.phase = Phase::kApproach;
    }
  } else {  // Approach
    const double ratio = box_area_ratio(box, geo_);
    const double v = linear_velocity(ratio, params_);
    if (v == 0.0 && ratio >= params_.r_stop) {
      state_.phase = Phase::kArrived;
      state_.speech_log.push_back({state_.elapsed_s, kGreetingPhrase});
      cmd = MotionCommand{};
      cmd.say = kGreetingPhrase;
    } else {
      cmd.omega = angular_velocity(box, geo_, params_);
      cmd.v = v;
    }
  }
  return cmd;
}

MotionCommand BehaviorMachine::step(const std::vector<Track>& tracks,
                                    const std::vector<Detection>& detections, double dt) {
  const std::int64_t tick = state_.frames_seen;
  state_.frames_seen += 1;
  const double now_s = static_cast<double>(tick) * dt;
  state_.elapsed_s = now_s;

  MotionCommand cmd;

  const Track* target = nullptr;
  if (state_.target_track_id) {
    for (const Track& t : tracks) {
      if (t.track_id == *state_.target_track_id) {
        target = &t;
        break;
      }
    }
  }

  switch (state_.phase) {
    case Phase::kIdle: {
      update_activation(state_, tracks, detections, params_);
      if (state_.phase == Phase::kTracking) {
        state_.activation_time_s = now_s;
        state_.speech_log.push_back({now_s, kActivationPhrase});
        cmd.say = kActivationPhrase;
        if (state_.target_track_id) {
          for (const Track& t : tracks) {
            if (t.track_id == *state_.target_track_id) state_.last_target_box = t.last_observation;
          }
        }
      } else {
        const std::int64_t timeout_ticks =
            std::llround(params_.activation_timeout_s / dt);
        if (tick >= timeout_ticks) {
          state_.phase = Phase::kFailed;
          state_.failure_cause = FailureCause::kTimeout;
        }
      }
      return cmd;
    }
    case Phase::kTracking:
    case Phase::kApproach: {
      if (!target) {
        state_.resume_to = state_.phase;
        state_.phase = Phase::kOccluded;
        state_.occluded_counter = 1;
        state_.total_occluded_frames += 1;
        if (state_.last_target_box) {
          cmd.omega = recovery_turn_direction(*state_.last_target_box, geo_, params_);
        }
        return cmd;
      }
      return run_follow(*target, cmd);
    }
    case Phase::kOccluded: {
      if (target) {
        state_.phase = state_.resume_to;
        state_.occluded_counter = 0;
        return run_follow(*target, cmd);
      }
      state_.occluded_counter += 1;
      state_.total_occluded_frames += 1;
      if (state_.occluded_counter >= params_.patience_frames) {
        state_.phase = Phase::kFailed;
        state_.failure_cause = FailureCause::kLost;
        return cmd;
      }
      if (state_.last_target_box) {
        cmd.omega = recovery_turn_direction(*state_.last_target_box, geo_, params_);
      }
      return cmd;
    }
    case Phase::kArrived:
    case Phase::kFailed:
      return cmd;
  }
  return cmd;
}

}  // namespace followsim

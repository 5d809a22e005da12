#include "followsim/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "followsim/hungarian.hpp"

namespace followsim {

const char* tracker_name(TrackerKind kind) {
  switch (kind) {
    case TrackerKind::kBaseline:
      return "baseline";
    case TrackerKind::kByteTrack:
      return "bytetrack";
    case TrackerKind::kOcSort:
      return "ocsort";
    case TrackerKind::kBotSortLite:
      return "botsort_lite";
  }
  return "unknown";
}

std::optional<TrackerKind> parse_tracker_name(const std::string& name) {
  if (name == "baseline") return TrackerKind::kBaseline;
  if (name == "bytetrack") return TrackerKind::kByteTrack;
  if (name == "ocsort") return TrackerKind::kOcSort;
  if (name == "botsort_lite") return TrackerKind::kBotSortLite;
  return std::nullopt;
}

std::vector<TrackerKind> all_tracker_kinds() {
  return {TrackerKind::kByteTrack, TrackerKind::kBotSortLite, TrackerKind::kOcSort,
          TrackerKind::kBaseline};
}

std::vector<ImageBox> ego_compensate(std::vector<ImageBox> boxes, double omega, double dt,
                                     const CameraModel& cam) {
  const double dcx = omega * dt * (cam.width_px / cam.hfov);
  for (ImageBox& b : boxes) b.cx += dcx;
  return boxes;
}

namespace {

constexpr double kGatedCost = 1e6;

// Direction-consistency penalty: angle between the track's observed
// velocity (prev -> last observation) and the offered displacement
// (last observation -> candidate), normalized to [0, 1] by pi.
double direction_penalty(const Track& track, const ImageBox& candidate) {
  if (!track.prev_observation) return 0.0;
  const double vx = track.last_observation.cx - track.prev_observation->cx;
  const double vy = track.last_observation.cy - track.prev_observation->cy;
  const double ux = candidate.cx - track.last_observation.cx;
  const double uy = candidate.cy - track.last_observation.cy;
  if (std::hypot(vx, vy) < 1e-9 || std::hypot(ux, uy) < 1e-9) return 0.0;
  const double diff = wrap_angle(std::atan2(vy, vx) - std::atan2(uy, ux));
  return std::abs(diff) / kPi;
}

struct Match {
  int track_idx;
  int det_idx;
};

// Hungarian association with an IoU admission gate. track_boxes[i] pairs
// with det index det_ids[j] when IoU >= gate and the global assignment
// selects it.
std::vector<Match> associate(const std::vector<ImageBox>& track_boxes,
                             const std::vector<int>& track_ids,
                             const std::vector<const Detection*>& dets,
                             const std::vector<int>& det_ids, double gate,
                             const std::vector<double>* extra_cost) {
  std::vector<Match> out;
  if (track_boxes.empty() || dets.empty()) return out;
  const std::size_t n = track_boxes.size();
  const std::size_t m = dets.size();
  std::vector<std::vector<double>> cost(n, std::vector<double>(m, kGatedCost));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double overlap = iou(track_boxes[i], dets[j]->box);
      if (overlap >= gate) {
        double c = 1.0 - overlap;
        if (extra_cost) c += (*extra_cost)[i * m + j];
        cost[i][j] = c;
      }
    }
  }
  for (const auto& [ti, dj] : hungarian(cost)) {
    if (cost[ti][dj] >= kGatedCost / 2.0) continue;
    out.push_back(Match{track_ids[ti], det_ids[dj]});
  }
  return out;
}

}  // namespace

Tracker::Tracker(TrackerKind kind, TrackerParams params, CameraModel cam)
    : kind_(kind), params_(params), cam_(cam) {}

std::vector<Track> Tracker::update(const std::vector<Detection>& detections,
                                   const EgoMotionHint& ego) {
  ++frame_count_;

  // Predict. The baseline keeps no velocity, so its prediction is the
  // last observation; botsort_lite additionally shifts predictions to
  // undo the commanded camera pan.
  for (Track& t : tracks_) {
    t.last_det_index = -1;
    if (kind_ == TrackerKind::kBaseline) {
      t.kalman.mean(0) = t.last_observation.cx;
      t.kalman.mean(1) = t.last_observation.cy;
      t.kalman.mean(2) = t.last_observation.w;
      t.kalman.mean(3) = t.last_observation.h;
    } else {
      t.kalman = kalman_predict(t.kalman);
    }
  }
  if (kind_ == TrackerKind::kBotSortLite) {
    const double dcx = ego.omega_applied_last_tick * ego.dt * (cam_.width_px / cam_.hfov);
    for (Track& t : tracks_) t.kalman.mean(0) += dcx;
  }

  std::vector<int> high_dets, low_dets;
  for (int j = 0; j < static_cast<int>(detections.size()); ++j) {
    const double c = detections[j].confidence;
    if (c >= params_.conf_high) {
      high_dets.push_back(j);
    } else if (c >= params_.conf_low) {
      low_dets.push_back(j);
    }
  }

  std::vector<char> track_matched(tracks_.size(), 0);
  std::vector<char> det_matched(detections.size(), 0);
  std::vector<Match> matches;

  auto det_ptrs = [&](const std::vector<int>& ids) {
    std::vector<const Detection*> ptrs;
    ptrs.reserve(ids.size());
    for (int j : ids) ptrs.push_back(&detections[j]);
    return ptrs;
  };

  if (kind_ == TrackerKind::kBaseline) {
    // Greedy nearest-center over confident detections, admission gated by
    // IoU against the stationary last observation.
    struct Candidate {
      double dist;
      int track_idx;
      int det_idx;
    };
    std::vector<Candidate> cands;
    for (int i = 0; i < static_cast<int>(tracks_.size()); ++i) {
      for (int j : high_dets) {
        if (iou(tracks_[i].last_observation, detections[j].box) < params_.iou_gate_stage1) continue;
        cands.push_back({center_distance(tracks_[i].last_observation, detections[j].box), i, j});
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      if (a.track_idx != b.track_idx) return a.track_idx < b.track_idx;
      return a.det_idx < b.det_idx;
    });
    for (const Candidate& c : cands) {
      if (track_matched[c.track_idx] || det_matched[c.det_idx]) continue;
      track_matched[c.track_idx] = 1;
      det_matched[c.det_idx] = 1;
      matches.push_back(Match{c.track_idx, c.det_idx});
    }
  } else {
    // Stage 1: confident detections vs predicted boxes.
    std::vector<int> live_tracks(tracks_.size());
    for (int i = 0; i < static_cast<int>(tracks_.size()); ++i) live_tracks[i] = i;
    std::vector<ImageBox> pred_boxes;
    pred_boxes.reserve(tracks_.size());
    for (const Track& t : tracks_) pred_boxes.push_back(t.kalman.box());

    std::vector<double> ocm;
    std::vector<double>* extra = nullptr;
    if (kind_ == TrackerKind::kOcSort) {
      ocm.resize(tracks_.size() * high_dets.size(), 0.0);
      for (std::size_t i = 0; i < tracks_.size(); ++i) {
        for (std::size_t j = 0; j < high_dets.size(); ++j) {
          ocm[i * high_dets.size() + j] =
              params_.ocm_weight * direction_penalty(tracks_[i], detections[high_dets[j]].box);
        }
      }
      extra = &ocm;
    }
    for (const Match& m :
         associate(pred_boxes, live_tracks, det_ptrs(high_dets), high_dets,
                   params_.iou_gate_stage1, extra)) {
      track_matched[m.track_idx] = 1;
      det_matched[m.det_idx] = 1;
      matches.push_back(m);
    }

    // Stage 2: leftover tracks vs low-confidence detections.
    std::vector<int> rem_tracks;
    std::vector<ImageBox> rem_boxes;
    for (int i = 0; i < static_cast<int>(tracks_.size()); ++i) {
      if (!track_matched[i]) {
        rem_tracks.push_back(i);
        rem_boxes.push_back(tracks_[i].kalman.box());
      }
    }
    for (const Match& m : associate(rem_boxes, rem_tracks, det_ptrs(low_dets), low_dets,
                                    params_.iou_gate_stage2, nullptr)) {
      track_matched[m.track_idx] = 1;
      det_matched[m.det_idx] = 1;
      matches.push_back(m);
    }

    // OCR: re-anchor still-lost tracks on their last real observation
    // against whatever detections remain.
    if (kind_ == TrackerKind::kOcSort) {
      std::vector<int> lost_tracks;
      std::vector<ImageBox> lost_boxes;
      for (int i = 0; i < static_cast<int>(tracks_.size()); ++i) {
        if (!track_matched[i]) {
          lost_tracks.push_back(i);
          lost_boxes.push_back(tracks_[i].last_observation);
        }
      }
      std::vector<int> leftover;
      for (int j : high_dets) {
        if (!det_matched[j]) leftover.push_back(j);
      }
      for (int j : low_dets) {
        if (!det_matched[j]) leftover.push_back(j);
      }
      std::sort(leftover.begin(), leftover.end());
      for (const Match& m : associate(lost_boxes, lost_tracks, det_ptrs(leftover), leftover,
                                      params_.iou_gate_stage2, nullptr)) {
        track_matched[m.track_idx] = 1;
        det_matched[m.det_idx] = 1;
        matches.push_back(m);
      }
    }
  }

  std::sort(matches.begin(), matches.end(),
            [](const Match& a, const Match& b) { return a.track_idx < b.track_idx; });
  for (const Match& m : matches) {
    Track& t = tracks_[m.track_idx];
    const Detection& det = detections[m.det_idx];
    if (kind_ == TrackerKind::kOcSort && t.time_since_update >= 2) {
      // ORU: walk virtual measurements along the straight line from the
      // last real observation to the new one before the real update.
      const int gap = t.time_since_update;
      const ImageBox& z0 = t.last_observation;
      for (int i = 1; i <= gap; ++i) {
        const double f = static_cast<double>(i) / (gap + 1);
        ImageBox zi{z0.cx + f * (det.box.cx - z0.cx), z0.cy + f * (det.box.cy - z0.cy),
                    z0.w + f * (det.box.w - z0.w), z0.h + f * (det.box.h - z0.h)};
        t.kalman = kalman_update(t.kalman, zi);
      }
    }
    t.kalman = kalman_update(t.kalman, det.box);
    if (kind_ == TrackerKind::kBaseline) {
      t.kalman.mean(4) = t.kalman.mean(5) = t.kalman.mean(6) = t.kalman.mean(7) = 0.0;
    }
    t.prev_observation = t.last_observation;
    t.last_observation = det.box;
    t.hits += 1;
    t.time_since_update = 0;
    t.confidence_last = det.confidence;
    t.last_det_index = m.det_idx;
  }

  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    if (!track_matched[i]) tracks_[i].time_since_update += 1;
  }
  tracks_.erase(std::remove_if(tracks_.begin(), tracks_.end(),
                               [&](const Track& t) { return t.time_since_update > params_.max_age; }),
                tracks_.end());

  // Unmatched confident detections spawn new tracks.
  for (int j : high_dets) {
    if (det_matched[j]) continue;
    Track t;
    t.track_id = next_id_++;
    t.kalman = kalman_init(detections[j].box);
    t.last_observation = detections[j].box;
    t.hits = 1;
    t.time_since_update = 0;
    t.confidence_last = detections[j].confidence;
    t.last_det_index = j;
    t.spawn_frame = frame_count_;
    tracks_.push_back(t);
  }

  std::vector<Track> out;
  for (const Track& t : tracks_) {
    if (t.time_since_update != 0) continue;
    const bool confirmed = t.hits >= params_.min_hits_to_confirm ||
                           t.spawn_frame <= params_.min_hits_to_confirm;
    if (confirmed) out.push_back(t);
  }
  std::sort(out.begin(), out.end(),
            [](const Track& a, const Track& b) { return a.track_id < b.track_id; });
  return out;
}

}  // namespace followsim

#include "followsim/perception.hpp"

#include <algorithm>
#include <cmath>

namespace followsim {

double occlusion_fraction(const ImageBox& near_box, const ImageBox& far_box) {
  if (far_box.w <= 0.0) return 0.0;
  const double lo = std::max(near_box.x1(), far_box.x1());
  const double hi = std::min(near_box.x2(), far_box.x2());
  const double overlap = std::max(0.0, hi - lo);
  return std::clamp(overlap / far_box.w, 0.0, 1.0);
}

namespace {

// Union length of [lo, hi) intervals clipped to [clip_lo, clip_hi].
double interval_union_length(std::vector<std::pair<double, double>> spans, double clip_lo,
                             double clip_hi) {
  for (auto& s : spans) {
    s.first = std::max(s.first, clip_lo);
    s.second = std::min(s.second, clip_hi);
  }
  std::sort(spans.begin(), spans.end());
  double total = 0.0;
  double cur_lo = 0.0, cur_hi = -1.0;
  bool open = false;
  for (const auto& s : spans) {
    if (s.second <= s.first) continue;
    if (!open || s.first > cur_hi) {
      if (open) total += cur_hi - cur_lo;
      cur_lo = s.first;
      cur_hi = s.second;
      open = true;
    } else {
      cur_hi = std::max(cur_hi, s.second);
    }
  }
  if (open) total += cur_hi - cur_lo;
  return total;
}

bool hand_raised_at(const AgentState& agent, double t) {
  if (!agent.hand_raised_interval) return false;
  return t >= agent.hand_raised_interval->first && t < agent.hand_raised_interval->second;
}

}  // namespace

FrameObservation render_frame(const WorldState& world, const CameraModel& cam) {
  FrameObservation out;
  out.tick_index = world.tick_index;
  for (const AgentState& agent : world.agents) {
    const auto box = project_agent(world.robot, agent, cam);
    if (!box) continue;
    ObservedAgent oa;
    oa.agent_id = agent.agent_id;
    oa.box = *box;
    oa.distance_m = std::hypot(agent.x - world.robot.x, agent.y - world.robot.y);
    oa.hand_raised_truth = hand_raised_at(agent, world.sim_time);
    out.agents.push_back(oa);
  }
  std::sort(out.agents.begin(), out.agents.end(), [](const ObservedAgent& a, const ObservedAgent& b) {
    if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
    return a.agent_id < b.agent_id;
  });
  // Occluders combine by interval union before dividing by the far width.
  for (std::size_t i = 0; i < out.agents.size(); ++i) {
    ObservedAgent& far_agent = out.agents[i];
    std::vector<std::pair<double, double>> spans;
    for (std::size_t j = 0; j < out.agents.size(); ++j) {
      const ObservedAgent& near_agent = out.agents[j];
      if (near_agent.distance_m < far_agent.distance_m) {
        spans.emplace_back(near_agent.box.x1(), near_agent.box.x2());
      }
    }
    if (spans.empty() || far_agent.box.w <= 0.0) {
      far_agent.occlusion_fraction = 0.0;
      continue;
    }
    const double covered =
        interval_union_length(std::move(spans), far_agent.box.x1(), far_agent.box.x2());
    far_agent.occlusion_fraction = std::clamp(covered / far_agent.box.w, 0.0, 1.0);
  }
  return out;
}

std::vector<Detection> detect(const FrameObservation& obs, const NoiseParams& noise,
                              GaussianRng& rng) {
  std::vector<Detection> dets;
  for (const ObservedAgent& oa : obs.agents) {
    if (oa.occlusion_fraction > noise.drop_occlusion_threshold) continue;

    // Corners jittered in a fixed draw order: x1, y1, x2, y2, then the
    // confidence noise. Keypoints come from the clean geometry.
    double x1 = oa.box.x1() + rng.gaussian(noise.box_jitter_sigma_px);
    double y1 = oa.box.y1() + rng.gaussian(noise.box_jitter_sigma_px);
    double x2 = oa.box.x2() + rng.gaussian(noise.box_jitter_sigma_px);
    double y2 = oa.box.y2() + rng.gaussian(noise.box_jitter_sigma_px);
    if (x2 - x1 < 1e-3) x2 = x1 + 1e-3;
    if (y2 - y1 < 1e-3) y2 = y1 + 1e-3;

    const double conf_noise = rng.gaussian(noise.confidence_noise_sigma);
    const double confidence =
        std::clamp(noise.confidence_base * (1.0 - oa.occlusion_fraction) + conf_noise, 0.0, 1.0);
    if (confidence <= 0.01) continue;

    Detection det;
    det.box = ImageBox::from_corners(x1, y1, x2, y2);
    det.confidence = confidence;
    det.truth_agent_id = oa.agent_id;

    const double top = oa.box.y1();
    const double shoulder_y = top + 0.20 * oa.box.h;
    const double wrist_y = oa.hand_raised_truth ? top + 0.05 * oa.box.h : top + 0.55 * oa.box.h;
    det.left_shoulder = {oa.box.cx - 0.20 * oa.box.w, shoulder_y};
    det.right_shoulder = {oa.box.cx + 0.20 * oa.box.w, shoulder_y};
    det.left_wrist = {oa.box.cx - 0.30 * oa.box.w, wrist_y};
    det.right_wrist = {oa.box.cx + 0.30 * oa.box.w, wrist_y};

    dets.push_back(det);
  }
  return dets;
}

}  // namespace followsim

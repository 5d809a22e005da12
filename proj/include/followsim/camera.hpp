#pragma once

#include <cmath>
#include <optional>

#include "followsim/geometry.hpp"
#include "followsim/world.hpp"

namespace followsim {

// Pinhole model of Pepper's top camera: 160x120 at ~10 FPS.
struct CameraModel {
  int width_px = 160;
  int height_px = 120;
  double hfov = 60.0 * kPi / 180.0;
  double fps = 10.0;

  double focal_px() const { return (width_px / 2.0) / std::tan(hfov / 2.0); }
};

// Projects an agent into the image plane. Bearing is measured from the
// robot heading, left positive; a left-of-heading agent lands left of the
// image centre. Returns nullopt outside the horizontal FOV or closer
// than 0.2 m. The box may extend past the frame; clipping is the
// consumer's business.
inline std::optional<ImageBox> project_agent(const RobotPose& robot, const AgentState& agent,
                                             const CameraModel& cam) {
  const double dx = agent.x - robot.x;
  const double dy = agent.y - robot.y;
  const double d = std::hypot(dx, dy);
  if (d < 0.2) return std::nullopt;
  const double bearing = wrap_angle(std::atan2(dy, dx) - robot.heading);
  if (std::abs(bearing) >= cam.hfov / 2.0) return std::nullopt;
  const double f = cam.focal_px();
  ImageBox box;
  box.cx = cam.width_px / 2.0 - f * std::tan(bearing);
  box.cy = cam.height_px / 2.0;
  box.w = f * agent.width_m / d;
  box.h = f * agent.height_m / d;
  return box;
}

}  // namespace followsim

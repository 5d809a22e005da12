#pragma once

#include <algorithm>
#include <cmath>

namespace followsim {

inline constexpr double kPi = 3.14159265358979323846;

// Normalize an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) {
    a += 2.0 * kPi;
  } else if (a > kPi) {
    a -= 2.0 * kPi;
  }
  return a;
}

// Axis-aligned image-plane bounding box, center + extent, pixels.
struct ImageBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  double x1() const { return cx - w / 2.0; }
  double y1() const { return cy - h / 2.0; }
  double x2() const { return cx + w / 2.0; }
  double y2() const { return cy + h / 2.0; }

  static ImageBox from_corners(double x1, double y1, double x2, double y2) {
    return ImageBox{(x1 + x2) / 2.0, (y1 + y2) / 2.0, x2 - x1, y2 - y1};
  }
};

inline double iou(const ImageBox& a, const ImageBox& b) {
  const double ix = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
  const double iy = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

// Area of the box after clipping to a width_px x height_px frame.
inline double clipped_area(const ImageBox& box, double width_px, double height_px) {
  const double x1 = std::clamp(box.x1(), 0.0, width_px);
  const double x2 = std::clamp(box.x2(), 0.0, width_px);
  const double y1 = std::clamp(box.y1(), 0.0, height_px);
  const double y2 = std::clamp(box.y2(), 0.0, height_px);
  return std::max(0.0, x2 - x1) * std::max(0.0, y2 - y1);
}

inline double center_distance(const ImageBox& a, const ImageBox& b) {
  return std::hypot(a.cx - b.cx, a.cy - b.cy);
}

}  // namespace followsim

#pragma once

#include <optional>
#include <string>

namespace followsim {

// One tick's actuation request: linear + angular velocity, plus an
// optional phrase the robot speaks this tick.
struct MotionCommand {
  double v = 0.0;      // m/s, forward
  double omega = 0.0;  // rad/s, positive = anti-clockwise
  std::optional<std::string> say;
};

}  // namespace followsim

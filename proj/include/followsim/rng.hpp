#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace followsim {

// Deterministic gaussian stream on top of the (standardized) mt19937_64
// engine. std::normal_distribution is implementation-defined, so the
// Box-Muller transform is spelled out here; a given seed yields the same
// stream everywhere the engine and libm agree.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in (0, 1]; 53-bit resolution.
  double uniform01() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1p-53;
  }

  double gaussian(double sigma) {
    if (sigma <= 0.0) return 0.0;
    if (has_spare_) {
      has_spare_ = false;
      return spare_ * sigma;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta) * sigma;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace followsim

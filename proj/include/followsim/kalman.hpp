#pragma once

#include <Eigen/Dense>

#include "followsim/geometry.hpp"

namespace followsim {

// Constant-velocity box filter. State is [cx, cy, w, h, vcx, vcy, vw, vh]
// in pixels, one frame per step.
struct KalmanState {
  Eigen::Matrix<double, 8, 1> mean = Eigen::Matrix<double, 8, 1>::Zero();
  Eigen::Matrix<double, 8, 8> covariance = Eigen::Matrix<double, 8, 8>::Identity();

  ImageBox box() const { return ImageBox{mean(0), mean(1), mean(2), mean(3)}; }
};

KalmanState kalman_init(const ImageBox& z);
KalmanState kalman_predict(const KalmanState& s);
KalmanState kalman_update(const KalmanState& s, const ImageBox& z);

}  // namespace followsim

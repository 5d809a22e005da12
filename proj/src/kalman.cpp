#include "followsim/kalman.hpp"

namespace followsim {

namespace {

using Mat8 = Eigen::Matrix<double, 8, 8>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Vec4 = Eigen::Matrix<double, 4, 1>;

// Process noise: position/size 1.0 px^2, velocities 0.01.
Mat8 process_noise() {
  Vec8 q;
  q << 1.0, 1.0, 1.0, 1.0, 0.01, 0.01, 0.01, 0.01;
  return q.asDiagonal();
}

Mat8 transition() {
  Mat8 f = Mat8::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
  return f;
}

constexpr double kMeasurementVar = 1.0;   // px^2
constexpr double kInitVelocityVar = 10.0;

}  // namespace

KalmanState kalman_init(const ImageBox& z) {
  KalmanState s;
  s.mean << z.cx, z.cy, z.w, z.h, 0.0, 0.0, 0.0, 0.0;
  Vec8 p;
  p << 1.0, 1.0, 1.0, 1.0, kInitVelocityVar, kInitVelocityVar, kInitVelocityVar, kInitVelocityVar;
  s.covariance = p.asDiagonal();
  return s;
}

KalmanState kalman_predict(const KalmanState& s) {
  const Mat8 f = transition();
  KalmanState out;
  out.mean = f * s.mean;
  out.covariance = f * s.covariance * f.transpose() + process_noise();
  out.covariance = ((out.covariance + out.covariance.transpose()) / 2.0).eval();
  return out;
}

KalmanState kalman_update(const KalmanState& s, const ImageBox& z) {
  Eigen::Matrix<double, 4, 8> h = Eigen::Matrix<double, 4, 8>::Zero();
  for (int i = 0; i < 4; ++i) h(i, i) = 1.0;
  const Mat4 r = Mat4::Identity() * kMeasurementVar;

  Vec4 zv;
  zv << z.cx, z.cy, z.w, z.h;
  const Vec4 innovation = zv - h * s.mean;
  const Mat4 innovation_cov = h * s.covariance * h.transpose() + r;
  const Eigen::Matrix<double, 8, 4> gain =
      s.covariance * h.transpose() * innovation_cov.inverse();

  KalmanState out;
  out.mean = s.mean + gain * innovation;
  // Joseph form keeps the posterior covariance PSD.
  const Mat8 ikh = Mat8::Identity() - gain * h;
  out.covariance = ikh * s.covariance * ikh.transpose() + gain * r * gain.transpose();
  out.covariance = ((out.covariance + out.covariance.transpose()) / 2.0).eval();
  return out;
}

}  // namespace followsim

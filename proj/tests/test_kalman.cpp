#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "followsim/kalman.hpp"

using namespace followsim;

namespace {

double min_eigenvalue(const Eigen::Matrix<double, 8, 8>& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 8, 8>> solver(m);
  return solver.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("predict with zero velocity leaves the mean alone") {
  KalmanState s = kalman_init(ImageBox{10, 20, 30, 40});
  const KalmanState next = kalman_predict(s);
  CHECK(next.mean(0) == 10.0);
  CHECK(next.mean(1) == 20.0);
  CHECK(next.mean(2) == 30.0);
  CHECK(next.mean(3) == 40.0);
}

TEST_CASE("predict advances position by velocity") {
  KalmanState s = kalman_init(ImageBox{10, 20, 30, 40});
  s.mean(4) = 2.0;  // vcx
  const KalmanState next = kalman_predict(s);
  CHECK(next.mean(0) == 12.0);
}

TEST_CASE("predict strictly inflates the covariance trace") {
  KalmanState s = kalman_init(ImageBox{10, 20, 30, 40});
  for (int i = 0; i < 10; ++i) {
    const KalmanState next = kalman_predict(s);
    CHECK(next.covariance.trace() > s.covariance.trace());
    s = next;
  }
}

TEST_CASE("update with zero innovation keeps the mean") {
  KalmanState s = kalman_init(ImageBox{10, 20, 30, 40});
  s = kalman_predict(s);
  const KalmanState next = kalman_update(s, s.box());
  for (int i = 0; i < 8; ++i) CHECK(next.mean(i) == doctest::Approx(s.mean(i)).epsilon(1e-12));
}

TEST_CASE("update gain is one half for unit prior and unit noise") {
  // Per-component scalar case: P = 1, R = 1 -> K = 0.5, posterior midway.
  KalmanState s;
  s.mean << 10, 20, 30, 40, 0, 0, 0, 0;
  s.covariance = Eigen::Matrix<double, 8, 8>::Identity();
  const KalmanState next = kalman_update(s, ImageBox{14, 20, 30, 40});
  CHECK(next.mean(0) == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(next.mean(1) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(next.covariance(0, 0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("repeated identical measurements contract toward the measurement") {
  KalmanState s = kalman_init(ImageBox{0, 0, 10, 10});
  const ImageBox target{50, 50, 10, 10};
  double prev_err = std::abs(s.mean(0) - 50.0);
  for (int i = 0; i < 8; ++i) {
    s = kalman_predict(s);
    s = kalman_update(s, target);
    const double err = std::abs(s.mean(0) - 50.0);
    CHECK(err < prev_err + 1e-12);
    prev_err = err;
  }
  CHECK(prev_err < 1.0);
}

TEST_CASE("posterior covariance stays symmetric PSD under random churn") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  KalmanState s = kalman_init(ImageBox{80, 60, 30, 90});
  for (int i = 0; i < 500; ++i) {
    s = kalman_predict(s);
    if (i % 3 != 2) {
      s = kalman_update(s, ImageBox{80 + u(rng), 60 + u(rng), 30 + std::abs(u(rng)) / 3 + 1,
                                    90 + std::abs(u(rng)) / 3 + 1});
    }
    const auto& p = s.covariance;
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(min_eigenvalue(p) >= -1e-9);
    for (int k = 0; k < 8; ++k) CHECK(p(k, k) >= 0.0);
  }
}

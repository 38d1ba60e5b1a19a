#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "trendlab/error.hpp"
#include "trendlab/signals.hpp"

using namespace trendlab;

TEST_CASE("EMA recursion equals the direct weighted sum") {
  std::mt19937_64 rng(1);
  const double eta = 0.07;
  const Eigen::MatrixXd r = testsupport::gaussian(rng, 60, 3);
  SignalState s = SignalState::initial(3, eta);
  CHECK(s.values.isZero());
  CHECK(s.t == 1);
  for (Eigen::Index t = 0; t < r.rows(); ++t) {
    s = update(s, r.row(t).transpose());
    // s is now the signal for day t + 2 (1-based), built from r_1..r_{t+1}.
    Eigen::VectorXd direct = Eigen::VectorXd::Zero(3);
    for (Eigen::Index u = 0; u <= t; ++u) direct += std::pow(1.0 - eta, static_cast<double>(t - u)) * r.row(u).transpose();
    CHECK((s.values - direct).norm() < 1e-12);
  }
  CHECK(s.t == 61);
}

TEST_CASE("signal mass") {
  CHECK(s_hat(0.01, 1) == 0.0);
  CHECK(s_hat(0.01, 2) == doctest::Approx(1.0));
  double direct = 0.0;
  for (long u = 1; u < 300; ++u) direct += std::pow(0.99, static_cast<double>(300 - u - 1));
  CHECK(s_hat(0.01, 300) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("warm-up length") {
  CHECK(signal_warmup(0.01) == 200);
  CHECK(signal_warmup(1.0 / 3.0) == 6);
  CHECK(signal_warmup(0.3) == 7);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(SignalState::initial(2, 0.0), Error);
  CHECK_THROWS_AS(SignalState::initial(2, 1.0), Error);
  auto s = SignalState::initial(2, 0.1);
  CHECK_THROWS_AS(update(s, Eigen::Vector3d::Zero()), Error);
  CHECK_THROWS_AS(update(s, Eigen::Vector2d(1.0, std::nan(""))), Error);
}

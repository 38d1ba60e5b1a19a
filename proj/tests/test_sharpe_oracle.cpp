#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "trendlab/error.hpp"
#include "trendlab/sharpe_oracle.hpp"
#include "trendlab/symmat.hpp"

using namespace trendlab;

namespace {

// Lower-triangular kernels as explicit t x t matrices (1-based rows/cols
// mapped to 0-based storage).
Eigen::MatrixXd kernel_matrix(double decay, double scale, long t) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(t, t);
  for (long row = 1; row <= t; ++row)
    for (long col = 1; col < row; ++col) m(row - 1, col - 1) = scale * std::pow(decay, static_cast<double>(row - col - 1));
  return m;
}

// sum_{L=1}^{N} x^L
double geom(double x, long N) { return x * (1.0 - std::pow(x, static_cast<double>(N))) / (1.0 - x); }

ModelParams model2(double xi_scale, Eigen::Vector2d mu) {
  ModelParams p;
  p.c_eps = (Eigen::MatrixXd(2, 2) << 1.0, 0.4, 0.4, 0.8).finished();
  p.c_xi = xi_scale * (Eigen::MatrixXd(2, 2) << 0.5, -0.1, -0.1, 0.3).finished();
  p.mu = mu;
  p.trend_gamma = 0.1;
  p.trend_beta = std::sqrt(1.0 - 0.81);
  p.asset_classes.assign(2, AssetClass::Stock);
  return p;
}

}  // namespace

TEST_CASE("kernels match explicit matrix products") {
  const double eta = 0.15, beta = 0.7, gamma = 0.2;
  for (long t : {2L, 3L, 17L, 40L}) {
    const Eigen::MatrixXd S = kernel_matrix(1.0 - eta, 1.0, t);
    const Eigen::MatrixXd A = kernel_matrix(1.0 - gamma, beta, t);
    const auto k = compute_kernels(eta, beta, gamma, t);
    const Eigen::Index i = t - 1;
    const double ss = (S * S.transpose())(i, i);
    const double saas = (S * A * A.transpose() * S.transpose())(i, i);
    const double aa = (A * A.transpose())(i, i);
    const double saa = (S * A * A.transpose())(i, i);
    CHECK(k.f_ee == doctest::Approx(ss).epsilon(1e-13));
    CHECK(k.f_ex == doctest::Approx(saas).epsilon(1e-13));
    CHECK(k.aa == doctest::Approx(aa).epsilon(1e-13));
    CHECK(k.f_xe == doctest::Approx(ss * aa).epsilon(1e-13));
    CHECK(k.f_xx1 == doctest::Approx(saas * aa).epsilon(1e-13));
    CHECK(k.f_xx2 == doctest::Approx(saa * saa).epsilon(1e-13));
    CHECK(k.s_hat == doctest::Approx(S.row(i).sum()).epsilon(1e-13));
    CHECK(k.g1 == doctest::Approx(aa).epsilon(1e-13));
    CHECK(k.g2 == doctest::Approx(saas / ss).epsilon(1e-13));
    CHECK(k.g3 == doctest::Approx(k.s_hat * k.s_hat / ss).epsilon(1e-13));
    CHECK(k.h_xi == doctest::Approx(saa / ss).epsilon(1e-13));
    CHECK(k.h_mu == doctest::Approx(k.s_hat / ss).epsilon(1e-13));
    // With the transpose first the product vanishes on the diagonal: A has
    // an empty last column inside the horizon.
    CHECK((S * A.transpose() * A)(i, i) == 0.0);
  }
}

TEST_CASE("kernels match geometric closed forms") {
  const double eta = 0.01, gamma = 0.02;
  const double a = 1.0 - eta, b = 1.0 - gamma;
  const double beta = std::sqrt(1.0 - b * b);
  const long t = 500;
  const long N = t - 1;
  const auto k = compute_kernels(eta, beta, gamma, t);
  const double f_ee = 1.0 + geom(a * a, N - 1);
  const double aa = beta * beta * (1.0 + geom(b * b, N - 1));
  const double s_hat = (1.0 - std::pow(a, static_cast<double>(N))) / eta;
  // (S A)_{t,u} = beta (a^L - b^L) / (a - b) with L = t - u - 1.
  const double saas =
      beta * beta / ((a - b) * (a - b)) * (geom(a * a, N - 1) - 2.0 * geom(a * b, N - 1) + geom(b * b, N - 1));
  const double saa = beta * beta / (a - b) * (geom(a * b, N - 1) - geom(b * b, N - 1));
  CHECK(std::abs(k.f_ee - f_ee) < 1e-10 * f_ee);
  CHECK(std::abs(k.aa - aa) < 1e-10 * aa);
  CHECK(std::abs(k.s_hat - s_hat) < 1e-10 * s_hat);
  CHECK(std::abs(k.f_ex - saas) < 1e-10 * saas);
  CHECK(std::abs(k.saa - saa) < 1e-10 * saa);
  CHECK(std::abs(k.f_xx2 - saa * saa) < 1e-10 * saa * saa);
}

TEST_CASE("kernel edge cases") {
  const auto first = compute_kernels(0.3, 0.5, 0.1, 2);
  CHECK(first.f_ee == 1.0);
  CHECK(first.s_hat == 1.0);
  CHECK(first.g3 == 1.0);
  CHECK(first.f_ex == 0.0);

  const auto flat = compute_kernels(0.05, 0.0, 0.1, 100);
  CHECK(flat.f_ex == 0.0);
  CHECK(flat.f_xe == 0.0);
  CHECK(flat.f_xx1 == 0.0);
  CHECK(flat.f_xx2 == 0.0);
  CHECK(flat.g1 == 0.0);
  CHECK(flat.g2 == 0.0);
  CHECK(flat.f_ee > 0.0);

  try {
    compute_kernels(0.1, 0.1, 0.1, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooEarly);
  }
}

TEST_CASE("moments without trend or drift") {
  auto p = model2(0.0, Eigen::Vector2d::Zero());
  const long t = 30;
  const double eta = 0.1;
  const auto k = compute_kernels(eta, p.trend_beta, p.trend_gamma, t);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd w = testsupport::gaussian(rng, 2, 2);
    const auto mv = moments(p, eta, w, t);
    CHECK(mv.mean == 0.0);
    double direct = 0.0;
    for (int j1 = 0; j1 < 2; ++j1)
      for (int k1 = 0; k1 < 2; ++k1)
        for (int j2 = 0; j2 < 2; ++j2)
          for (int k2 = 0; k2 < 2; ++k2) direct += w(j1, k1) * w(j2, k2) * p.c_eps(j1, j2) * p.c_eps(k1, k2);
    CHECK(mv.variance == doctest::Approx(k.f_ee * direct).epsilon(1e-12));
  }
}

TEST_CASE("single-asset moments against simulation") {
  ModelParams p;
  p.c_eps = Eigen::MatrixXd::Ones(1, 1);
  p.c_xi = Eigen::MatrixXd::Zero(1, 1);
  p.mu = Eigen::VectorXd::Constant(1, 0.3);
  p.trend_beta = 0.0;
  p.trend_gamma = 0.5;
  p.asset_classes = {AssetClass::Stock};
  const double eta = 0.2;
  const long t = 12;
  const Eigen::MatrixXd w = Eigen::MatrixXd::Constant(1, 1, 1.7);
  const auto mv = moments(p, eta, w, t);
  CHECK(mv.mean == doctest::Approx(0.09 * compute_kernels(eta, 0.0, 0.5, t).s_hat * 1.7).epsilon(1e-14));

  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int draws = 1000000;
  Eigen::VectorXd pnl(draws);
  for (int d = 0; d < draws; ++d) {
    double s = 0.0;
    for (long u = 1; u < t; ++u) s = (1.0 - eta) * s + 0.3 + normal(rng);
    pnl(d) = 1.7 * (0.3 + normal(rng)) * s;
  }
  const double mean = pnl.mean();
  const Eigen::ArrayXd centered = pnl.array() - mean;
  const double var = centered.square().mean();
  const double m4 = centered.square().square().mean();
  CHECK(std::abs(mean - mv.mean) < 3.0 * std::sqrt(var / draws));
  CHECK(std::abs(var - mv.variance) < 3.0 * std::sqrt((m4 - var * var) / draws));
}

TEST_CASE("moments are homogeneous and the variance form is PSD") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_weak_trend_model(3, 100 + trial, 0.3);
    const auto m = pnl_moments(p, 0.05, 60);
    CHECK(m.n() == 3);
    CHECK(symmat::is_symmetric(m.var));
    CHECK(symmat::eigendecompose(m.var).values.minCoeff() >= -1e-10 * m.var.norm());
    const Eigen::MatrixXd w = testsupport::gaussian(rng, 3, 3);
    const auto base = moments(m, w);
    const auto scaled = moments(m, -2.5 * w);
    CHECK(scaled.mean == doctest::Approx(-2.5 * base.mean).epsilon(1e-13));
    CHECK(scaled.variance == doctest::Approx(6.25 * base.variance).epsilon(1e-13));
    CHECK(base.variance > 0.0);
    for (double c : {1e-3, 0.7, 40.0})
      CHECK(std::abs(squared_sharpe(m, c * w) / squared_sharpe(m, w) - 1.0) < 1e-12);
  }
}

TEST_CASE("drift terms vanish without drift") {
  auto p = model2(1.0, Eigen::Vector2d::Zero());
  const long t = 50;
  const double eta = 0.1;
  const auto k = compute_kernels(eta, p.trend_beta, p.trend_gamma, t);
  const auto m = pnl_moments(p, eta, t);
  CHECK((m.mean - k.saa * p.c_xi).norm() < 1e-14);
  const Eigen::MatrixXd P = p.c_eps + k.aa * p.c_xi;
  const Eigen::MatrixXd Q = k.f_ee * p.c_eps + k.f_ex * p.c_xi;
  const Eigen::MatrixXd R = k.saa * p.c_xi;
  for (int j1 = 0; j1 < 2; ++j1)
    for (int k1 = 0; k1 < 2; ++k1)
      for (int j2 = 0; j2 < 2; ++j2)
        for (int k2 = 0; k2 < 2; ++k2)
          CHECK(m.var(j1 * 2 + k1, j2 * 2 + k2) ==
                doctest::Approx(P(j1, j2) * Q(k1, k2) + R(j1, k2) * R(j2, k1)).epsilon(1e-13));
}

TEST_CASE("flatten is row-major") {
  const Eigen::MatrixXd w = (Eigen::MatrixXd(2, 2) << 1.0, 2.0, 3.0, 4.0).finished();
  CHECK(flatten(w) == Eigen::Vector4d(1.0, 2.0, 3.0, 4.0));
  CHECK(unflatten(flatten(w), 2) == w);
  CHECK_THROWS_AS(unflatten(Eigen::Vector3d::Ones(), 2), Error);
}

TEST_CASE("brute-force optimum beats random probes") {
  std::mt19937_64 rng(4);
  for (Eigen::Index n : {2, 3}) {
    const auto p = random_weak_trend_model(n, 7 + n, 0.2);
    const auto m = pnl_moments(p, 0.05, 80);
    const Eigen::MatrixXd best = brute_force_optimal(m);
    CHECK(best.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(moments(m, best).mean > 0.0);
    const double top = squared_sharpe(m, best);
    double probe_max = 0.0;
    for (int probe = 0; probe < 10000; ++probe)
      probe_max = std::max(probe_max, squared_sharpe(m, testsupport::gaussian(rng, n, n)));
    CHECK(top >= probe_max);
    CHECK(stationarity_residual(m, best) < 1e-6);
  }
  CHECK(brute_force_optimal(random_weak_trend_model(1, 3), 0.1, 20) == Eigen::MatrixXd::Ones(1, 1));
  CHECK_THROWS_AS(brute_force_optimal(random_weak_trend_model(4, 3), 0.1, 20), Error);
}

TEST_CASE("stationarity residual") {
  const auto one = random_weak_trend_model(1, 5);
  for (double w : {0.3, -2.0, 10.0})
    CHECK(stationarity_residual(one, 0.1, Eigen::MatrixXd::Constant(1, 1, w), 40) < 1e-15);

  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const auto p = random_weak_trend_model(2 + seed % 2, seed);
    CHECK(stationarity_residual(p, 0.01, brute_force_optimal(p, 0.01, 500), 500) < 1e-6);
  }

  const auto p = random_weak_trend_model(2, 6);
  CHECK_THROWS_AS(stationarity_residual(p, 0.1, Eigen::MatrixXd::Zero(2, 2), 30), Error);
}

TEST_CASE("trend proportional to noise gives naive Markowitz positions") {
  auto p = model2(0.0, Eigen::Vector2d::Zero());
  p.c_xi = 0.3 * p.c_eps;
  const long t = 200;
  const double eta = 0.02;
  const Eigen::MatrixXd best = brute_force_optimal(p, eta, t);
  const Eigen::MatrixXd cov = theoretical_covariance(p, t, t);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd s = testsupport::gaussian_vector(rng, 2);
    const Eigen::VectorXd a = best * s;
    const Eigen::VectorXd b = cov.ldlt().solve(s);
    CHECK(std::abs(std::abs(a.dot(b)) / (a.norm() * b.norm()) - 1.0) < 1e-10);
  }
}

TEST_CASE("closed-form weights in the weak-trend limit") {
  // Far inside the weak regime both closed forms are near-stationary.
  for (std::uint64_t seed = 40; seed < 45; ++seed) {
    const auto p = random_weak_trend_model(2, seed, 1e-4);
    const double eta = 0.05;
    const long t = 300;
    const auto m = pnl_moments(p, eta, t);
    const double best = squared_sharpe(m, brute_force_optimal(m));
    for (const auto& omega : {stationary_weights(p, eta, t), sandwich_weights(p, eta, t)}) {
      CHECK(stationarity_residual(m, omega.weights) < 0.05);
      CHECK(squared_sharpe(m, omega.weights) >= 0.9 * best);
    }
  }
}

TEST_CASE("random weak-trend models respect their bounds") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto p = random_weak_trend_model(3, seed, 0.05);
    CHECK_NOTHROW(p.validate());
    const double eps_norm = symmat::eigendecompose(p.c_eps).values.maxCoeff();
    CHECK(eps_norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(symmat::eigendecompose(p.c_xi).values.maxCoeff() <= 0.05 * eps_norm + 1e-15);
    CHECK(p.mu.squaredNorm() <= 0.05 * eps_norm + 1e-15);
    CHECK(p.trend_gamma >= 0.01);
    CHECK(p.trend_gamma <= 0.1);
  }
  CHECK(model_fingerprint(random_weak_trend_model(2, 9)) == model_fingerprint(random_weak_trend_model(2, 9)));
  CHECK(model_fingerprint(random_weak_trend_model(2, 9)) != model_fingerprint(random_weak_trend_model(2, 10)));
}

#include "trendlab/sharpe_oracle.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "trendlab/error.hpp"
#include "trendlab/signals.hpp"
#include "trendlab/symmat.hpp"

namespace trendlab {

KernelValues compute_kernels(double eta, double beta, double gamma, long t) {
  if (t < 2) throw Error(ErrorKind::TooEarly, "kernels need t >= 2");
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorKind::InvalidInput, "eta must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorKind::InvalidInput, "gamma must lie in (0, 1]");
  const double a = 1.0 - eta;
  const double b = 1.0 - gamma;
  auto S = [&](long row, long col) { return col < row ? std::pow(a, static_cast<double>(row - col - 1)) : 0.0; };
  auto A = [&](long row, long col) { return col < row ? beta * std::pow(b, static_cast<double>(row - col - 1)) : 0.0; };

  KernelValues k;
  k.t = t;
  for (long tp = 1; tp < t; ++tp) {
    const double s = S(t, tp);
    k.f_ee += s * s;
    k.s_hat += s;
    const double at = A(t, tp);
    k.aa += at * at;
  }
  // (S A)_{t,u} = sum_{t'} S_{t,t'} A_{t',u}, nonzero for u < t - 1.
  double saas = 0.0;
  for (long u = 1; u < t; ++u) {
    double sa = 0.0;
    for (long tp = u + 1; tp < t; ++tp) sa += S(t, tp) * A(tp, u);
    saas += sa * sa;
    k.saa += sa * A(t, u);
  }
  k.f_ex = saas;
  k.f_xe = k.f_ee * k.aa;
  k.f_xx1 = saas * k.aa;
  k.f_xx2 = k.saa * k.saa;
  k.g1 = k.aa;
  k.g2 = saas / k.f_ee;
  k.g3 = k.s_hat * k.s_hat / k.f_ee;
  k.h_xi = k.saa / k.f_ee;
  k.h_mu = k.s_hat / k.f_ee;
  return k;
}

PnlMoments pnl_moments(const ModelParams& model, double eta, long t) {
  model.validate();
  const KernelValues k = compute_kernels(eta, model.trend_beta, model.trend_gamma, t);
  const Eigen::Index n = model.n();
  const Eigen::VectorXd& mu = model.mu;

  // Centered covariances of x = r_t - mu and y = s_t - mu s_hat.
  const Eigen::MatrixXd P = model.c_eps + k.aa * model.c_xi;
  const Eigen::MatrixXd Q = k.f_ee * model.c_eps + k.f_ex * model.c_xi;
  const Eigen::MatrixXd R = k.saa * model.c_xi;  // Cov(x^j, y^k)
  const double sh = k.s_hat;

  PnlMoments out;
  out.t = t;
  out.mean = R + sh * mu * mu.transpose();
  out.var.resize(n * n, n * n);
  for (Eigen::Index j1 = 0; j1 < n; ++j1)
    for (Eigen::Index k1 = 0; k1 < n; ++k1)
      for (Eigen::Index j2 = 0; j2 < n; ++j2)
        for (Eigen::Index k2 = 0; k2 < n; ++k2) {
          double v = P(j1, j2) * Q(k1, k2) + R(j1, k2) * R(j2, k1);
          v += mu(j1) * mu(j2) * Q(k1, k2);
          v += sh * sh * mu(k1) * mu(k2) * P(j1, j2);
          v += sh * mu(j1) * mu(k2) * R(j2, k1);
          v += sh * mu(j2) * mu(k1) * R(j1, k2);
          out.var(j1 * n + k1, j2 * n + k2) = v;
        }
  out.var = symmat::symmetrize(out.var);
  return out;
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& omega) {
  const Eigen::Index n = omega.rows();
  Eigen::VectorXd w(n * omega.cols());
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < omega.cols(); ++k) w(j * omega.cols() + k) = omega(j, k);
  return w;
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& w, Eigen::Index n) {
  if (w.size() != n * n) throw Error(ErrorKind::InvalidInput, "unflatten: size is not n^2");
  Eigen::MatrixXd omega(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) omega(j, k) = w(j * n + k);
  return omega;
}

namespace {

Eigen::VectorXd checked_flat(const PnlMoments& m, const Eigen::MatrixXd& omega) {
  if (omega.rows() != m.n() || omega.cols() != m.n())
    throw Error(ErrorKind::InvalidInput, "omega dimension does not match the model");
  return flatten(omega);
}

}  // namespace

MeanVariance moments(const PnlMoments& m, const Eigen::MatrixXd& omega) {
  const Eigen::VectorXd w = checked_flat(m, omega);
  return {flatten(m.mean).dot(w), w.dot(m.var * w)};
}

MeanVariance moments(const ModelParams& model, double eta, const Eigen::MatrixXd& omega, long t) {
  return moments(pnl_moments(model, eta, t), omega);
}

double squared_sharpe(const PnlMoments& m, const Eigen::MatrixXd& omega) {
  const MeanVariance mv = moments(m, omega);
  if (!(mv.variance > 0.0)) throw Error(ErrorKind::DegenerateForm, "P&L variance is zero");
  return mv.mean * mv.mean / mv.variance;
}

double stationarity_residual(const PnlMoments& m, const Eigen::MatrixXd& omega) {
  Eigen::VectorXd w = checked_flat(m, omega);
  const double norm = w.norm();
  if (!(norm > 0.0)) throw Error(ErrorKind::DegenerateForm, "omega is zero");
  w /= norm;
  const Eigen::VectorXd mflat = flatten(m.mean);
  const Eigen::VectorXd vw = m.var * w;
  const double quad = w.dot(vw);
  const double lin = mflat.dot(w);
  if (!(quad > 0.0)) throw Error(ErrorKind::DegenerateForm, "P&L variance is zero");
  if (lin == 0.0) throw Error(ErrorKind::DegenerateForm, "P&L mean is zero");
  return (mflat * quad - vw * lin).lpNorm<Eigen::Infinity>() / (std::abs(lin) * quad);
}

double stationarity_residual(const ModelParams& model, double eta, const Eigen::MatrixXd& omega, long t) {
  return stationarity_residual(pnl_moments(model, eta, t), omega);
}

Eigen::MatrixXd brute_force_optimal(const PnlMoments& m) {
  const Eigen::Index n = m.n();
  if (n < 1 || n > 3) throw Error(ErrorKind::InvalidInput, "brute_force_optimal supports 1 <= n <= 3");
  if (n == 1) return Eigen::MatrixXd::Ones(1, 1);
  const Eigen::VectorXd mflat = flatten(m.mean);
  if (mflat.isZero(0.0)) throw Error(ErrorKind::DegenerateForm, "P&L mean is zero for every omega");

  Eigen::LDLT<Eigen::MatrixXd> ldlt(m.var);
  Eigen::VectorXd w;
  if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() > 1e-14) {
    w = ldlt.solve(mflat);
  } else {
    const double ridge = 1e-12 * m.var.trace();
    const Eigen::MatrixXd shifted = m.var + ridge * Eigen::MatrixXd::Identity(n * n, n * n);
    w = shifted.ldlt().solve(mflat);
  }
  w.normalize();
  if (mflat.dot(w) < 0.0) w = -w;
  return unflatten(w, n);
}

Eigen::MatrixXd brute_force_optimal(const ModelParams& model, double eta, long t) {
  return brute_force_optimal(pnl_moments(model, eta, t));
}

OmegaMatrix stationary_weights(const ModelParams& model, double eta, long t) {
  model.validate();
  const KernelValues k = compute_kernels(eta, model.trend_beta, model.trend_gamma, t);
  const Eigen::MatrixXd cov = theoretical_covariance(model, t, t);
  return optimal_matrix(cov, model.c_xi, model.mu * model.mu.transpose(), k.h_xi, k.h_mu, 0.0);
}

OmegaMatrix sandwich_weights(const ModelParams& model, double eta, long t) {
  model.validate();
  const KernelValues k = compute_kernels(eta, model.trend_beta, model.trend_gamma, t);
  const Eigen::MatrixXd drift = model.mu * model.mu.transpose();
  const Eigen::MatrixXd left = model.c_eps + k.g1 * model.c_xi + drift;
  const Eigen::MatrixXd right = model.c_eps + k.g2 * model.c_xi + k.g3 * drift;
  const Eigen::MatrixXd core = k.h_xi * model.c_xi + k.h_mu * drift;
  return {symmat::inverse(left, 0.0) * core * symmat::inverse(right, 0.0), k.h_xi, k.h_mu};
}

ModelParams random_weak_trend_model(Eigen::Index n, std::uint64_t seed, double strength) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "model needs n >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto gaussian = [&](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd g(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = normal(rng);
    return g;
  };
  auto spectral_norm = [](const Eigen::MatrixXd& m) { return symmat::eigendecompose(m).values.cwiseAbs().maxCoeff(); };

  ModelParams model;
  const Eigen::MatrixXd g = gaussian(n, n);
  Eigen::MatrixXd c_eps = g * g.transpose() / static_cast<double>(n) + 0.5 * Eigen::MatrixXd::Identity(n, n);
  c_eps = symmat::symmetrize(c_eps / spectral_norm(c_eps));
  model.c_eps = c_eps;

  const Eigen::MatrixXd h = gaussian(n, n);
  Eigen::MatrixXd c_xi = symmat::symmetrize(h * h.transpose());
  c_xi *= strength * (0.1 + 0.9 * unit(rng)) / spectral_norm(c_xi);
  model.c_xi = symmat::symmetrize(c_xi);

  Eigen::VectorXd mu = gaussian(n, 1);
  mu *= std::sqrt(strength * unit(rng)) / mu.norm();
  model.mu = mu;

  model.trend_gamma = 0.01 + 0.09 * unit(rng);
  const double b = 1.0 - model.trend_gamma;
  model.trend_beta = std::sqrt(1.0 - b * b);
  model.asset_classes.assign(static_cast<std::size_t>(n), AssetClass::Stock);
  return model;
}

std::string model_fingerprint(const ModelParams& model) {
  std::string out;
  auto put = [&](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g,", v);
    out += buf;
  };
  out += "mu:";
  for (Eigen::Index i = 0; i < model.mu.size(); ++i) put(model.mu(i));
  out += "c_eps:";
  for (Eigen::Index i = 0; i < model.c_eps.size(); ++i) put(model.c_eps.data()[i]);
  out += "c_xi:";
  for (Eigen::Index i = 0; i < model.c_xi.size(); ++i) put(model.c_xi.data()[i]);
  out += "beta:";
  put(model.trend_beta);
  out += "gamma:";
  put(model.trend_gamma);
  out += "classes:";
  for (auto c : model.asset_classes) out += std::string(to_string(c)) + ",";
  return out;
}

}  // namespace trendlab

#pragma once

// Exact first and second moments of the one-day trend-following P&L
//
//   dP_t = sum_{j,k} omega^{jk} r_t^j s_t^k
//
// under the Gaussian return model with an EMA signal, together with the
// kernel scalars that summarize the time products of the signal and trend
// kernels, and a brute-force maximizer of the squared Sharpe ratio.
//
// Weight matrices are flattened row-major: entry (j, k) sits at j * n + k.

#include <Eigen/Dense>

#include <cstdint>
#include <string>

#include "trendlab/market_model.hpp"
#include "trendlab/portfolios.hpp"

namespace trendlab {

struct KernelValues {
  long t = 0;
  double f_ee = 0.0;   // (S S^T)_tt
  double f_ex = 0.0;   // (S A A^T S^T)_tt
  double f_xe = 0.0;   // (S S^T)_tt (A A^T)_tt
  double f_xx1 = 0.0;  // (S A A^T S^T)_tt (A A^T)_tt
  double f_xx2 = 0.0;  // (S A A^T)_tt^2
  double g1 = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
  double h_xi = 0.0;  // c = 1
  double h_mu = 0.0;  // c = 1

  double s_hat = 0.0;  // sum_t' S_{t,t'}
  double aa = 0.0;     // (A A^T)_tt
  double saa = 0.0;    // (S A A^T)_tt
};

/// Direct finite sums over t' < t. Throws TooEarly for t < 2.
KernelValues compute_kernels(double eta, double beta, double gamma, long t);

struct PnlMoments {
  long t = 0;
  Eigen::MatrixXd mean;  // n x n, <r^j s^k>
  Eigen::MatrixXd var;   // n^2 x n^2, Cov(r^j1 s^k1, r^j2 s^k2)

  Eigen::Index n() const { return mean.rows(); }
};

PnlMoments pnl_moments(const ModelParams& model, double eta, long t);

struct MeanVariance {
  double mean = 0.0;
  double variance = 0.0;
};

Eigen::VectorXd flatten(const Eigen::MatrixXd& omega);
Eigen::MatrixXd unflatten(const Eigen::VectorXd& w, Eigen::Index n);

MeanVariance moments(const PnlMoments& m, const Eigen::MatrixXd& omega);
MeanVariance moments(const ModelParams& model, double eta, const Eigen::MatrixXd& omega, long t);

/// (M . omega)^2 / (omega^T V omega); throws DegenerateForm on zero variance.
double squared_sharpe(const PnlMoments& m, const Eigen::MatrixXd& omega);

/// Max-norm over (j, k) of M^{jk} (w^T V w) - (V w)^{jk} (M . w), divided by
/// |M . w| (w^T V w), where w is omega rescaled to unit Frobenius norm so the
/// value does not depend on the scale of omega.
double stationarity_residual(const PnlMoments& m, const Eigen::MatrixXd& omega);
double stationarity_residual(const ModelParams& model, double eta, const Eigen::MatrixXd& omega, long t);

/// Solves V w = M, returns w as a unit-norm n x n matrix with M . w > 0.
/// Requires n <= 3.
Eigen::MatrixXd brute_force_optimal(const PnlMoments& m);
Eigen::MatrixXd brute_force_optimal(const ModelParams& model, double eta, long t);

/// omega = C^{-1} (h_xi C_xi + h_mu M) C^{-1} with C the model's
/// equal-time return covariance at t.
OmegaMatrix stationary_weights(const ModelParams& model, double eta, long t);

/// Time-dependent variant with different left and right factors:
/// (C_eps + g1 C_xi + M)^{-1} (h_xi C_xi + h_mu M) (C_eps + g2 C_xi + g3 M)^{-1}.
OmegaMatrix sandwich_weights(const ModelParams& model, double eta, long t);

/// Random model with trend and drift small next to the noise: the spectral
/// norms of C_xi and mu mu^T are at most `strength` times that of C_eps.
/// gamma is drawn in [0.01, 0.1] and beta = sqrt(1 - (1 - gamma)^2) so the
/// stationary trend covariance equals C_xi.
ModelParams random_weak_trend_model(Eigen::Index n, std::uint64_t seed, double strength = 0.05);

/// Stable text of a model, used for hashing reports.
std::string model_fingerprint(const ModelParams& model);

}  // namespace trendlab

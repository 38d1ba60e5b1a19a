#pragma once

// Gaussian return model with constant drift, white noise and an exponentially
// decaying stochastic trend:
//
//   r_t = mu + eps_t + sum_{t' < t} A_{t,t'} xi_{t'},
//   A_{t,t'} = beta (1 - gamma)^{t - t' - 1}  for t > t', 0 otherwise.
//
// Time indices are 1-based throughout, so the trend sum is empty at t = 1.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "trendlab/date.hpp"

namespace trendlab {

enum class AssetClass { Stock, Bond, Fx };

std::string_view to_string(AssetClass c);
AssetClass parse_asset_class(std::string_view text);

/// 1 for stocks and bonds, 0 for FX: the target direction of risk parity.
Eigen::VectorXd risk_premium_mask(const std::vector<AssetClass>& classes);

struct ModelParams {
  Eigen::VectorXd mu;
  Eigen::MatrixXd c_eps;
  Eigen::MatrixXd c_xi;
  double trend_beta = 0.0;
  double trend_gamma = 1.0;
  std::vector<AssetClass> asset_classes;

  Eigen::Index n() const { return mu.size(); }

  /// Throws InvalidModel on dimension mismatch, asymmetry, non-PSD covariances
  /// or kernel parameters out of range.
  void validate() const;

  /// Number of leading samples to drop before treating a panel as stationary.
  std::size_t burn_in() const;
};

/// Kernel entry A_{t,t2} of the trend (zero unless t > t2).
double trend_kernel(const ModelParams& params, long t, long t2);

struct ReturnsPanel {
  Eigen::MatrixXd returns;  // T x n
  std::vector<AssetClass> asset_classes;
  std::uint64_t seed = 0;
  std::vector<std::string> names;  // empty means asset_1..asset_n
  std::vector<Date> dates;         // empty for synthetic panels

  Eigen::Index T() const { return returns.rows(); }
  Eigen::Index n() const { return returns.cols(); }

  std::string name(Eigen::Index j) const;
};

ReturnsPanel simulate(const ModelParams& params, long T, std::uint64_t seed);

/// <r_t r_t2^T> - mu mu^T = delta_{t,t2} C_eps + C_xi (A A^T)_{t,t2}, for 1 <= t2 <= t.
Eigen::MatrixXd theoretical_covariance(const ModelParams& params, long t, long t2);

/// t -> infinity limit of theoretical_covariance(params, t, t - lag).
Eigen::MatrixXd stationary_covariance(const ModelParams& params, long lag);

/// A block-structured model used by the CLI and the examples: stocks and
/// bonds are positively correlated within class and mildly anti-correlated
/// across, FX is weakly linked to everything. Trend covariance is a small
/// multiple of the noise covariance.
ModelParams default_model(Eigen::Index n);

}  // namespace trendlab

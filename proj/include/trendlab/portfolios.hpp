#pragma once

// Trend-following portfolio constructors. Covariances are in volatility-
// resized units, `vols` is the diagonal of Σ and `signal` the EMA signal
// vector. Constructors return positions at the scale of their defining
// formula; `unit_gross` and `vol_target` fix the free proportionality
// constant.

#include <Eigen/Dense>

#include <optional>
#include <string_view>
#include <vector>

#include "trendlab/market_model.hpp"

namespace trendlab {

enum class PortfolioKind { RP, NM, ARP, ToRP, EW, OptimalMatrix, Mix, Constant };

std::string_view to_string(PortfolioKind kind);

struct PortfolioWeights {
  Eigen::VectorXd positions;
  PortfolioKind kind = PortfolioKind::Constant;

  double gross() const { return positions.cwiseAbs().sum(); }
};

/// Signal-to-position weight matrix ω with the two scalar coefficients that
/// produced it.
struct OmegaMatrix {
  Eigen::MatrixXd weights;
  double h_xi = 1.0;
  double h_mu = 0.0;
};

/// Rescales to Σ|Π_j| = 1; zero positions are returned unchanged.
PortfolioWeights unit_gross(PortfolioWeights p);

/// Π ∝ C^{-1} Σ m with m_j = 0 for FX and 1 otherwise.
PortfolioWeights risk_parity(const Eigen::MatrixXd& cov, const Eigen::VectorXd& vols,
                             const std::vector<AssetClass>& classes,
                             std::optional<double> ridge = std::nullopt);

/// Π ∝ C^{-1} s.
PortfolioWeights naive_markowitz(const Eigen::MatrixXd& cov, const Eigen::VectorXd& signal,
                                 std::optional<double> ridge = std::nullopt);

/// Π ∝ Σ^{-1} corr^{-1/2} Σ^{-1} s: equal unconditional risk on every
/// eigenmode of the correlation matrix.
PortfolioWeights agnostic_risk_parity(const Eigen::MatrixXd& corr, const Eigen::VectorXd& vols,
                                      const Eigen::VectorXd& signal,
                                      std::optional<double> ridge = std::nullopt);

/// Π ∝ ((Σm)^T C^{-1} s) C^{-1} Σ m: the risk-parity book traded long or
/// short by the trend of its own direction.
PortfolioWeights trend_on_risk_parity(const Eigen::MatrixXd& cov, const Eigen::VectorXd& vols,
                                      const Eigen::VectorXd& signal, const std::vector<AssetClass>& classes,
                                      std::optional<double> ridge = std::nullopt);

/// Static equal-volatility book Π ∝ Σ^{-1} 1 (FX included).
PortfolioWeights equally_weighted(const Eigen::VectorXd& vols, const std::vector<AssetClass>& classes);

/// Trend-following counterpart of equally_weighted used by the backtest:
/// every asset trades its own signal with an equal volatility budget,
/// Π ∝ Σ^{-2} s. This is agnostic risk parity with correlations ignored.
PortfolioWeights equally_weighted_trend(const Eigen::VectorXd& vols, const Eigen::VectorXd& signal);

/// ω = C^{-1} (h_xi C_xi + h_mu M) C^{-1}.
OmegaMatrix optimal_matrix(const Eigen::MatrixXd& cov, const Eigen::MatrixXd& c_xi, const Eigen::MatrixXd& drift_outer,
                           double h_xi, double h_mu, std::optional<double> ridge = std::nullopt);

/// Π = ω s.
PortfolioWeights positions_from_omega(const OmegaMatrix& omega, const Eigen::VectorXd& signal);

/// Scales Π so that sqrt(Π^T C Π) = target.
PortfolioWeights vol_target(const PortfolioWeights& p, const Eigen::MatrixXd& cov, double target);

/// Σ w_i Π_i with each Π_i first vol-targeted to 1 under `cov`. Weights must
/// sum to one and, unless `allow_short`, be nonnegative.
PortfolioWeights mix(const std::vector<PortfolioWeights>& portfolios, const std::vector<double>& weights,
                     const Eigen::MatrixXd& cov, bool allow_short = false);

}  // namespace trendlab

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trendlab/estimation.hpp"
#include "trendlab/market_model.hpp"
#include "trendlab/portfolios.hpp"

namespace trendlab {

inline constexpr double kTradingDays = 252.0;

struct StrategySpec {
  std::string name;
  PortfolioKind kind = PortfolioKind::NM;
  /// Fixed book for PortfolioKind::Constant.
  Eigen::VectorXd constant_positions;
  /// Components of PortfolioKind::Mix; each is vol-targeted to 1 first.
  std::vector<std::pair<PortfolioKind, double>> components;
  /// Rescale positions to the configured conditional volatility each day.
  bool vol_targeted = true;

  /// "arp", "nm", "ew", "rp", "torp", or "mix:arp=0.2+rp=0.5+torp=0.3"
  /// (mix weights are renormalized to sum to one).
  static StrategySpec parse(std::string_view text);
  static StrategySpec basic(PortfolioKind kind);
  static StrategySpec constant(Eigen::VectorXd positions, std::string name = "constant");
};

struct BacktestConfig {
  double eta = 0.01;
  double eta_cov = 1.0 / 750.0;
  double eta_var = 1.0 / 100.0;
  Cleaner cleaner = Cleaner::Rie;
  double target_vol = 1.0;
  /// Overrides the default max(ceil(2/eta), 5 ceil(2/eta_cov)) days.
  std::optional<std::size_t> warmup;

  std::size_t effective_warmup() const;
};

struct BacktestResult {
  std::string name;
  Eigen::VectorXd pnl;                // T, zero during warm-up
  double sharpe = 0.0;                // annualized, post-warmup
  Eigen::MatrixXd positions_history;  // T x n
  std::size_t warmup = 0;

  Eigen::VectorXd live_pnl() const { return pnl.tail(pnl.size() - static_cast<Eigen::Index>(warmup)); }
};

/// Annualized Sharpe ratio mean/std * sqrt(252); throws DegenerateResult
/// when the series has zero dispersion.
double annualized_sharpe(const Eigen::Ref<const Eigen::VectorXd>& pnl);

BacktestResult run(const ReturnsPanel& panel, const StrategySpec& strategy, const BacktestConfig& config = {});

/// Runs several strategies over one pass of the estimators.
std::vector<BacktestResult> run_many(const ReturnsPanel& panel, const std::vector<StrategySpec>& strategies,
                                     const BacktestConfig& config = {});

struct EigenRiskProfile {
  Eigen::VectorXd eigenvalues;     // descending
  Eigen::VectorXd realized_risk;   // one entry per eigenmode
};

/// Per-eigenmode realized risk of a backtest. Mode k of `corr` carries the
/// exposure u_k^T Σ Π_t; its P&L is that exposure times the mode return
/// u_k^T Σ^{-1} r_t, expressed in units of the mode's own volatility
/// sqrt(λ_k). The reported risk is the std of this series over live days.
EigenRiskProfile realized_risk(const BacktestResult& result, const Eigen::MatrixXd& corr,
                               const Eigen::VectorXd& vols, const ReturnsPanel& panel);

/// Pearson correlations of live P&L (common window after the longest
/// warm-up).
Eigen::MatrixXd strategy_correlations(const std::vector<BacktestResult>& results);
Eigen::MatrixXd strategy_correlations(const std::vector<Eigen::VectorXd>& series);

struct MixResult {
  std::vector<double> weights;
  double sharpe = 0.0;
};

/// Sharpe of Σ w_i x_i / std(x_i): the mix of unit-volatility series.
double mixed_sharpe(const std::vector<Eigen::VectorXd>& series, const std::vector<double>& weights);

/// In-sample Sharpe-maximizing convex mix of unit-volatility P&L series,
/// found by projected gradient ascent on the simplex with multistart.
MixResult optimal_mix(const std::vector<Eigen::VectorXd>& series);
MixResult optimal_mix(const std::vector<BacktestResult>& results);

struct MixPoint {
  double weight = 0.0;  // weight of the second series
  double sharpe = 0.0;
};

std::vector<MixPoint> sweep_mix_curve(const Eigen::VectorXd& first, const Eigen::VectorXd& second, double step);

/// Live P&L series of several results trimmed to their common window.
std::vector<Eigen::VectorXd> aligned_live_pnl(const std::vector<BacktestResult>& results);

}  // namespace trendlab

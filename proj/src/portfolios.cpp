#include "trendlab/portfolios.hpp"

#include <cmath>
#include <string>

#include "trendlab/error.hpp"
#include "trendlab/symmat.hpp"

namespace trendlab {

std::string_view to_string(PortfolioKind kind) {
  switch (kind) {
    case PortfolioKind::RP: return "rp";
    case PortfolioKind::NM: return "nm";
    case PortfolioKind::ARP: return "arp";
    case PortfolioKind::ToRP: return "torp";
    case PortfolioKind::EW: return "ew";
    case PortfolioKind::OptimalMatrix: return "omega";
    case PortfolioKind::Mix: return "mix";
    case PortfolioKind::Constant: return "constant";
  }
  return "constant";
}

namespace {

void require_dim(const Eigen::MatrixXd& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n)
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": matrix dimension mismatch");
}

void require_len(const Eigen::VectorXd& v, Eigen::Index n, const char* what) {
  if (v.size() != n) throw Error(ErrorKind::InvalidInput, std::string(what) + ": vector dimension mismatch");
}

Eigen::MatrixXd inverse_of(const Eigen::MatrixXd& cov, std::optional<double> ridge) {
  return symmat::inverse(cov, ridge.value_or(symmat::default_ridge(cov)));
}

Eigen::VectorXd risk_parity_direction(const Eigen::MatrixXd& cov_inv, const Eigen::VectorXd& vols,
                                      const std::vector<AssetClass>& classes) {
  const Eigen::VectorXd mask = risk_premium_mask(classes);
  if (mask.sum() == 0.0)
    throw Error(ErrorKind::ZeroTargetVector, "risk parity target vector is zero (FX-only universe)");
  return cov_inv * vols.cwiseProduct(mask);
}

}  // namespace

PortfolioWeights unit_gross(PortfolioWeights p) {
  const double g = p.gross();
  if (g > 0.0) p.positions /= g;
  return p;
}

PortfolioWeights risk_parity(const Eigen::MatrixXd& cov, const Eigen::VectorXd& vols,
                             const std::vector<AssetClass>& classes, std::optional<double> ridge) {
  const Eigen::Index n = cov.rows();
  require_dim(cov, n, "risk_parity");
  require_len(vols, n, "risk_parity");
  if (static_cast<Eigen::Index>(classes.size()) != n)
    throw Error(ErrorKind::InvalidInput, "risk_parity: asset class count mismatch");
  return {risk_parity_direction(inverse_of(cov, ridge), vols, classes), PortfolioKind::RP};
}

PortfolioWeights naive_markowitz(const Eigen::MatrixXd& cov, const Eigen::VectorXd& signal,
                                 std::optional<double> ridge) {
  require_dim(cov, signal.size(), "naive_markowitz");
  return {inverse_of(cov, ridge) * signal, PortfolioKind::NM};
}

PortfolioWeights agnostic_risk_parity(const Eigen::MatrixXd& corr, const Eigen::VectorXd& vols,
                                      const Eigen::VectorXd& signal, std::optional<double> ridge) {
  const Eigen::Index n = signal.size();
  require_dim(corr, n, "agnostic_risk_parity");
  require_len(vols, n, "agnostic_risk_parity");
  const Eigen::MatrixXd root = symmat::inv_sqrt(corr, ridge.value_or(symmat::default_ridge(corr)));
  if (!(vols.minCoeff() > 0.0))
    throw Error(ErrorKind::DegenerateVolatility, "agnostic_risk_parity: zero volatility entry");
  const Eigen::VectorXd inv_vol = vols.cwiseInverse();
  return {inv_vol.asDiagonal() * (root * inv_vol.cwiseProduct(signal)), PortfolioKind::ARP};
}

PortfolioWeights trend_on_risk_parity(const Eigen::MatrixXd& cov, const Eigen::VectorXd& vols,
                                      const Eigen::VectorXd& signal, const std::vector<AssetClass>& classes,
                                      std::optional<double> ridge) {
  const Eigen::Index n = signal.size();
  require_dim(cov, n, "trend_on_risk_parity");
  require_len(vols, n, "trend_on_risk_parity");
  if (static_cast<Eigen::Index>(classes.size()) != n)
    throw Error(ErrorKind::InvalidInput, "trend_on_risk_parity: asset class count mismatch");
  // C^{-1} is symmetric, so (Σm)^T C^{-1} s = (C^{-1} Σ m)^T s.
  const Eigen::VectorXd book = risk_parity_direction(inverse_of(cov, ridge), vols, classes);
  return {book.dot(signal) * book, PortfolioKind::ToRP};
}

PortfolioWeights equally_weighted(const Eigen::VectorXd& vols, const std::vector<AssetClass>& classes) {
  require_len(vols, static_cast<Eigen::Index>(classes.size()), "equally_weighted");
  if (!(vols.minCoeff() > 0.0))
    throw Error(ErrorKind::DegenerateVolatility, "equally_weighted: zero volatility entry");
  return unit_gross({vols.cwiseInverse(), PortfolioKind::EW});
}

PortfolioWeights equally_weighted_trend(const Eigen::VectorXd& vols, const Eigen::VectorXd& signal) {
  require_len(vols, signal.size(), "equally_weighted_trend");
  if (!(vols.minCoeff() > 0.0))
    throw Error(ErrorKind::DegenerateVolatility, "equally_weighted_trend: zero volatility entry");
  return {signal.cwiseQuotient(vols.cwiseAbs2()), PortfolioKind::EW};
}

OmegaMatrix optimal_matrix(const Eigen::MatrixXd& cov, const Eigen::MatrixXd& c_xi, const Eigen::MatrixXd& drift_outer,
                           double h_xi, double h_mu, std::optional<double> ridge) {
  const Eigen::Index n = cov.rows();
  require_dim(cov, n, "optimal_matrix");
  require_dim(c_xi, n, "optimal_matrix");
  require_dim(drift_outer, n, "optimal_matrix");
  const Eigen::MatrixXd inv = inverse_of(cov, ridge);
  return {inv * (h_xi * c_xi + h_mu * drift_outer) * inv, h_xi, h_mu};
}

PortfolioWeights positions_from_omega(const OmegaMatrix& omega, const Eigen::VectorXd& signal) {
  if (omega.weights.cols() != signal.size())
    throw Error(ErrorKind::InvalidInput, "positions_from_omega: dimension mismatch");
  return {omega.weights * signal, PortfolioKind::OptimalMatrix};
}

PortfolioWeights vol_target(const PortfolioWeights& p, const Eigen::MatrixXd& cov, double target) {
  require_dim(cov, p.positions.size(), "vol_target");
  if (!(target > 0.0)) throw Error(ErrorKind::InvalidInput, "vol_target: target must be > 0");
  const double variance = p.positions.dot(cov * p.positions);
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw Error(ErrorKind::CannotScale, "vol_target: position has zero variance");
  return {p.positions * (target / std::sqrt(variance)), p.kind};
}

PortfolioWeights mix(const std::vector<PortfolioWeights>& portfolios, const std::vector<double>& weights,
                     const Eigen::MatrixXd& cov, bool allow_short) {
  if (portfolios.empty() || portfolios.size() != weights.size())
    throw Error(ErrorKind::InvalidInput, "mix: need one weight per portfolio");
  double total = 0.0;
  for (double w : weights) {
    if (!allow_short && w < 0.0) throw Error(ErrorKind::InvalidInput, "mix: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorKind::InvalidInput, "mix: weights must sum to 1");

  Eigen::VectorXd out = Eigen::VectorXd::Zero(cov.rows());
  for (std::size_t i = 0; i < portfolios.size(); ++i) {
    if (weights[i] == 0.0) continue;
    out += weights[i] * vol_target(portfolios[i], cov, 1.0).positions;
  }
  return {out, PortfolioKind::Mix};
}

}  // namespace trendlab

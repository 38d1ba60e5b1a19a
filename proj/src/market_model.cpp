#include "trendlab/market_model.hpp"

#include <cmath>
#include <random>

#include "trendlab/error.hpp"
#include "trendlab/symmat.hpp"

namespace trendlab {

std::string_view to_string(AssetClass c) {
  switch (c) {
    case AssetClass::Stock: return "stock";
    case AssetClass::Bond: return "bond";
    case AssetClass::Fx: return "fx";
  }
  return "stock";
}

AssetClass parse_asset_class(std::string_view text) {
  if (text == "stock") return AssetClass::Stock;
  if (text == "bond") return AssetClass::Bond;
  if (text == "fx") return AssetClass::Fx;
  throw Error(ErrorKind::InvalidInput, "unknown asset class '" + std::string(text) + "'");
}

Eigen::VectorXd risk_premium_mask(const std::vector<AssetClass>& classes) {
  Eigen::VectorXd m(static_cast<Eigen::Index>(classes.size()));
  for (std::size_t j = 0; j < classes.size(); ++j)
    m(static_cast<Eigen::Index>(j)) = classes[j] == AssetClass::Fx ? 0.0 : 1.0;
  return m;
}

namespace {

void require_psd(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorKind::InvalidModel, std::string(what) + " has non-finite entries");
  if (!symmat::is_symmetric(m)) throw Error(ErrorKind::InvalidModel, std::string(what) + " is not symmetric");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (symmat::min_eigenvalue(m) < -1e-10 * scale)
    throw Error(ErrorKind::InvalidModel, std::string(what) + " is not positive semi-definite");
}

}  // namespace

void ModelParams::validate() const {
  const Eigen::Index dim = mu.size();
  if (dim < 1) throw Error(ErrorKind::InvalidModel, "model needs at least one asset");
  if (!mu.allFinite()) throw Error(ErrorKind::InvalidModel, "drift has non-finite entries");
  if (c_eps.rows() != dim || c_eps.cols() != dim || c_xi.rows() != dim || c_xi.cols() != dim)
    throw Error(ErrorKind::InvalidModel, "covariance dimensions do not match the drift vector");
  if (static_cast<Eigen::Index>(asset_classes.size()) != dim)
    throw Error(ErrorKind::InvalidModel, "asset_classes length does not match the drift vector");
  require_psd(c_eps, "c_eps");
  require_psd(c_xi, "c_xi");
  if (!(trend_beta >= 0.0) || !std::isfinite(trend_beta))
    throw Error(ErrorKind::InvalidModel, "trend_beta must be a finite nonnegative number");
  if (!(trend_gamma > 0.0 && trend_gamma <= 1.0))
    throw Error(ErrorKind::InvalidModel, "trend_gamma must lie in (0, 1]");
}

std::size_t ModelParams::burn_in() const {
  return static_cast<std::size_t>(std::ceil(5.0 / trend_gamma - 1e-9));
}

double trend_kernel(const ModelParams& params, long t, long t2) {
  if (t <= t2) return 0.0;
  return params.trend_beta * std::pow(1.0 - params.trend_gamma, static_cast<double>(t - t2 - 1));
}

std::string ReturnsPanel::name(Eigen::Index j) const {
  if (!names.empty()) return names.at(static_cast<std::size_t>(j));
  return "asset_" + std::to_string(j + 1);
}

ReturnsPanel simulate(const ModelParams& params, long T, std::uint64_t seed) {
  params.validate();
  if (T < 1) throw Error(ErrorKind::InvalidInput, "simulate: T must be >= 1");

  const Eigen::Index n = params.n();
  const Eigen::MatrixXd l_eps = symmat::psd_factor(params.c_eps);
  const Eigen::MatrixXd l_xi = symmat::psd_factor(params.c_xi);
  const double decay = 1.0 - params.trend_gamma;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(n);
  auto draw = [&]() -> const Eigen::VectorXd& {
    for (Eigen::Index j = 0; j < n; ++j) z(j) = normal(rng);
    return z;
  };

  ReturnsPanel panel;
  panel.returns.resize(T, n);
  panel.asset_classes = params.asset_classes;
  panel.seed = seed;

  // trend(t) = sum_{t'<t} beta decay^{t-t'-1} xi_{t'}, advanced recursively.
  Eigen::VectorXd trend = Eigen::VectorXd::Zero(n);
  for (long t = 0; t < T; ++t) {
    panel.returns.row(t) = (params.mu + l_eps * draw() + trend).transpose();
    trend = decay * trend + params.trend_beta * (l_xi * draw());
  }
  return panel;
}

namespace {

// (A A^T)_{t,t2} for 1 <= t2 <= t, closed form of
// beta^2 sum_{u=1}^{t2-1} b^{t-1-u} b^{t2-1-u}.
double kernel_gram(const ModelParams& params, long t, long t2) {
  const double b = 1.0 - params.trend_gamma;
  const double geometric = params.trend_gamma == 1.0
                               ? (t2 >= 2 ? 1.0 : 0.0)
                               : (1.0 - std::pow(b, 2.0 * static_cast<double>(t2 - 1))) / (1.0 - b * b);
  return params.trend_beta * params.trend_beta * std::pow(b, static_cast<double>(t - t2)) * geometric;
}

}  // namespace

Eigen::MatrixXd theoretical_covariance(const ModelParams& params, long t, long t2) {
  if (t2 < 1 || t2 > t)
    throw Error(ErrorKind::InvalidIndex, "theoretical_covariance requires 1 <= t2 <= t");
  Eigen::MatrixXd out = params.c_xi * kernel_gram(params, t, t2);
  if (t == t2) out += params.c_eps;
  return symmat::symmetrize(out);
}

Eigen::MatrixXd stationary_covariance(const ModelParams& params, long lag) {
  if (lag < 0) throw Error(ErrorKind::InvalidIndex, "stationary_covariance requires lag >= 0");
  const double b = 1.0 - params.trend_gamma;
  const double gram = params.trend_beta * params.trend_beta * std::pow(b, static_cast<double>(lag)) / (1.0 - b * b);
  Eigen::MatrixXd out = params.c_xi * gram;
  if (lag == 0) out += params.c_eps;
  return symmat::symmetrize(out);
}

ModelParams default_model(Eigen::Index n) {
  if (n < 1) throw Error(ErrorKind::InvalidModel, "default_model needs n >= 1");

  // Roughly the 24/14/9 stock/bond/FX split of a cross-asset futures book.
  const auto stocks = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::lround(n * 24.0 / 47.0)));
  const auto bonds = std::min<Eigen::Index>(n - stocks, static_cast<Eigen::Index>(std::lround(n * 14.0 / 47.0)));

  ModelParams p;
  p.asset_classes.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j)
    p.asset_classes[static_cast<std::size_t>(j)] =
        j < stocks ? AssetClass::Stock : (j < stocks + bonds ? AssetClass::Bond : AssetClass::Fx);

  Eigen::MatrixXd corr(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto ci = p.asset_classes[static_cast<std::size_t>(i)];
      const auto cj = p.asset_classes[static_cast<std::size_t>(j)];
      double rho;
      if (i == j) rho = 1.0;
      else if (ci == AssetClass::Fx || cj == AssetClass::Fx) rho = ci == cj ? 0.3 : 0.1;
      else rho = ci == cj ? 0.5 : -0.1;
      corr(i, j) = rho;
    }
  }
  Eigen::VectorXd vol(n);
  for (Eigen::Index j = 0; j < n; ++j) vol(j) = 0.8 + 0.2 * static_cast<double>(j % 3);

  p.c_eps = symmat::symmetrize(vol.asDiagonal() * corr * vol.asDiagonal());
  p.mu = 0.02 * vol.cwiseProduct(risk_premium_mask(p.asset_classes));
  p.c_xi = symmat::symmetrize(0.01 * p.c_eps);
  p.trend_gamma = 0.01;
  // Normalizes the stationary trend variance to C_xi.
  p.trend_beta = std::sqrt(1.0 - (1.0 - p.trend_gamma) * (1.0 - p.trend_gamma));
  return p;
}

}  // namespace trendlab

#include "trendlab/estimation.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "trendlab/error.hpp"
#include "trendlab/symmat.hpp"

namespace trendlab {

CovarianceState CovarianceState::initial(Eigen::Index n, double eta_cov, double eta_var) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "covariance state needs n >= 1");
  if (!(eta_cov > 0.0 && eta_cov < 1.0) || !(eta_var > 0.0 && eta_var < 1.0))
    throw Error(ErrorKind::InvalidInput, "estimator rates must lie in (0, 1)");
  CovarianceState s;
  s.eta_cov = eta_cov;
  s.eta_var = eta_var;
  s.raw_cov = Eigen::MatrixXd::Zero(n, n);
  s.variances = Eigen::VectorXd::Zero(n);
  s.week_buffer = Eigen::VectorXd::Zero(n);
  return s;
}

CovarianceState update_daily(const CovarianceState& state, const Eigen::Ref<const Eigen::VectorXd>& r) {
  if (r.size() != state.variances.size())
    throw Error(ErrorKind::InvalidInput, "update_daily: return vector has wrong dimension");
  if (!r.allFinite()) throw Error(ErrorKind::InvalidInput, "update_daily: non-finite return");
  CovarianceState next = state;
  const Eigen::VectorXd squared = r.array().square().matrix();
  if (state.variances_seeded) {
    next.variances = (1.0 - state.eta_var) * state.variances + state.eta_var * squared;
  } else {
    next.variances = squared;
    next.variances_seeded = true;
  }
  next.week_buffer += r;
  ++next.week_days;
  return next;
}

CovarianceState roll_week(const CovarianceState& state) {
  if (state.week_days == 0) throw Error(ErrorKind::NothingToRoll, "roll_week: no daily returns buffered");
  CovarianceState next = state;
  const Eigen::VectorXd& weekly = state.week_buffer;
  next.raw_cov = symmat::symmetrize((1.0 - state.eta_cov) * state.raw_cov +
                                    state.eta_cov * (weekly * weekly.transpose()));
  next.week_buffer.setZero();
  next.week_days = 0;
  ++next.t_weeks;
  return next;
}

Eigen::MatrixXd correlation(const Eigen::Ref<const Eigen::MatrixXd>& cov) {
  const Eigen::Index n = cov.rows();
  Eigen::VectorXd inv_sd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(cov(i, i) > 0.0))
      throw Error(ErrorKind::DegenerateVariance, "correlation: nonpositive diagonal entry " + std::to_string(i));
    inv_sd(i) = 1.0 / std::sqrt(cov(i, i));
  }
  Eigen::MatrixXd out = symmat::symmetrize(inv_sd.asDiagonal() * cov * inv_sd.asDiagonal());
  out.diagonal().setOnes();
  return out;
}

Eigen::MatrixXd correlation(const CovarianceState& state) {
  if (state.t_weeks == 0) return Eigen::MatrixXd::Identity(state.n(), state.n());
  return correlation(state.raw_cov);
}

Eigen::VectorXd volatilities(const CovarianceState& state) {
  return state.variances.cwiseMax(0.0).cwiseSqrt();
}

std::string_view to_string(Cleaner c) {
  switch (c) {
    case Cleaner::Rie: return "rie";
    case Cleaner::Clip: return "clip";
    case Cleaner::None: return "none";
  }
  return "rie";
}

Cleaner parse_cleaner(std::string_view text) {
  if (text == "rie") return Cleaner::Rie;
  if (text == "clip") return Cleaner::Clip;
  if (text == "none") return Cleaner::None;
  throw Error(ErrorKind::InvalidInput, "unknown cleaner '" + std::string(text) + "'");
}

double effective_q(Eigen::Index dim, double eta_cov) {
  return static_cast<double>(dim) * eta_cov / (2.0 - eta_cov);
}

namespace {

void require_unit_diagonal(const Eigen::Ref<const Eigen::MatrixXd>& corr, const char* what) {
  symmat::require_square(corr, what);
  for (Eigen::Index i = 0; i < corr.rows(); ++i)
    if (std::abs(corr(i, i) - 1.0) > 1e-8)
      throw Error(ErrorKind::InvalidInput, std::string(what) + ": input must have unit diagonal");
}

Eigen::MatrixXd rebuild_unit_diagonal(const symmat::EigenPairs<double>& pairs, const Eigen::VectorXd& values) {
  Eigen::MatrixXd out = pairs.vectors * values.asDiagonal() * pairs.vectors.transpose();
  return correlation(symmat::symmetrize(out));
}

}  // namespace

Eigen::MatrixXd rie_clean(const Eigen::Ref<const Eigen::MatrixXd>& corr, double q) {
  require_unit_diagonal(corr, "rie_clean");
  if (!(q > 0.0)) throw Error(ErrorKind::InvalidInput, "rie_clean: q must be > 0");

  auto pairs = symmat::eigendecompose(corr);
  const Eigen::Index n = pairs.values.size();
  const Eigen::VectorXd lambda = pairs.values.cwiseMax(0.0);
  const double im = 1.0 / std::sqrt(static_cast<double>(n));

  Eigen::VectorXd shrunk(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::complex<double> z(lambda(k), -im);
    std::complex<double> stieltjes = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) stieltjes += 1.0 / (z - lambda(j));
    stieltjes /= static_cast<double>(n);
    const double denom = std::norm(1.0 - q + q * z * stieltjes);
    shrunk(k) = lambda(k) / denom;
  }
  return rebuild_unit_diagonal(pairs, shrunk);
}

Eigen::MatrixXd clip_clean(const Eigen::Ref<const Eigen::MatrixXd>& corr, double q) {
  require_unit_diagonal(corr, "clip_clean");
  if (!(q > 0.0)) throw Error(ErrorKind::InvalidInput, "clip_clean: q must be > 0");

  auto pairs = symmat::eigendecompose(corr);
  const double edge = (1.0 + std::sqrt(q)) * (1.0 + std::sqrt(q));
  Eigen::VectorXd values = pairs.values.cwiseMax(0.0);
  double bulk_sum = 0.0;
  Eigen::Index bulk = 0;
  for (Eigen::Index k = 0; k < values.size(); ++k)
    if (values(k) < edge) {
      bulk_sum += values(k);
      ++bulk;
    }
  if (bulk > 0) {
    const double mean = bulk_sum / static_cast<double>(bulk);
    for (Eigen::Index k = 0; k < values.size(); ++k)
      if (values(k) < edge) values(k) = mean;
  }
  return rebuild_unit_diagonal(pairs, values);
}

Eigen::MatrixXd clean(const Eigen::Ref<const Eigen::MatrixXd>& corr, double q, Cleaner cleaner) {
  switch (cleaner) {
    case Cleaner::Rie: return rie_clean(corr, q);
    case Cleaner::Clip: return clip_clean(corr, q);
    case Cleaner::None: return symmat::symmetrize(corr);
  }
  return symmat::symmetrize(corr);
}

}  // namespace trendlab

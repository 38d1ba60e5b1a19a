#pragma once

// Online covariance estimation: weekly-return EMA covariance for the
// correlation structure, daily EMA variances for volatilities, and
// eigenvalue cleaning of the resulting correlation matrix.

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>

namespace trendlab {

struct CovarianceState {
  double eta_cov = 1.0 / 750.0;
  double eta_var = 1.0 / 100.0;
  Eigen::MatrixXd raw_cov;    // EMA covariance of weekly returns
  Eigen::VectorXd variances;  // EMA of squared daily returns
  bool variances_seeded = false;
  Eigen::VectorXd week_buffer;  // running sum of the current week's returns
  std::size_t week_days = 0;
  std::size_t t_weeks = 0;

  /// raw_cov starts at zero, so the EMA scales with the returns, and the
  /// correlation reads as identity until the first week is rolled.
  /// Variances are seeded by the first squared return.
  static CovarianceState initial(Eigen::Index n, double eta_cov = 1.0 / 750.0, double eta_var = 1.0 / 100.0);

  Eigen::Index n() const { return raw_cov.rows(); }
};

CovarianceState update_daily(const CovarianceState& state, const Eigen::Ref<const Eigen::VectorXd>& r);

/// Folds the buffered week into raw_cov and clears the buffer.
CovarianceState roll_week(const CovarianceState& state);

/// raw_cov rescaled to unit diagonal; identity before the first roll.
Eigen::MatrixXd correlation(const CovarianceState& state);
Eigen::MatrixXd correlation(const Eigen::Ref<const Eigen::MatrixXd>& cov);

/// Diagonal of Σ: square roots of the daily variance estimates.
Eigen::VectorXd volatilities(const CovarianceState& state);

enum class Cleaner { Rie, Clip, None };

std::string_view to_string(Cleaner c);
Cleaner parse_cleaner(std::string_view text);

/// Ratio of dimension to effective sample count for an EMA of rate
/// `eta_cov`, whose effective window is 2/eta - 1 samples.
double effective_q(Eigen::Index dim, double eta_cov);

/// Rotational-invariant eigenvalue shrinkage: keeps the eigenvectors of
/// `corr` and maps each eigenvalue λ to λ / |1 - q + q z s(z)|^2 with
/// z = λ - i/sqrt(dim) and s the Stieltjes transform of the empirical
/// spectrum. The result is rescaled to unit diagonal.
Eigen::MatrixXd rie_clean(const Eigen::Ref<const Eigen::MatrixXd>& corr, double q);

/// Marchenko–Pastur clipping: eigenvalues below (1 + sqrt q)^2 are replaced
/// by their mean, then the result is rescaled to unit diagonal.
Eigen::MatrixXd clip_clean(const Eigen::Ref<const Eigen::MatrixXd>& corr, double q);

Eigen::MatrixXd clean(const Eigen::Ref<const Eigen::MatrixXd>& corr, double q, Cleaner cleaner);

}  // namespace trendlab

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace testsupport {

inline Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = normal(rng);
  return g;
}

inline Eigen::VectorXd gaussian_vector(std::mt19937_64& rng, Eigen::Index n) { return gaussian(rng, n, 1); }

// Random SPD matrix G G^T / dim + floor * I, exactly symmetric.
inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index dim, double floor = 0.1) {
  const Eigen::MatrixXd g = gaussian(rng, dim, dim);
  Eigen::MatrixXd m = g * g.transpose() / static_cast<double>(dim) + floor * Eigen::MatrixXd::Identity(dim, dim);
  return 0.5 * (m + m.transpose());
}

inline Eigen::MatrixXd random_correlation(std::mt19937_64& rng, Eigen::Index dim) {
  const Eigen::MatrixXd c = random_spd(rng, dim, 0.3);
  const Eigen::VectorXd d = c.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd r = d.asDiagonal() * c * d.asDiagonal();
  r = 0.5 * (r + r.transpose());
  r.diagonal().setOnes();
  return r;
}

}  // namespace testsupport

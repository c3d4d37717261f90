#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace crq {

using Rng = std::mt19937_64;

/// Vector of independent standard normal draws.
inline Eigen::VectorXd random_normal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

/// Matrix of independent standard normal draws, filled column by column.
inline Eigen::MatrixXd random_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = dist(rng);
  return a;
}

}  // namespace crq

#pragma once

// Independent reference computations for tests: SVD-based null space, plain
// bisection on the secular function, and explicit instance construction.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "crq/problem.hpp"
#include "crq/random.hpp"

namespace oracle {

using crq::Index;
using crq::MatrixXd;
using crq::VectorXd;

/// Smallest root of Σ ξᵢ²/(λ−θᵢ)² = γ² left of θ₁ by bisection only.
inline double bisect_secular(const VectorXd& theta, const VectorXd& xi, double gamma) {
  const double t1 = theta.minCoeff();
  auto chi = [&](double l) {
    double s = 0.0;
    for (Index i = 0; i < theta.size(); ++i) s += xi(i) * xi(i) / ((l - theta(i)) * (l - theta(i)));
    return s - gamma * gamma;
  };
  double hi = t1;
  double lo = t1 - xi.norm() / gamma - 1.0;
  while (chi(lo) > 0.0) lo -= 2.0 * (t1 - lo);
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (chi(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct Dense {
  VectorXd v;
  double lambda = 0.0;
  double objective = 0.0;
  bool hard = false;
  VectorXd n0;
  double gamma = 0.0;
  MatrixXd V1;  ///< orthonormal basis of N(Cᵀ)
  VectorXd theta;
  VectorXd xi;
};

/// Brute-force CRQ minimizer from an SVD of Cᵀ and the eigendecomposition of the projected matrix.
inline Dense solve_dense(const MatrixXd& a, const MatrixXd& c, const VectorXd& b) {
  const Index n = a.rows(), m = c.cols();
  Eigen::JacobiSVD<MatrixXd> svd(c.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const MatrixXd V = svd.matrixV();
  const VectorXd s = svd.singularValues();
  Dense out;
  out.n0 = V.leftCols(m) * (svd.matrixU().transpose() * b).cwiseQuotient(s);
  out.gamma = std::sqrt(std::max(0.0, 1.0 - out.n0.squaredNorm()));
  out.V1 = V.rightCols(n - m);
  const MatrixXd h = out.V1.transpose() * a * out.V1;
  const VectorXd g0 = out.V1.transpose() * (a * out.n0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (h + h.transpose()));
  out.theta = es.eigenvalues();
  out.xi = es.eigenvectors().transpose() * g0;
  const double t1 = out.theta(0);
  const double scale = 1.0 + out.theta.cwiseAbs().maxCoeff();

  // Hard case: g₀ orthogonal to the λ_min eigenspace and the particular solution short enough.
  double orth = 0.0, part = 0.0;
  for (Index i = 0; i < out.theta.size(); ++i) {
    if (out.theta(i) - t1 <= 1e-9 * scale) {
      orth += out.xi(i) * out.xi(i);
    } else {
      part += std::pow(out.xi(i) / (out.theta(i) - t1), 2);
    }
  }
  VectorXd y(n - m);
  if (std::sqrt(orth) <= 1e-10 * (1.0 + g0.norm()) && part <= out.gamma * out.gamma) {
    out.hard = true;
    out.lambda = t1;
    VectorXd coef = VectorXd::Zero(n - m);
    Index first = -1;
    for (Index i = 0; i < out.theta.size(); ++i) {
      if (out.theta(i) - t1 <= 1e-9 * scale) {
        if (first < 0) first = i;
      } else {
        coef(i) = -out.xi(i) / (out.theta(i) - t1);
      }
    }
    coef(first) = std::sqrt(out.gamma * out.gamma - part);
    y = es.eigenvectors() * coef;
  } else {
    out.lambda = bisect_secular(out.theta, out.xi, out.gamma);
    y = es.eigenvectors() * (-out.xi.array() / (out.theta.array() - out.lambda)).matrix();
  }
  out.v = out.n0 + out.V1 * y;
  out.objective = out.v.dot(a * out.v);
  return out;
}

/// Random symmetric A, Gaussian C and b with ‖(Cᵀ)†b‖ = zeta.
struct RandomInstance {
  MatrixXd A;
  MatrixXd C;
  VectorXd b;
};

inline RandomInstance random_instance(Index n, Index m, double zeta, std::uint64_t seed) {
  crq::Rng rng(seed);
  RandomInstance r;
  const MatrixXd g = crq::random_normal(n, n, rng);
  r.A = 0.5 * (g + g.transpose());
  r.C = crq::random_normal(n, m, rng);
  VectorXd w = r.C * crq::random_normal(m, rng);
  w *= zeta / w.norm();
  r.b = r.C.transpose() * w;
  return r;
}

/// A = S [[H, g₀p₀ᵀ/‖p₀‖²], [·, A₂₂]] Sᵀ with S = [S₁ S₂], N(Cᵀ) = R(S₁), n₀ = S₂p₀.
/// The projected pair (H, g₀) is then exactly (diag(theta), g0) in the S₁ coordinates.
/// With `exact`, S is a random signed permutation so that A carries no rounding from the rotation.
inline RandomInstance structured_instance(const VectorXd& theta, const VectorXd& g0, Index m, double zeta,
                                          std::uint64_t seed, bool exact = false) {
  const Index r = theta.size();
  const Index n = r + m;
  crq::Rng rng(seed);
  MatrixXd s;
  if (exact) {
    std::vector<Index> perm(n);
    for (Index i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    s = MatrixXd::Zero(n, n);
    for (Index i = 0; i < n; ++i) s(perm[i], i) = (rng() & 1) ? 1.0 : -1.0;
  } else {
    s = crq::random_normal(n, n, rng).householderQr().householderQ() * MatrixXd::Identity(n, n);
  }
  const MatrixXd s1 = s.leftCols(r);
  const MatrixXd s2 = s.rightCols(m);
  MatrixXd rr = crq::random_normal(m, m, rng).triangularView<Eigen::Upper>();
  for (Index i = 0; i < m; ++i) rr(i, i) = 1.0 + std::abs(rr(i, i));
  VectorXd p0 = crq::random_normal(m, rng);
  p0 *= zeta / p0.norm();
  const MatrixXd g22 = crq::random_normal(m, m, rng);
  MatrixXd blk = MatrixXd::Zero(n, n);
  blk.topLeftCorner(r, r) = theta.asDiagonal();
  blk.topRightCorner(r, m) = g0 * p0.transpose() / p0.squaredNorm();
  blk.bottomLeftCorner(m, r) = blk.topRightCorner(r, m).transpose();
  blk.bottomRightCorner(m, m) = 0.5 * (g22 + g22.transpose());
  RandomInstance out;
  out.A = s * blk * s.transpose();
  out.A = 0.5 * (out.A + out.A.transpose()).eval();
  out.C = s2 * rr;
  out.b = rr.transpose() * p0;
  return out;
}

/// Hard instance: g₀ ⊥ e₁ and ‖(H−θ₁I)†g₀‖ = ratio·γ.
inline RandomInstance hard_instance(Index r, Index m, double zeta, double ratio, std::uint64_t seed) {
  crq::Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  VectorXd theta(r);
  theta(0) = -1.0 - unif(rng);
  for (Index i = 1; i < r; ++i) theta(i) = 0.5 + 4.0 * unif(rng);
  VectorXd g0 = crq::random_normal(r, rng);
  g0(0) = 0.0;
  double part = 0.0;
  for (Index i = 1; i < r; ++i) part += std::pow(g0(i) / (theta(i) - theta(0)), 2);
  const double gamma = std::sqrt(1.0 - zeta * zeta);
  g0 *= ratio * gamma / std::sqrt(part);
  return structured_instance(theta, g0, m, zeta, seed + 1);
}

/// Instance whose Krylov space K(H, g₀) has dimension d: H has exactly d distinct eigenvalues at
/// Chebyshev points, each repeated, and g₀ is generic. A is assembled without rounding.
inline RandomInstance krylov_deficient_instance(Index r, Index m, Index d, double zeta, std::uint64_t seed) {
  crq::Rng rng(seed);
  VectorXd theta(r);
  const double pi = 3.14159265358979323846;
  for (Index i = 0; i < r; ++i) theta(i) = 2.5 + 1.5 * std::cos(pi * (static_cast<double>(i % d) + 0.5) / d);
  const VectorXd g0 = crq::random_normal(r, rng);
  return structured_instance(theta, g0, m, zeta, seed + 7, true);
}

}  // namespace oracle

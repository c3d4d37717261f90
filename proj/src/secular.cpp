#include "crq/secular.hpp"

#include <cmath>
#include <limits>

#include "crq/lanczos.hpp"

namespace crq {

double secular_value(const SecularSpec& spec, double lambda) {
  double s = 0.0;
  for (Index i = 0; i < spec.theta.size(); ++i) {
    if (spec.xi(i) == 0.0) continue;
    const double r = spec.xi(i) / (lambda - spec.theta(i));
    s += r * r;
  }
  return s - spec.gamma * spec.gamma;
}

double secular_derivative(const SecularSpec& spec, double lambda) {
  double s = 0.0;
  for (Index i = 0; i < spec.theta.size(); ++i) {
    if (spec.xi(i) == 0.0) continue;
    const double d = lambda - spec.theta(i);
    s += spec.xi(i) * spec.xi(i) / (d * d * d);
  }
  return -2.0 * s;
}

SecularRoot smallest_root(const SecularSpec& spec, int max_iter) {
  const Index l = spec.theta.size();
  if (l == 0 || spec.xi.size() != l) throw Error(ErrorCode::InvalidArgument, "secular spec is empty or inconsistent");
  if (!(spec.gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  Index j0 = 0;
  while (j0 < l && spec.xi(j0) == 0.0) ++j0;
  if (j0 == l) throw Error(ErrorCode::NoRoot, "all weights vanish");

  const double theta1 = spec.theta(0);
  if (j0 > 0) {
    // Without a pole at θ₁ the root lies left of θ₁ only if χ(θ₁) > 0.
    if (secular_value(spec, theta1) <= 0.0) throw Error(ErrorCode::NoRoot, "chi(theta_1) <= 0 with xi_1 = 0");
  }
  const double thetaj = spec.theta(j0);
  const double g2 = spec.gamma * spec.gamma;
  const double delta0 = spec.xi.norm() / spec.gamma;
  const double eps = 1e-14 * (1.0 + std::abs(theta1) + delta0);

  double lo = theta1 - delta0;
  double hi = theta1;

  double eta = g2;
  for (Index i = j0 + 1; i < l; ++i) {
    const double d = (thetaj - delta0) - spec.theta(i);
    eta -= spec.xi(i) * spec.xi(i) / (d * d);
  }
  double lambda = eta > 0.0 ? thetaj - std::abs(spec.xi(j0)) / std::sqrt(eta) : thetaj - delta0 / 2.0;
  if (!(lambda > lo && lambda < hi)) lambda = 0.5 * (lo + hi);

  for (int it = 1; it <= max_iter; ++it) {
    double chi = 0.0, s3 = 0.0;
    for (Index i = 0; i < l; ++i) {
      if (spec.xi(i) == 0.0) continue;
      const double d = lambda - spec.theta(i);
      const double r = spec.xi(i) / d;
      chi += r * r;
      s3 += r * r / d;
    }
    chi -= g2;
    if (chi == 0.0) return {lambda, it};
    if (chi > 0.0) hi = lambda; else lo = lambda;

    const double dj = lambda - thetaj;
    const double a = dj * dj * dj * s3;
    const double b = dj * s3 - chi;
    double next = 0.5 * (lo + hi);
    if (b > 0.0 && a > 0.0) {
      const double cand = thetaj - std::sqrt(a / b);
      if (cand > lo && cand < hi) next = cand;
    }
    const double step = std::abs(next - lambda);
    lambda = next;
    // Near a pole the gap θ_j − λ sets the scale; the floor is the spacing of doubles around λ and θ_j.
    const double unit = std::numeric_limits<double>::epsilon();
    const double tol = std::max(std::min(eps, 8.0 * unit * (thetaj - lambda)),
                                2.0 * unit * (std::abs(lambda) + std::abs(thetaj)));
    if (step < tol || hi - lo < tol) return {lambda, it};
  }
  throw Error(ErrorCode::MaxIter, "secular solver exceeded the iteration limit");
}

VectorXd solve_shifted_tridiagonal(const VectorXd& diag, const VectorXd& offdiag, double sigma,
                                   const VectorXd& rhs) {
  // Gaussian elimination with partial pivoting on the banded system.
  const Index k = diag.size();
  VectorXd x = rhs;
  if (k == 0) return x;
  VectorXd d = diag.array() - sigma;
  VectorXd up = VectorXd::Zero(k);   // superdiagonal
  VectorXd up2 = VectorXd::Zero(k);  // fill-in second superdiagonal
  VectorXd lo = VectorXd::Zero(k);   // subdiagonal
  for (Index j = 0; j + 1 < k; ++j) up(j) = lo(j) = offdiag(j);
  for (Index j = 0; j + 1 < k; ++j) {
    if (std::abs(lo(j)) > std::abs(d(j))) {
      // swap rows j and j+1
      std::swap(d(j), lo(j));
      std::swap(up(j), d(j + 1));
      if (j + 2 < k) std::swap(up2(j), up(j + 1));
      std::swap(x(j), x(j + 1));
    }
    if (d(j) == 0.0) throw Error(ErrorCode::InvalidArgument, "singular tridiagonal system");
    const double f = lo(j) / d(j);
    d(j + 1) -= f * up(j);
    if (j + 2 < k) up(j + 1) -= f * up2(j);
    x(j + 1) -= f * x(j);
    lo(j) = 0.0;
  }
  if (d(k - 1) == 0.0) throw Error(ErrorCode::InvalidArgument, "singular tridiagonal system");
  x(k - 1) /= d(k - 1);
  if (k >= 2) x(k - 2) = (x(k - 2) - up(k - 2) * x(k - 1)) / d(k - 2);
  for (Index j = k - 3; j >= 0; --j) x(j) = (x(j) - up(j) * x(j + 1) - up2(j) * x(j + 2)) / d(j);
  return x;
}

RlgoptSolution solve_rlgopt(const VectorXd& diag, const VectorXd& offdiag, double beta1, double gamma) {
  const Index k = diag.size();
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "empty tridiagonal");
  const TridiagEig eig = tridiagonal_eig(diag, offdiag);
  SecularSpec spec;
  spec.theta = eig.values;
  spec.xi = beta1 * eig.vectors.row(0).transpose();
  spec.gamma = gamma;

  RlgoptSolution out;
  out.theta_min = eig.values(0);
  out.nearly_hard = std::abs(spec.xi(0)) < 1e-10 * beta1;
  const SecularRoot root = smallest_root(spec);
  out.mu = root.lambda;
  out.iterations = root.iterations;
  // Coefficients in the eigenbasis stay accurate when μ is close to θ₁.
  VectorXd coef(k);
  for (Index i = 0; i < k; ++i) {
    const double gap = spec.theta(i) - out.mu;
    coef(i) = gap > 0.0 ? -spec.xi(i) / gap : 0.0;
  }
  out.x = eig.vectors * coef;
  return out;
}

}  // namespace crq

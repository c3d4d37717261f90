#include "crq/qepmin.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace crq {

bool is_numerically_real(std::complex<double> lambda, double norm_t) {
  const double eps_im = 1e-8 * (1.0 + norm_t);
  return std::abs(lambda.imag()) <= eps_im * (1.0 + std::abs(lambda.real()) + norm_t);
}

LeftmostReal leftmost_real_eigenpair(const MatrixXd& l, double norm_t) {
  Eigen::EigenSolver<MatrixXd> es(l, true);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigFailure, "nonsymmetric eigensolver failed");
  LeftmostReal out;
  out.spectrum = es.eigenvalues();
  Index best = -1;
  for (Index i = 0; i < out.spectrum.size(); ++i) {
    if (!is_numerically_real(out.spectrum(i), norm_t)) continue;
    if (best < 0 || out.spectrum(i).real() < out.spectrum(best).real()) best = i;
  }
  if (best < 0) throw Error(ErrorCode::NoRealEigenvalue, "linearization has no real eigenvalue");
  out.lambda = out.spectrum(best).real();

  Eigen::VectorXcd z = es.eigenvectors().col(best);
  Index piv;
  z.cwiseAbs().maxCoeff(&piv);
  z /= z(piv);
  VectorXd v = z.real();
  // One step of inverse iteration in real arithmetic to polish the vector.
  const Index n = l.rows();
  Eigen::PartialPivLU<MatrixXd> lu(l - out.lambda * MatrixXd::Identity(n, n));
  VectorXd polished = lu.solve(v);
  if (polished.allFinite() && polished.norm() > 0.0) v = polished;
  out.vector = v / v.norm();
  return out;
}

MatrixXd qep_linearization(const MatrixXd& t, double beta1, double gamma) {
  const Index k = t.rows();
  MatrixXd l = MatrixXd::Zero(2 * k, 2 * k);
  l.topLeftCorner(k, k) = t;
  l(0, k) = -beta1 * beta1 / (gamma * gamma);
  l.bottomLeftCorner(k, k) = -MatrixXd::Identity(k, k);
  l.bottomRightCorner(k, k) = t;
  return l;
}

namespace {

MatrixXd dense_tridiagonal(const VectorXd& diag, const VectorXd& offdiag) {
  const Index k = diag.size();
  MatrixXd t = MatrixXd::Zero(k, k);
  t.diagonal() = diag;
  for (Index j = 0; j + 1 < k; ++j) t(j, j + 1) = t(j + 1, j) = offdiag(j);
  return t;
}

double tridiagonal_norm_bound(const VectorXd& diag, const VectorXd& offdiag) {
  // Max absolute row sum bounds ‖T‖₂ for symmetric T.
  const Index k = diag.size();
  double best = 0.0;
  for (Index j = 0; j < k; ++j) {
    double s = std::abs(diag(j));
    if (j > 0) s += std::abs(offdiag(j - 1));
    if (j + 1 < k) s += std::abs(offdiag(j));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

ReducedQepSolution solve_reduced_qep(const VectorXd& diag, const VectorXd& offdiag, double beta1, double gamma) {
  const Index k = diag.size();
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "empty tridiagonal");
  const MatrixXd t = dense_tridiagonal(diag, offdiag);
  const LeftmostReal lr = leftmost_real_eigenpair(qep_linearization(t, beta1, gamma),
                                                  tridiagonal_norm_bound(diag, offdiag));
  ReducedQepSolution sol;
  sol.mu = lr.lambda;
  sol.spectrum = lr.spectrum;
  sol.y = lr.vector.head(k);
  sol.w = lr.vector.tail(k);
  sol.degenerate_w = std::abs(sol.w(0)) < 1e-12 * sol.w.norm();
  return sol;
}

Eigen::VectorXcd reduced_qep_spectrum_undropped(const VectorXd& diag, const VectorXd& offdiag,
                                               double beta_next, double beta1, double gamma) {
  // λ²w − 2λTw + K₀w = 0 with K₀ = T² + β_{k+1}²e_ke_kᵀ − γ⁻²β₁²e₁e₁ᵀ.
  const Index k = diag.size();
  const MatrixXd t = dense_tridiagonal(diag, offdiag);
  MatrixXd k0 = t * t;
  k0(k - 1, k - 1) += beta_next * beta_next;
  k0(0, 0) -= beta1 * beta1 / (gamma * gamma);
  MatrixXd l = MatrixXd::Zero(2 * k, 2 * k);
  l.topRightCorner(k, k) = MatrixXd::Identity(k, k);
  l.bottomLeftCorner(k, k) = -k0;
  l.bottomRightCorner(k, k) = 2.0 * t;
  Eigen::EigenSolver<MatrixXd> es(l, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigFailure, "nonsymmetric eigensolver failed");
  return es.eigenvalues();
}

VectorXd reduced_qep_to_rlgopt(const ReducedQepSolution& sol, double beta1, double gamma) {
  const double w1 = sol.w(0);
  if (std::abs(w1) < 1e-12 * sol.w.norm() || w1 == 0.0)
    throw Error(ErrorCode::DegenerateEigenvector, "first component of w vanishes");
  return -(gamma * gamma / (beta1 * w1)) * sol.y;
}

QepResidual qep_residual_bound(const ProjectedOperator& op, const LanczosState& state,
                               const ReducedQepSolution& sol, double norm_a, double gamma, double beta1) {
  QepResidual r;
  const Index k = state.k();
  const double beta = state.broke_down ? 0.0 : state.beta_next();
  if (beta == 0.0) return r;
  const double shift = norm_a + std::abs(sol.mu);
  const double denom = (shift * shift + beta1 * beta1 / (gamma * gamma)) * sol.w.norm();
  const double yk = sol.y(k - 1);
  const double wk = sol.w(k - 1);
  r.delta = std::abs(beta) * (std::abs(yk) + shift * std::abs(wk)) / denom;
  const VectorXd& q = state.q_next;
  VectorXd res = (beta * yk) * q + (beta * wk) * (op.apply_PA(q) - sol.mu * q);
  r.nres = res.norm() / denom;
  return r;
}

}  // namespace crq

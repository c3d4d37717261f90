#include "crq/lanczos.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "crq/secular.hpp"

namespace crq {

VectorXd LanczosState::offdiag() const {
  const Index k = this->k();
  VectorXd e(std::max<Index>(k - 1, 0));
  for (Index j = 0; j + 1 < k; ++j) e(j) = beta[j + 1];
  return e;
}

VectorXd LanczosState::diag() const {
  return Eigen::Map<const VectorXd>(alpha.data(), static_cast<Index>(alpha.size()));
}

MatrixXd LanczosState::tridiagonal() const {
  const Index k = this->k();
  MatrixXd t = MatrixXd::Zero(k, k);
  for (Index j = 0; j < k; ++j) {
    t(j, j) = alpha[j];
    if (j + 1 < k) t(j, j + 1) = t(j + 1, j) = beta[j + 1];
  }
  return t;
}

LanczosState lanczos_init(const VectorXd& start, double norm_a) {
  const double nrm = start.norm();
  if (!(nrm > 0.0)) throw Error(ErrorCode::ZeroStart, "Lanczos start vector is zero");
  LanczosState s;
  s.beta.push_back(nrm);
  s.q_next = start / nrm;
  s.breakdown_tol = 1e-14 * std::max(norm_a, 1.0);
  s.storage.resize(start.size(), std::min<Index>(start.size(), 32));
  return s;
}

LanczosState lanczos_init(const ProjectedOperator& op, const VectorXd& b0, double norm_a) {
  if (b0.size() != op.n()) throw Error(ErrorCode::InvalidArgument, "start vector has wrong length");
  return lanczos_init(b0, norm_a);
}

StepOutcome lanczos_step(const MatVec& m, LanczosState& s, const MatVec& project) {
  if (s.broke_down) return StepOutcome::BrokeDown;
  const Index k = s.k();  // steps already taken
  const Index n = s.q_next.size();
  if (s.storage.cols() <= k) {
    const Index cap = std::min<Index>(std::max<Index>(2 * s.storage.cols(), k + 1), n);
    s.storage.conservativeResize(n, std::max(cap, k + 1));
  }
  s.storage.col(k) = s.q_next;
  const auto qk = s.storage.col(k);

  VectorXd w = m(qk);
  if (k > 0) w -= s.beta[k] * s.storage.col(k - 1);
  const double a = qk.dot(w);
  w -= a * qk;

  // Full reorthogonalization: classical Gram-Schmidt, repeated once when needed.
  const auto q = s.storage.leftCols(k + 1);
  VectorXd h = q.transpose() * w;
  w -= q * h;
  VectorXd h2 = q.transpose() * w;
  const double wn = w.norm();
  const double loss = wn > 0.0 ? h2.cwiseAbs().maxCoeff() / wn : 0.0;
  if (loss > 1e-10) {
    w -= q * h2;
    h += h2;
  }
  s.max_ortho_loss = std::max(s.max_ortho_loss, loss);
  if (project) w = project(w);

  s.alpha.push_back(a + h(k));
  const double b = w.norm();
  s.beta.push_back(b);
  if (b <= s.breakdown_tol) {
    s.broke_down = true;
    s.q_next = VectorXd::Zero(n);
    return StepOutcome::BrokeDown;
  }
  s.q_next = w / b;
  if (k + 1 >= n) {
    // Basis is complete; any further vector is rounding noise.
    s.broke_down = true;
    return StepOutcome::BrokeDown;
  }
  return StepOutcome::Continued;
}

StepOutcome lanczos_step(const ProjectedOperator& op, LanczosState& state) {
  return lanczos_step([&op](const VectorXd& q) { return op.problem().A(q); }, state,
                      [&op](const VectorXd& w) { return op.apply_P(w); });
}

TridiagEig tridiagonal_eig(const VectorXd& diag, const VectorXd& offdiag) {
  TridiagEig out;
  const Index k = diag.size();
  if (k == 0) return out;
  if (k == 1) {
    out.values = diag;
    out.vectors = MatrixXd::Ones(1, 1);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es;
  es.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigFailure, "tridiagonal eigensolver failed");
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  return out;
}

VectorXd tridiagonal_eigenvalues(const VectorXd& diag, const VectorXd& offdiag) {
  if (diag.size() <= 1) return diag;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es;
  es.computeFromTridiagonal(diag, offdiag, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigFailure, "tridiagonal eigensolver failed");
  return es.eigenvalues();
}

VectorXd tridiagonal_eigenvector(const VectorXd& diag, const VectorXd& offdiag, double theta,
                                 const MatrixXd& against) {
  const Index k = diag.size();
  if (k == 1) return VectorXd::Ones(1);
  const double norm_t = diag.cwiseAbs().maxCoeff() + 2.0 * offdiag.cwiseAbs().maxCoeff();
  VectorXd x(k);
  for (Index i = 0; i < k; ++i) x(i) = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  double offset = 1e-13 * std::max(norm_t, 1e-300);
  for (int it = 0; it < 3;) {
    VectorXd y;
    try {
      y = solve_shifted_tridiagonal(diag, offdiag, theta - offset, x);
    } catch (const Error&) {
      offset *= 16.0;
      continue;
    }
    for (Index j = 0; j < against.cols(); ++j) y -= against.col(j).dot(y) * against.col(j);
    const double nrm = y.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
      offset *= 16.0;
      continue;
    }
    x = y / nrm;
    ++it;
  }
  return x;
}

LanczosEig lanczos_smallest(const ProjectedOperator& op, const VectorXd& start, int nev, double norm_a,
                            double tol, int maxit) {
  const Index dim = op.n() - op.m();
  if (maxit < 0) maxit = static_cast<int>(dim);
  LanczosState s = lanczos_init(op.apply_P(start), norm_a);
  const double scale = std::max(norm_a, 1.0);
  auto ritz = [&](LanczosEig& out, bool require) -> bool {
    const VectorXd d = s.diag();
    const VectorXd e = s.offdiag();
    const VectorXd values = tridiagonal_eigenvalues(d, e);
    const Index k = s.k();
    const Index want = std::min<Index>(nev, k);
    MatrixXd vecs(k, want);
    for (Index i = 0; i < want; ++i) vecs.col(i) = tridiagonal_eigenvector(d, e, values(i), vecs.leftCols(i));
    const double beta = s.broke_down ? 0.0 : s.beta_next();
    bool ok = want == nev || s.broke_down;
    for (Index i = 0; i < want; ++i)
      if (std::abs(beta * vecs(k - 1, i)) > tol * scale) ok = false;
    if (!ok && require) return false;
    out.values = values.head(want);
    out.vectors = s.basis() * vecs;
    for (Index i = 0; i < want; ++i) out.vectors.col(i).normalize();
    out.steps = static_cast<int>(k);
    return ok;
  };
  LanczosEig out;
  for (int j = 1; j <= maxit; ++j) {
    const StepOutcome st = lanczos_step(op, s);
    const bool check = st == StepOutcome::BrokeDown || j == maxit || j % 10 == 0;
    if (check && ritz(out, true)) return out;
    if (st == StepOutcome::BrokeDown) break;
  }
  if (!ritz(out, false) && !s.broke_down)
    throw Error(ErrorCode::EigFailure, "Lanczos eigensolver did not converge");
  return out;
}

}  // namespace crq

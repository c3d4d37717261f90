#include "crq/reference.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "crq/qepmin.hpp"
#include "crq/secular.hpp"

namespace crq {

namespace {

constexpr double kPinvTol = 1e-12;

MatrixXd symmetrize(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

void eigen_decompose(DenseReduction& red) {
  if (red.H.rows() == 0) return;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(red.H);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigFailure, "dense eigensolver failed");
  red.theta = es.eigenvalues();
  red.Y = es.eigenvectors();
}

double spectral_scale(const DenseReduction& red) {
  return std::max(1.0, red.theta.cwiseAbs().maxCoeff());
}

/// Number of leading eigenvalues equal to θ₁ within the pseudoinverse tolerance.
Index multiplicity(const DenseReduction& red) {
  const double tol = kPinvTol * spectral_scale(red);
  Index d = 1;
  while (d < red.theta.size() && red.theta(d) - red.theta(0) <= tol) ++d;
  return d;
}

/// −(H−σI)†g₀ in the eigenbasis, skipping the first `skip` eigenvalues.
VectorXd shifted_pinv_apply(const DenseReduction& red, const VectorXd& xi, double sigma, Index skip) {
  VectorXd c = VectorXd::Zero(xi.size());
  const double tol = kPinvTol * spectral_scale(red);
  for (Index i = skip; i < xi.size(); ++i) {
    const double d = red.theta(i) - sigma;
    if (std::abs(d) > tol) c(i) = -xi(i) / d;
  }
  return red.Y * c;
}

}  // namespace

const char* to_string(PlgoptCase c) {
  switch (c) {
    case PlgoptCase::Easy: return "Easy";
    case PlgoptCase::HardBoundaryExact: return "HardBoundaryExact";
    case PlgoptCase::HardBoundaryPadded: return "HardBoundaryPadded";
  }
  return "Unknown";
}

DenseReduction build_reduction(const CrqProblem& problem, Index cap) {
  const Index n = problem.n();
  const Index m = problem.m();
  if (n > cap) throw Error(ErrorCode::TooLarge, "dimension exceeds the dense cap");
  const Setup setup(problem);
  if (setup.feas.tag != FeasibilityTag::Interior)
    throw Error(ErrorCode::InvalidArgument, "reduction needs an interior problem");
  DenseReduction red;
  Eigen::HouseholderQR<MatrixXd> qr(problem.C);
  const MatrixXd s = qr.householderQ() * MatrixXd::Identity(n, n);
  red.S2 = s.leftCols(m);
  red.S1 = s.rightCols(n - m);
  red.A = symmetrize(problem.A.materialize());
  red.H = symmetrize(red.S1.transpose() * red.A * red.S1);
  red.n0 = setup.feas.n0;
  red.b0 = setup.feas.b0;
  red.gamma = setup.feas.gamma;
  red.g0 = red.S1.transpose() * red.b0;
  eigen_decompose(red);
  return red;
}

DenseReduction make_reduction(MatrixXd s1, MatrixXd s2, MatrixXd h, VectorXd g0, VectorXd n0, VectorXd b0,
                              double gamma) {
  DenseReduction red;
  red.S1 = std::move(s1);
  red.S2 = std::move(s2);
  red.H = symmetrize(h);
  red.g0 = std::move(g0);
  red.n0 = std::move(n0);
  red.b0 = std::move(b0);
  red.gamma = gamma;
  eigen_decompose(red);
  return red;
}

PlgoptSolution solve_plgopt_dense(const DenseReduction& red, double gamma) {
  const VectorXd xi = red.Y.transpose() * red.g0;
  const Index d = multiplicity(red);
  const double theta1 = red.theta(0);
  const double g_norm = red.g0.norm();
  const bool orthogonal = xi.head(d).norm() <= 1e-10 * std::max(g_norm, 1e-300) || g_norm == 0.0;

  PlgoptSolution out;
  auto secular_branch = [&](const VectorXd& weights) {
    SecularSpec spec{red.theta, weights, gamma};
    out.lambda = smallest_root(spec).lambda;
    VectorXd c(xi.size());
    for (Index i = 0; i < xi.size(); ++i) c(i) = -weights(i) / (red.theta(i) - out.lambda);
    out.y = red.Y * c;
    out.tag = PlgoptCase::Easy;
  };

  if (!orthogonal) {
    secular_branch(xi);
    return out;
  }
  const VectorXd w = shifted_pinv_apply(red, xi, theta1, d);
  const double nw = w.norm();
  if (nw > gamma * (1.0 + 1e-12)) {
    VectorXd weights = xi;
    weights.head(d).setZero();
    secular_branch(weights);
  } else if (nw >= gamma * (1.0 - 1e-12)) {
    out.lambda = theta1;
    out.y = w;
    out.tag = PlgoptCase::HardBoundaryExact;
  } else {
    out.lambda = theta1;
    out.y = w + std::sqrt(gamma * gamma - nw * nw) * red.Y.col(0);
    out.tag = PlgoptCase::HardBoundaryPadded;
  }
  return out;
}

CrqSolution direct_solve(const CrqProblem& problem, const DenseReduction& red) {
  const PlgoptSolution p = solve_plgopt_dense(red, red.gamma);
  CrqSolution sol;
  sol.v = red.n0 + red.S1 * p.y;
  sol.mu = p.lambda;
  sol.k = 0;
  sol.objective = sol.v.dot(problem.A(sol.v));
  sol.converged = true;
  sol.solution_case = p.tag == PlgoptCase::Easy ? SolutionCase::Easy : SolutionCase::HardDetected;
  if (red.g0.norm() == 0.0) sol.solution_case = SolutionCase::B0Zero;
  sol.lambda_min_h = red.theta(0);
  return sol;
}

CrqSolution direct_solve(const CrqProblem& problem, Index cap) {
  if (problem.n() > cap) throw Error(ErrorCode::TooLarge, "dimension exceeds the dense cap");
  const Feasibility f = classify(problem);
  if (f.tag == FeasibilityTag::Infeasible) throw Error(ErrorCode::Infeasible, "‖n0‖ exceeds 1");
  if (f.tag == FeasibilityTag::UniquePoint) {
    CrqSolution sol;
    sol.v = f.n0;
    sol.objective = f.n0.dot(problem.A(f.n0));
    sol.mu = sol.objective;
    sol.converged = true;
    sol.solution_case = SolutionCase::UniquePoint;
    return sol;
  }
  return direct_solve(problem, build_reduction(problem, cap));
}

bool hard_case_predicate(const DenseReduction& red, double gamma) {
  const VectorXd xi = red.Y.transpose() * red.g0;
  const Index d = multiplicity(red);
  const double g_norm = red.g0.norm();
  if (xi.head(d).norm() > 1e-10 * g_norm) return false;
  return shifted_pinv_apply(red, xi, red.theta(0), d).norm() <= gamma * (1.0 + 1e-12);
}

PqepSolution solve_pqepmin_dense(const DenseReduction& red, double gamma) {
  const Index k = red.H.rows();
  MatrixXd l = MatrixXd::Zero(2 * k, 2 * k);
  l.topLeftCorner(k, k) = red.H;
  l.topRightCorner(k, k) = -(red.g0 * red.g0.transpose()) / (gamma * gamma);
  l.bottomLeftCorner(k, k) = -MatrixXd::Identity(k, k);
  l.bottomRightCorner(k, k) = red.H;
  const double norm_h = std::max(std::abs(red.theta(0)), std::abs(red.theta(k - 1)));
  const LeftmostReal lr = leftmost_real_eigenpair(l, norm_h);
  PqepSolution out;
  out.lambda = lr.lambda;
  out.y = lr.vector.head(k);
  out.w = lr.vector.tail(k);
  return out;
}

double EquivalenceReport::max_residual() const {
  return std::max({lambda_gap, forward_qep_residual, backward_norm_defect, backward_equation_residual,
                   full_lgopt_residual, full_qep_residual});
}

EquivalenceReport equivalence_maps(const DenseReduction& red, double gamma) {
  const Index k = red.H.rows();
  const MatrixXd ik = MatrixXd::Identity(k, k);
  const double g2 = gamma * gamma;
  const double scale = std::max(1.0, red.theta.cwiseAbs().maxCoeff());
  EquivalenceReport rep;

  const PlgoptSolution lg = solve_plgopt_dense(red, gamma);
  const PqepSolution qe = solve_pqepmin_dense(red, gamma);
  rep.lambda_plgopt = lg.lambda;
  rep.lambda_pqepmin = qe.lambda;
  rep.lambda_gap = std::abs(lg.lambda - qe.lambda) / (1.0 + std::abs(lg.lambda));

  auto qep_residual = [&](const VectorXd& w, double lambda) {
    const MatrixXd sh = red.H - lambda * ik;
    const VectorXd r = sh * (sh * w) - red.g0 * (red.g0.dot(w) / g2);
    return r.norm() / ((scale + std::abs(lambda)) * (scale + std::abs(lambda)) * w.norm());
  };

  // pLGopt → pQEPmin.
  VectorXd w_fwd;
  if (lg.tag == PlgoptCase::Easy) {
    w_fwd = (red.H - lg.lambda * ik).ldlt().solve(lg.y);
  } else {
    w_fwd = red.Y.col(0);
  }
  rep.forward_qep_residual = qep_residual(w_fwd, lg.lambda);

  // pQEPmin → pLGopt.
  const double lambda = qe.lambda;
  const double gw = red.g0.dot(qe.w);
  VectorXd y;
  if (std::abs(gw) > 1e-8 * red.g0.norm() * qe.w.norm()) {
    y = -(g2 / gw) * ((red.H - lambda * ik) * qe.w);
  } else {
    rep.zero_branch = true;
    const VectorXd xi = red.Y.transpose() * red.g0;
    const VectorXd x = shifted_pinv_apply(red, xi, lambda, 0);
    y = x + std::sqrt(std::max(g2 - x.squaredNorm(), 0.0)) * qe.w / qe.w.norm();
  }
  rep.backward_norm_defect = std::abs(y.norm() - gamma);
  rep.backward_equation_residual =
      ((red.H - lambda * ik) * y + red.g0).norm() / ((scale + std::abs(lambda)) * gamma + red.g0.norm());

  // Lift to R^n through S₁.
  if (red.A.size() > 0) {
    const Index n = red.S1.rows();
    const MatrixXd p = red.S1 * red.S1.transpose();
    const MatrixXd pap = p * red.A * p;
    const MatrixXd shift = pap - lambda * MatrixXd::Identity(n, n);
    const VectorXd u = red.S1 * y;
    rep.full_lgopt_residual = (shift * u + red.b0).norm() / ((scale + std::abs(lambda)) * gamma + red.b0.norm());
    const VectorXd z = red.S1 * (rep.zero_branch ? qe.w : w_fwd);
    const double lz = rep.zero_branch ? lambda : lg.lambda;
    const MatrixXd shz = pap - lz * MatrixXd::Identity(n, n);
    const VectorXd r = shz * (shz * z) - red.b0 * (red.b0.dot(z) / g2);
    rep.full_qep_residual = r.norm() / ((scale + std::abs(lz)) * (scale + std::abs(lz)) * z.norm());
  }
  return rep;
}

DualReport dual_check(const CrqProblem& problem, Index cap) {
  const Index n = problem.n();
  const Index m = problem.m();
  if (n > cap) throw Error(ErrorCode::TooLarge, "dimension exceeds the dual-check cap");
  const DenseReduction red = build_reduction(problem, cap);
  const Index r = n - m;

  // N = [[U, u], [0, 1]] with R(U) = N(Cᵀ) and Cᵀu = √n b.
  MatrixXd nmat = MatrixXd::Zero(n + 1, r + 1);
  nmat.topLeftCorner(n, r) = red.S1;
  nmat.topRightCorner(n, 1) = std::sqrt(static_cast<double>(n)) * red.n0;
  nmat(n, r) = 1.0;
  MatrixXd ahat = MatrixXd::Zero(n + 1, n + 1);
  ahat.topLeftCorner(n, n) = red.A;
  MatrixXd ehat = MatrixXd::Zero(n + 1, n + 1);
  ehat.topLeftCorner(n, n) = -MatrixXd::Identity(n, n) / static_cast<double>(n + 1);
  ehat(n, n) = 1.0 - 1.0 / static_cast<double>(n + 1);
  MatrixXd bhat = MatrixXd::Zero(n + 1, n + 1);
  bhat.topLeftCorner(n, n) = MatrixXd::Identity(n, n);
  const MatrixXd l = symmetrize(nmat.transpose() * ahat * nmat);
  const MatrixXd e = symmetrize(nmat.transpose() * ehat * nmat);
  const MatrixXd mm = symmetrize(nmat.transpose() * bhat * nmat);

  DualReport rep;
  Eigen::SelfAdjointEigenSolver<MatrixXd> mes(mm, Eigen::EigenvaluesOnly);
  rep.lambda_min_M = mes.eigenvalues()(0);
  if (!(rep.lambda_min_M > 0.0)) throw Error(ErrorCode::EigFailure, "M is not positive definite");

  auto f = [&](double t) {
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(l + t * e, mm, Eigen::EigenvaluesOnly);
    return ges.eigenvalues()(0);
  };

  // f is a pointwise minimum of affine functions of t, hence concave.
  double step = 1.0;
  double a = 0.0, fa = f(a);
  double b = step, fb = f(b);
  if (fb < fa) {
    std::swap(a, b);
    std::swap(fa, fb);
    step = -step;
  }
  double c = b + step, fc = f(c);
  int expansions = 0;
  while (fc >= fb) {
    if (++expansions > 200) throw Error(ErrorCode::BracketFailure, "no interior maximum found");
    step *= 2.0;
    a = b;
    fa = fb;
    b = c;
    fb = fc;
    c = b + step;
    fc = f(c);
  }
  double lo = std::min(a, c), hi = std::max(a, c);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-10 * (1.0 + std::abs(lo) + std::abs(hi))) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = f(x1);
    }
  }
  rep.t_star = 0.5 * (lo + hi);
  rep.lambda_min_at_t = std::max({f(rep.t_star), f1, f2});
  rep.primal_min = direct_solve(problem, red).objective;
  rep.gap = std::abs(rep.lambda_min_at_t - rep.primal_min);
  return rep;
}

SpectrumCheck projected_spectrum_check(const DenseReduction& red) {
  const Index n = red.S1.rows();
  const Index r = red.S1.cols();
  const MatrixXd p = red.S1 * red.S1.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(p * red.A * p), Eigen::EigenvaluesOnly);
  std::vector<double> expect(red.theta.data(), red.theta.data() + r);
  expect.resize(n, 0.0);
  std::sort(expect.begin(), expect.end());
  SpectrumCheck out;
  for (Index i = 0; i < n; ++i)
    out.max_difference = std::max(out.max_difference, std::abs(es.eigenvalues()(i) - expect[i]));
  return out;
}

}  // namespace crq

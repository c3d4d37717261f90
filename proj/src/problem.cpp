#include "crq/problem.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "crq/lanczos.hpp"
#include "crq/random.hpp"

namespace crq {

LinearOperator LinearOperator::from_dense(MatrixXd a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::InvalidArgument, "A must be square");
  LinearOperator op;
  op.n = a.rows();
  auto shared = std::make_shared<const MatrixXd>(std::move(a));
  op.apply = [shared](const VectorXd& x) -> VectorXd { return (*shared) * x; };
  return op;
}

LinearOperator LinearOperator::from_sparse(Eigen::SparseMatrix<double> a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::InvalidArgument, "A must be square");
  LinearOperator op;
  op.n = a.rows();
  a.makeCompressed();
  auto shared = std::make_shared<const Eigen::SparseMatrix<double>>(std::move(a));
  op.apply = [shared](const VectorXd& x) -> VectorXd { return (*shared) * x; };
  return op;
}

MatrixXd LinearOperator::materialize() const {
  MatrixXd out(n, n);
  VectorXd e = VectorXd::Zero(n);
  for (Index j = 0; j < n; ++j) {
    e(j) = 1.0;
    out.col(j) = apply(e);
    e(j) = 0.0;
  }
  return out;
}

double symmetry_defect(const LinearOperator& a, double norm_a, int probes, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  const double scale = std::max(norm_a, 1e-300);
  for (int p = 0; p < probes; ++p) {
    VectorXd x = random_normal(a.n, rng);
    VectorXd y = random_normal(a.n, rng);
    const double d = std::abs(x.dot(a(y)) - y.dot(a(x)));
    worst = std::max(worst, d / (x.norm() * y.norm() * scale));
  }
  return worst;
}

CrqProblem make_problem(LinearOperator a, MatrixXd c, VectorXd b, std::uint64_t seed) {
  if (!a.apply) throw Error(ErrorCode::InvalidArgument, "operator has no action");
  if (c.rows() != a.n) throw Error(ErrorCode::InvalidArgument, "C must have n rows");
  if (b.size() != c.cols()) throw Error(ErrorCode::InvalidArgument, "b must have m entries");
  if (c.cols() >= a.n) throw Error(ErrorCode::InvalidArgument, "need m < n");
  CrqProblem p{std::move(a), std::move(c), std::move(b)};
  const double norm_a = estimate_norm(p.A);
  if (norm_a > 0.0 && symmetry_defect(p.A, norm_a, 3, seed) > 1e-10)
    throw Error(ErrorCode::InvalidArgument, "A is not symmetric");
  return p;
}

ProjectedOperator::ProjectedOperator(const CrqProblem& problem, double rank_tol) : problem_(&problem) {
  const Index n = problem.n();
  const Index m = problem.m();
  if (m == 0) {
    q1_.resize(n, 0);
    r_.resize(0, 0);
    perm_.resize(0);
    return;
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(problem.C);
  qr.setThreshold(rank_tol);
  if (qr.rank() < m) throw Error(ErrorCode::RankDeficient, "numerical rank of C is below m");
  q1_ = qr.householderQ() * MatrixXd::Identity(n, m);
  r_ = qr.matrixR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
  perm_ = qr.colsPermutation().indices();
  norm_c_ = Eigen::JacobiSVD<MatrixXd>(r_).singularValues()(0);
}

VectorXd ProjectedOperator::apply_P(const VectorXd& c) const {
  if (q1_.cols() == 0) return c;
  return c - q1_ * (q1_.transpose() * c);
}

VectorXd ProjectedOperator::apply_PA(const VectorXd& q) const { return apply_P(problem_->A(q)); }

VectorXd ProjectedOperator::apply_M(const VectorXd& x) const { return apply_P(problem_->A(apply_P(x))); }

VectorXd ProjectedOperator::min_norm_solution(const VectorXd& rhs) const {
  const Index m = r_.rows();
  if (rhs.size() != m) throw Error(ErrorCode::InvalidArgument, "rhs must have m entries");
  if (m == 0) return VectorXd::Zero(n());
  // Cᵀ = Π Rᵀ Q₁ᵀ, so v = Q₁ R⁻ᵀ Πᵀ rhs.
  VectorXd z(m);
  for (Index j = 0; j < m; ++j) z(j) = rhs(perm_(j));
  r_.triangularView<Eigen::Upper>().transpose().solveInPlace(z);
  return q1_ * z;
}

VectorXd compute_n0(const CrqProblem& problem) {
  ProjectedOperator op(problem);
  return op.min_norm_solution(problem.b);
}

VectorXd apply_P(const ProjectedOperator& op, const VectorXd& c) { return op.apply_P(c); }

double estimate_norm(const LinearOperator& a, int steps, std::uint64_t seed) {
  Rng rng(seed);
  VectorXd start = random_normal(a.n, rng);
  LanczosState st = lanczos_init(start, 1.0);
  st.breakdown_tol = 0.0;
  const MatVec mv = [&a](const VectorXd& x) { return a(x); };
  const int kmax = static_cast<int>(std::min<Index>(steps, a.n));
  for (int j = 0; j < kmax; ++j) {
    if (lanczos_step(mv, st) == StepOutcome::BrokeDown) break;
    if (j == 0) st.breakdown_tol = 1e-14 * (std::abs(st.alpha.front()) + st.beta_next());
  }
  const TridiagEig eig = tridiagonal_eig(st.diag(), st.offdiag());
  const double beta = st.beta_next();
  const Index k = st.k();
  double est = 0.0;
  for (Index i = 0; i < k; ++i)
    est = std::max(est, std::abs(eig.values(i)) + std::abs(beta * eig.vectors(k - 1, i)));
  return est;
}

Feasibility classify(const CrqProblem& problem, const ProjectedOperator& op) {
  Feasibility f;
  f.n0 = op.min_norm_solution(problem.b);
  f.norm_n0 = f.n0.norm();
  const double eps_f = 1e-12 * (1.0 + problem.b.norm());
  if (f.norm_n0 > 1.0 + eps_f) {
    f.tag = FeasibilityTag::Infeasible;
  } else if (std::abs(f.norm_n0 - 1.0) <= eps_f) {
    f.tag = FeasibilityTag::UniquePoint;
  } else {
    f.tag = FeasibilityTag::Interior;
    f.gamma = std::sqrt((1.0 - f.norm_n0) * (1.0 + f.norm_n0));
    f.b0 = op.apply_PA(f.n0);
    f.norm_b0 = f.b0.norm();
  }
  return f;
}

Feasibility classify(const CrqProblem& problem) {
  ProjectedOperator op(problem);
  return classify(problem, op);
}

Setup::Setup(const CrqProblem& p)
    : problem(p), op(p), feas(classify(p, op)), norm_a(estimate_norm(p.A)) {}

const char* to_string(SolutionCase c) {
  switch (c) {
    case SolutionCase::Easy: return "Easy";
    case SolutionCase::HardDetected: return "HardDetected";
    case SolutionCase::B0Zero: return "B0Zero";
    case SolutionCase::UniquePoint: return "UniquePoint";
  }
  return "Unknown";
}

double b0_zero_threshold(const Setup& setup) {
  return 1e-12 * setup.norm_a * setup.feas.norm_n0;
}

std::optional<CrqSolution> resolve_b0_zero(const Setup& setup, std::uint64_t seed) {
  const Feasibility& f = setup.feas;
  if (f.tag != FeasibilityTag::Interior) throw Error(ErrorCode::InvalidArgument, "problem is not interior");
  if (f.norm_b0 > b0_zero_threshold(setup)) return std::nullopt;

  const CrqProblem& p = setup.problem;
  Rng rng(seed);
  VectorXd start = setup.op.apply_P(random_normal(p.n(), rng));
  const int nev = p.n() - p.m() >= 2 ? 2 : 1;
  const LanczosEig eig = lanczos_smallest(setup.op, start, nev, setup.norm_a);

  const double zero_tol = 1e-12 * std::max(setup.norm_a, 1.0);
  VectorXd dir = eig.vectors.col(0);
  if (std::abs(eig.values(0)) <= zero_tol) {
    VectorXd pz = setup.op.apply_P(dir);
    if (pz.norm() > 1e-8 * dir.norm()) {
      dir = pz;
    } else if (eig.values.size() > 1) {
      dir = eig.vectors.col(1);
    } else {
      throw Error(ErrorCode::EigFailure, "no eigenvector in N(C^T)");
    }
  }
  CrqSolution sol;
  sol.v = f.n0 + f.gamma * dir / dir.norm();
  sol.mu = eig.values(0);
  sol.k = eig.steps;
  sol.solution_case = SolutionCase::B0Zero;
  sol.objective = sol.v.dot(p.A(sol.v));
  sol.converged = true;
  sol.lambda_min_h = eig.values(0);
  return sol;
}

FeasibilityResidual feasibility_residual(const CrqProblem& problem, const VectorXd& v) {
  return {std::abs(v.norm() - 1.0), (problem.C.transpose() * v - problem.b).norm()};
}

}  // namespace crq

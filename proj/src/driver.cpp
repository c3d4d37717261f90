#include "crq/driver.hpp"

#include <cmath>
#include <iomanip>

#include "crq/qepmin.hpp"
#include "crq/random.hpp"
#include "crq/reference.hpp"
#include "crq/secular.hpp"

namespace crq {

SolveOptions SolveOptions::clustering() {
  SolveOptions o;
  o.tol = 8e-5;
  o.maxit = 300;
  o.minit = 120;
  o.checkstep = 5;
  o.detect_hard = false;
  return o;
}

void SolveOptions::validate() const {
  if (maxit < 1) throw Error(ErrorCode::InvalidArgument, "maxit must be positive");
  if (minit < 1 || minit > maxit) throw Error(ErrorCode::InvalidArgument, "need 1 <= minit <= maxit");
  if (checkstep < 1) throw Error(ErrorCode::InvalidArgument, "checkstep must be positive");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be nonnegative");
}

NotConverged::NotConverged(CrqSolution sol)
    : Error(ErrorCode::NotConverged, "residual above tolerance at maxit"), solution_(std::move(sol)) {}

namespace {

struct ReducedStep {
  double mu = 0.0;
  VectorXd x;
  double delta = 0.0;
  double nres = 0.0;
  bool nearly_hard = false;
};

ReducedStep reduced_solve(const Setup& setup, const LanczosState& st, Method method) {
  const Feasibility& f = setup.feas;
  const VectorXd d = st.diag();
  const VectorXd e = st.offdiag();
  const double beta = st.broke_down ? 0.0 : st.beta_next();
  const Index k = st.k();
  ReducedStep r;
  if (method == Method::LGopt) {
    const RlgoptSolution s = solve_rlgopt(d, e, f.norm_b0, f.gamma);
    r.mu = s.mu;
    r.x = s.x;
    r.nearly_hard = s.nearly_hard;
    r.delta = std::abs(beta) * std::abs(r.x(k - 1)) /
              ((setup.norm_a + std::abs(r.mu)) * r.x.norm() + f.norm_b0);
    r.nres = r.delta;
  } else {
    const ReducedQepSolution s = solve_reduced_qep(d, e, f.norm_b0, f.gamma);
    r.mu = s.mu;
    r.x = reduced_qep_to_rlgopt(s, f.norm_b0, f.gamma);
    const QepResidual q = qep_residual_bound(setup.op, st, s, setup.norm_a, f.gamma, f.norm_b0);
    r.delta = q.delta;
    r.nres = q.nres;
  }
  return r;
}

}  // namespace

CrqSolution solve(const CrqProblem& problem, const SolveOptions& opts) {
  opts.validate();
  const Setup setup(problem);
  const Feasibility& f = setup.feas;
  if (f.tag == FeasibilityTag::Infeasible) throw Error(ErrorCode::Infeasible, "‖n0‖ exceeds 1");
  if (f.tag == FeasibilityTag::UniquePoint) {
    CrqSolution sol;
    sol.v = f.n0;
    sol.k = 0;
    sol.solution_case = SolutionCase::UniquePoint;
    sol.objective = f.n0.dot(problem.A(f.n0));
    sol.mu = sol.objective;
    sol.converged = true;
    return sol;
  }
  if (auto shortcut = resolve_b0_zero(setup, opts.rng_seed)) return *shortcut;

  LanczosState st = lanczos_init(setup.op, f.b0, setup.norm_a);
  CrqSolution sol;
  VectorXd x_last;
  for (int k = 1; k <= opts.maxit; ++k) {
    const StepOutcome outcome = lanczos_step(setup.op, st);
    const bool broke = outcome == StepOutcome::BrokeDown;
    const bool scheduled = k >= opts.minit && (k - opts.minit) % opts.checkstep == 0;
    if (!(broke || scheduled || k == opts.maxit)) continue;

    const ReducedStep r = reduced_solve(setup, st, opts.method);
    CheckRecord rec;
    rec.k = k;
    rec.mu = r.mu;
    rec.delta = r.delta;
    rec.nres = r.nres;
    const VectorXd v = f.n0 + st.basis() * r.x;
    rec.objective = v.dot(problem.A(v));
    if (opts.record_iterates) rec.v = v;
    sol.history.push_back(rec);
    sol.v = v;
    sol.mu = r.mu;
    sol.k = k;
    sol.objective = rec.objective;
    sol.nearly_hard = r.nearly_hard;
    x_last = r.x;
    if (broke || (k >= opts.minit && r.delta <= opts.tol)) {
      sol.converged = true;
      sol.broke_down = broke;
      break;
    }
  }
  if (opts.return_basis) sol.basis = st.basis();

  if (opts.detect_hard) {
    const HardDetection hd = detect_hard_case(setup, st, sol.mu, opts.rng_seed);
    sol.lambda_min_h = hd.lambda_min;
    if (hd.hard) {
      sol.v = hd.v;
      sol.mu = hd.lambda_min;
      sol.solution_case = SolutionCase::HardDetected;
      sol.objective = sol.v.dot(problem.A(sol.v));
    }
  }
  if (!sol.converged) throw NotConverged(std::move(sol));
  return sol;
}

HardDetection detect_hard_case(const Setup& setup, const LanczosState& state, double reduced_mu,
                               std::uint64_t seed) {
  const CrqProblem& p = setup.problem;
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const VectorXd start = setup.op.apply_P(random_normal(p.n(), rng));
  const LanczosEig eig = lanczos_smallest(setup.op, start, 1, setup.norm_a);
  HardDetection out;
  out.lambda_min = eig.values(0);
  out.eig_steps = eig.steps;
  const double eps_hard = 1e-8 * (1.0 + std::abs(out.lambda_min));
  out.hard = reduced_mu >= out.lambda_min - eps_hard;
  if (!out.hard) return out;

  const Feasibility& f = setup.feas;
  const Index k = state.k();
  MatrixXd aug = MatrixXd::Zero(k + 1, k);
  aug.topRows(k) = state.tridiagonal() - out.lambda_min * MatrixXd::Identity(k, k);
  aug(k, k - 1) = state.broke_down ? 0.0 : state.beta_next();
  VectorXd rhs = VectorXd::Zero(k + 1);
  rhs(0) = -f.norm_b0;
  const VectorXd y = aug.completeOrthogonalDecomposition().solve(rhs);
  const VectorXd xt = state.basis() * y;
  VectorXd z = eig.vectors.col(0);
  z -= (xt.dot(z) / std::max(xt.squaredNorm(), 1e-300)) * xt;
  z.normalize();
  const double pad = std::sqrt(std::max(f.gamma * f.gamma - xt.squaredNorm(), 0.0));
  out.v = f.n0 + xt + pad * z;
  return out;
}

LagrangeResidual lagrange_residual(const Setup& setup, const VectorXd& v, double mu) {
  const Feasibility& f = setup.feas;
  const VectorXd u = v - f.n0;
  LagrangeResidual r;
  r.equation = (setup.op.apply_M(u) - mu * u + f.b0).norm();
  r.norm_defect = std::abs(u.norm() - f.gamma);
  r.nullspace = (setup.problem.C.transpose() * u).norm();
  return r;
}

FiniteStepReport finite_step_check(const CrqProblem& problem, SolveOptions opts) {
  opts.tol = 0.0;
  opts.maxit = static_cast<int>(problem.n() - problem.m());
  opts.minit = 1;
  opts.checkstep = 1;
  opts.detect_hard = false;
  FiniteStepReport rep;
  CrqSolution sol;
  try {
    sol = solve(problem, opts);
  } catch (const NotConverged& e) {
    sol = e.solution();
  }
  const Setup setup(problem);
  rep.k = sol.k;
  rep.broke_down = sol.broke_down;
  rep.residual = lagrange_residual(setup, sol.v, sol.mu);
  const CrqSolution ref = direct_solve(problem);
  rep.v_error = (sol.v - ref.v).norm();
  rep.mu_error = std::abs(sol.mu - ref.mu);
  return rep;
}

void write_history_csv(std::ostream& os, const CrqSolution& sol) {
  os << "k,mu,delta,nres,objective\n";
  os << std::setprecision(17);
  for (const CheckRecord& r : sol.history)
    os << r.k << ',' << r.mu << ',' << r.delta << ',' << r.nres << ',' << r.objective << '\n';
}

}  // namespace crq

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "crq/error.hpp"

namespace crq {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Symmetric linear operator given by its action x -> Ax.
struct LinearOperator {
  Index n = 0;
  std::function<VectorXd(const VectorXd&)> apply;

  VectorXd operator()(const VectorXd& x) const { return apply(x); }

  static LinearOperator from_dense(MatrixXd a);
  static LinearOperator from_sparse(Eigen::SparseMatrix<double> a);
  /// Dense n x n matrix obtained by applying the operator to the identity.
  MatrixXd materialize() const;
};

/// min v'Av subject to v'v = 1 and C'v = b.
struct CrqProblem {
  LinearOperator A;
  MatrixXd C;
  VectorXd b;

  Index n() const { return A.n; }
  Index m() const { return C.cols(); }
};

/// Builds a problem after checking dimensions, m < n, and symmetry of A on random probes.
CrqProblem make_problem(LinearOperator a, MatrixXd c, VectorXd b, std::uint64_t seed = 0);

/// Largest |xᵀAy − yᵀAx| / (‖x‖‖y‖‖A‖) seen on random probe pairs.
double symmetry_defect(const LinearOperator& a, double norm_a, int probes, std::uint64_t seed);

/// Projector P = I − CC† and M = PAP applied through a pivoted QR of C.
class ProjectedOperator {
 public:
  ProjectedOperator(const CrqProblem& problem, double rank_tol = 1e-12);

  const CrqProblem& problem() const { return *problem_; }
  Index n() const { return problem_->n(); }
  Index m() const { return problem_->m(); }

  VectorXd apply_P(const VectorXd& c) const;
  /// P(Aq); equals PAPq when q already lies in N(Cᵀ).
  VectorXd apply_PA(const VectorXd& q) const;
  VectorXd apply_M(const VectorXd& x) const;
  /// Minimum-norm solution of Cᵀv = rhs.
  VectorXd min_norm_solution(const VectorXd& rhs) const;
  /// Orthonormal basis of R(C).
  const MatrixXd& range_basis() const { return q1_; }
  double norm_C() const { return norm_c_; }

 private:
  const CrqProblem* problem_;
  MatrixXd q1_;
  MatrixXd r_;
  Eigen::VectorXi perm_;
  double norm_c_ = 0.0;
};

/// Minimum-norm solution n₀ = (Cᵀ)†b.
VectorXd compute_n0(const CrqProblem& problem);
VectorXd apply_P(const ProjectedOperator& op, const VectorXd& c);

/// Upper estimate of ‖A‖₂ from a 20-step Lanczos run with residual padding.
double estimate_norm(const LinearOperator& a, int steps = 20, std::uint64_t seed = 12345);

enum class FeasibilityTag { Infeasible, UniquePoint, Interior };

struct Feasibility {
  FeasibilityTag tag = FeasibilityTag::Infeasible;
  VectorXd n0;
  double gamma = 0.0;
  VectorXd b0;
  double norm_n0 = 0.0;
  double norm_b0 = 0.0;
};

Feasibility classify(const CrqProblem& problem, const ProjectedOperator& op);
Feasibility classify(const CrqProblem& problem);

/// Projector, feasibility data and norm estimate shared by the solvers.
struct Setup {
  explicit Setup(const CrqProblem& problem);
  const CrqProblem& problem;
  ProjectedOperator op;
  Feasibility feas;
  double norm_a;
};

enum class SolutionCase { Easy, HardDetected, B0Zero, UniquePoint };
const char* to_string(SolutionCase c);

/// Diagnostics recorded at each convergence check.
struct CheckRecord {
  int k = 0;
  double mu = 0.0;
  double delta = 0.0;
  double nres = 0.0;
  double objective = 0.0;
  VectorXd v;  ///< iterate, only when recording is requested
};

struct CrqSolution {
  VectorXd v;
  double mu = 0.0;
  int k = 0;
  std::vector<CheckRecord> history;
  SolutionCase solution_case = SolutionCase::Easy;
  double objective = 0.0;
  bool converged = false;
  bool broke_down = false;
  bool nearly_hard = false;
  double lambda_min_h = std::numeric_limits<double>::quiet_NaN();
  MatrixXd basis;
};

/// Threshold below which b₀ is treated as zero.
double b0_zero_threshold(const Setup& setup);

/// Resolves the b₀ ≈ 0 case from the smallest eigenpairs of PAP on N(Cᵀ); empty when ‖b₀‖ is above threshold.
std::optional<CrqSolution> resolve_b0_zero(const Setup& setup, std::uint64_t seed = 0);

/// |‖v‖−1| and ‖Cᵀv−b‖.
struct FeasibilityResidual {
  double norm_defect;
  double constraint_residual;
};
FeasibilityResidual feasibility_residual(const CrqProblem& problem, const VectorXd& v);

}  // namespace crq

#pragma once

#include "crq/problem.hpp"

namespace crq {

/// Explicit reduction to coordinates of N(Cᵀ): H = S₁ᵀAS₁, g₀ = S₁ᵀb₀.
struct DenseReduction {
  MatrixXd S1;
  MatrixXd S2;
  MatrixXd H;
  VectorXd g0;
  VectorXd theta;  ///< eigenvalues of H, ascending
  MatrixXd Y;      ///< eigenvectors of H
  VectorXd n0;
  VectorXd b0;
  double gamma = 0.0;
  MatrixXd A;      ///< dense A; empty when built from known factors
};

/// Default dimension cap for dense work.
inline constexpr Index kDenseCap = 5000;

DenseReduction build_reduction(const CrqProblem& problem, Index cap = kDenseCap);

/// Reduction from known factors; H's eigendecomposition is computed here.
DenseReduction make_reduction(MatrixXd s1, MatrixXd s2, MatrixXd h, VectorXd g0, VectorXd n0, VectorXd b0,
                              double gamma);

enum class PlgoptCase { Easy, HardBoundaryExact, HardBoundaryPadded };
const char* to_string(PlgoptCase c);

struct PlgoptSolution {
  double lambda = 0.0;
  VectorXd y;
  PlgoptCase tag = PlgoptCase::Easy;
};

/// min λ s.t. (H−λI)y = −g₀, ‖y‖ = γ, through the full case analysis.
PlgoptSolution solve_plgopt_dense(const DenseReduction& red, double gamma);

/// Reference solution v* = n₀ + S₁y*.
CrqSolution direct_solve(const CrqProblem& problem, Index cap = kDenseCap);
CrqSolution direct_solve(const CrqProblem& problem, const DenseReduction& red);

/// g₀ ⊥ U and ‖(H−λ_min I)†g₀‖ ≤ γ, with U the λ_min eigenspace.
bool hard_case_predicate(const DenseReduction& red, double gamma);

/// Leftmost real eigenpair of (H−λI)²w = γ⁻²g₀g₀ᵀw.
struct PqepSolution {
  double lambda = 0.0;
  VectorXd w;
  VectorXd y;
};
PqepSolution solve_pqepmin_dense(const DenseReduction& red, double gamma);

struct EquivalenceReport {
  double lambda_plgopt = 0.0;
  double lambda_pqepmin = 0.0;
  double lambda_gap = 0.0;
  double forward_qep_residual = 0.0;   ///< pLGopt → pQEPmin map, relative QEP residual
  double backward_norm_defect = 0.0;   ///< pQEPmin → pLGopt map, |‖y‖−γ|
  double backward_equation_residual = 0.0;
  double full_lgopt_residual = 0.0;    ///< ‖(PAP−λI)u + b₀‖ with u = S₁y
  double full_qep_residual = 0.0;      ///< lifted QEP residual with z = S₁w
  bool zero_branch = false;            ///< g₀ᵀw = 0 branch of the backward map
  double max_residual() const;
};

EquivalenceReport equivalence_maps(const DenseReduction& red, double gamma);

struct DualReport {
  double t_star = 0.0;
  double lambda_min_at_t = 0.0;
  double primal_min = 0.0;
  double gap = 0.0;
  double lambda_min_M = 0.0;
};

/// max_t λ_min(L+tE, M) compared with the CRQopt minimum.
DualReport dual_check(const CrqProblem& problem, Index cap = 200);

/// Eigenvalues of PAP, ascending, and of H with m zeros appended.
struct SpectrumCheck {
  double max_difference = 0.0;
};
SpectrumCheck projected_spectrum_check(const DenseReduction& red);

}  // namespace crq

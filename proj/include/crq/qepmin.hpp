#pragma once

#include "crq/lanczos.hpp"

namespace crq {

/// Leftmost real eigenpair of the reduced quadratic eigenvalue problem
/// (T−λI)²w = γ⁻²β₁²e₁e₁ᵀw, with y = (T−λI)w.
struct ReducedQepSolution {
  double mu = 0.0;
  VectorXd y;
  VectorXd w;
  Eigen::VectorXcd spectrum;
  bool degenerate_w = false;
};

/// True when |Im λ| ≤ ε_im(1+|Re λ|+‖T‖) with ε_im = 1e−8(1+‖T‖).
bool is_numerically_real(std::complex<double> lambda, double norm_t);

/// Leftmost numerically real eigenvalue of a dense matrix and its real eigenvector.
struct LeftmostReal {
  double lambda = 0.0;
  VectorXd vector;
  Eigen::VectorXcd spectrum;
};
LeftmostReal leftmost_real_eigenpair(const MatrixXd& l, double norm_t);

/// 2k x 2k linearization [[T, −γ⁻²β₁²e₁e₁ᵀ], [−I, T]].
MatrixXd qep_linearization(const MatrixXd& t, double beta1, double gamma);

ReducedQepSolution solve_reduced_qep(const VectorXd& diag, const VectorXd& offdiag, double beta1, double gamma);

/// Eigenvalues of the projected QEP that keeps the β_{k+1}²e_ke_kᵀ term.
Eigen::VectorXcd reduced_qep_spectrum_undropped(const VectorXd& diag, const VectorXd& offdiag,
                                               double beta_next, double beta1, double gamma);

/// x = −(γ²/(β₁e₁ᵀw))y.
VectorXd reduced_qep_to_rlgopt(const ReducedQepSolution& sol, double beta1, double gamma);

struct QepResidual {
  double nres = 0.0;
  double delta = 0.0;
};

/// Residual bound δ and exact normalized residual of the lifted QEP eigenpair.
QepResidual qep_residual_bound(const ProjectedOperator& op, const LanczosState& state,
                               const ReducedQepSolution& sol, double norm_a, double gamma, double beta1);

}  // namespace crq

#pragma once

#include <functional>
#include <vector>

#include "crq/problem.hpp"

namespace crq {

/// Lanczos basis and tridiagonal coefficients.
///
/// After k steps: columns q_1..q_k, alpha = α_1..α_k, beta = β_1..β_{k+1}
/// with β_1 = ‖start‖, and q_next = q_{k+1} unless the process broke down.
class LanczosState {
 public:
  Index k() const { return static_cast<Index>(alpha.size()); }
  Index n() const { return q_next.size(); }
  auto basis() const { return storage.leftCols(k()); }
  VectorXd q(Index j) const { return storage.col(j); }
  /// Off-diagonal entries β_2..β_k of T_k.
  VectorXd offdiag() const;
  VectorXd diag() const;
  double beta_next() const { return beta.back(); }
  /// Dense T_k.
  MatrixXd tridiagonal() const;

  std::vector<double> alpha;
  std::vector<double> beta;
  VectorXd q_next;
  bool broke_down = false;
  double breakdown_tol = 0.0;
  double max_ortho_loss = 0.0;
  /// Column storage for q_1..q_k with spare capacity.
  MatrixXd storage;
};

enum class StepOutcome { Continued, BrokeDown };

using MatVec = std::function<VectorXd(const VectorXd&)>;

/// Starts the process at q_1 = start/‖start‖.
LanczosState lanczos_init(const VectorXd& start, double norm_a);
LanczosState lanczos_init(const ProjectedOperator& op, const VectorXd& b0, double norm_a);

/// One three-term step with full reorthogonalization; m must map N(Cᵀ) into itself.
/// One step with operator m; `project`, when given, is applied to the new residual after orthogonalization.
StepOutcome lanczos_step(const MatVec& m, LanczosState& state, const MatVec& project = {});
/// Step on PAP: the residual of Aq is projected once, after orthogonalization, so rounding
/// components in R(C) do not grow through the recurrence.
StepOutcome lanczos_step(const ProjectedOperator& op, LanczosState& state);

/// Eigenpairs of a symmetric tridiagonal matrix, ascending.
struct TridiagEig {
  VectorXd values;
  MatrixXd vectors;
};
TridiagEig tridiagonal_eig(const VectorXd& diag, const VectorXd& offdiag);
VectorXd tridiagonal_eigenvalues(const VectorXd& diag, const VectorXd& offdiag);
/// Unit eigenvector for the eigenvalue theta by inverse iteration, orthogonal to the columns of `against`.
VectorXd tridiagonal_eigenvector(const VectorXd& diag, const VectorXd& offdiag, double theta,
                                 const MatrixXd& against);

/// Smallest eigenpairs of PAP restricted to the Krylov space of a start in N(Cᵀ).
struct LanczosEig {
  VectorXd values;
  MatrixXd vectors;
  int steps = 0;
};
LanczosEig lanczos_smallest(const ProjectedOperator& op, const VectorXd& start, int nev,
                            double norm_a, double tol = 1e-10, int maxit = -1);

}  // namespace crq

#pragma once

#include "crq/problem.hpp"

namespace crq {

/// χ(λ) = Σ ξᵢ²/(λ−θᵢ)² − γ² with θ ascending.
struct SecularSpec {
  VectorXd theta;
  VectorXd xi;
  double gamma = 1.0;
};

double secular_value(const SecularSpec& spec, double lambda);
double secular_derivative(const SecularSpec& spec, double lambda);

struct SecularRoot {
  double lambda = 0.0;
  int iterations = 0;
};

/// Smallest zero of χ left of θ₁ by a rational model of χ with bisection fallback.
SecularRoot smallest_root(const SecularSpec& spec, int max_iter = 200);

/// Minimizer of the reduced Lagrangian problem over the Krylov space.
struct RlgoptSolution {
  double mu = 0.0;
  VectorXd x;
  int iterations = 0;
  bool nearly_hard = false;
  double theta_min = 0.0;
};

/// Solves (T−μI)x = −β₁e₁ with ‖x‖ = γ and μ < λ_min(T).
RlgoptSolution solve_rlgopt(const VectorXd& diag, const VectorXd& offdiag, double beta1, double gamma);

/// Solves (T − σI)x = rhs for a symmetric tridiagonal T with T − σI nonsingular.
VectorXd solve_shifted_tridiagonal(const VectorXd& diag, const VectorXd& offdiag, double sigma,
                                   const VectorXd& rhs);

}  // namespace crq

#pragma once

#include <ostream>
#include <vector>

#include "crq/problem.hpp"

namespace crq {

struct BoundInputs {
  double theta_min = 0.0;
  double theta_2 = 0.0;
  double theta_max = 0.0;
  double lambda_star = 0.0;
  double gamma = 0.0;
  double norm_b0 = 0.0;

  double norm_h_shift() const;
  double kappa() const;
  double kappa_plus() const;
};

/// Bound inputs from the ascending spectrum of H and the optimal multiplier.
BoundInputs make_bound_inputs(const VectorXd& theta, double lambda_star, double gamma, double norm_b0);

/// Γ_κ = (√κ+1)/(√κ−1).
double gamma_factor(double kappa);
/// 1 / (Γ^k + Γ^{-k}) evaluated in the log domain.
double inverse_chebyshev_growth(double kappa, double k);
/// Chebyshev polynomial T_k(x) for x ≥ 1.
double chebyshev_t(int k, double x);

struct Bounds {
  double b1 = 0.0;  ///< objective error
  double b2 = 0.0;  ///< iterate error
  double b3 = 0.0;  ///< multiplier error
};

/// Bounds in terms of κ; zero bounds when κ ≤ 1 + 1e−14.
Bounds kappa_bounds(const BoundInputs& in, int k);
/// Bounds in terms of κ₊ at exponent k−1; zero bounds when κ₊ ≤ 1 + 1e−14.
Bounds kappa_plus_bounds(const BoundInputs& in, int k);

struct ErrorRow {
  int k = 0;
  double err1 = 0.0;
  double err2 = 0.0;
  double err3 = 0.0;
};

/// Relative objective error, iterate error and relative multiplier error per check.
std::vector<ErrorRow> error_history(const CrqSolution& run, const CrqSolution& ref);

/// CSV with columns k, err1, err2, err3, b1, b2, b3, b1p, b2p, b3p.
void write_bench_csv(std::ostream& os, const std::vector<ErrorRow>& rows, const BoundInputs& in);

}  // namespace crq

#pragma once

#include <cstdint>
#include <ostream>

#include "crq/lanczos.hpp"

namespace crq {

enum class Method { LGopt, QEPmin };

struct SolveOptions {
  Method method = Method::LGopt;
  double tol = 1e-15;
  int maxit = 200;
  int minit = 1;
  int checkstep = 1;
  bool detect_hard = true;
  bool return_basis = false;
  bool record_iterates = false;
  std::uint64_t rng_seed = 0;

  /// Settings used for synthetic instances.
  static SolveOptions synthetic() { return {}; }
  /// Settings used for image segmentation.
  static SolveOptions clustering();
  void validate() const;
};

/// Thrown when maxit is reached before the residual test passes; carries the last iterate.
class NotConverged : public Error {
 public:
  explicit NotConverged(CrqSolution sol);
  const CrqSolution& solution() const { return solution_; }

 private:
  CrqSolution solution_;
};

/// Lanczos projection solver. Throws Infeasible or NotConverged.
CrqSolution solve(const CrqProblem& problem, const SolveOptions& opts = {});

struct HardDetection {
  bool hard = false;
  double lambda_min = 0.0;
  VectorXd v;
  int eig_steps = 0;
};

/// Compares the reduced multiplier with λ_min(H) and builds the padded solution when hard.
HardDetection detect_hard_case(const Setup& setup, const LanczosState& state, double reduced_mu,
                               std::uint64_t seed);

/// LGopt residuals of u = v − n₀ for multiplier μ.
struct LagrangeResidual {
  double equation = 0.0;    ///< ‖(PAP−μI)u + b₀‖
  double norm_defect = 0.0; ///< |‖u‖ − γ|
  double nullspace = 0.0;   ///< ‖Cᵀu‖
};
LagrangeResidual lagrange_residual(const Setup& setup, const VectorXd& v, double mu);

struct FiniteStepReport {
  int k = 0;
  bool broke_down = false;
  LagrangeResidual residual;
  double v_error = 0.0;
  double mu_error = 0.0;
};

/// Runs the solver to breakdown and compares with the dense direct method.
FiniteStepReport finite_step_check(const CrqProblem& problem, SolveOptions opts = {});

/// CSV with columns k, mu, delta, nres, objective.
void write_history_csv(std::ostream& os, const CrqSolution& sol);

}  // namespace crq

#pragma once

#include <cstdint>
#include <string>

#include "crq/analysis.hpp"
#include "crq/driver.hpp"
#include "crq/reference.hpp"

namespace crq {

enum class G0Kind { Ones, Geometric };
enum class SpectrumKind { ChebyshevExtreme, ChebyshevPlusIsolated };

struct InstanceSpec {
  Index n = 1100;
  Index m = 100;
  double alpha = 1.0;
  double beta = 100.0;
  double zeta = 0.9;
  G0Kind g0_kind = G0Kind::Ones;
  double eta = -5e-3;  ///< ratio exponent for geometric g₀
  SpectrumKind spectrum_kind = SpectrumKind::ChebyshevExtreme;
  double iso_value = 1.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Translated Chebyshev extreme nodes ω(cos(jπ/l) − τ), j = 0..l, from β down to α.
VectorXd chebyshev_extreme_nodes(Index l, double alpha, double beta);

struct GroundTruth {
  VectorXd h_diag;
  VectorXd g0;
  double gamma = 0.0;
  double lambda_star = 0.0;
  double kappa = 0.0;
  double kappa_plus = 0.0;
  double lambda_min_h = 0.0;
};

struct GeneratedInstance {
  CrqProblem problem;
  GroundTruth truth;
  MatrixXd S;       ///< [S₂ S₁]: first m columns span R(C)
  VectorXd a;
  double a22 = 0.0; ///< diagonal value of the (2,2) block
  /// Exact reduction from the construction factors.
  DenseReduction reduction() const;
  /// Dense A, for small instances.
  MatrixXd dense_A() const;
};

GeneratedInstance generate(const InstanceSpec& spec);

struct RoundtripReport {
  double h_error = 0.0;
  double g0_error = 0.0;
  double gamma_error = 0.0;
  double min_eig_a = 0.0;
  double schur_error = 0.0;
  bool ok = false;
};

/// Checks the construction identities; throws VerificationFailed on violation when `throw_on_fail`.
RoundtripReport verify_roundtrip(const GeneratedInstance& inst, bool throw_on_fail = true);

struct BenchRun {
  CrqSolution run;        ///< solver output with every iterate recorded
  CrqSolution reference;  ///< exact solution from the construction factors
  BoundInputs inputs;
  std::vector<ErrorRow> rows;
  bool converged = false;
};

/// Solves with checkstep 1 and recorded iterates, then measures errors against the reference.
BenchRun bench(const GeneratedInstance& inst, SolveOptions opts);

/// key=value spec file.
InstanceSpec parse_instance_spec(const std::string& text);
std::string format_instance_spec(const InstanceSpec& spec);

}  // namespace crq

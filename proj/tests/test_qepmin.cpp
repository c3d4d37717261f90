#include <gtest/gtest.h>

#include <complex>

#include "crq/driver.hpp"
#include "crq/qepmin.hpp"
#include "crq/secular.hpp"
#include "oracles.hpp"

using namespace crq;

namespace {

MatrixXd tri(const VectorXd& d, const VectorXd& e) {
  MatrixXd t = d.asDiagonal();
  for (Index i = 0; i < e.size(); ++i) t(i, i + 1) = t(i + 1, i) = e(i);
  return t;
}

}  // namespace

TEST(Qep, NumericallyReal) {
  EXPECT_TRUE(is_numerically_real({1.0, 0.0}, 1.0));
  EXPECT_TRUE(is_numerically_real({1.0, 1e-12}, 1.0));
  EXPECT_FALSE(is_numerically_real({1.0, 1e-3}, 1.0));
}

TEST(Qep, LinearizationEigenvaluesSolveQuadratic) {
  crq::Rng rng(3);
  const VectorXd d = random_normal(6, rng);
  const VectorXd e = random_normal(5, rng);
  const MatrixXd t = tri(d, e);
  const double beta1 = 0.8, gamma = 0.6;
  const MatrixXd l = qep_linearization(t, beta1, gamma);
  ASSERT_EQ(l.rows(), 12);
  const Eigen::VectorXcd ev = l.eigenvalues();
  MatrixXd g = MatrixXd::Zero(6, 6);
  g(0, 0) = beta1 * beta1 / (gamma * gamma);
  for (Index i = 0; i < ev.size(); ++i) {
    const std::complex<double> lam = ev(i);
    const Eigen::MatrixXcd shifted = t.cast<std::complex<double>>() - lam * Eigen::MatrixXcd::Identity(6, 6);
    const Eigen::MatrixXcd q = shifted * shifted - g.cast<std::complex<double>>();
    const VectorXd sv = q.jacobiSvd().singularValues();
    EXPECT_LE(sv(5), 1e-8 * sv(0)) << lam;
  }
}

TEST(Qep, LeftmostRealMatchesSecularRoot) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    crq::Rng rng(seed);
    const Index k = 3 + static_cast<Index>(seed % 10);
    const VectorXd d = random_normal(k, rng);
    const VectorXd e = random_normal(k - 1, rng).cwiseAbs() + VectorXd::Constant(k - 1, 0.05);
    const double beta1 = 1.3, gamma = 0.4;
    const ReducedQepSolution q = solve_reduced_qep(d, e, beta1, gamma);
    const RlgoptSolution r = solve_rlgopt(d, e, beta1, gamma);
    EXPECT_NEAR(q.mu, r.mu, 1e-10 * (1.0 + std::abs(r.mu))) << seed;
    const VectorXd x = reduced_qep_to_rlgopt(q, beta1, gamma);
    const double tmin = tri(d, e).selfadjointView<Eigen::Lower>().eigenvalues()(0);
    EXPECT_LE((x - r.x).norm(), 1e-12 * (1.0 + std::abs(r.mu) / (tmin - r.mu))) << seed;
    // Eigen decomposition oracle for the secular function on T.
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(tri(d, e));
    const VectorXd xi = beta1 * es.eigenvectors().row(0).transpose();
    EXPECT_NEAR(q.mu, oracle::bisect_secular(es.eigenvalues(), xi, gamma), 1e-9 * (1.0 + std::abs(q.mu)));
  }
}

TEST(Qep, NoRealEigenvalueThrows) {
  MatrixXd l(2, 2);
  l << 0.0, -1.0, 1.0, 0.0;
  try {
    leftmost_real_eigenpair(l, 1.0);
    FAIL() << "no exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoRealEigenvalue);
  }
}

TEST(Qep, UndroppedSpectrumIsComplexOnSmallExample) {
  const MatrixXd a = VectorXd::LinSpaced(5, 1.0, 5.0).asDiagonal();
  MatrixXd c(5, 1);
  c << 0.65, 1.0, 0.68, 1.13, -0.23;
  const CrqProblem p = make_problem(LinearOperator::from_dense(a), c, VectorXd::Ones(1));
  const crq::Setup setup(p);
  LanczosState st = lanczos_init(setup.op, setup.feas.b0, setup.norm_a);
  lanczos_step(setup.op, st);
  lanczos_step(setup.op, st);
  const ReducedQepSolution r = solve_reduced_qep(st.diag(), st.offdiag(), setup.feas.norm_b0, setup.feas.gamma);
  for (Index i = 0; i < r.spectrum.size(); ++i) EXPECT_TRUE(is_numerically_real(r.spectrum(i), 10.0));
  const Eigen::VectorXcd u =
      reduced_qep_spectrum_undropped(st.diag(), st.offdiag(), st.beta_next(), setup.feas.norm_b0, setup.feas.gamma);
  ASSERT_EQ(u.size(), 4);
  for (Index i = 0; i < u.size(); ++i) EXPECT_GT(std::abs(u(i).imag()), 1e-3);
}

TEST(Qep, ResidualBoundDominates) {
  const oracle::RandomInstance ri = oracle::random_instance(60, 4, 0.5, 17);
  const CrqProblem p = make_problem(LinearOperator::from_dense(ri.A), ri.C, ri.b);
  const crq::Setup setup(p);
  LanczosState st = lanczos_init(setup.op, setup.feas.b0, setup.norm_a);
  for (int k = 1; k <= 25; ++k) {
    lanczos_step(setup.op, st);
    const ReducedQepSolution s = solve_reduced_qep(st.diag(), st.offdiag(), setup.feas.norm_b0, setup.feas.gamma);
    const QepResidual r = qep_residual_bound(setup.op, st, s, setup.norm_a, setup.feas.gamma, setup.feas.norm_b0);
    EXPECT_LE(r.nres, r.delta * (1.0 + 1e-8) + 1e-15) << k;
  }
}

#include <gtest/gtest.h>

#include "crq/lanczos.hpp"
#include "oracles.hpp"

using namespace crq;

namespace {

struct Fixture {
  oracle::RandomInstance ri;
  CrqProblem problem;
  Fixture(Index n, Index m, std::uint64_t seed)
      : ri(oracle::random_instance(n, m, 0.5, seed)),
        problem(make_problem(LinearOperator::from_dense(ri.A), ri.C, ri.b)) {}
};

}  // namespace

TEST(Lanczos, ZeroStartThrows) {
  try {
    lanczos_init(VectorXd::Zero(4), 1.0);
    FAIL() << "no exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroStart);
  }
}

TEST(Lanczos, RelationAndOrthogonality) {
  const Fixture f(60, 5, 1);
  const ProjectedOperator op(f.problem);
  crq::Rng rng(2);
  const VectorXd start = op.apply_P(random_normal(60, rng));
  const double norm_a = estimate_norm(f.problem.A);
  LanczosState st = lanczos_init(op, start, norm_a);
  EXPECT_NEAR(st.beta.front(), start.norm(), 1e-14);
  for (int j = 0; j < 20; ++j) ASSERT_EQ(lanczos_step(op, st), StepOutcome::Continued);
  const MatrixXd q = st.basis();
  const Index k = st.k();
  EXPECT_LE((q.transpose() * q - MatrixXd::Identity(k, k)).norm(), 1e-13);
  EXPECT_LE((f.ri.C.transpose() * q).norm(), 1e-12);
  // M Q_k = Q_k T_k + β_{k+1} q_{k+1} e_kᵀ.
  MatrixXd mq(60, k);
  for (Index j = 0; j < k; ++j) mq.col(j) = op.apply_M(q.col(j));
  MatrixXd rhs = q * st.tridiagonal();
  rhs.col(k - 1) += st.beta_next() * st.q_next;
  EXPECT_LE((mq - rhs).norm(), 1e-12 * norm_a);
}

TEST(Lanczos, TridiagonalLayout) {
  const Fixture f(20, 2, 3);
  const ProjectedOperator op(f.problem);
  LanczosState st = lanczos_init(op, op.apply_P(VectorXd::Ones(20)), 10.0);
  for (int j = 0; j < 5; ++j) lanczos_step(op, st);
  const MatrixXd t = st.tridiagonal();
  EXPECT_EQ(t.rows(), 5);
  EXPECT_EQ(st.diag().size(), 5);
  EXPECT_EQ(st.offdiag().size(), 4);
  for (Index i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(t(i, i + 1), st.beta[static_cast<std::size_t>(i + 1)]);
}

TEST(Lanczos, BreaksDownOnInvariantSubspace) {
  const MatrixXd a = VectorXd::LinSpaced(8, 1.0, 8.0).asDiagonal();
  VectorXd start = VectorXd::Zero(8);
  start(0) = start(1) = start(2) = 1.0;
  LanczosState st = lanczos_init(start, 8.0);
  const MatVec m = [&](const VectorXd& x) { VectorXd y = a * x; return y; };
  int steps = 0;
  while (lanczos_step(m, st) == StepOutcome::Continued) ASSERT_LT(++steps, 8);
  EXPECT_TRUE(st.broke_down);
  EXPECT_EQ(st.k(), 3);
  const VectorXd vals = tridiagonal_eig(st.diag(), st.offdiag()).values;
  EXPECT_NEAR(vals(0), 1.0, 1e-13);
  EXPECT_NEAR(vals(2), 3.0, 1e-13);
}

TEST(Lanczos, SmallestEigenpairsOfProjectedMatrix) {
  const Fixture f(80, 6, 7);
  const ProjectedOperator op(f.problem);
  const oracle::Dense d = oracle::solve_dense(f.ri.A, f.ri.C, f.ri.b);
  crq::Rng rng(1);
  const LanczosEig e = lanczos_smallest(op, op.apply_P(random_normal(80, rng)), 2, estimate_norm(f.problem.A));
  ASSERT_EQ(e.values.size(), 2);
  EXPECT_NEAR(e.values(0), d.theta(0), 1e-8);
  EXPECT_NEAR(e.values(1), d.theta(1), 1e-8);
  for (Index i = 0; i < 2; ++i) {
    const VectorXd v = e.vectors.col(i);
    EXPECT_LE((op.apply_M(v) - e.values(i) * v).norm(), 1e-7);
    EXPECT_LE((f.ri.C.transpose() * v).norm(), 1e-12);
  }
}

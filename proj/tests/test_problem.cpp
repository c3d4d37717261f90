#include <gtest/gtest.h>

#include "crq/problem.hpp"
#include "oracles.hpp"

using namespace crq;

namespace {

CrqProblem dense(const oracle::RandomInstance& ri) {
  return make_problem(LinearOperator::from_dense(ri.A), ri.C, ri.b);
}

}  // namespace

TEST(MakeProblem, RejectsBadShapes) {
  const oracle::RandomInstance ri = oracle::random_instance(6, 2, 0.5, 1);
  EXPECT_THROW(make_problem(LinearOperator::from_dense(ri.A), ri.C.topRows(5), ri.b), Error);
  EXPECT_THROW(make_problem(LinearOperator::from_dense(ri.A), ri.C, VectorXd::Ones(3)), Error);
  EXPECT_THROW(make_problem(LinearOperator::from_dense(ri.A), MatrixXd::Random(6, 6), VectorXd::Ones(6)), Error);
  EXPECT_THROW(LinearOperator::from_dense(MatrixXd::Ones(3, 4)), Error);
}

TEST(MakeProblem, RejectsAsymmetricOperator) {
  MatrixXd a = MatrixXd::Identity(5, 5);
  a(0, 4) = 1.0;
  try {
    make_problem(LinearOperator::from_dense(a), MatrixXd::Ones(5, 1), VectorXd::Constant(1, 0.1));
    FAIL() << "no exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(LinearOperator, SparseMatchesDense) {
  const oracle::RandomInstance ri = oracle::random_instance(12, 2, 0.5, 3);
  const LinearOperator s = LinearOperator::from_sparse(ri.A.sparseView());
  EXPECT_LE((s.materialize() - ri.A).norm(), 1e-14 * ri.A.norm());
}

TEST(ProjectedOperator, ProjectorProperties) {
  const oracle::RandomInstance ri = oracle::random_instance(30, 4, 0.5, 5);
  const CrqProblem p = dense(ri);
  const ProjectedOperator op(p);
  crq::Rng rng(9);
  const VectorXd x = random_normal(30, rng);
  const VectorXd px = op.apply_P(x);
  EXPECT_LE((ri.C.transpose() * px).norm(), 1e-13 * x.norm());
  EXPECT_LE((op.apply_P(px) - px).norm(), 1e-13 * x.norm());
  // Explicit P from the SVD null basis.
  const oracle::Dense d = oracle::solve_dense(ri.A, ri.C, ri.b);
  EXPECT_LE((px - d.V1 * (d.V1.transpose() * x)).norm(), 1e-12 * x.norm());
  const VectorXd mx = op.apply_M(x);
  EXPECT_LE((mx - d.V1 * (d.V1.transpose() * ri.A * d.V1 * d.V1.transpose() * x)).norm(), 1e-11 * x.norm());
}

TEST(ProjectedOperator, MinimumNormSolution) {
  const oracle::RandomInstance ri = oracle::random_instance(25, 5, 0.4, 11);
  const CrqProblem p = dense(ri);
  const VectorXd n0 = compute_n0(p);
  const VectorXd pinv = ri.C.transpose().completeOrthogonalDecomposition().pseudoInverse() * ri.b;
  EXPECT_LE((n0 - pinv).norm(), 1e-12);
  EXPECT_NEAR(n0.norm(), 0.4, 1e-12);
}

TEST(ProjectedOperator, RankDeficientC) {
  MatrixXd c(6, 2);
  c.col(0) = VectorXd::LinSpaced(6, 1.0, 6.0);
  c.col(1) = 2.0 * c.col(0);
  const CrqProblem p = make_problem(LinearOperator::from_dense(MatrixXd::Identity(6, 6)), c, VectorXd::Zero(2));
  try {
    ProjectedOperator op(p);
    FAIL() << "no exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
  }
}

TEST(Classify, ThreeCases) {
  MatrixXd c = MatrixXd::Zero(4, 1);
  c(0, 0) = 2.0;
  const MatrixXd a = MatrixXd::Identity(4, 4);
  auto tag = [&](double b) {
    return classify(make_problem(LinearOperator::from_dense(a), c, VectorXd::Constant(1, b))).tag;
  };
  EXPECT_EQ(tag(1.0), FeasibilityTag::Interior);
  EXPECT_EQ(tag(2.0), FeasibilityTag::UniquePoint);
  EXPECT_EQ(tag(2.5), FeasibilityTag::Infeasible);
  const Feasibility f = classify(make_problem(LinearOperator::from_dense(a), c, VectorXd::Constant(1, 1.0)));
  EXPECT_NEAR(f.norm_n0, 0.5, 1e-15);
  EXPECT_NEAR(f.gamma, std::sqrt(0.75), 1e-15);
}

TEST(EstimateNorm, UpperBoundCloseToTruth) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const oracle::RandomInstance ri = oracle::random_instance(80, 1, 0.5, 20 + seed);
    const double truth = ri.A.selfadjointView<Eigen::Lower>().eigenvalues().cwiseAbs().maxCoeff();
    const double est = estimate_norm(LinearOperator::from_dense(ri.A));
    EXPECT_GE(est, truth * (1.0 - 1e-12));
    EXPECT_LE(est, 1.5 * truth);
  }
}

TEST(FeasibilityResidual, MeasuresBothDefects) {
  const oracle::RandomInstance ri = oracle::random_instance(10, 2, 0.5, 4);
  const CrqProblem p = dense(ri);
  const oracle::Dense d = oracle::solve_dense(ri.A, ri.C, ri.b);
  const FeasibilityResidual r = feasibility_residual(p, d.v);
  EXPECT_LE(r.norm_defect, 1e-12);
  EXPECT_LE(r.constraint_residual, 1e-12);
  const FeasibilityResidual r2 = feasibility_residual(p, 2.0 * d.v);
  EXPECT_NEAR(r2.norm_defect, 1.0, 1e-12);
}

#include <gtest/gtest.h>

#include <cmath>

#include "crq/clustering.hpp"

using namespace crq;

namespace {

/// Left half 0, right half 1.
GrayImage two_block(Index w, Index h) {
  GrayImage img;
  img.width = w;
  img.height = h;
  for (Index r = 0; r < h; ++r)
    for (Index c = 0; c < w; ++c) img.pixels.push_back(c < w / 2 ? 0.0 : 1.0);
  return img;
}

}  // namespace

TEST(Graph, StrictRadiusNeighborhood) {
  const GrayImage img = two_block(7, 7);
  const ImageGraph g = build_graph(img, 0.1, 2);
  // Interior pixels see the 3x3 block around them, corners a 2x2 block.
  const Index center = 3 * 7 + 3;
  EXPECT_EQ(g.row_ptr[center + 1] - g.row_ptr[center], 8);
  EXPECT_EQ(g.row_ptr[1] - g.row_ptr[0], 3);
}

TEST(Graph, IsolatedPixelWithRadiusOne) {
  const GrayImage img = two_block(4, 4);
  try {
    build_graph(img, 0.1, 1);
    FAIL() << "no exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IsolatedPixel);
  }
}

TEST(Graph, WeightsSymmetricAndCorrect) {
  GrayImage img;
  img.width = 5;
  img.height = 4;
  for (int i = 0; i < 20; ++i) img.pixels.push_back(std::sin(1.3 * i));
  const ImageGraph g = build_graph(img, 0.2, 3);
  const Eigen::SparseMatrix<double> w = g.W();
  EXPECT_LE((MatrixXd(w) - MatrixXd(w.transpose())).norm(), 1e-15);
  const auto [lo, hi] = std::minmax_element(img.pixels.begin(), img.pixels.end());
  const double df = 0.2 * (*hi - *lo) * (*hi - *lo);
  const double expect = std::exp(-std::pow(img.pixels[0] - img.pixels[7], 2) / df);
  EXPECT_NEAR(w.coeff(0, 7), expect, 1e-15);
  EXPECT_EQ(w.coeff(0, 3), 0.0);
  EXPECT_LE((MatrixXd(w).rowwise().sum() - g.degree).norm(), 1e-13);
  const VectorXd x = VectorXd::LinSpaced(20, -1.0, 1.0);
  EXPECT_LE((g.apply_W(x) - w * x).norm(), 1e-13);
}

TEST(Graph, ParameterValidation) {
  const GrayImage img = two_block(4, 4);
  EXPECT_THROW(build_graph(img, 0.1, 0), Error);
  EXPECT_THROW(build_graph(img, 0.0, 2), Error);
  EXPECT_THROW(build_graph(img, 1.0, 2), Error);
  GrayImage bad = img;
  bad.pixels.pop_back();
  EXPECT_THROW(build_graph(bad, 0.1, 2), Error);
}

TEST(Constraints, EncodingAndErrors) {
  const ImageGraph g = build_graph(two_block(8, 8), 0.1, 2);
  const LabelSet labels{{3 * 8 + 6}, {4 * 8 + 1}};
  const ConstraintSystem cons = encode_constraints(g, labels);
  EXPECT_EQ(cons.N.cols(), 3);
  EXPECT_NEAR(cons.vol_V, g.degree.sum(), 1e-12);
  EXPECT_GT(cons.c_plus, 0.0);
  EXPECT_LT(cons.c_minus, 0.0);
  EXPECT_NEAR(cons.vol_I * cons.c_plus + cons.vol_J * cons.c_minus, 0.0, 1e-14);
  EXPECT_NEAR(-cons.c_plus * cons.c_minus * cons.vol_V, 1.0, 1e-14);
  EXPECT_EQ(cons.b(0), cons.c_plus);
  EXPECT_EQ(cons.b(1), cons.c_minus);
  EXPECT_EQ(cons.b(2), 0.0);
  EXPECT_LE((cons.N.col(2) - g.degree).norm(), 0.0);
  try {
    encode_constraints(g, {{}, {1}});
    FAIL() << "no exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySide);
  }
  EXPECT_THROW(encode_constraints(g, {{1}, {1}}), Error);
  EXPECT_THROW(encode_constraints(g, {{64}, {1}}), Error);
}

TEST(Ncut, TwoBlockPartition) {
  const ImageGraph g = build_graph(two_block(6, 6), 0.1, 2);
  std::vector<std::uint8_t> mask(36);
  for (Index i = 0; i < 36; ++i) mask[i] = (i % 6) < 3;
  const MatrixXd w = MatrixXd(g.W());
  double cut = 0.0, va = 0.0, vb = 0.0;
  for (Index i = 0; i < 36; ++i) {
    (mask[i] ? va : vb) += g.degree(i);
    for (Index j = 0; j < 36; ++j)
      if (mask[i] && !mask[j]) cut += w(i, j);
  }
  EXPECT_NEAR(ncut(g, mask), cut / va + cut / vb, 1e-12);
}

TEST(Segment, TwoBlockExact) {
  const GrayImage img = two_block(8, 8);
  const LabelSet labels{{3 * 8 + 6}, {4 * 8 + 1}};
  SolveOptions opts = SolveOptions::clustering();
  opts.minit = 1;
  const SegmentResult r = segment(img, labels, SegmentParams{}, opts);
  ASSERT_EQ(r.mask.size(), 64u);
  for (Index i = 0; i < 64; ++i) EXPECT_EQ(r.mask[i], (i % 8) >= 4 ? 1 : 0) << i;
  EXPECT_LE(r.check.label_error, 1e-6);
  EXPECT_LE(r.check.balance_error, 1e-6);
  EXPECT_LE(r.check.norm_error, 1e-6);
  for (double h : r.heat) {
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, 1.0);
  }
  EXPECT_TRUE(r.converged);
}

TEST(Segment, ToCrqoptMatchesNormalizedLaplacian) {
  const ImageGraph g = build_graph(two_block(5, 5), 0.1, 2);
  const ConstraintSystem cons = encode_constraints(g, {{4}, {20}});
  const CrqProblem p = to_crqopt(g, cons);
  const VectorXd dm = g.degree.cwiseSqrt().cwiseInverse();
  const MatrixXd lap = MatrixXd::Identity(25, 25) - dm.asDiagonal() * MatrixXd(g.W()) * dm.asDiagonal();
  EXPECT_LE((p.A.materialize() - lap).norm(), 1e-13);
  EXPECT_LE((p.C - dm.asDiagonal() * cons.N).norm(), 1e-13);
}

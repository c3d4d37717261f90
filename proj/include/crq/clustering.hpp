#pragma once

#include <cstdint>
#include <vector>

#include "crq/driver.hpp"

namespace crq {

/// Grayscale raster in row-major order.
struct GrayImage {
  Index width = 0;
  Index height = 0;
  std::vector<double> pixels;

  Index size() const { return width * height; }
  double at(Index row, Index col) const { return pixels[static_cast<std::size_t>(row * width + col)]; }
};

/// Pixel affinity graph in CSR form.
struct ImageGraph {
  Index width = 0;
  Index height = 0;
  double delta = 0.1;
  int radius = 5;
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int32_t> col_idx;
  std::vector<double> weights;
  VectorXd degree;

  Index size() const { return width * height; }
  std::size_t nnz() const { return weights.size(); }
  /// Wx.
  VectorXd apply_W(const VectorXd& x) const;
  Eigen::SparseMatrix<double> W() const;
};

/// Pixel indices known to lie in the foreground (I) and background (J).
struct LabelSet {
  std::vector<Index> I;
  std::vector<Index> J;
};

/// Weights exp(−|F(i)−F(j)|²/δ_F) for pixels with ‖X(i)−X(j)‖_∞ < r, δ_F = δ(F_max−F_min)².
ImageGraph build_graph(const GrayImage& image, double delta, int radius);

struct ConstraintSystem {
  MatrixXd N;  ///< columns e_i (i ∈ I), e_j (j ∈ J), D·1
  VectorXd b;
  double c_plus = 0.0;
  double c_minus = 0.0;
  double vol_I = 0.0;
  double vol_J = 0.0;
  double vol_V = 0.0;
};

/// Label constraints x_i = ĉ₊, x_j = ĉ₋ and the balance constraint (Dx)ᵀ1 = 0.
ConstraintSystem encode_constraints(const ImageGraph& graph, const LabelSet& labels);

/// A = D^{−1/2}(D−W)D^{−1/2}, C = D^{−1/2}N, under v = D^{1/2}x.
CrqProblem to_crqopt(const ImageGraph& graph, const ConstraintSystem& cons);

/// cut(A,B)/vol(A) + cut(A,B)/vol(B) for the partition given by `mask` (true = A).
double ncut(const ImageGraph& graph, const std::vector<std::uint8_t>& mask);

struct ConstraintCheck {
  double label_error = 0.0;    ///< max deviation from ĉ± over labeled pixels
  double balance_error = 0.0;  ///< |(Dx)ᵀ1|
  double norm_error = 0.0;     ///< |xᵀDx − 1|
};

ConstraintCheck check_constraints(const ImageGraph& graph, const LabelSet& labels,
                                  const ConstraintSystem& cons, const VectorXd& x);

struct SegmentParams {
  double delta = 0.1;
  int radius = 5;
};

struct SegmentResult {
  std::vector<std::uint8_t> mask;  ///< 1 where x > 0
  std::vector<double> heat;        ///< x rescaled to [0, 1]
  VectorXd x;
  ConstraintCheck check;
  double c_plus = 0.0;
  double c_minus = 0.0;
  double ncut = 0.0;
  int steps = 0;
  double runtime_seconds = 0.0;
  double graph_seconds = 0.0;
  std::size_t nnz = 0;
  bool converged = false;
};

/// Full pipeline. When the solver stops at maxit, the partial result is returned with converged = false.
SegmentResult segment(const GrayImage& image, const LabelSet& labels, const SegmentParams& params,
                      const SolveOptions& opts = SolveOptions::clustering());

}  // namespace crq

#include "crq/clustering.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "crq/parallel.hpp"

namespace crq {

VectorXd ImageGraph::apply_W(const VectorXd& x) const {
  VectorXd y(size());
  parallel_for(0, size(), [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      double s = 0.0;
      for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += weights[p] * x(col_idx[p]);
      y(i) = s;
    }
  });
  return y;
}

Eigen::SparseMatrix<double> ImageGraph::W() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(nnz());
  for (Index i = 0; i < size(); ++i)
    for (std::int64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) t.emplace_back(i, col_idx[p], weights[p]);
  Eigen::SparseMatrix<double> w(size(), size());
  w.setFromTriplets(t.begin(), t.end());
  return w;
}

ImageGraph build_graph(const GrayImage& image, double delta, int radius) {
  if (radius < 1) throw Error(ErrorCode::InvalidArgument, "radius must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0,1)");
  if (image.width <= 0 || image.height <= 0 || static_cast<Index>(image.pixels.size()) != image.size())
    throw Error(ErrorCode::InvalidArgument, "malformed image");

  ImageGraph g;
  g.width = image.width;
  g.height = image.height;
  g.delta = delta;
  g.radius = radius;
  const Index n = g.size();
  const Index w = image.width;
  const Index h = image.height;
  const Index reach = radius - 1;

  const auto [lo_it, hi_it] = std::minmax_element(image.pixels.begin(), image.pixels.end());
  const double range = *hi_it - *lo_it;
  const double delta_f = delta * range * range;

  auto span = [reach](Index c, Index len) {
    return std::pair<Index, Index>{std::max<Index>(0, c - reach), std::min<Index>(len - 1, c + reach)};
  };

  g.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (Index r = 0; r < h; ++r) {
    const auto [r0, r1] = span(r, h);
    for (Index c = 0; c < w; ++c) {
      const auto [c0, c1] = span(c, w);
      g.row_ptr[r * w + c + 1] = (r1 - r0 + 1) * (c1 - c0 + 1) - 1;
    }
  }
  for (Index i = 0; i < n; ++i) g.row_ptr[i + 1] += g.row_ptr[i];
  g.col_idx.resize(static_cast<std::size_t>(g.row_ptr[n]));
  g.weights.resize(static_cast<std::size_t>(g.row_ptr[n]));
  g.degree.resize(n);

  parallel_for(0, h, [&](std::int64_t rlo, std::int64_t rhi) {
    for (Index r = rlo; r < rhi; ++r) {
      const auto [r0, r1] = span(r, h);
      for (Index c = 0; c < w; ++c) {
        const auto [c0, c1] = span(c, w);
        const Index i = r * w + c;
        const double fi = image.pixels[i];
        std::int64_t p = g.row_ptr[i];
        double d = 0.0;
        for (Index rr = r0; rr <= r1; ++rr) {
          for (Index cc = c0; cc <= c1; ++cc) {
            const Index j = rr * w + cc;
            if (j == i) continue;
            const double diff = image.pixels[j] - fi;
            const double wij = delta_f > 0.0 ? std::exp(-diff * diff / delta_f) : 1.0;
            g.col_idx[p] = static_cast<std::int32_t>(j);
            g.weights[p] = wij;
            d += wij;
            ++p;
          }
        }
        g.degree(i) = d;
      }
    }
  });
  if (!(g.degree.minCoeff() > 0.0)) throw Error(ErrorCode::IsolatedPixel, "pixel with zero degree");
  return g;
}

namespace {

std::vector<Index> normalized(std::vector<Index> idx, Index n) {
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  if (!idx.empty() && (idx.front() < 0 || idx.back() >= n))
    throw Error(ErrorCode::InvalidArgument, "label index out of range");
  return idx;
}

}  // namespace

ConstraintSystem encode_constraints(const ImageGraph& graph, const LabelSet& labels) {
  const Index n = graph.size();
  const std::vector<Index> I = normalized(labels.I, n);
  const std::vector<Index> J = normalized(labels.J, n);
  if (I.empty() || J.empty()) throw Error(ErrorCode::EmptySide, "both label sets must be nonempty");
  std::vector<Index> both;
  std::set_intersection(I.begin(), I.end(), J.begin(), J.end(), std::back_inserter(both));
  if (!both.empty()) throw Error(ErrorCode::InvalidArgument, "a pixel carries both labels");

  ConstraintSystem cs;
  for (Index i : I) cs.vol_I += graph.degree(i);
  for (Index j : J) cs.vol_J += graph.degree(j);
  cs.vol_V = graph.degree.sum();
  cs.c_plus = std::sqrt(cs.vol_J / (cs.vol_I * cs.vol_V));
  cs.c_minus = -std::sqrt(cs.vol_I / (cs.vol_J * cs.vol_V));

  const Index m = static_cast<Index>(I.size() + J.size()) + 1;
  cs.N = MatrixXd::Zero(n, m);
  cs.b = VectorXd::Zero(m);
  Index col = 0;
  for (Index i : I) {
    cs.N(i, col) = 1.0;
    cs.b(col++) = cs.c_plus;
  }
  for (Index j : J) {
    cs.N(j, col) = 1.0;
    cs.b(col++) = cs.c_minus;
  }
  cs.N.col(col) = graph.degree;
  return cs;
}

CrqProblem to_crqopt(const ImageGraph& graph, const ConstraintSystem& cons) {
  if (!(graph.degree.minCoeff() > 0.0)) throw Error(ErrorCode::IsolatedPixel, "pixel with zero degree");
  auto g = std::make_shared<const ImageGraph>(graph);
  auto inv_sqrt_d = std::make_shared<const VectorXd>(graph.degree.cwiseSqrt().cwiseInverse());
  LinearOperator a;
  a.n = graph.size();
  a.apply = [g, inv_sqrt_d](const VectorXd& v) -> VectorXd {
    const VectorXd y = inv_sqrt_d->cwiseProduct(v);
    return v - inv_sqrt_d->cwiseProduct(g->apply_W(y));
  };
  MatrixXd c = inv_sqrt_d->asDiagonal() * cons.N;
  return make_problem(std::move(a), std::move(c), cons.b);
}

double ncut(const ImageGraph& graph, const std::vector<std::uint8_t>& mask) {
  if (static_cast<Index>(mask.size()) != graph.size()) throw Error(ErrorCode::InvalidArgument, "mask size");
  double cut = 0.0, vol_a = 0.0, vol_b = 0.0;
  for (Index i = 0; i < graph.size(); ++i) {
    (mask[i] ? vol_a : vol_b) += graph.degree(i);
    if (!mask[i]) continue;
    for (std::int64_t p = graph.row_ptr[i]; p < graph.row_ptr[i + 1]; ++p)
      if (!mask[graph.col_idx[p]]) cut += graph.weights[p];
  }
  if (vol_a == 0.0 || vol_b == 0.0) return std::numeric_limits<double>::infinity();
  return cut / vol_a + cut / vol_b;
}

ConstraintCheck check_constraints(const ImageGraph& graph, const LabelSet& labels,
                                  const ConstraintSystem& cons, const VectorXd& x) {
  ConstraintCheck c;
  for (Index i : labels.I) c.label_error = std::max(c.label_error, std::abs(x(i) - cons.c_plus));
  for (Index j : labels.J) c.label_error = std::max(c.label_error, std::abs(x(j) - cons.c_minus));
  c.balance_error = std::abs(graph.degree.dot(x));
  c.norm_error = std::abs(x.dot(graph.degree.cwiseProduct(x)) - 1.0);
  return c;
}

SegmentResult segment(const GrayImage& image, const LabelSet& labels, const SegmentParams& params,
                      const SolveOptions& opts) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const ImageGraph graph = build_graph(image, params.delta, params.radius);
  const auto t1 = Clock::now();
  const ConstraintSystem cons = encode_constraints(graph, labels);
  const CrqProblem problem = to_crqopt(graph, cons);

  CrqSolution sol;
  bool converged = true;
  try {
    sol = solve(problem, opts);
  } catch (const NotConverged& e) {
    sol = e.solution();
    converged = false;
  }
  const auto t2 = Clock::now();

  SegmentResult r;
  r.converged = converged;
  r.steps = sol.k;
  r.nnz = graph.nnz();
  r.c_plus = cons.c_plus;
  r.c_minus = cons.c_minus;
  r.x = graph.degree.cwiseSqrt().cwiseInverse().cwiseProduct(sol.v);
  r.mask.resize(static_cast<std::size_t>(graph.size()));
  for (Index i = 0; i < graph.size(); ++i) r.mask[i] = r.x(i) > 0.0 ? 1 : 0;
  const double lo = r.x.minCoeff();
  const double hi = r.x.maxCoeff();
  r.heat.resize(r.mask.size());
  for (Index i = 0; i < graph.size(); ++i) r.heat[i] = hi > lo ? (r.x(i) - lo) / (hi - lo) : 0.0;
  r.check = check_constraints(graph, labels, cons, r.x);
  r.ncut = ncut(graph, r.mask);
  r.graph_seconds = std::chrono::duration<double>(t1 - t0).count();
  r.runtime_seconds = std::chrono::duration<double>(t2 - t0).count();
  return r;
}

}  // namespace crq

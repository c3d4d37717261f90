#include "crq/instances.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "crq/random.hpp"
#include "crq/secular.hpp"

namespace crq {

void InstanceSpec::validate() const {
  if (!(alpha < beta)) throw Error(ErrorCode::InvalidArgument, "need alpha < beta");
  if (!(zeta > 0.0 && zeta < 1.0)) throw Error(ErrorCode::InvalidArgument, "need 0 < zeta < 1");
  if (!(m >= 1 && m < n)) throw Error(ErrorCode::InvalidArgument, "need 1 <= m < n");
  const Index min_r = spectrum_kind == SpectrumKind::ChebyshevPlusIsolated ? 3 : 2;
  if (n - m < min_r) throw Error(ErrorCode::InvalidArgument, "n - m too small for the spectrum");
}

VectorXd chebyshev_extreme_nodes(Index l, double alpha, double beta) {
  if (!(alpha < beta)) throw Error(ErrorCode::InvalidArgument, "need alpha < beta");
  if (l < 1) throw Error(ErrorCode::InvalidArgument, "need l >= 1");
  const double omega = (beta - alpha) / 2.0;
  const double tau = -(alpha + beta) / (beta - alpha);
  VectorXd t(l + 1);
  for (Index j = 0; j <= l; ++j)
    t(j) = omega * (std::cos(static_cast<double>(j) * std::numbers::pi / static_cast<double>(l)) - tau);
  t(0) = beta;
  t(l) = alpha;
  return t;
}

GeneratedInstance generate(const InstanceSpec& spec) {
  spec.validate();
  const Index n = spec.n, m = spec.m, r = n - m;
  Rng rng(spec.rng_seed);

  VectorXd h(r);
  if (spec.spectrum_kind == SpectrumKind::ChebyshevExtreme) {
    h = chebyshev_extreme_nodes(r - 1, spec.alpha, spec.beta);
  } else {
    h.head(r - 1) = chebyshev_extreme_nodes(r - 2, spec.alpha, spec.beta);
    h(r - 1) = spec.iso_value;
  }
  VectorXd g0(r);
  if (spec.g0_kind == G0Kind::Ones) {
    g0.setOnes();
  } else {
    for (Index i = 0; i < r; ++i) g0(i) = std::exp(static_cast<double>(i + 1) * spec.eta);
  }
  if ((h.array() == 0.0).any()) throw Error(ErrorCode::SingularH, "H has a zero eigenvalue");

  VectorXd a = random_normal(m, rng);
  a *= (1.0 / spec.zeta) / a.norm();
  const MatrixXd c = random_normal(n, m, rng);
  Eigen::HouseholderQR<MatrixXd> qr(c);
  MatrixXd s = qr.householderQ() * MatrixXd::Identity(n, n);
  const MatrixXd rr = qr.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
  const MatrixXd s2 = s.leftCols(m);
  const MatrixXd s1 = s.rightCols(r);
  const VectorXd b = spec.zeta * spec.zeta * (rr.transpose() * a);
  const double a22 = g0.dot(g0.cwiseQuotient(h)) / (spec.zeta * spec.zeta);

  GeneratedInstance inst;
  inst.S = s;
  inst.a = a;
  inst.a22 = a22;

  auto shared = std::make_shared<const MatrixXd>(s);
  LinearOperator op;
  op.n = n;
  op.apply = [shared, h, g0, a, a22, m, r](const VectorXd& v) -> VectorXd {
    const MatrixXd& sm = *shared;
    const VectorXd t = sm.transpose() * v;  // [S₂ᵀv; S₁ᵀv]
    const auto t2 = t.head(m);
    const auto t1 = t.tail(r);
    VectorXd out(m + r);
    out.head(m) = a * g0.dot(t1) + a22 * t2;
    out.tail(r) = h.cwiseProduct(t1) + g0 * a.dot(t2);
    return sm * out;
  };
  inst.problem = CrqProblem{std::move(op), c, b};

  GroundTruth& gt = inst.truth;
  gt.h_diag = h;
  gt.g0 = g0;
  gt.gamma = std::sqrt(1.0 - spec.zeta * spec.zeta);
  VectorXd sorted = h;
  std::sort(sorted.data(), sorted.data() + r);
  std::vector<Index> idx(r);
  for (Index i = 0; i < r; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](Index x, Index y) { return h(x) < h(y); });
  VectorXd xi(r);
  for (Index i = 0; i < r; ++i) xi(i) = g0(idx[i]);
  gt.lambda_star = smallest_root(SecularSpec{sorted, xi, gt.gamma}).lambda;
  gt.lambda_min_h = sorted(0);
  gt.kappa = (sorted(r - 1) - gt.lambda_star) / (sorted(0) - gt.lambda_star);
  gt.kappa_plus = (sorted(r - 1) - gt.lambda_star) / (sorted(1) - gt.lambda_star);
  return inst;
}

DenseReduction GeneratedInstance::reduction() const {
  const Index m = problem.m();
  const Index r = problem.n() - m;
  const MatrixXd s2 = S.leftCols(m);
  const MatrixXd s1 = S.rightCols(r);
  const double zeta2 = 1.0 - truth.gamma * truth.gamma;
  const VectorXd n0 = zeta2 * (s2 * a);
  const VectorXd b0 = s1 * truth.g0;
  DenseReduction red;
  red.S1 = s1;
  red.S2 = s2;
  red.H = truth.h_diag.asDiagonal();
  red.g0 = truth.g0;
  red.n0 = n0;
  red.b0 = b0;
  red.gamma = truth.gamma;
  std::vector<Index> idx(r);
  for (Index i = 0; i < r; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](Index x, Index y) { return truth.h_diag(x) < truth.h_diag(y); });
  red.theta.resize(r);
  red.Y = MatrixXd::Zero(r, r);
  for (Index i = 0; i < r; ++i) {
    red.theta(i) = truth.h_diag(idx[i]);
    red.Y(idx[i], i) = 1.0;
  }
  return red;
}

MatrixXd GeneratedInstance::dense_A() const { return problem.A.materialize(); }

RoundtripReport verify_roundtrip(const GeneratedInstance& inst, bool throw_on_fail) {
  const CrqProblem& p = inst.problem;
  const Index m = p.m(), r = p.n() - m;
  RoundtripReport rep;
  const Setup setup(p);
  // Basis of N(Cᵀ) from an independent factorization of C.
  Eigen::HouseholderQR<MatrixXd> qr(p.C);
  const MatrixXd q = qr.householderQ() * MatrixXd::Identity(p.n(), p.n());
  const MatrixXd u1 = q.rightCols(r);
  // Align with the construction basis: S₁ = U₁(U₁ᵀS₁).
  const MatrixXd s1 = inst.S.rightCols(r);
  const MatrixXd rot = u1.transpose() * s1;
  MatrixXd au1(p.n(), r);
  for (Index j = 0; j < r; ++j) au1.col(j) = p.A(u1.col(j));
  const MatrixXd h_est = rot.transpose() * (u1.transpose() * au1) * rot;
  const MatrixXd h = inst.truth.h_diag.asDiagonal();
  rep.h_error = (h_est - h).norm() / h.norm();
  rep.g0_error = (rot.transpose() * (u1.transpose() * setup.feas.b0) - inst.truth.g0).norm() / inst.truth.g0.norm();
  rep.gamma_error = std::abs(setup.feas.gamma - inst.truth.gamma);

  const VectorXd hinv_g0 = inst.truth.g0.cwiseQuotient(inst.truth.h_diag);
  const double c = inst.truth.g0.dot(hinv_g0);
  const MatrixXd a12 = inst.truth.g0 * inst.a.transpose();
  const MatrixXd schur = inst.a22 * MatrixXd::Identity(m, m) -
                         a12.transpose() * (inst.truth.h_diag.cwiseInverse().asDiagonal() * a12);
  const MatrixXd expect = c * (inst.a.squaredNorm() * MatrixXd::Identity(m, m) - inst.a * inst.a.transpose());
  rep.schur_error = (schur - expect).norm() / std::max(expect.norm(), 1.0);

  const bool h_pos = (inst.truth.h_diag.array() > 0.0).all();
  if (h_pos && p.n() <= 2000) {
    const MatrixXd ad = p.A.materialize();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (ad + ad.transpose()), Eigen::EigenvaluesOnly);
    rep.min_eig_a = es.eigenvalues()(0) / es.eigenvalues().cwiseAbs().maxCoeff();
  }
  rep.ok = rep.h_error <= 1e-10 && rep.g0_error <= 1e-10 && rep.gamma_error <= 1e-12 &&
           rep.schur_error <= 1e-10 && (!h_pos || rep.min_eig_a >= -1e-10);
  if (!rep.ok && throw_on_fail) {
    std::ostringstream os;
    os << "h_error=" << rep.h_error << " g0_error=" << rep.g0_error << " gamma_error=" << rep.gamma_error
       << " schur_error=" << rep.schur_error << " min_eig_a=" << rep.min_eig_a;
    throw Error(ErrorCode::VerificationFailed, os.str());
  }
  return rep;
}

BenchRun bench(const GeneratedInstance& inst, SolveOptions opts) {
  opts.checkstep = 1;
  opts.record_iterates = true;
  BenchRun out;
  out.reference = direct_solve(inst.problem, inst.reduction());
  try {
    out.run = solve(inst.problem, opts);
    out.converged = true;
  } catch (const NotConverged& e) {
    out.run = e.solution();
  }
  VectorXd sorted = inst.truth.h_diag;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  out.inputs = make_bound_inputs(sorted, inst.truth.lambda_star, inst.truth.gamma, inst.truth.g0.norm());
  out.rows = error_history(out.run, out.reference);
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

InstanceSpec parse_instance_spec(const std::string& text) {
  InstanceSpec spec;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "expected key=value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "n") spec.n = std::stoll(val);
      else if (key == "m") spec.m = std::stoll(val);
      else if (key == "alpha") spec.alpha = std::stod(val);
      else if (key == "beta") spec.beta = std::stod(val);
      else if (key == "zeta") spec.zeta = std::stod(val);
      else if (key == "eta") spec.eta = std::stod(val);
      else if (key == "seed") spec.rng_seed = std::stoull(val);
      else if (key == "iso_value") spec.iso_value = std::stod(val);
      else if (key == "g0_kind") {
        if (val == "ones") spec.g0_kind = G0Kind::Ones;
        else if (val == "geometric") spec.g0_kind = G0Kind::Geometric;
        else throw Error(ErrorCode::InvalidArgument, "unknown g0_kind: " + val);
      } else if (key == "spectrum_kind") {
        if (val == "chebyshev") spec.spectrum_kind = SpectrumKind::ChebyshevExtreme;
        else if (val == "chebyshev_isolated") spec.spectrum_kind = SpectrumKind::ChebyshevPlusIsolated;
        else throw Error(ErrorCode::InvalidArgument, "unknown spectrum_kind: " + val);
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown key: " + key);
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidArgument, "bad value for " + key + ": " + val);
    }
  }
  spec.validate();
  return spec;
}

std::string format_instance_spec(const InstanceSpec& spec) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "n=" << spec.n << "\nm=" << spec.m << "\nalpha=" << spec.alpha << "\nbeta=" << spec.beta
     << "\nzeta=" << spec.zeta << "\ng0_kind=" << (spec.g0_kind == G0Kind::Ones ? "ones" : "geometric")
     << "\neta=" << spec.eta << "\nspectrum_kind="
     << (spec.spectrum_kind == SpectrumKind::ChebyshevExtreme ? "chebyshev" : "chebyshev_isolated")
     << "\niso_value=" << spec.iso_value << "\nseed=" << spec.rng_seed << "\n";
  return os.str();
}

}  // namespace crq

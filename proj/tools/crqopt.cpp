#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "crq/clustering.hpp"
#include "crq/driver.hpp"
#include "crq/instances.hpp"
#include "crq/io.hpp"
#include "crq/reference.hpp"

namespace fs = std::filesystem;
using namespace crq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitInfeasible = 3;

struct SolverFlags {
  std::string method = "lgopt";
  double tol = 0.0;
  int maxit = 0;
  int minit = 0;
  int checkstep = 0;
  std::uint64_t seed = 0;
};

void add_solver_flags(CLI::App* app, SolverFlags& f) {
  app->add_option("--method", f.method, "lgopt or qepmin")->check(CLI::IsMember({"lgopt", "qepmin"}));
  app->add_option("--tol", f.tol, "stopping tolerance on the residual estimate");
  app->add_option("--maxit", f.maxit, "maximum Lanczos steps");
  app->add_option("--minit", f.minit, "minimum Lanczos steps");
  app->add_option("--checkstep", f.checkstep, "steps between stopping tests");
  app->add_option("--seed", f.seed, "random seed");
}

/// Applies the flags given on the command line on top of `base`.
SolveOptions to_options(const CLI::App* app, const SolverFlags& f, SolveOptions base) {
  base.method = f.method == "qepmin" ? Method::QEPmin : Method::LGopt;
  if (app->count("--tol")) base.tol = f.tol;
  if (app->count("--maxit")) base.maxit = f.maxit;
  if (app->count("--minit")) base.minit = f.minit;
  if (app->count("--checkstep")) base.checkstep = f.checkstep;
  base.rng_seed = f.seed;
  base.validate();
  return base;
}

struct InstanceFlags {
  std::string spec_file;
  InstanceSpec spec;
  std::string g0 = "ones";
  std::string spectrum = "chebyshev";
};

void add_instance_flags(CLI::App* app, InstanceFlags& f) {
  app->add_option("--spec", f.spec_file, "instance spec file (key=value); flags override it");
  app->add_option("--n", f.spec.n, "dimension");
  app->add_option("--m", f.spec.m, "number of constraints");
  app->add_option("--alpha", f.spec.alpha, "smallest node");
  app->add_option("--beta", f.spec.beta, "largest node");
  app->add_option("--zeta", f.spec.zeta, "norm of the minimum-norm feasible point");
  app->add_option("--g0", f.g0, "ones or geometric")->check(CLI::IsMember({"ones", "geometric"}));
  app->add_option("--eta", f.spec.eta, "exponent for geometric g0");
  app->add_option("--spectrum", f.spectrum, "chebyshev or chebyshev_isolated")
      ->check(CLI::IsMember({"chebyshev", "chebyshev_isolated"}));
  app->add_option("--iso", f.spec.iso_value, "isolated eigenvalue");
}

InstanceSpec resolve_spec(const CLI::App* app, const InstanceFlags& f, std::uint64_t seed) {
  InstanceSpec spec = f.spec_file.empty() ? InstanceSpec{} : parse_instance_spec(read_text_file(f.spec_file));
  if (app->count("--n")) spec.n = f.spec.n;
  if (app->count("--m")) spec.m = f.spec.m;
  if (app->count("--alpha")) spec.alpha = f.spec.alpha;
  if (app->count("--beta")) spec.beta = f.spec.beta;
  if (app->count("--zeta")) spec.zeta = f.spec.zeta;
  if (app->count("--eta")) spec.eta = f.spec.eta;
  if (app->count("--iso")) spec.iso_value = f.spec.iso_value;
  if (app->count("--g0")) spec.g0_kind = f.g0 == "geometric" ? G0Kind::Geometric : G0Kind::Ones;
  if (app->count("--spectrum"))
    spec.spectrum_kind =
        f.spectrum == "chebyshev_isolated" ? SpectrumKind::ChebyshevPlusIsolated : SpectrumKind::ChebyshevExtreme;
  if (app->count("--seed")) spec.rng_seed = seed;
  spec.validate();
  return spec;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

void write_solution(const fs::path& out, const CrqProblem& problem, const CrqSolution& sol, bool converged) {
  fs::create_directories(out);
  std::ostringstream v, hist;
  write_vector(v, sol.v);
  write_history_csv(hist, sol);
  write_text_file(out / "v.txt", v.str());
  write_text_file(out / "history.csv", hist.str());
  const auto res = feasibility_residual(problem, sol.v);
  KeyValues kv{{"mu", fmt(sol.mu)},
               {"objective", fmt(sol.objective)},
               {"k", std::to_string(sol.k)},
               {"case", to_string(sol.solution_case)},
               {"converged", converged ? "true" : "false"},
               {"broke_down", sol.broke_down ? "true" : "false"},
               {"norm_defect", fmt(res.norm_defect)},
               {"constraint_residual", fmt(res.constraint_residual)}};
  write_text_file(out / "summary.txt", format_key_values(kv));
}

int run_solve(const CLI::App* app, const std::string& manifest, const std::string& out, const SolverFlags& f) {
  const SolveOptions opts = to_options(app, f, SolveOptions::synthetic());
  const CrqProblem problem = load_problem(manifest, f.seed);
  try {
    const CrqSolution sol = solve(problem, opts);
    write_solution(out, problem, sol, true);
    std::cout << "mu=" << fmt(sol.mu) << "\nobjective=" << fmt(sol.objective) << "\nk=" << sol.k << '\n';
    return kExitOk;
  } catch (const NotConverged& e) {
    write_solution(out, problem, e.solution(), false);
    std::cerr << e.what() << '\n';
    return kExitNotConverged;
  }
}

int run_gen(const InstanceSpec& spec, const std::string& out) {
  const GeneratedInstance inst = generate(spec);
  verify_roundtrip(inst);
  const fs::path dir(out);
  save_problem(dir, inst.dense_A(), inst.problem.C, inst.problem.b);
  write_text_file(dir / "spec.txt", format_instance_spec(spec));
  const GroundTruth& t = inst.truth;
  KeyValues kv{{"lambda_star", fmt(t.lambda_star)}, {"kappa", fmt(t.kappa)},
               {"kappa_plus", fmt(t.kappa_plus)},   {"gamma", fmt(t.gamma)},
               {"lambda_min_h", fmt(t.lambda_min_h)}, {"norm_g0", fmt(t.g0.norm())}};
  write_text_file(dir / "truth.txt", format_key_values(kv));
  std::cout << format_key_values(kv);
  return kExitOk;
}

int run_bench(const InstanceSpec& spec, const CLI::App* app, const SolverFlags& f, const std::string& out) {
  const GeneratedInstance inst = generate(spec);
  const BenchRun b = bench(inst, to_options(app, f, SolveOptions::synthetic()));
  std::ostringstream csv;
  write_bench_csv(csv, b.rows, b.inputs);
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(out, csv.str());
  }
  return b.converged ? kExitOk : kExitNotConverged;
}

int run_segment(const CLI::App* app, const std::string& image_path, const std::string& labels_path,
                const SegmentParams& params, const std::string& out, const SolverFlags& f) {
  const SolveOptions opts = to_options(app, f, SolveOptions::clustering());
  const GrayImage img = read_pgm(fs::path(image_path));
  std::ifstream lf(labels_path);
  if (!lf) throw Error(ErrorCode::Io, "cannot open " + labels_path);
  const LabelSet labels = read_labels(lf, img.width, img.height);
  const SegmentResult r = segment(img, labels, params, opts);

  const fs::path dir(out);
  fs::create_directories(dir);
  std::ostringstream heat, mask;
  write_pgm16(heat, img.width, img.height, r.heat);
  write_pgm_mask(mask, img.width, img.height, r.mask);
  write_text_file(dir / "heat.pgm", heat.str());
  write_text_file(dir / "mask.pgm", mask.str());
  KeyValues kv{{"steps", std::to_string(r.steps)},
               {"converged", r.converged ? "true" : "false"},
               {"ncut", fmt(r.ncut)},
               {"c_plus", fmt(r.c_plus)},
               {"c_minus", fmt(r.c_minus)},
               {"label_error", fmt(r.check.label_error)},
               {"balance_error", fmt(r.check.balance_error)},
               {"norm_error", fmt(r.check.norm_error)},
               {"nnz", std::to_string(r.nnz)},
               {"runtime_seconds", fmt(r.runtime_seconds)}};
  write_text_file(dir / "stats.txt", format_key_values(kv));
  std::cout << format_key_values(kv);
  return r.converged ? kExitOk : kExitNotConverged;
}

int run_validate(const std::string& manifest, std::uint64_t seed) {
  const CrqProblem problem = load_problem(manifest, seed);
  const DenseReduction red = build_reduction(problem);
  const CrqSolution direct = direct_solve(problem, red);
  const EquivalenceReport eq = equivalence_maps(red, red.gamma);
  const DualReport dual = dual_check(problem);
  const SpectrumCheck spec = projected_spectrum_check(red);
  const auto feas = feasibility_residual(problem, direct.v);
  const double scale = 1.0 + std::abs(direct.objective);
  const double norm_h = std::max(red.theta.cwiseAbs().maxCoeff(), 1.0);

  struct Check {
    std::string name;
    double value;
    double limit;
  };
  const std::vector<Check> checks{
      {"equivalence_lambda_gap", eq.lambda_gap, 1e-8 * (1.0 + std::abs(eq.lambda_plgopt))},
      {"equivalence_residual", eq.max_residual(), 1e-8},
      {"dual_gap", std::abs(dual.gap), 1e-6 * scale},
      {"spectrum_difference", spec.max_difference, 1e-10 * norm_h},
      {"norm_defect", feas.norm_defect, 1e-10},
      {"constraint_residual", feas.constraint_residual, 1e-10},
  };
  bool ok = true;
  std::cout << "lambda=" << fmt(direct.mu) << "\nobjective=" << fmt(direct.objective) << '\n';
  for (const Check& c : checks) {
    const bool pass = c.value <= c.limit;
    ok = ok && pass;
    std::cout << c.name << '=' << fmt(c.value) << (pass ? " PASS" : " FAIL") << '\n';
  }
  std::cout << "lambda_min_M=" << fmt(dual.lambda_min_M) << '\n';
  if (problem.b.norm() > 0.0 && !(dual.lambda_min_M > 0.0)) {
    std::cout << "lambda_min_M_positive FAIL\n";
    ok = false;
  }
  return ok ? kExitOk : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linearly constrained Rayleigh quotient solver"};
  app.require_subcommand(1);

  SolverFlags solver_flags;
  InstanceFlags inst_flags;

  auto* solve_cmd = app.add_subcommand("solve", "solve a problem given by a manifest of A, C, b");
  std::string manifest, out = "out";
  solve_cmd->add_option("--problem", manifest, "manifest file")->required();
  solve_cmd->add_option("--out", out, "output directory");
  add_solver_flags(solve_cmd, solver_flags);

  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic instance with known solution");
  std::uint64_t gen_seed = 0;
  add_instance_flags(gen_cmd, inst_flags);
  gen_cmd->add_option("--seed", gen_seed, "random seed");
  gen_cmd->add_option("--out", out, "output directory");

  auto* bench_cmd = app.add_subcommand("bench", "error and bound history on a synthetic instance");
  std::string bench_out;
  add_instance_flags(bench_cmd, inst_flags);
  add_solver_flags(bench_cmd, solver_flags);
  bench_cmd->add_option("--out", bench_out, "CSV path; stdout when omitted");

  auto* seg_cmd = app.add_subcommand("segment", "constrained normalized-cut segmentation");
  std::string image, labels;
  SegmentParams params;
  seg_cmd->add_option("--image", image, "PGM image")->required();
  seg_cmd->add_option("--labels", labels, "labels file")->required();
  seg_cmd->add_option("--delta", params.delta, "intensity scale fraction");
  seg_cmd->add_option("--radius", params.radius, "neighborhood radius");
  seg_cmd->add_option("--out", out, "output directory");
  add_solver_flags(seg_cmd, solver_flags);

  auto* val_cmd = app.add_subcommand("validate", "run the dense reference validators");
  std::uint64_t val_seed = 0;
  val_cmd->add_option("--problem", manifest, "manifest file")->required();
  val_cmd->add_option("--seed", val_seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve_cmd) return run_solve(solve_cmd, manifest, out, solver_flags);
    if (*gen_cmd) return run_gen(resolve_spec(gen_cmd, inst_flags, gen_seed), out);
    if (*bench_cmd) return run_bench(resolve_spec(bench_cmd, inst_flags, solver_flags.seed), bench_cmd, solver_flags,
                                     bench_out);
    if (*seg_cmd) return run_segment(seg_cmd, image, labels, params, out, solver_flags);
    if (*val_cmd) return run_validate(manifest, val_seed);
  } catch (const NotConverged& e) {
    std::cerr << e.what() << '\n';
    return kExitNotConverged;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == ErrorCode::Infeasible ? kExitInfeasible : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

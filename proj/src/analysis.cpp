#include "crq/analysis.hpp"

#include <cmath>
#include <iomanip>

namespace crq {

double BoundInputs::norm_h_shift() const {
  return std::max(std::abs(theta_min - lambda_star), std::abs(theta_max - lambda_star));
}

double BoundInputs::kappa() const { return (theta_max - lambda_star) / (theta_min - lambda_star); }

double BoundInputs::kappa_plus() const { return (theta_max - lambda_star) / (theta_2 - lambda_star); }

BoundInputs make_bound_inputs(const VectorXd& theta, double lambda_star, double gamma, double norm_b0) {
  if (theta.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty spectrum");
  BoundInputs in;
  in.theta_min = theta(0);
  in.theta_2 = theta.size() > 1 ? theta(1) : theta(0);
  in.theta_max = theta(theta.size() - 1);
  in.lambda_star = lambda_star;
  in.gamma = gamma;
  in.norm_b0 = norm_b0;
  return in;
}

double gamma_factor(double kappa) {
  const double s = std::sqrt(kappa);
  return (s + 1.0) / (s - 1.0);
}

double inverse_chebyshev_growth(double kappa, double k) {
  // 1/(Γ^k + Γ^{-k}) = e^{-k ln Γ} / (1 + e^{-2k ln Γ}).
  const double lg = std::log(gamma_factor(kappa));
  const double t = std::exp(-k * lg);
  return t / (1.0 + t * t);
}

double chebyshev_t(int k, double x) {
  if (x >= 1.0) return std::cosh(k * std::acosh(x));
  return std::cos(k * std::acos(x));
}

Bounds kappa_bounds(const BoundInputs& in, int k) {
  Bounds b;
  const double kappa = in.kappa();
  if (!(kappa > 1.0 + 1e-14)) return b;
  const double g = inverse_chebyshev_growth(kappa, k);
  const double sk = std::sqrt(kappa);
  const double nh = in.norm_h_shift();
  b.b1 = 16.0 * in.gamma * in.gamma * nh * g * g;
  b.b2 = 4.0 * in.gamma * sk * g;
  b.b3 = 16.0 * nh * g * g + (4.0 / in.gamma) * in.norm_b0 * sk * g;
  return b;
}

Bounds kappa_plus_bounds(const BoundInputs& in, int k) {
  Bounds b;
  if (!(in.theta_2 > in.lambda_star)) return b;
  const double kp = in.kappa_plus();
  if (!(kp > 1.0 + 1e-14)) return b;
  const double g = inverse_chebyshev_growth(kp, k - 1);
  const double pref = (in.theta_max - in.theta_min) / (in.theta_min - in.lambda_star);
  const double sk = std::sqrt(in.kappa());
  const double nh = in.norm_h_shift();
  b.b1 = 16.0 * in.gamma * in.gamma * nh * pref * g * g;
  b.b2 = 4.0 * in.gamma * sk * pref * g;
  b.b3 = pref * (16.0 * nh * g * g + (4.0 / in.gamma) * in.norm_b0 * sk * g);
  return b;
}

std::vector<ErrorRow> error_history(const CrqSolution& run, const CrqSolution& ref) {
  std::vector<ErrorRow> rows;
  const double h_star = ref.objective;
  for (const CheckRecord& r : run.history) {
    ErrorRow e;
    e.k = r.k;
    e.err1 = std::abs(r.objective - h_star) / std::abs(h_star);
    e.err2 = r.v.size() > 0 ? (r.v - ref.v).norm() : std::numeric_limits<double>::quiet_NaN();
    e.err3 = std::abs(r.mu - ref.mu) / std::abs(ref.mu);
    rows.push_back(e);
  }
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<ErrorRow>& rows, const BoundInputs& in) {
  os << "k,err1,err2,err3,b1,b2,b3,b1p,b2p,b3p\n";
  os << std::setprecision(17);
  for (const ErrorRow& r : rows) {
    const Bounds b = kappa_bounds(in, r.k);
    const Bounds p = kappa_plus_bounds(in, r.k);
    os << r.k << ',' << r.err1 << ',' << r.err2 << ',' << r.err3 << ',' << b.b1 << ',' << b.b2 << ','
       << b.b3 << ',' << p.b1 << ',' << p.b2 << ',' << p.b3 << '\n';
  }
}

}  // namespace crq

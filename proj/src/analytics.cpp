#include "gkp/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gkp/gkp_states.hpp"
#include "gkp/numerics.hpp"

namespace gkp::analytics {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);

void require_positive(double delta, const char* what) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument(std::string(what) + ": delta must be positive and finite");
  }
}

double cap(double p) { return std::clamp(p, 0.0, 0.5); }

}  // namespace

double p_err_homodyne_formula(double delta) {
  require_positive(delta, "p_err_homodyne_formula");
  // The argument is formed in extended precision: erfc amplifies its relative
  // error by ~2x^2, which alone would cost ~1e-14 at delta = 0.1.
  const long double x = std::sqrt(std::numbers::pi_v<long double>) / (2.0L * delta);
  return static_cast<double>(std::erfc(x));
}

double p_err_homodyne_asymptotic(double delta) {
  require_positive(delta, "p_err_homodyne_asymptotic");
  // Leading term of erfc(x) ~ exp(-x^2) / (x sqrt(pi)) with x = sqrt(pi) / (2 delta).
  return 2.0 / kPi * delta * std::exp(-kPi / (4.0 * delta * delta));
}

double p_err_simple_formula(double delta) {
  require_positive(delta, "p_err_simple_formula");
  return -0.5 * std::expm1(-kPi * delta * delta / 4.0);
}

double p_err_improved_formula(double delta, double lambda) {
  require_positive(delta, "p_err_improved_formula");
  // 1 - e^{-a}(e^{-b} + s) = (1 - e^{-a}) + e^{-a}((1 - e^{-b}) - s), which keeps
  // the small-delta cancellation as benign as possible.
  const double a = kPi * delta * delta / 4.0;
  const double b = lambda * lambda / (delta * delta);
  const double s = std::sin(kSqrtPi * lambda);
  return 0.5 * (-std::expm1(-a) + std::exp(-a) * (-std::expm1(-b) - s));
}

double stationarity_residual(double delta, double lambda) {
  const double d2 = delta * delta;
  return 2.0 * lambda / d2 * std::exp(-lambda * lambda / d2) - kSqrtPi * std::cos(kSqrtPi * lambda);
}

double optimal_lambda_seed(double delta) { return kSqrtPi * delta * delta / 2.0; }

double optimal_lambda(double delta) {
  if (!(delta > 0.0 && delta <= 0.5)) {
    throw std::invalid_argument("optimal_lambda: delta must lie in (0, 0.5], got " + std::to_string(delta));
  }
  // The residual is -sqrt(pi) at 0 and positive at delta / sqrt(2), where the
  // Gaussian term peaks; 4 delta^2 sqrt(pi) is the tighter bound at small delta.
  const double hi = std::min(4.0 * delta * delta * kSqrtPi, delta / std::sqrt(2.0));
  return numerics::find_root([delta](double l) { return stationarity_residual(delta, l); }, 0.0, hi,
                             1e-16);
}

double p_err_leading_order(double delta) {
  require_positive(delta, "p_err_leading_order");
  return kLeadingOrderCoefficient * std::pow(delta, 6);
}

double helstrom_formula(std::complex<double> overlap) {
  const double o2 = std::norm(overlap);
  if (o2 > (1.0 + 1e-12) * (1.0 + 1e-12)) {
    throw std::invalid_argument("helstrom_formula: |overlap| exceeds 1");
  }
  return 0.5 * (1.0 - std::sqrt(std::max(0.0, 1.0 - o2)));
}

double improved_homodyne_crossover_db(double lo_db, double hi_db) {
  auto gap = [](double db) {
    const double d = db_to_delta(db);
    return p_err_improved_formula(d, optimal_lambda(d)) - p_err_homodyne_formula(d);
  };
  return numerics::find_root(gap, lo_db, hi_db, 1e-12);
}

ErrorModelPoint evaluate_error_model(double delta, std::optional<double> lambda,
                                     std::optional<std::complex<double>> overlap) {
  ErrorModelPoint pt;
  pt.delta = delta;
  pt.lambda = lambda;
  pt.p_err_homodyne_raw = p_err_homodyne_formula(delta);
  pt.p_err_homodyne = cap(pt.p_err_homodyne_raw);
  pt.p_err_simple = cap(p_err_simple_formula(delta));
  pt.p_err_leading_order = cap(p_err_leading_order(delta));
  pt.out_of_model = delta > 0.5;
  if (lambda) {
    pt.p_err_improved_raw = p_err_improved_formula(delta, *lambda);
    pt.p_err_improved = cap(*pt.p_err_improved_raw);
    pt.out_of_model = pt.out_of_model || !in_small_lambda_regime(*lambda);
  }
  if (overlap) pt.p_err_helstrom = helstrom_formula(*overlap);
  return pt;
}

}  // namespace gkp::analytics

#pragma once

// Closed-form readout error probabilities and the interaction-strength optimizer.

#include <complex>
#include <numbers>
#include <optional>

namespace gkp::analytics {

// 5 pi^3 / 384 = 0.40373.
inline constexpr double kLeadingOrderCoefficient =
    5.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi / 384.0;

// Homodyne binning error, erfc(sqrt(pi) / (2 delta)). Raw value: exceeds 0.5 for large delta.
double p_err_homodyne_formula(double delta);
// (2 / pi) delta exp(-pi / (4 delta^2)); reference only, not used for reported values.
double p_err_homodyne_asymptotic(double delta);

// Single conditional-displacement readout: (1 - exp(-pi delta^2 / 4)) / 2.
double p_err_simple_formula(double delta);

// Readout with the extra P sigma_y interaction of strength lambda:
// (1 - exp(-pi delta^2 / 4) (exp(-lambda^2 / delta^2) + sin(sqrt(pi) lambda))) / 2.
// Valid for |lambda| << 1; see in_small_lambda_regime.
double p_err_improved_formula(double delta, double lambda);

inline bool in_small_lambda_regime(double lambda) { return lambda >= -0.3 && lambda <= 0.3; }

// d/dlambda of p_err_improved_formula up to the positive factor exp(-pi delta^2/4) / 2:
// (2 lambda / delta^2) exp(-lambda^2 / delta^2) - sqrt(pi) cos(sqrt(pi) lambda).
double stationarity_residual(double delta, double lambda);

// sqrt(pi) delta^2 / 2, the small-delta approximation of the minimizer.
double optimal_lambda_seed(double delta);

// Minimizer of p_err_improved_formula over lambda > 0: the first root of the
// stationarity condition. Requires 0 < delta <= 0.5 (std::invalid_argument otherwise).
double optimal_lambda(double delta);

// (5 pi^3 / 384) delta^6.
double p_err_leading_order(double delta);

// (1 - sqrt(1 - |overlap|^2)) / 2. Throws std::invalid_argument if |overlap| > 1 + 1e-12.
double helstrom_formula(std::complex<double> overlap);

// Squeezing (dB) at which p_err_improved(lambda*) equals p_err_homodyne, by
// bisection on [lo_db, hi_db].
double improved_homodyne_crossover_db(double lo_db = 7.0, double hi_db = 12.0);

struct ErrorModelPoint {
  double delta = 0.0;
  std::optional<double> lambda;
  // Capped to [0, 0.5].
  double p_err_homodyne = 0.0;
  double p_err_simple = 0.0;
  std::optional<double> p_err_improved;
  std::optional<double> p_err_helstrom;
  double p_err_leading_order = 0.0;
  // Formula output before capping.
  double p_err_homodyne_raw = 0.0;
  std::optional<double> p_err_improved_raw;
  bool out_of_model = false;  // delta > 0.5 or lambda outside the small-lambda regime
};

ErrorModelPoint evaluate_error_model(double delta, std::optional<double> lambda = std::nullopt,
                                     std::optional<std::complex<double>> overlap = std::nullopt);

}  // namespace gkp::analytics

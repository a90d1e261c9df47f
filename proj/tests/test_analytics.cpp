#include "doctest.h"

#include "approx.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "gkp/analytics.hpp"
#include "gkp/gkp_states.hpp"
#include "gkp/numerics.hpp"

using namespace gkp;
using namespace gkp::analytics;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

constexpr double kPi = std::numbers::pi;
const double kTen = std::sqrt(0.1);

// Improved-circuit error at 50 digits.
big improved_big(big delta, big lambda) {
  const big pi = boost::math::constants::pi<big>();
  return (1 - exp(-pi * delta * delta / 4) * (exp(-lambda * lambda / (delta * delta)) + sin(sqrt(pi) * lambda))) / 2;
}

big argmin_big(double delta) {
  const big d(delta);
  const auto m = numerics::golden_section_minimize([&](big l) { return improved_big(d, l); }, big(0),
                                                   big(delta / std::sqrt(2.0)), big("1e-30"), 2000);
  return m.argmin;
}

}  // namespace

TEST_CASE("homodyne formula matches a 50-digit erfc") {
  for (double delta : {0.1, 0.2, kTen, 0.5, 0.9, 3.0}) {
    const big ref = boost::math::erfc(sqrt(boost::math::constants::pi<big>()) / (2 * big(delta)));
    const double got = p_err_homodyne_formula(delta);
    CHECK(std::abs(got - static_cast<double>(ref)) <= 1e-14 * static_cast<double>(ref));
  }
}

TEST_CASE("homodyne formula at 10 dB and its asymptote") {
  const double p = p_err_homodyne_formula(kTen);
  CHECK(p == rel(7.39123e-5, 1e-5));
  CHECK(std::abs(p_err_homodyne_asymptotic(kTen) - p) < 0.1 * p);
}

TEST_CASE("homodyne formula is monotone in delta") {
  CHECK(p_err_homodyne_formula(0.2) < p_err_homodyne_formula(0.3));
  CHECK(p_err_homodyne_formula(0.3) < p_err_homodyne_formula(0.4));
}

TEST_CASE("homodyne formula reported raw, capped only in the error model") {
  CHECK(p_err_homodyne_formula(100.0) == rel(0.990, 1e-3));
  const ErrorModelPoint pt = evaluate_error_model(100.0);
  CHECK(pt.p_err_homodyne == 0.5);
  CHECK(pt.p_err_homodyne_raw == rel(0.990, 1e-3));
  CHECK(pt.out_of_model);
  CHECK_THROWS_AS(p_err_homodyne_formula(0.0), std::invalid_argument);
}

TEST_CASE("simple-circuit formula") {
  CHECK(p_err_simple_formula(kTen) == rel(0.0377674, 1e-5));
  CHECK(p_err_simple_formula(0.2) == rel(0.0154638, 1e-5));
  // pi Delta^2 / 8 is within 1% only up to about Delta = 0.16.
  for (double delta : {0.05, 0.1, 0.15}) {
    CHECK(std::abs(p_err_simple_formula(delta) - kPi / 8.0 * delta * delta) < 0.01 * p_err_simple_formula(delta));
  }
  // Small argument stays accurate.
  CHECK(p_err_simple_formula(1e-6) == rel(kPi / 8.0 * 1e-12, 1e-9));
  CHECK(1.0 - 2.0 * p_err_simple_formula(kTen) == rel(0.9245, 1e-4));
}

TEST_CASE("improved formula reduces to the simple one at lambda = 0") {
  for (double delta : {0.05, 0.2, kTen, 0.45}) CHECK(p_err_improved_formula(delta, 0.0) == p_err_simple_formula(delta));
}

TEST_CASE("improved formula matches a 50-digit evaluation") {
  for (double delta : {0.05, 0.15, kTen}) {
    for (double lambda : {0.003, 0.05, 0.1}) {
      const double ref = static_cast<double>(improved_big(big(delta), big(lambda)));
      CHECK(p_err_improved_formula(delta, lambda) == rel(ref, 1e-12));
    }
  }
}

TEST_CASE("headline value at 10 dB") {
  const double l = optimal_lambda(kTen);
  CHECK(l == rel(0.0957338, 1e-6));
  CHECK(std::abs(l - optimal_lambda_seed(kTen)) < 0.15 * l);
  // First converged value, frozen.
  CHECK(p_err_improved_formula(kTen, l) == rel(1.8996786e-4, 1e-6));
  CHECK(p_err_improved_formula(kTen, l) <= 3e-4);
}

TEST_CASE("negative lambda is worse than positive near the optimum") {
  for (double delta : {0.2, kTen}) {
    const double l = optimal_lambda(delta);
    CHECK(p_err_improved_formula(delta, -l) > p_err_improved_formula(delta, l));
  }
}

TEST_CASE("optimal lambda agrees with a 50-digit golden section") {
  for (double delta : {0.05, 0.1, 0.2, kTen, 0.4, 0.5}) {
    CHECK(std::abs(optimal_lambda(delta) - static_cast<double>(argmin_big(delta))) < 1e-9);
  }
}

TEST_CASE("optimal lambda approaches the seed as delta shrinks") {
  CHECK(std::abs(optimal_lambda(0.1) / optimal_lambda_seed(0.1) - 1.0) < 0.02);
  double previous = 1.0;
  for (double delta : {0.2, 0.1, 0.05, 0.02}) {
    const double gap = std::abs(optimal_lambda(delta) / optimal_lambda_seed(delta) - 1.0);
    CHECK(gap < previous);
    previous = gap;
  }
  CHECK(previous < 1e-3);
}

TEST_CASE("optimal lambda preconditions") {
  CHECK_THROWS_AS(optimal_lambda(0.0), std::invalid_argument);
  CHECK_THROWS_AS(optimal_lambda(0.51), std::invalid_argument);
  CHECK_NOTHROW(optimal_lambda(0.5));
}

TEST_CASE("stationarity at the optimum") {
  for (double delta : {0.05, 0.15, kTen, 0.45}) {
    const double l = optimal_lambda(delta);
    const double h = 1e-6;
    const double d = (p_err_improved_formula(delta, l + h) - p_err_improved_formula(delta, l - h)) / (2 * h);
    CHECK(std::abs(d) < 1e-6);
    CHECK(std::abs(stationarity_residual(delta, l)) < 1e-9);
  }
}

TEST_CASE("leading-order coefficient") {
  CHECK(kLeadingOrderCoefficient == rel(5.0 * kPi * kPi * kPi / 384.0, 1e-12));
  CHECK(p_err_leading_order(0.1) == rel(4.03728e-7, 1e-5));
}

TEST_CASE("leading-order term holds at the seed lambda") {
  // 5 pi^3 / 384 is the expansion of the improved error at lambda = sqrt(pi) delta^2 / 2.
  for (double delta : {0.05, 0.02}) {
    const double at_seed = static_cast<double>(improved_big(big(delta), big(optimal_lambda_seed(delta))));
    CHECK(std::abs(at_seed / p_err_leading_order(delta) - 1.0) < 0.15);
  }
}

TEST_CASE("at the exact optimum the Delta^6 coefficient is pi^3/192") {
  // Minimizing exactly lowers the coefficient to 2/5 of 5 pi^3 / 384.
  const double delta = 0.02;
  const double at_opt = static_cast<double>(improved_big(big(delta), argmin_big(delta)));
  CHECK(at_opt / p_err_leading_order(delta) == rel(0.4, 5e-3));
  CHECK(at_opt / std::pow(delta, 6) == rel(kPi * kPi * kPi / 192.0, 5e-3));
}

TEST_CASE("Helstrom formula") {
  CHECK(helstrom_formula(0.0) == 0.0);
  CHECK(helstrom_formula(1.0) == rel(0.5, 1e-12));
  CHECK(helstrom_formula(std::complex<double>(0.0, 0.1)) == rel(0.5 * (1.0 - std::sqrt(0.99)), 1e-12));
  CHECK(helstrom_formula(0.1) == rel(2.506e-3, 1e-3));
  CHECK_THROWS_AS(helstrom_formula(1.0 + 1e-9), std::invalid_argument);
  CHECK_NOTHROW(helstrom_formula(1.0 + 1e-13));
}

TEST_CASE("improved beats simple for all delta in [0.05, 0.4]") {
  for (double delta = 0.05; delta <= 0.4 + 1e-12; delta += 0.01) {
    CHECK(p_err_improved_formula(delta, optimal_lambda(delta)) < p_err_simple_formula(delta));
  }
}

TEST_CASE("crossover with homodyne lies near 9 dB") {
  const double db = improved_homodyne_crossover_db();
  CHECK(db >= 8.5);
  CHECK(db <= 9.5);
  const auto gap = [](double d) {
    const double delta = db_to_delta(d);
    return p_err_improved_formula(delta, optimal_lambda(delta)) - p_err_homodyne_formula(delta);
  };
  CHECK(gap(8.0) < 0.0);
  CHECK(gap(12.0) > 0.0);
  CHECK(std::abs(gap(db)) < 1e-12);
}

TEST_CASE("error model aggregation") {
  const ErrorModelPoint pt = evaluate_error_model(kTen, optimal_lambda(kTen), std::complex<double>(0.01, 0.0));
  CHECK_FALSE(pt.out_of_model);
  REQUIRE(pt.p_err_improved.has_value());
  CHECK(*pt.p_err_improved == rel(1.8996786e-4, 1e-6));
  REQUIRE(pt.p_err_helstrom.has_value());
  for (double v : {pt.p_err_homodyne, pt.p_err_simple, *pt.p_err_improved, *pt.p_err_helstrom, pt.p_err_leading_order}) {
    CHECK(v >= 0.0);
    CHECK(v <= 0.5);
  }
  CHECK(evaluate_error_model(0.3, 0.4).out_of_model);
  CHECK(evaluate_error_model(0.6).out_of_model);
  CHECK_FALSE(evaluate_error_model(0.3).p_err_improved.has_value());
}

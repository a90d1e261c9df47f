#pragma once

// Scalar root finding, 1-D minimization and Gaussian quadrature rules.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "gkp/errors.hpp"

namespace gkp::numerics {

template <typename T>
struct Minimum {
  T argmin;
  T value;
  int evaluations;
};

// Golden-section search for the minimum of a unimodal f on [lo, hi]; stops when
// the bracket is narrower than tol. T may be any real type (double, long
// double, multiprecision floats).
template <typename T, typename F>
Minimum<T> golden_section_minimize(F&& f, T lo, T hi, T tol, int max_iter = 500) {
  using std::sqrt;
  const T inv_phi = (sqrt(T(5)) - T(1)) / T(2);
  T a = lo, b = hi;
  T c = b - inv_phi * (b - a);
  T d = a + inv_phi * (b - a);
  T fc = f(c), fd = f(d);
  int evals = 2;
  for (int i = 0; i < max_iter && (b - a) > tol; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  const T x = (a + b) / T(2);
  return {x, f(x), evals + 1};
}

// Brent's method on a sign-changing bracket. Throws ConvergenceError when
// f(lo) and f(hi) share a sign.
double find_root(const std::function<double(double)>& f, double lo, double hi, double xtol = 1e-15,
                 int max_iter = 300);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Hermite rule for integral exp(-t^2) f(t) dt over the real line.
QuadratureRule gauss_hermite(int n);

// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

// Normalized Hermite functions phi_0..phi_max_n evaluated at x
// (the position-space Fock wavefunctions).
std::vector<double> hermite_functions(int max_n, double x);

}  // namespace gkp::numerics

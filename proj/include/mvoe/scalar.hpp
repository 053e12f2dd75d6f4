#ifndef MVOE_SCALAR_HPP
#define MVOE_SCALAR_HPP

// One-dimensional bracketing solvers shared by the planar root finder and the
// brute-force volume oracle.

#include <algorithm>
#include <cmath>
#include <concepts>

#include "mvoe/error.hpp"

namespace mvoe {

struct ScalarSolution {
  double x;
  int iterations;
};

/// Bisection for a function that is negative at `lo` and positive at `hi`.
/// Stops when the bracket width drops below tol * max(1, lo), or when the
/// midpoint hits an exact zero.
template <std::invocable<double> F>
ScalarSolution bisect_increasing(F&& f, double lo, double hi, double tol, int max_iterations) {
  int it = 0;
  while (hi - lo >= tol * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (it == max_iterations) throw MaxIterationsExceeded(it, mid);
    ++it;
    const double v = f(mid);
    if (v == 0.0) return {mid, it};
    if (v < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return {0.5 * (lo + hi), it};
}

/// Golden-section minimization of a unimodal function on [a, b]; stops when
/// the bracket width drops below `tol`.
template <std::invocable<double> F>
ScalarSolution golden_section_minimize(F&& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  while (b - a > tol) {
    ++it;
    if (fc <= fd) {
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
    // Bracket can no longer shrink in floating point.
    if (it > 10000) break;
  }
  return {0.5 * (a + b), it};
}

}  // namespace mvoe

#endif  // MVOE_SCALAR_HPP

#ifndef MVOE_TESTS_SUPPORT_HPP
#define MVOE_TESTS_SUPPORT_HPP

// Random instance generators and brute-force oracles shared by the unit tests
// and the acceptance suite. None of these go through the library's solvers.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mvoe/mvoe.hpp"

namespace mvoe::testing {

using linalg::Matrix;
using linalg::SymMatrix;
using linalg::Vector;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  Vector normal_vector(std::size_t n) {
    Vector v(n);
    for (double& x : v) x = normal();
    return v;
  }

  /// Haar-ish orthogonal matrix: modified Gram-Schmidt on Gaussian columns.
  Matrix orthogonal(std::size_t n) {
    Matrix q(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      Vector v = normal_vector(n);
      for (std::size_t k = 0; k < j; ++k) {
        double p = 0.0;
        for (std::size_t i = 0; i < n; ++i) p += q(i, k) * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= p * q(i, k);
      }
      const double nv = linalg::norm2(v);
      for (std::size_t i = 0; i < n; ++i) q(i, j) = v[i] / nv;
    }
    return q;
  }

  /// V diag(eig) V^T with eigenvalues log-uniform in [lo, hi].
  SymMatrix spd(std::size_t n, double lo = 1e-2, double hi = 1e2) {
    const Matrix v = orthogonal(n);
    Vector eig(n);
    for (double& e : eig) e = log_uniform(lo, hi);
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += v(i, k) * eig[k] * v(j, k);
        m(i, j) = s;
      }
    return SymMatrix::symmetrized(m);
  }

  Ellipsoid ellipsoid(std::size_t n, double lo = 1e-2, double hi = 1e2) {
    Vector c(n);
    for (double& x : c) x = uniform(-5.0, 5.0);
    return Ellipsoid(std::move(c), spd(n, lo, hi));
  }

  GeneralizedSpectrum spectrum(std::size_t n, double lo, double hi) {
    Vector v(n);
    for (double& x : v) x = log_uniform(lo, hi);
    return GeneralizedSpectrum(std::move(v));
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Laplace expansion along the first row. Exponential cost; meant for d <= 5.
inline double cofactor_det(const Matrix& m) {
  const std::size_t n = m.rows();
  if (n == 1) return m(0, 0);
  double det = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    Matrix minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t c = 0, cc = 0; c < n; ++c)
        if (c != j) minor(r - 1, cc++) = m(r, c);
    det += ((j % 2) ? -1.0 : 1.0) * m(0, j) * cofactor_det(minor);
  }
  return det;
}

/// Root of the (decreasing) optimality residual by plain bisection on
/// [1e-12, 1e12] in log space. Slow and dumb on purpose.
inline double brute_force_root(const Vector& lambda) {
  auto residual = [&](double b) {
    double s = 0.0;
    for (double l : lambda) s += (1.0 - b * b * l) / (1.0 + b * l);
    return s;
  };
  double lo = std::log(1e-12);
  double hi = std::log(1e12);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (residual(std::exp(mid)) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return linalg::max_abs(a - b); }

}  // namespace mvoe::testing

#endif  // MVOE_TESTS_SUPPORT_HPP

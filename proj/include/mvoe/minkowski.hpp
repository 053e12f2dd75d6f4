#ifndef MVOE_MINKOWSKI_HPP
#define MVOE_MINKOWSKI_HPP

// Parameterized minimum-volume outer ellipsoid of a Minkowski sum of
// ellipsoids.
//
// For K = 2 the outer family is Q(beta) = (1 + 1/beta) Q1 + (1 + beta) Q2,
// beta > 0. Minimizing log det Q(beta) reduces to the scalar equation
//
//     sum_i (1 - beta^2 lambda_i) / (1 + beta lambda_i) = 0,
//
// where lambda = spec(Q1^{-1} Q2). Its positive root is unique. It is found by
// bracketed bisection in the plane and by the fixed-point map g below in any
// dimension. K > 2 folds pairwise.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mvoe/ellipsoid.hpp"
#include "mvoe/error.hpp"
#include "mvoe/linalg.hpp"
#include "mvoe/scalar.hpp"

namespace mvoe {

enum class Method { Auto, Bisection, FixedPoint, Trace };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Auto: return "auto";
    case Method::Bisection: return "bisection";
    case Method::FixedPoint: return "fixed-point";
    case Method::Trace: return "trace";
  }
  return "unknown";
}

inline std::optional<Method> parse_method(std::string_view s) {
  if (s == "auto") return Method::Auto;
  if (s == "bisection") return Method::Bisection;
  if (s == "fixed-point" || s == "fixed_point") return Method::FixedPoint;
  if (s == "trace") return Method::Trace;
  return std::nullopt;
}

struct SolverOptions {
  double tolerance = 1e-12;
  int max_iterations = 200;
  Method method = Method::Auto;
  /// Check second-derivative positivity at the computed root.
  bool verify = false;

  void validate() const {
    if (!(tolerance > 0.0)) throw InvalidArgument("solver tolerance must be positive");
    if (max_iterations < 1) throw InvalidArgument("max_iterations must be at least 1");
  }
};

/// Eigenvalues of Q1^{-1} Q2; all strictly positive.
class GeneralizedSpectrum {
 public:
  explicit GeneralizedSpectrum(Vector values) : values_(std::move(values)) {
    if (values_.empty()) throw InvalidArgument("spectrum must be nonempty");
    for (double v : values_)
      if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidArgument("spectrum values must be positive and finite");
  }

  std::size_t size() const noexcept { return values_.size(); }
  const Vector& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  Vector values_;
};

inline void require_positive_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be positive");
}

// ---------------------------------------------------------------------------
// Outer parameterizations

inline SymMatrix q_of_beta(const SymMatrix& q1, const SymMatrix& q2, double beta) {
  require_same_dim(q1.dim(), q2.dim(), "q_of_beta: shape dimensions differ");
  require_positive_beta(beta);
  return SymMatrix::symmetrized((1.0 + 1.0 / beta) * q1.matrix() + (1.0 + beta) * q2.matrix());
}

/// Direction-parameterized family: (sum_k sqrt(l'Q_k l)) * sum_k Q_k / sqrt(l'Q_k l).
/// The result touches the Minkowski sum in direction `u`.
inline SymMatrix q_of_direction(std::span<const SymMatrix> qs, const Direction& u) {
  if (qs.empty()) throw InvalidArgument("q_of_direction: no shape matrices");
  const std::size_t n = qs.front().dim();
  require_same_dim(u.dim(), n, "q_of_direction: direction dimension");
  double total = 0.0;
  Matrix acc(n, n);
  for (const SymMatrix& q : qs) {
    require_same_dim(q.dim(), n, "q_of_direction: shape dimensions differ");
    const double s = std::sqrt(q.quadratic(u.vector()));
    total += s;
    acc = acc + (1.0 / s) * q.matrix();
  }
  return SymMatrix::symmetrized(total * acc);
}

/// Weight-parameterized family: sum_k Q_k / alpha_k with alpha on the simplex.
inline SymMatrix q_of_alpha(std::span<const SymMatrix> qs, std::span<const double> alpha) {
  if (qs.empty()) throw InvalidArgument("q_of_alpha: no shape matrices");
  if (alpha.size() != qs.size()) throw InvalidArgument("q_of_alpha: one weight per shape required");
  double sum = 0.0;
  for (double a : alpha) {
    if (!(a > 0.0)) throw InvalidArgument("q_of_alpha: weights must be positive");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("q_of_alpha: weights must sum to 1");
  const std::size_t n = qs.front().dim();
  Matrix acc(n, n);
  for (std::size_t k = 0; k < qs.size(); ++k) {
    require_same_dim(qs[k].dim(), n, "q_of_alpha: shape dimensions differ");
    acc = acc + (1.0 / alpha[k]) * qs[k].matrix();
  }
  return SymMatrix::symmetrized(acc);
}

/// beta = sqrt(l'Q1 l / l'Q2 l); maps the direction family onto q_of_beta.
inline double transform_direction_to_beta(const SymMatrix& q1, const SymMatrix& q2,
                                          const Direction& u) {
  require_same_dim(q1.dim(), q2.dim(), "transform_direction_to_beta: shape dimensions differ");
  return std::sqrt(q1.quadratic(u.vector()) / q2.quadratic(u.vector()));
}

/// beta = alpha1 / (1 - alpha1).
inline double transform_alpha_to_beta(double alpha1) {
  if (!(alpha1 > 0.0 && alpha1 < 1.0)) throw InvalidArgument("alpha1 must lie in (0, 1)");
  return alpha1 / (1.0 - alpha1);
}

/// Minimizer of trace Q(beta): sqrt(trace Q1 / trace Q2).
inline double beta_trace_optimal(const SymMatrix& q1, const SymMatrix& q2) {
  require_same_dim(q1.dim(), q2.dim(), "beta_trace_optimal: shape dimensions differ");
  return std::sqrt(q1.trace() / q2.trace());
}

// ---------------------------------------------------------------------------
// Spectrum and optimality condition

/// L1^{-1} Q2 L1^{-T} with Q1 = L1 L1^T. Similar to Q1^{-1} Q2.
inline SymMatrix whitened_pair(const SymMatrix& q1, const SymMatrix& q2) {
  require_same_dim(q1.dim(), q2.dim(), "whitened_pair: shape dimensions differ");
  const auto l1 = linalg::cholesky(q1);
  const Matrix x = linalg::solve_lower(l1, q2.matrix());
  return SymMatrix::symmetrized(linalg::solve_lower(l1, linalg::transpose(x)));
}

inline GeneralizedSpectrum generalized_spectrum(const SymMatrix& q1, const SymMatrix& q2) {
  (void)linalg::cholesky(q2);
  const auto eig = linalg::sym_eig(whitened_pair(q1, q2));
  for (std::size_t i = 0; i < eig.values.size(); ++i)
    if (!(eig.values[i] > 0.0)) throw NotPositiveDefinite(i);
  return GeneralizedSpectrum(eig.values);
}

/// sum_i (1 - beta^2 lambda_i) / (1 + beta lambda_i); strictly decreasing in beta.
inline double optimality_residual(const GeneralizedSpectrum& lambda, double beta) {
  require_positive_beta(beta);
  double s = 0.0;
  for (double l : lambda.values()) s += (1.0 - beta * beta * l) / (1.0 + beta * l);
  return s;
}

/// d/dbeta log det Q(beta) = -residual / (beta (1 + beta)).
inline double log_det_derivative(const GeneralizedSpectrum& lambda, double beta) {
  return -optimality_residual(lambda, beta) / (beta * (1.0 + beta));
}

/// d^2/dbeta^2 log det Q(beta) for any beta > 0.
inline double log_det_second_derivative(const GeneralizedSpectrum& lambda, double beta) {
  require_positive_beta(beta);
  double s = 0.0;
  const double b2 = beta * beta;
  for (double l : lambda.values()) {
    const double den = (1.0 + 1.0 / beta) + (1.0 + beta) * l;
    const double num = l - 1.0 / b2;
    s += (2.0 * den / (b2 * beta) - num * num) / (den * den);
  }
  return s;
}

/// Closed form of the second derivative valid at the stationary point:
/// 1/(b(1+b)) sum_i (b^2 l_i^2 + (1+2b) l_i) / (1 + b l_i)^2. Positive by
/// inspection.
inline double second_derivative_at_root(const GeneralizedSpectrum& lambda, double beta) {
  require_positive_beta(beta);
  double s = 0.0;
  for (double l : lambda.values()) {
    const double t = 1.0 + beta * l;
    s += (beta * beta * l * l + (1.0 + 2.0 * beta) * l) / (t * t);
  }
  return s / (beta * (1.0 + beta));
}

/// Optimality condition cleared of denominators and divided by prod(lambda):
///
///   d b^{d+1} + mu_1 b^d + ... + mu_{d-1} b^2 - (d-1) e_{d-1} b - d e_d,
///
/// with e_r the elementary symmetric polynomials in 1/lambda_i and
/// mu_r = (d-r) e_r - (r-1) e_{r-1}, so mu_1 = (d-1) e_1.
class OptimalityPolynomial {
 public:
  OptimalityPolynomial(Vector coeffs, Vector esp, Vector mu)
      : coeffs_(std::move(coeffs)), esp_(std::move(esp)), mu_(std::move(mu)) {}

  /// Descending degree, length d + 2.
  const Vector& coeffs() const noexcept { return coeffs_; }
  /// e_0 .. e_d.
  const Vector& esp() const noexcept { return esp_; }
  /// mu_1 .. mu_{d-1}.
  const Vector& mu() const noexcept { return mu_; }
  std::size_t degree() const noexcept { return coeffs_.size() - 1; }

  double operator()(double beta) const {
    double v = 0.0;
    for (double c : coeffs_) v = v * beta + c;
    return v;
  }

  /// Sign changes in the coefficient sequence, zeros skipped.
  int sign_changes() const {
    int changes = 0;
    int last = 0;
    for (double c : coeffs_) {
      const int s = (c > 0.0) - (c < 0.0);
      if (s == 0) continue;
      if (last != 0 && s != last) ++changes;
      last = s;
    }
    return changes;
  }

  bool mu_positive_and_increasing() const {
    for (std::size_t r = 0; r < mu_.size(); ++r) {
      if (!(mu_[r] > 0.0)) return false;
      if (r > 0 && !(mu_[r] > mu_[r - 1])) return false;
    }
    return true;
  }

 private:
  Vector coeffs_;
  Vector esp_;
  Vector mu_;
};

inline OptimalityPolynomial optimality_polynomial(const GeneralizedSpectrum& lambda) {
  const std::size_t d = lambda.size();
  // e_r as the coefficients of prod_i (t + 1/lambda_i).
  Vector e(d + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double x = 1.0 / lambda[i];
    for (std::size_t r = i + 1; r > 0; --r) e[r] += x * e[r - 1];
  }

  const double dd = static_cast<double>(d);
  Vector mu;
  for (std::size_t r = 1; r < d; ++r) {
    const double rr = static_cast<double>(r);
    mu.push_back((dd - rr) * e[r] - (rr - 1.0) * e[r - 1]);
  }

  Vector coeffs;
  coeffs.reserve(d + 2);
  coeffs.push_back(dd);
  coeffs.insert(coeffs.end(), mu.begin(), mu.end());
  coeffs.push_back(-(dd - 1.0) * e[d - 1]);
  coeffs.push_back(-dd * e[d]);

  OptimalityPolynomial p(std::move(coeffs), std::move(e), std::move(mu));
  if (p.sign_changes() != 1)
    throw InternalError("optimality polynomial does not have exactly one sign change");
  return p;
}

// ---------------------------------------------------------------------------
// Root finders

struct Bracket {
  double lo;
  double hi;
};

/// 2 l1 l2 b^3 + (l1 + l2) b^2 - (l1 + l2) b - 2
inline double planar_cubic(double lambda1, double lambda2, double beta) {
  const double s = lambda1 + lambda2;
  return ((2.0 * lambda1 * lambda2 * beta + s) * beta - s) * beta - 2.0;
}

/// Planar bracket lo < beta_+ < hi. `lo` is the positive critical point of
/// the cubic, `hi` the smaller positive root of the two parabolas obtained by
/// zeroing either eigenvalue.
inline Bracket bracket_beta_2d(double lambda1, double lambda2) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
    throw InvalidArgument("bracket_beta_2d: eigenvalues must be positive");
  const double s = lambda1 + lambda2;
  const double p = lambda1 * lambda2;
  // (sqrt(s (s + 6p)) - s) / (6p), rationalized.
  const double lo = s / (std::sqrt(s * (s + 6.0 * p)) + s);
  auto parabola_root = [](double l) { return (l + std::sqrt(l * (l + 8.0))) / (2.0 * l); };
  const double hi = std::min(parabola_root(lambda1), parabola_root(lambda2));
  return {lo, hi};
}

struct RootSolution {
  double beta;
  int iterations;
};

inline RootSolution solve_beta_bisection(const GeneralizedSpectrum& lambda,
                                         const SolverOptions& opts = {}) {
  opts.validate();
  if (lambda.size() != 2) throw InvalidArgument("bisection solver requires dimension two");
  const double l1 = lambda[0];
  const double l2 = lambda[1];
  const Bracket br = bracket_beta_2d(l1, l2);
  const auto sol = bisect_increasing([&](double b) { return planar_cubic(l1, l2, b); }, br.lo,
                                     br.hi, opts.tolerance, opts.max_iterations);
  return {sol.x, sol.iterations};
}

/// g(b) = sqrt( sum 1/(1 + b l_i) / sum l_i/(1 + b l_i) ).
inline double fixed_point_map(const GeneralizedSpectrum& lambda, double beta) {
  require_positive_beta(beta);
  double num = 0.0;
  double den = 0.0;
  for (double l : lambda.values()) {
    const double w = 1.0 / (1.0 + beta * l);
    num += w;
    den += l * w;
  }
  return std::sqrt(num / den);
}

/// Iterates b <- g(b) until |b_{n+1} - b_n| < tol * max(1, b_n). `iterations`
/// counts map evaluations.
inline RootSolution solve_beta_fixed_point(const GeneralizedSpectrum& lambda, double beta0,
                                           const SolverOptions& opts = {}) {
  opts.validate();
  require_positive_beta(beta0);
  double beta = beta0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const double next = fixed_point_map(lambda, beta);
    if (std::abs(next - beta) < opts.tolerance * std::max(1.0, beta)) return {next, it};
    beta = next;
  }
  throw MaxIterationsExceeded(opts.max_iterations, beta);
}

// ---------------------------------------------------------------------------
// Minkowski sums

struct MvoeResult {
  double beta;
  Ellipsoid ellipsoid;
  double volume;
  Method method;
  int iterations;
  /// |optimality_residual| at beta. Informational; the step rule decides
  /// convergence.
  double residual;
};

inline MvoeResult mvoe_pair(const Ellipsoid& e1, const Ellipsoid& e2,
                            const SolverOptions& opts = {}) {
  require_same_dim(e1.dim(), e2.dim(), "mvoe_pair: ellipsoid dimensions differ");
  opts.validate();
  const SymMatrix& q1 = e1.shape();
  const SymMatrix& q2 = e2.shape();
  const GeneralizedSpectrum lambda = generalized_spectrum(q1, q2);

  Method method = opts.method;
  if (method == Method::Auto) method = e1.dim() == 2 ? Method::Bisection : Method::FixedPoint;

  RootSolution root{};
  switch (method) {
    case Method::Bisection:
      root = solve_beta_bisection(lambda, opts);
      break;
    case Method::FixedPoint:
      root = solve_beta_fixed_point(lambda, beta_trace_optimal(q1, q2), opts);
      break;
    case Method::Trace:
      root = {beta_trace_optimal(q1, q2), 0};
      break;
    case Method::Auto:
      throw InternalError("unresolved solver method");
  }

  if (method != Method::Trace) {
    const double curvature = second_derivative_at_root(lambda, root.beta);
    assert(curvature > 0.0);
    if (opts.verify && !(curvature > 0.0))
      throw InternalError("second derivative is not positive at the computed root");
  }

  Ellipsoid out(linalg::add(e1.center(), e2.center()), q_of_beta(q1, q2, root.beta));
  const double vol = volume(out);
  const double residual = std::abs(optimality_residual(lambda, root.beta));
  return MvoeResult{root.beta, std::move(out), vol, method, root.iterations, residual};
}

struct SumResult {
  Ellipsoid ellipsoid;
  double volume;
  /// One entry per pairwise fold step; empty for a single ellipsoid.
  std::vector<MvoeResult> steps;

  std::vector<double> betas() const {
    std::vector<double> b;
    b.reserve(steps.size());
    for (const auto& s : steps) b.push_back(s.beta);
    return b;
  }
};

/// Left fold acc <- mvoe_pair(acc, E_k) in input order. The order matters:
/// the fold is not associative in approximation quality.
inline SumResult mvoe_sum(std::span<const Ellipsoid> es, const SolverOptions& opts = {}) {
  if (es.empty()) throw InvalidArgument("mvoe_sum: empty input");
  opts.validate();
  for (const auto& e : es) require_same_dim(e.dim(), es.front().dim(), "mvoe_sum: dimensions differ");
  SumResult out{es.front(), volume(es.front()), {}};
  out.steps.reserve(es.size() - 1);
  for (std::size_t k = 1; k < es.size(); ++k) {
    MvoeResult step = mvoe_pair(out.ellipsoid, es[k], opts);
    out.ellipsoid = step.ellipsoid;
    out.volume = step.volume;
    out.steps.push_back(std::move(step));
  }
  return out;
}

}  // namespace mvoe

#endif  // MVOE_MINKOWSKI_HPP

#ifndef MVOE_ORACLE_HPP
#define MVOE_ORACLE_HPP

// Brute-force verification. Nothing here goes through the root finders: the
// volume oracle minimizes log det Q(beta) directly, containment is tested
// through additivity of support functions, and the derivative checks compare
// three independently computed quantities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mvoe/ellipsoid.hpp"
#include "mvoe/linalg.hpp"
#include "mvoe/minkowski.hpp"
#include "mvoe/scalar.hpp"

namespace mvoe::oracle {

struct CheckReport {
  std::string name;
  bool passed = false;
  /// Signed: <= 0 means the check's own threshold was met.
  double worst_violation = 0.0;
  int samples = 0;
  std::string details;
};

namespace detail {
template <class... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

inline bool agree(double x, double y, double rel, double floor) {
  const double scale = std::max(std::abs(x), std::abs(y));
  return std::abs(x - y) <= rel * scale || scale < floor;
}
}  // namespace detail

/// log det Q(beta), straight from a Cholesky factorization of Q(beta).
inline double log_det_q(const SymMatrix& q1, const SymMatrix& q2, double beta) {
  return linalg::log_det_from_cholesky(linalg::cholesky(q_of_beta(q1, q2, beta)));
}

struct GoldenSectionResult {
  double beta_star;
  double volume;
};

/// Minimizes log det Q(beta) by a 200-point log-spaced scan over
/// [1e-6, 1e6] followed by golden-section refinement to width `tol` inside
/// the cell around the best grid point. Relies on log det Q(beta) being
/// unimodal in beta.
inline GoldenSectionResult golden_section_beta(const SymMatrix& q1, const SymMatrix& q2,
                                               double tol) {
  constexpr int kGrid = 200;
  constexpr double kLogLo = -6.0;
  constexpr double kLogHi = 6.0;
  if (!(tol > 0.0)) throw InvalidArgument("golden_section_beta: tol must be positive");
  require_same_dim(q1.dim(), q2.dim(), "golden_section_beta: shape dimensions differ");

  auto grid = [](int i) { return std::pow(10.0, kLogLo + (kLogHi - kLogLo) * i / (kGrid - 1)); };
  int best = 0;
  double best_value = log_det_q(q1, q2, grid(0));
  for (int i = 1; i < kGrid; ++i) {
    const double v = log_det_q(q1, q2, grid(i));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double a = grid(std::max(best - 1, 0));
  const double b = grid(std::min(best + 1, kGrid - 1));
  const auto sol =
      golden_section_minimize([&](double beta) { return log_det_q(q1, q2, beta); }, a, b, tol);
  const double beta_star = sol.x;
  const double vol = unit_ball_volume(q1.dim()) * std::exp(0.5 * log_det_q(q1, q2, beta_star));
  return {beta_star, vol};
}

/// Unit directions drawn as normalized Gaussian vectors, deterministic in
/// `seed`.
inline std::vector<Direction> sample_directions(std::size_t dim, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Direction> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  while (static_cast<int>(out.size()) < count) {
    Vector v(dim);
    for (double& x : v) x = normal(rng);
    if (linalg::norm2(v) > 1e-12) out.emplace_back(std::move(v));
  }
  return out;
}

inline constexpr double kContainmentSlack = 1e-9;

/// For sampled u, checks h_outer(u) >= sum_k h_part_k(u) - 1e-9. The worst
/// violation reported is max_u (sum_k h_part_k(u) - h_outer(u)).
inline CheckReport containment_check(const Ellipsoid& outer, std::span<const Ellipsoid> parts,
                                     int n_dirs = 1000, std::uint64_t seed = 0) {
  if (parts.empty()) throw InvalidArgument("containment_check: no parts");
  if (n_dirs < 1) throw InvalidArgument("containment_check: n_dirs must be positive");
  for (const auto& p : parts) require_same_dim(p.dim(), outer.dim(), "containment_check: dims");

  double worst = -std::numeric_limits<double>::infinity();
  for (const Direction& u : sample_directions(outer.dim(), n_dirs, seed)) {
    double sum = 0.0;
    for (const auto& p : parts) sum += support(p, u);
    worst = std::max(worst, sum - support(outer, u));
  }
  CheckReport r;
  r.name = "containment";
  r.samples = n_dirs;
  r.worst_violation = worst;
  r.passed = worst <= kContainmentSlack;
  r.details = detail::format("max over %d directions of sum(support parts) - support(outer) = %.3e",
                             n_dirs, worst);
  return r;
}

struct DerivativeRoutes {
  /// -1/(b(1+b)) trace((I + b W)^{-1}(I - b^2 W)) with W the whitened pair.
  double closed_form;
  /// Central difference of log det Q(beta), step 1e-6 beta.
  double finite_difference;
  /// -1/(b(1+b)) sum_i (1 - b^2 l_i)/(1 + b l_i).
  double spectral;
};

inline DerivativeRoutes derivative_routes(const SymMatrix& q1, const SymMatrix& q2, double beta) {
  require_positive_beta(beta);
  const double scale = -1.0 / (beta * (1.0 + beta));

  const SymMatrix w = whitened_pair(q1, q2);
  const std::size_t n = w.dim();
  const Matrix id = Matrix::identity(n);
  const auto lm = linalg::cholesky(SymMatrix::symmetrized(id + beta * w.matrix()));
  const Matrix x =
      linalg::solve_upper(lm, linalg::solve_lower(lm, id - (beta * beta) * w.matrix()));
  double tr = 0.0;
  for (std::size_t i = 0; i < n; ++i) tr += x(i, i);

  // log det Q(b+h) - log det Q(b-h) = sum log1p(eig(L^-1 dQ L^-T)) with
  // Q(b-h) = L L^T, which avoids cancelling two nearly equal log dets.
  const double h = 1e-6 * beta;
  const SymMatrix dq = (-2.0 * h / ((beta + h) * (beta - h))) * q1 + (2.0 * h) * q2;
  const auto lo = linalg::cholesky(q_of_beta(q1, q2, beta - h));
  const Matrix m = linalg::solve_lower(lo, linalg::transpose(linalg::solve_lower(lo, dq.matrix())));
  double diff = 0.0;
  for (double mu : linalg::sym_eig(SymMatrix::symmetrized(m)).values) diff += std::log1p(mu);
  const double fd = diff / (2.0 * h);

  const double spectral = scale * optimality_residual(generalized_spectrum(q1, q2), beta);
  return {scale * tr, fd, spectral};
}

inline constexpr double kDerivativeAgreement = 1e-4;
inline constexpr double kStationaryMagnitude = 1e-6;

/// Claims `beta` is a stationary point of log det Q(beta): passes when the
/// three derivative routes agree within 1e-4 relative and all are below 1e-6
/// in magnitude.
inline CheckReport stationarity_check(const SymMatrix& q1, const SymMatrix& q2, double beta) {
  const DerivativeRoutes d = derivative_routes(q1, q2, beta);
  const double mag = std::max({std::abs(d.closed_form), std::abs(d.finite_difference),
                               std::abs(d.spectral)});
  const bool agree =
      detail::agree(d.closed_form, d.finite_difference, kDerivativeAgreement, kStationaryMagnitude) &&
      detail::agree(d.closed_form, d.spectral, kDerivativeAgreement, kStationaryMagnitude) &&
      detail::agree(d.finite_difference, d.spectral, kDerivativeAgreement, kStationaryMagnitude);
  CheckReport r;
  r.name = "stationarity";
  r.samples = 3;
  r.worst_violation = mag - kStationaryMagnitude;
  r.passed = agree && mag < kStationaryMagnitude;
  r.details = detail::format(
      "beta=%.17g closed_form=%.3e finite_difference=%.3e spectral=%.3e routes_agree=%s", beta,
      d.closed_form, d.finite_difference, d.spectral, agree ? "true" : "false");
  return r;
}

inline constexpr double kIdentityTolerance = 1e-8;

/// At a converged root: sum l_i/(1 + b l_i) = d/(b(b+1)) within 1e-8
/// relative, and the second derivative of log det Q is positive.
inline CheckReport consistency_checks(const GeneralizedSpectrum& lambda, double beta_plus) {
  require_positive_beta(beta_plus);
  double lhs = 0.0;
  for (double l : lambda.values()) lhs += l / (1.0 + beta_plus * l);
  const double rhs = static_cast<double>(lambda.size()) / (beta_plus * (beta_plus + 1.0));
  const double rel = std::abs(lhs - rhs) / std::abs(rhs);
  const double curvature = second_derivative_at_root(lambda, beta_plus);
  CheckReport r;
  r.name = "consistency";
  r.samples = 2;
  r.worst_violation = rel - kIdentityTolerance;
  r.passed = rel <= kIdentityTolerance && curvature > 0.0;
  r.details = detail::format("identity lhs=%.17g rhs=%.17g rel_err=%.3e second_derivative=%.17g",
                             lhs, rhs, rel, curvature);
  return r;
}

}  // namespace mvoe::oracle

#endif  // MVOE_ORACLE_HPP

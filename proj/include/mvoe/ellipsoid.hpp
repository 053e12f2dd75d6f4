#ifndef MVOE_ELLIPSOID_HPP
#define MVOE_ELLIPSOID_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "mvoe/error.hpp"
#include "mvoe/linalg.hpp"

namespace mvoe {

using linalg::Matrix;
using linalg::SymMatrix;
using linalg::Vector;

/// Unit vector. Normalized on construction; the zero vector is rejected.
class Direction {
 public:
  explicit Direction(Vector v) : ell_(std::move(v)) {
    const double n = linalg::norm2(ell_);
    if (ell_.empty() || !(n > 0.0) || !std::isfinite(n))
      throw InvalidArgument("direction must be a nonzero finite vector");
    for (double& x : ell_) x /= n;
  }

  std::size_t dim() const noexcept { return ell_.size(); }
  const Vector& vector() const noexcept { return ell_; }
  double operator[](std::size_t i) const { return ell_[i]; }
  operator std::span<const double>() const noexcept { return ell_; }

 private:
  Vector ell_;
};

/// E(q, Q) = { x : (x - q)^T Q^{-1} (x - q) <= 1 }, Q positive definite.
class Ellipsoid {
 public:
  Ellipsoid(Vector center, SymMatrix shape) : center_(std::move(center)), shape_(std::move(shape)) {
    if (center_.size() != shape_.dim())
      throw DimensionMismatch("ellipsoid center and shape dimensions differ");
    for (double c : center_)
      if (!std::isfinite(c)) throw InvalidArgument("ellipsoid center has non-finite entries");
    (void)linalg::cholesky(shape_);
  }

  /// Centered at the origin.
  explicit Ellipsoid(SymMatrix shape) : Ellipsoid(Vector(shape.dim(), 0.0), std::move(shape)) {}

  std::size_t dim() const noexcept { return center_.size(); }
  const Vector& center() const noexcept { return center_; }
  const SymMatrix& shape() const noexcept { return shape_; }

  friend bool operator==(const Ellipsoid&, const Ellipsoid&) = default;

 private:
  Vector center_;
  SymMatrix shape_;
};

/// { x : x^T A x + 2 x^T b + c <= 0 }. Only defined up to positive scaling;
/// construction requires A positive definite and c < b^T A^{-1} b.
class QuadraticForm {
 public:
  QuadraticForm(SymMatrix a, Vector b, double c) : a_(std::move(a)), b_(std::move(b)), c_(c) {
    if (b_.size() != a_.dim()) throw DimensionMismatch("quadratic form: b has wrong size");
    const auto l = linalg::cholesky(a_);
    const Vector y = linalg::solve_lower(l, b_);
    if (!(c_ < linalg::dot(y, y))) throw InvalidArgument("quadratic form describes an empty set");
  }

  const SymMatrix& a() const noexcept { return a_; }
  const Vector& b() const noexcept { return b_; }
  double c() const noexcept { return c_; }

 private:
  SymMatrix a_;
  Vector b_;
  double c_;
};

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DimensionMismatch(what);
}

/// Emits the normalization A = Q^{-1}, b = -Q^{-1} q, c = q^T Q^{-1} q - 1.
inline QuadraticForm to_quadratic_form(const Ellipsoid& e) {
  const auto l = linalg::cholesky(e.shape());
  const std::size_t n = e.dim();
  SymMatrix a = SymMatrix::symmetrized(
      linalg::solve_upper(l, linalg::solve_lower(l, Matrix::identity(n))));
  const Vector qinv_q = linalg::cholesky_solve(l, e.center());
  const double c = linalg::dot(e.center(), qinv_q) - 1.0;
  return QuadraticForm(std::move(a), linalg::negate(qinv_q), c);
}

/// Accepts any positive scaling of the form: Q = (b^T A^{-1} b - c) A^{-1},
/// q = -A^{-1} b.
inline Ellipsoid from_quadratic_form(const QuadraticForm& f) {
  const auto l = linalg::cholesky(f.a());
  const Vector ainv_b = linalg::cholesky_solve(l, f.b());
  const double radius2 = linalg::dot(f.b(), ainv_b) - f.c();
  const Matrix ainv = linalg::solve_upper(l, linalg::solve_lower(l, Matrix::identity(f.a().dim())));
  return Ellipsoid(linalg::negate(ainv_b), SymMatrix::symmetrized(radius2 * ainv));
}

/// pi^{d/2} / Gamma(d/2 + 1)
inline double unit_ball_volume(std::size_t d) {
  const double h = 0.5 * static_cast<double>(d);
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

inline double volume(const Ellipsoid& e) {
  return unit_ball_volume(e.dim()) * linalg::sqrt_det_from_cholesky(linalg::cholesky(e.shape()));
}

/// h(u) = u^T q + sqrt(u^T Q u)
inline double support(const Ellipsoid& e, const Direction& u) {
  require_same_dim(e.dim(), u.dim(), "support: direction dimension");
  return linalg::dot(u.vector(), e.center()) + std::sqrt(e.shape().quadratic(u.vector()));
}

inline constexpr double kMembershipSlack = 1e-12;

inline bool contains_point(const Ellipsoid& e, std::span<const double> x) {
  require_same_dim(e.dim(), x.size(), "contains_point: point dimension");
  Vector diff(x.begin(), x.end());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= e.center()[i];
  const Vector y = linalg::solve_lower(linalg::cholesky(e.shape()), diff);
  return linalg::dot(y, y) - 1.0 <= kMembershipSlack;
}

/// Image of E under x -> F x + shift: E(F q + shift, F Q F^T).
inline Ellipsoid affine_image(const Ellipsoid& e, const Matrix& f, std::span<const double> shift) {
  if (!f.square() || f.cols() != e.dim())
    throw DimensionMismatch("affine_image: map must be square and match the ellipsoid");
  require_same_dim(shift.size(), f.rows(), "affine_image: shift dimension");
  Vector center = f * std::span<const double>(e.center());
  for (std::size_t i = 0; i < center.size(); ++i) center[i] += shift[i];
  SymMatrix shape = SymMatrix::symmetrized(f * e.shape().matrix() * linalg::transpose(f));
  try {
    return Ellipsoid(std::move(center), std::move(shape));
  } catch (const NotPositiveDefinite&) {
    throw SingularMap("affine_image: image shape is not positive definite");
  }
}

inline Ellipsoid affine_image(const Ellipsoid& e, const Matrix& f) {
  return affine_image(e, f, Vector(f.rows(), 0.0));
}

/// Q + eps * max(trace(Q)/d, 1) * I for a positive semidefinite Q.
inline SymMatrix lift_degenerate(const SymMatrix& q_psd, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("lift_degenerate: eps must be positive");
  const double d = static_cast<double>(q_psd.dim());
  const double trace_scale = std::max(q_psd.trace() / d, 1.0);
  Matrix m = q_psd.matrix();
  for (std::size_t i = 0; i < q_psd.dim(); ++i) m(i, i) += eps * trace_scale;
  SymMatrix lifted = SymMatrix::symmetrized(m);
  (void)linalg::cholesky(lifted);
  return lifted;
}

/// Points M v + q with M = Q^{1/2} and v on the unit sphere.
///
/// d = 2: `samples` angles 2 pi k / samples, starting at v = (1, 0).
/// d = 3: `samples` longitudes on each of max(2, samples / 2) - 1 interior
/// latitude rings, plus both poles.
inline std::vector<Vector> boundary_points(const Ellipsoid& e, std::size_t samples) {
  const std::size_t d = e.dim();
  if (d != 2 && d != 3) throw UnsupportedDimension(d);
  if (samples == 0) throw InvalidArgument("boundary_points: samples must be positive");

  const Matrix m = linalg::sqrt_psd(e.shape()).matrix();
  std::vector<Vector> unit;
  if (d == 2) {
    unit.reserve(samples);
    for (std::size_t k = 0; k < samples; ++k) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(samples);
      unit.push_back({std::cos(t), std::sin(t)});
    }
  } else {
    const std::size_t rings = std::max<std::size_t>(2, samples / 2);
    unit.push_back({0.0, 0.0, 1.0});
    for (std::size_t i = 1; i < rings; ++i) {
      const double theta = std::numbers::pi * static_cast<double>(i) / static_cast<double>(rings);
      for (std::size_t k = 0; k < samples; ++k) {
        const double phi =
            2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(samples);
        unit.push_back({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                        std::cos(theta)});
      }
    }
    unit.push_back({0.0, 0.0, -1.0});
  }

  std::vector<Vector> points;
  points.reserve(unit.size());
  for (const Vector& v : unit) {
    Vector x = m * std::span<const double>(v);
    for (std::size_t i = 0; i < d; ++i) x[i] += e.center()[i];
    points.push_back(std::move(x));
  }
  return points;
}

}  // namespace mvoe

#endif  // MVOE_ELLIPSOID_HPP

#ifndef MVOE_LINALG_HPP
#define MVOE_LINALG_HPP

// Dense linear algebra for small symmetric matrices (d up to ~20). Row-major
// storage throughout, no sparse paths.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mvoe/error.hpp"

namespace mvoe::linalg {

using Vector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Vector add(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("vector sizes differ");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Vector negate(const Vector& a) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
  return out;
}

/// General dense matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionMismatch("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matrix-vector shape mismatch");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

inline Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix sum shape");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix sum shape");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

inline Matrix operator*(double s, const Matrix& a) {
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

inline double frobenius_norm(const Matrix& a) { return norm2(a.data()); }

inline double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

/// Symmetric matrix. Construction from a general matrix symmetrizes entries
/// as (M + M^T)/2 and rejects inputs whose asymmetry exceeds 1e-9 relative
/// (Frobenius).
class SymMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-9;

  SymMatrix() = default;

  explicit SymMatrix(const Matrix& m) : m_(check_and_symmetrize(m)) {}

  SymMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : SymMatrix(Matrix(rows)) {}

  /// Symmetrizes without the tolerance check. For products that are symmetric
  /// in exact arithmetic, e.g. F Q F^T.
  static SymMatrix symmetrized(const Matrix& m) {
    if (!m.square()) throw DimensionMismatch("symmetric matrix must be square");
    if (m.rows() == 0) throw InvalidArgument("matrix dimension must be at least 1");
    SymMatrix s;
    s.m_ = average_with_transpose(m);
    return s;
  }

  static SymMatrix identity(std::size_t n) { return symmetrized(Matrix::identity(n)); }
  static SymMatrix zeros(std::size_t n) { return symmetrized(Matrix(n, n)); }
  static SymMatrix diagonal(std::span<const double> d) {
    return symmetrized(Matrix::diagonal(d));
  }
  static SymMatrix diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }

  std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) t += m_(i, i);
    return t;
  }

  /// x^T M x
  double quadratic(std::span<const double> x) const {
    if (x.size() != dim()) throw DimensionMismatch("quadratic form size");
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s += x[i] * dot(m_.row(i), x);
    return s;
  }

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    return symmetrized(a.m_ + b.m_);
  }
  friend SymMatrix operator*(double s, const SymMatrix& a) { return symmetrized(s * a.m_); }
  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  static Matrix average_with_transpose(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = 0.5 * (m(i, j) + m(j, i));
    return out;
  }

  static Matrix check_and_symmetrize(const Matrix& m) {
    if (!m.square()) throw DimensionMismatch("symmetric matrix must be square");
    if (m.rows() == 0) throw InvalidArgument("matrix dimension must be at least 1");
    for (double v : m.data())
      if (!std::isfinite(v)) throw InvalidArgument("matrix has non-finite entries");
    const double scale = frobenius_norm(m);
    const double asym = frobenius_norm(m - transpose(m));
    if (asym > kSymmetryTolerance * scale) throw NotSymmetric("matrix is not symmetric");
    return average_with_transpose(m);
  }

  Matrix m_;
};

/// Lower-triangular L with positive diagonal, L L^T = M.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(Matrix lower) : lower_(std::move(lower)) {
    if (!lower_.square()) throw DimensionMismatch("Cholesky factor must be square");
    for (std::size_t i = 0; i < lower_.rows(); ++i) {
      if (!(lower_(i, i) > 0.0)) throw NotPositiveDefinite(i);
      for (std::size_t j = i + 1; j < lower_.cols(); ++j)
        if (lower_(i, j) != 0.0) throw InvalidArgument("Cholesky factor must be lower triangular");
    }
  }

  std::size_t dim() const noexcept { return lower_.rows(); }
  const Matrix& lower() const noexcept { return lower_; }
  double operator()(std::size_t i, std::size_t j) const { return lower_(i, j); }

 private:
  Matrix lower_;
};

/// Throws NotPositiveDefinite when a pivot is not positive or is lost in
/// rounding relative to its diagonal entry (numerically singular input).
inline CholeskyFactor cholesky(const SymMatrix& m) {
  const std::size_t n = m.dim();
  const double floor = 8.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > floor * m(j, j)) || !std::isfinite(d)) throw NotPositiveDefinite(j);
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return CholeskyFactor(std::move(l));
}

/// Product of the factor's diagonal, i.e. sqrt(det M).
inline double sqrt_det_from_cholesky(const CholeskyFactor& l) {
  double p = 1.0;
  for (std::size_t i = 0; i < l.dim(); ++i) p *= l(i, i);
  return p;
}

inline double det_from_cholesky(const CholeskyFactor& l) {
  const double p = sqrt_det_from_cholesky(l);
  return p * p;
}

inline double log_det_from_cholesky(const CholeskyFactor& l) {
  double s = 0.0;
  for (std::size_t i = 0; i < l.dim(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

/// Forward substitution: X with L X = B.
inline Matrix solve_lower(const CholeskyFactor& l, const Matrix& b) {
  const std::size_t n = l.dim();
  if (b.rows() != n) throw DimensionMismatch("solve_lower: row count");
  Matrix x = b;
  for (std::size_t c = 0; c < b.cols(); ++c)
    for (std::size_t i = 0; i < n; ++i) {
      double s = x(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
  return x;
}

inline Vector solve_lower(const CholeskyFactor& l, std::span<const double> b) {
  const std::size_t n = l.dim();
  if (b.size() != n) throw DimensionMismatch("solve_lower: size");
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

/// Back substitution with the transposed factor: X with L^T X = B.
inline Matrix solve_upper(const CholeskyFactor& l, const Matrix& b) {
  const std::size_t n = l.dim();
  if (b.rows() != n) throw DimensionMismatch("solve_upper: row count");
  Matrix x = b;
  for (std::size_t c = 0; c < b.cols(); ++c)
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x(k, c);
      x(ii, c) = s / l(ii, ii);
    }
  return x;
}

inline Vector solve_upper(const CholeskyFactor& l, std::span<const double> b) {
  const std::size_t n = l.dim();
  if (b.size() != n) throw DimensionMismatch("solve_upper: size");
  Vector x(b.begin(), b.end());
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

/// Solves M x = b given M = L L^T.
inline Vector cholesky_solve(const CholeskyFactor& l, std::span<const double> b) {
  return solve_upper(l, solve_lower(l, b));
}

inline SymMatrix inverse(const SymMatrix& m) {
  const CholeskyFactor l = cholesky(m);
  return SymMatrix::symmetrized(solve_upper(l, solve_lower(l, Matrix::identity(m.dim()))));
}

/// Inverse of a general square matrix by Gauss-Jordan elimination with
/// partial pivoting. Empty when a pivot vanishes.
inline std::optional<Matrix> invert_general(const Matrix& a) {
  if (!a.square()) throw DimensionMismatch("inverse of non-square matrix");
  const std::size_t n = a.rows();
  Matrix w = a;
  Matrix inv = Matrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(w(r, col)) > std::abs(w(piv, col))) piv = r;
    if (w(piv, col) == 0.0 || !std::isfinite(w(piv, col))) return std::nullopt;
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(w(piv, j), w(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const double p = w(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      w(col, j) /= p;
      inv(col, j) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = w(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        w(r, j) -= f * w(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // columns are eigenvectors
};

namespace detail {
inline double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}
}  // namespace detail

/// Cyclic Jacobi eigensolver. Converged when the off-diagonal Frobenius norm
/// drops below 1e-14 ||M||_F; throws NoConvergence after 100 sweeps.
inline EigenDecomposition sym_eig(const SymMatrix& m) {
  constexpr double kTolerance = 1e-14;
  constexpr int kMaxSweeps = 100;

  const std::size_t n = m.dim();
  Matrix a = m.matrix();
  Matrix v = Matrix::identity(n);
  const double threshold = kTolerance * frobenius_norm(a);

  bool converged = false;
  for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
    if (detail::off_diagonal_norm(a) <= threshold) {
      converged = true;
      break;
    }
    if (sweep == kMaxSweeps) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = tau >= 0.0 ? 1.0 / (tau + std::hypot(1.0, tau))
                                    : -1.0 / (-tau + std::hypot(1.0, tau));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  if (!converged) throw NoConvergence("Jacobi eigensolver exceeded 100 sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

/// Symmetric square root of a positive semidefinite matrix.
inline SymMatrix sqrt_psd(const SymMatrix& m) {
  const EigenDecomposition e = sym_eig(m);
  const std::size_t n = m.dim();
  Matrix scaled = e.vectors;
  for (std::size_t c = 0; c < n; ++c) {
    const double root = std::sqrt(std::max(e.values[c], 0.0));
    for (std::size_t r = 0; r < n; ++r) scaled(r, c) *= root;
  }
  return SymMatrix::symmetrized(scaled * transpose(e.vectors));
}

}  // namespace mvoe::linalg

#endif  // MVOE_LINALG_HPP

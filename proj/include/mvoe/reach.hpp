#ifndef MVOE_REACH_HPP
#define MVOE_REACH_HPP

// Discrete-time reach sets of x(t+1) = F x(t) + G u(t), u(t) in U(t), with
// every Minkowski sum replaced by its parameterized MVOE.

#include <span>
#include <utility>
#include <vector>

#include "mvoe/ellipsoid.hpp"
#include "mvoe/error.hpp"
#include "mvoe/linalg.hpp"
#include "mvoe/minkowski.hpp"

namespace mvoe::reach {

inline constexpr double kDefaultEps = 1e-9;

/// One time step: state map F (n x n), input map G (n x m), input set U in R^m.
class LtiStage {
 public:
  LtiStage(Matrix f, Matrix g, Ellipsoid input)
      : f_(std::move(f)), g_(std::move(g)), input_(std::move(input)) {
    if (!f_.square() || f_.rows() == 0) throw DimensionMismatch("stage: F must be square");
    if (g_.rows() != f_.rows()) throw DimensionMismatch("stage: G must have as many rows as F");
    if (g_.cols() != input_.dim()) throw DimensionMismatch("stage: G columns must match the input set");
  }

  std::size_t state_dim() const noexcept { return f_.rows(); }
  const Matrix& f() const noexcept { return f_; }
  const Matrix& g() const noexcept { return g_; }
  const Ellipsoid& input() const noexcept { return input_; }

 private:
  Matrix f_;
  Matrix g_;
  Ellipsoid input_;
};

/// stages[0] is the initial (forward) or terminal (backward) set.
struct ReachTube {
  std::vector<Ellipsoid> stages;
};

/// Image of the input set under a rectangular map. The image shape
/// M Q_u M^T is lifted when eps > 0 and its smallest eigenvalue is at most
/// eps times its largest; with eps = 0 it must already be positive definite.
inline Ellipsoid input_image(const Ellipsoid& input, const Matrix& map, double eps) {
  if (!(eps >= 0.0)) throw InvalidArgument("eps must be nonnegative");
  if (map.cols() != input.dim()) throw DimensionMismatch("input map columns must match input set");
  Vector center = map * std::span<const double>(input.center());
  SymMatrix shape =
      SymMatrix::symmetrized(map * input.shape().matrix() * linalg::transpose(map));
  if (eps > 0.0) {
    const auto eig = linalg::sym_eig(shape);
    if (eig.values.front() <= eps * std::max(eig.values.back(), 0.0))
      shape = lift_degenerate(shape, eps);
  }
  return Ellipsoid(std::move(center), std::move(shape));
}

/// X(t+1) = MVOE(F X(t) + G U(t)).
inline Ellipsoid step_forward(const Ellipsoid& state, const LtiStage& stage,
                              double eps = kDefaultEps, const SolverOptions& opts = {}) {
  require_same_dim(state.dim(), stage.state_dim(), "step_forward: state dimension");
  const Ellipsoid a = affine_image(state, stage.f());
  const Ellipsoid b = input_image(stage.input(), stage.g(), eps);
  return mvoe_pair(a, b, opts).ellipsoid;
}

inline ReachTube propagate_forward(const Ellipsoid& x0, std::span<const LtiStage> stages,
                                   double eps = kDefaultEps, const SolverOptions& opts = {}) {
  ReachTube tube;
  tube.stages.reserve(stages.size() + 1);
  tube.stages.push_back(x0);
  for (const LtiStage& s : stages) tube.stages.push_back(step_forward(tube.stages.back(), s, eps, opts));
  return tube;
}

/// F^{-1}, rejecting numerically singular F.
inline Matrix checked_inverse(const Matrix& f) {
  try {
    (void)linalg::cholesky(SymMatrix::symmetrized(linalg::transpose(f) * f));
  } catch (const NotPositiveDefinite&) {
    throw SingularMap("state transition matrix is singular");
  }
  auto inv = linalg::invert_general(f);
  if (!inv) throw SingularMap("state transition matrix is singular");
  const double residual = linalg::max_abs(f * *inv - Matrix::identity(f.rows()));
  if (residual > 1e-6) throw SingularMap("state transition matrix is numerically singular");
  return *inv;
}

/// X(t) = MVOE(F^{-1} X(t+1) + (-F^{-1} G) U(t)).
inline Ellipsoid step_backward(const Ellipsoid& terminal, const LtiStage& stage,
                               double eps = kDefaultEps, const SolverOptions& opts = {}) {
  require_same_dim(terminal.dim(), stage.state_dim(), "step_backward: state dimension");
  const Matrix finv = checked_inverse(stage.f());
  const Ellipsoid a = affine_image(terminal, finv);
  const Ellipsoid b = input_image(stage.input(), -1.0 * (finv * stage.g()), eps);
  return mvoe_pair(a, b, opts).ellipsoid;
}

/// Walks `stages` (given in forward time order) from last to first.
inline ReachTube propagate_backward(const Ellipsoid& x1, std::span<const LtiStage> stages,
                                    double eps = kDefaultEps, const SolverOptions& opts = {}) {
  ReachTube tube;
  tube.stages.reserve(stages.size() + 1);
  tube.stages.push_back(x1);
  for (auto it = stages.rbegin(); it != stages.rend(); ++it)
    tube.stages.push_back(step_backward(tube.stages.back(), *it, eps, opts));
  return tube;
}

}  // namespace mvoe::reach

#endif  // MVOE_REACH_HPP

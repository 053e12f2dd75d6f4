#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "support.hpp"

namespace {

using namespace mvoe;
using linalg::Matrix;
using mvoe::testing::Rng;
using std::numbers::pi;

SymMatrix eye(std::size_t n) { return SymMatrix::identity(n); }

TEST(QOfBeta, Substitution) {
  EXPECT_EQ(q_of_beta(eye(2), eye(2), 1.0), SymMatrix::diagonal({4.0, 4.0}));
  EXPECT_EQ(q_of_beta(eye(2), SymMatrix::diagonal({4.0, 4.0}), 0.5), SymMatrix::diagonal({9.0, 9.0}));
  EXPECT_THROW(q_of_beta(eye(2), eye(2), 0.0), InvalidArgument);
  EXPECT_THROW(q_of_beta(eye(2), eye(3), 1.0), DimensionMismatch);
}

TEST(QOfDirection, EqualBalls) {
  const std::vector<SymMatrix> qs{eye(2), eye(2)};
  Rng rng(31);
  for (int i = 0; i < 5; ++i) {
    const SymMatrix q = q_of_direction(qs, Direction(rng.normal_vector(2)));
    EXPECT_LT(linalg::max_abs(q.matrix() - 4.0 * Matrix::identity(2)), 1e-15);
  }
}

TEST(QOfAlpha, EqualBalls) {
  const std::vector<SymMatrix> two{eye(2), eye(2)};
  EXPECT_EQ(q_of_alpha(two, std::vector<double>{0.5, 0.5}), SymMatrix::diagonal({4.0, 4.0}));
  const std::vector<SymMatrix> three{eye(2), eye(2), eye(2)};
  const double t = 1.0 / 3.0;
  EXPECT_LT(linalg::max_abs(q_of_alpha(three, std::vector<double>{t, t, 1.0 - 2.0 * t}).matrix() -
                            9.0 * Matrix::identity(2)),
            1e-14);
  EXPECT_THROW(q_of_alpha(two, std::vector<double>{0.5, 0.6}), InvalidArgument);
  EXPECT_THROW(q_of_alpha(two, std::vector<double>{1.5, -0.5}), InvalidArgument);
}

TEST(Transforms, Substitution) {
  Rng rng(32);
  const SymMatrix q = rng.spd(3);
  for (int i = 0; i < 5; ++i)
    EXPECT_NEAR(transform_direction_to_beta(q, q, Direction(rng.normal_vector(3))), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(transform_direction_to_beta(SymMatrix::diagonal({4.0, 1.0}), eye(2), Direction({1, 0})), 2.0);
  EXPECT_DOUBLE_EQ(transform_alpha_to_beta(0.5), 1.0);
  EXPECT_THROW(transform_alpha_to_beta(1.0), InvalidArgument);
}

TEST(Parameterizations, AgreeAcrossFamilies) {
  Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const SymMatrix q1 = rng.spd(n);
    const SymMatrix q2 = rng.spd(n);
    const std::vector<SymMatrix> qs{q1, q2};
    const double scale = linalg::max_abs(q1.matrix()) + linalg::max_abs(q2.matrix());

    const Direction u(rng.normal_vector(n));
    const SymMatrix by_dir = q_of_direction(qs, u);
    const SymMatrix by_beta = q_of_beta(q1, q2, transform_direction_to_beta(q1, q2, u));
    EXPECT_LT(linalg::max_abs(by_dir.matrix() - by_beta.matrix()),
              1e-12 * linalg::max_abs(by_beta.matrix()));

    const double a = rng.uniform(0.01, 0.99);
    const SymMatrix by_alpha = q_of_alpha(qs, std::vector<double>{a, 1.0 - a});
    const SymMatrix by_beta2 = q_of_beta(q1, q2, transform_alpha_to_beta(a));
    EXPECT_LT(linalg::max_abs(by_alpha.matrix() - by_beta2.matrix()),
              1e-12 * std::max(scale, linalg::max_abs(by_beta2.matrix())));
  }
}

TEST(Parameterizations, TouchInTheirOwnDirection) {
  Rng rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const int k = 2 + trial % 3;
    std::vector<SymMatrix> qs;
    for (int i = 0; i < k; ++i) qs.push_back(rng.spd(n));
    const Direction u(rng.normal_vector(n));
    const SymMatrix q = q_of_direction(qs, u);
    double sum = 0.0;
    for (const auto& qk : qs) sum += std::sqrt(qk.quadratic(u.vector()));
    EXPECT_NEAR(std::sqrt(q.quadratic(u.vector())), sum, 1e-12 * sum);
  }
}

TEST(GeneralizedSpectrum, DiagonalCases) {
  const auto a = generalized_spectrum(eye(2), SymMatrix::diagonal({2.0, 0.5}));
  EXPECT_DOUBLE_EQ(a[0], 0.5);
  EXPECT_DOUBLE_EQ(a[1], 2.0);
  const auto b = generalized_spectrum(SymMatrix::diagonal({1.0, 4.0}), SymMatrix::diagonal({2.0, 2.0}));
  EXPECT_DOUBLE_EQ(b[0], 0.5);
  EXPECT_DOUBLE_EQ(b[1], 2.0);
  EXPECT_THROW(GeneralizedSpectrum(Vector{1.0, 0.0}), InvalidArgument);
  EXPECT_THROW(generalized_spectrum(eye(2), SymMatrix::zeros(2)), NotPositiveDefinite);
}

TEST(GeneralizedSpectrum, ProductIsDeterminantRatio) {
  Rng rng(35);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const SymMatrix q1 = rng.spd(n, 0.1, 10.0);
    const SymMatrix q2 = rng.spd(n, 0.1, 10.0);
    const auto lambda = generalized_spectrum(q1, q2);
    double prod = 1.0;
    for (double l : lambda.values()) prod *= l;
    const double ratio =
        mvoe::testing::cofactor_det(q2.matrix()) / mvoe::testing::cofactor_det(q1.matrix());
    EXPECT_LE(mvoe::testing::rel_diff(prod, ratio), 1e-10);
  }
}

TEST(OptimalityResidual, VanishesOnEqualSpectra) {
  EXPECT_DOUBLE_EQ(optimality_residual(GeneralizedSpectrum({1, 1, 1}), 1.0), 0.0);
  EXPECT_NEAR(optimality_residual(GeneralizedSpectrum({9, 9}), 1.0 / 3.0), 0.0, 1e-15);
  EXPECT_LT(std::abs(optimality_residual(GeneralizedSpectrum({1, 4}), 0.7215)), 1e-2);
  const double root = mvoe::testing::brute_force_root({1, 4});
  EXPECT_NEAR(root, 0.7215, 1e-3);
}

TEST(OptimalityResidual, StrictlyDecreasing) {
  Rng rng(36);
  const auto lambda = rng.spectrum(6, 1e-3, 1e3);
  double prev = optimality_residual(lambda, 1e-4);
  for (double b = 2e-4; b < 1e4; b *= 1.5) {
    const double r = optimality_residual(lambda, b);
    EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(OptimalityPolynomial, PlanarCubics) {
  const auto p = optimality_polynomial(GeneralizedSpectrum({1, 1}));
  ASSERT_EQ(p.coeffs().size(), 4u);
  const double want_11[] = {2, 2, -2, -2};
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(p.coeffs()[i], want_11[i]);
  EXPECT_DOUBLE_EQ(p(1.0), 0.0);

  // Divided by l1 l2 = 4 relative to 8b^3 + 5b^2 - 5b - 2.
  const auto q = optimality_polynomial(GeneralizedSpectrum({1, 4}));
  const double want_14[] = {8, 5, -5, -2};
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(4.0 * q.coeffs()[i], want_14[i]);
  for (double b : {0.1, 0.7, 2.0}) EXPECT_NEAR(4.0 * q(b), planar_cubic(1, 4, b), 1e-13);
}

TEST(OptimalityPolynomial, SameRootAsResidual) {
  Rng rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + trial % 10;
    const auto lambda = rng.spectrum(d, 1e-2, 1e2);
    const auto p = optimality_polynomial(lambda);
    EXPECT_EQ(p.coeffs().size(), d + 2);
    EXPECT_EQ(p.sign_changes(), 1);
    const double root = mvoe::testing::brute_force_root(lambda.values());
    EXPECT_LT(p(root * (1.0 - 1e-6)), 0.0);
    EXPECT_GT(p(root * (1.0 + 1e-6)), 0.0);
  }
}

TEST(OptimalityPolynomial, MuSequenceOnEqualSpectrum) {
  // mu_r = (d-r) e_r - (r-1) e_{r-1}; for lambda = (1,1,1): e = (1,3,3,1) so
  // mu = (6, 0). The coefficients still change sign once.
  const auto p = optimality_polynomial(GeneralizedSpectrum({1, 1, 1}));
  ASSERT_EQ(p.mu().size(), 2u);
  EXPECT_DOUBLE_EQ(p.mu()[0], 6.0);
  EXPECT_DOUBLE_EQ(p.mu()[1], 0.0);
  EXPECT_FALSE(p.mu_positive_and_increasing());
  EXPECT_EQ(p.sign_changes(), 1);
  const double want[] = {3, 6, 0, -6, -3};
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(p.coeffs()[i], want[i]);
}

TEST(Bracket, ClosedForm) {
  const Bracket b = bracket_beta_2d(1, 1);
  EXPECT_NEAR(b.lo, 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(b.hi, 2.0);
  const Bracket c = bracket_beta_2d(1, 4);
  EXPECT_LT(planar_cubic(1, 4, c.lo), 0.0);
  EXPECT_GT(planar_cubic(1, 4, c.hi), 0.0);
}

TEST(Bracket, ContainsRootOnRandomSpectra) {
  Rng rng(38);
  for (int trial = 0; trial < 1000; ++trial) {
    const double l1 = rng.log_uniform(1e-3, 1e3);
    const double l2 = rng.log_uniform(1e-3, 1e3);
    const Bracket b = bracket_beta_2d(l1, l2);
    const double root = mvoe::testing::brute_force_root({l1, l2});
    EXPECT_LT(b.lo, root);
    EXPECT_GT(b.hi, root);
  }
}

TEST(Bisection, KnownRoots) {
  EXPECT_NEAR(solve_beta_bisection(GeneralizedSpectrum({1, 1})).beta, 1.0, 1e-12);
  EXPECT_NEAR(solve_beta_bisection(GeneralizedSpectrum({4, 4})).beta, 0.5, 1e-12);
  const double b = solve_beta_bisection(GeneralizedSpectrum({1, 4})).beta;
  EXPECT_NEAR(b, 0.7215, 1e-3);
  EXPECT_NEAR(b, solve_beta_fixed_point(GeneralizedSpectrum({1, 4}), 1.0).beta, 1e-8);
  EXPECT_THROW(solve_beta_bisection(GeneralizedSpectrum({1, 2, 3})), InvalidArgument);
}

TEST(Bisection, MatchesBruteForceRoot) {
  Rng rng(39);
  SolverOptions opts;
  opts.tolerance = 1e-10;
  for (int trial = 0; trial < 200; ++trial) {
    const auto lambda = rng.spectrum(2, 1e-2, 1e2);
    const double b = solve_beta_bisection(lambda, opts).beta;
    const double root = mvoe::testing::brute_force_root(lambda.values());
    EXPECT_LT(std::abs(b - root), 10.0 * opts.tolerance * std::max(1.0, root));
  }
}

TEST(FixedPoint, MapValues) {
  EXPECT_DOUBLE_EQ(fixed_point_map(GeneralizedSpectrum({1, 1, 1}), 37.0), 1.0);
  EXPECT_NEAR(fixed_point_map(GeneralizedSpectrum({1, 4}), 1.0), std::sqrt(0.7 / 1.3), 1e-15);
  EXPECT_NEAR(std::sqrt(0.7 / 1.3), 0.73380, 1e-5);
}

TEST(FixedPoint, TrivialConvergence) {
  // One map evaluation lands on the root; a second confirms the step is zero.
  const auto a = solve_beta_fixed_point(GeneralizedSpectrum({1, 1, 1}), 1000.0);
  EXPECT_DOUBLE_EQ(a.beta, 1.0);
  EXPECT_EQ(a.iterations, 2);
  EXPECT_DOUBLE_EQ(fixed_point_map(GeneralizedSpectrum({1, 1, 1}), 1000.0), 1.0);

  const auto b = solve_beta_fixed_point(GeneralizedSpectrum({9}), 5.0);
  EXPECT_DOUBLE_EQ(b.beta, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(fixed_point_map(GeneralizedSpectrum({9}), 5.0), 1.0 / 3.0);
}

TEST(FixedPoint, MultiStartAgreement) {
  const GeneralizedSpectrum lambda({1, 4});
  const double a = solve_beta_fixed_point(lambda, 1e-3).beta;
  const double b = solve_beta_fixed_point(lambda, 1.0).beta;
  const double c = solve_beta_fixed_point(lambda, 1e3).beta;
  EXPECT_NEAR(a, b, 1e-9);
  EXPECT_NEAR(b, c, 1e-9);
  EXPECT_NEAR(b, 0.7215, 1e-3);
  EXPECT_NEAR(fixed_point_map(lambda, b), b, 1e-12);
}

TEST(FixedPoint, ReportsLastIterate) {
  SolverOptions opts;
  opts.max_iterations = 2;
  try {
    (void)solve_beta_fixed_point(GeneralizedSpectrum({1e-3, 1e3, 5.0}), 1e3, opts);
    FAIL() << "expected MaxIterationsExceeded";
  } catch (const MaxIterationsExceeded& e) {
    EXPECT_GT(e.last_iterate(), 0.0);
  }
}

TEST(TraceOptimal, ClosedFormAndGridMinimum) {
  Rng rng(40);
  const SymMatrix q = rng.spd(3);
  EXPECT_DOUBLE_EQ(beta_trace_optimal(q, q), 1.0);
  EXPECT_DOUBLE_EQ(beta_trace_optimal(SymMatrix::diagonal({4.0, 1.0}), eye(2)), std::sqrt(2.5));

  for (int trial = 0; trial < 20; ++trial) {
    const SymMatrix q1 = rng.spd(4);
    const SymMatrix q2 = rng.spd(4);
    const double bt = beta_trace_optimal(q1, q2);
    const double best = q_of_beta(q1, q2, bt).trace();
    for (double b = 1e-3; b < 1e3; b *= 1.01) EXPECT_GE(q_of_beta(q1, q2, b).trace(), best * (1 - 1e-14));
  }
}

TEST(Derivatives, SecondDerivativeFormsAgreeAtRoot) {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const auto lambda = rng.spectrum(1 + trial % 10, 1e-2, 1e2);
    const double b = solve_beta_fixed_point(lambda, 1.0).beta;
    const double general = log_det_second_derivative(lambda, b);
    const double at_root = second_derivative_at_root(lambda, b);
    EXPECT_GT(at_root, 0.0);
    EXPECT_NEAR(general, at_root, 1e-6 * at_root);
  }
}

TEST(MvoePair, UnitDisks) {
  const Ellipsoid d(eye(2));
  for (Method m : {Method::Auto, Method::Bisection, Method::FixedPoint, Method::Trace}) {
    SolverOptions opts;
    opts.method = m;
    const auto r = mvoe_pair(d, d, opts);
    EXPECT_LT(linalg::max_abs(r.ellipsoid.shape().matrix() - 4.0 * Matrix::identity(2)), 1e-12);
    EXPECT_NEAR(r.volume, 4.0 * pi, 1e-12);
  }
  EXPECT_EQ(mvoe_pair(d, d).method, Method::Bisection);
  EXPECT_EQ(mvoe_pair(Ellipsoid(eye(3)), Ellipsoid(eye(3))).method, Method::FixedPoint);
}

TEST(MvoePair, IntervalsAreExact) {
  const auto r = mvoe_pair(Ellipsoid(SymMatrix::diagonal({1.0})), Ellipsoid(SymMatrix::diagonal({4.0})));
  EXPECT_DOUBLE_EQ(r.ellipsoid.shape()(0, 0), 9.0);
  EXPECT_DOUBLE_EQ(r.volume, 6.0);
}

TEST(MvoePair, CentersAddAndDimsMustMatch) {
  const auto r = mvoe_pair(Ellipsoid({1, 2}, eye(2)), Ellipsoid({-3, 5}, eye(2)));
  EXPECT_EQ(r.ellipsoid.center(), (Vector{-2, 7}));
  EXPECT_THROW(mvoe_pair(Ellipsoid(eye(2)), Ellipsoid(eye(3))), DimensionMismatch);
}

TEST(MvoePair, ScalingLaw) {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const SymMatrix q1 = rng.spd(n);
    const SymMatrix q2 = rng.spd(n);
    const double c = rng.log_uniform(1e-2, 1e2);
    const auto a = mvoe_pair(Ellipsoid(q1), Ellipsoid(q2));
    const auto b = mvoe_pair(Ellipsoid(c * q1), Ellipsoid(c * q2));
    EXPECT_NEAR(a.beta, b.beta, 1e-9 * a.beta);
    EXPECT_LT(linalg::max_abs(b.ellipsoid.shape().matrix() - c * a.ellipsoid.shape().matrix()),
              1e-9 * c * linalg::max_abs(a.ellipsoid.shape().matrix()));
  }
}

TEST(MvoePair, EqualSpectrumClosedForm) {
  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const SymMatrix q = rng.spd(n);
    const double l = rng.log_uniform(1e-2, 1e2);
    const auto r = mvoe_pair(Ellipsoid(q), Ellipsoid(l * q));
    EXPECT_NEAR(r.beta, 1.0 / std::sqrt(l), 1e-10 / std::sqrt(l));
  }
}

TEST(MvoePair, VerifyModeAcceptsRealRoots) {
  Rng rng(44);
  SolverOptions opts;
  opts.verify = true;
  EXPECT_NO_THROW(mvoe_pair(rng.ellipsoid(4), rng.ellipsoid(4), opts));
  opts.tolerance = -1.0;
  EXPECT_THROW(mvoe_pair(rng.ellipsoid(4), rng.ellipsoid(4), opts), InvalidArgument);
}

TEST(MvoeSum, SingleInputIsIdentity) {
  const Ellipsoid e({1, 2}, SymMatrix(Matrix{{2, 1}, {1, 3}}));
  const std::vector<Ellipsoid> es{e};
  const auto s = mvoe_sum(es);
  EXPECT_EQ(s.ellipsoid, e);
  EXPECT_TRUE(s.steps.empty());
  EXPECT_THROW(mvoe_sum(std::vector<Ellipsoid>{}), InvalidArgument);
}

TEST(MvoeSum, ThreeUnitDisks) {
  const std::vector<Ellipsoid> es(3, Ellipsoid(eye(2)));
  const auto s = mvoe_sum(es);
  EXPECT_LT(linalg::max_abs(s.ellipsoid.shape().matrix() - 9.0 * Matrix::identity(2)), 1e-12);
  EXPECT_NEAR(s.volume, 9.0 * pi, 1e-11);
  ASSERT_EQ(s.betas().size(), 2u);
  EXPECT_NEAR(s.betas()[0], 1.0, 1e-12);
  EXPECT_NEAR(s.betas()[1], 2.0, 1e-12);
}

TEST(MvoeSum, CenterIsSumOfCentersAndContainsAll) {
  Rng rng(45);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Ellipsoid> es;
    Vector total(2, 0.0);
    for (int k = 0; k < 4; ++k) {
      es.push_back(rng.ellipsoid(2));
      total = linalg::add(total, es.back().center());
    }
    const auto s = mvoe_sum(es);
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(s.ellipsoid.center()[i], total[i], 1e-12);
    EXPECT_TRUE(oracle::containment_check(s.ellipsoid, es, 1000, 7).passed);
  }
}

TEST(Method, ParseAndPrint) {
  EXPECT_EQ(parse_method("fixed-point"), Method::FixedPoint);
  EXPECT_EQ(parse_method("fixed_point"), Method::FixedPoint);
  EXPECT_EQ(parse_method("bisection"), Method::Bisection);
  EXPECT_FALSE(parse_method("newton").has_value());
  EXPECT_EQ(to_string(Method::Trace), "trace");
}

}  // namespace

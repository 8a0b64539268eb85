#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "traceinv/bounds.hpp"
#include "traceinv/inequality.hpp"
#include "traceinv/interpolant.hpp"
#include "traceinv/kernel.hpp"
#include "traceinv/parallel.hpp"
#include "traceinv/tau.hpp"

using namespace traceinv;
using testutil::rel;

namespace {

// Diagonal A with B = I: tau(t) = mean of 1/(d_i + t), exactly.
struct DiagonalCase {
  Eigen::VectorXd d;
  TauContext ctx;

  explicit DiagonalCase(Eigen::VectorXd diag)
      : d(std::move(diag)), ctx(TauContext::build(SpdMatrix::diagonal(d), SpdMatrix::identity(d.size()))) {}

  double tau(double t) const { return (d.array() + t).inverse().mean(); }

  InterpolantPoints points(const std::vector<double>& nodes) const {
    InterpolantPoints p;
    for (double t : nodes) {
      p.t.push_back(t);
      p.tau.push_back(tau(t));
      p.meta.emplace_back();
    }
    return p;
  }
};

double max_rel_error(const Interpolant& f, const DiagonalCase& c, const std::vector<double>& ts) {
  double worst = 0.0;
  for (double t : ts) worst = std::max(worst, rel(f(t), c.tau(t)));
  return worst;
}

}  // namespace

TEST(UpperBound, Values) {
  EXPECT_EQ(tau_upper_bound(0.0, 6.33), 6.33);
  EXPECT_NEAR(tau_upper_bound(1e6, 6.33) / 1e-6, 1.0, 1e-6);
  // diag(1,2), B = I, t = 1.
  const double tau = (0.5 + 1.0 / 3.0) / 2.0;
  EXPECT_NEAR(tau, 5.0 / 12.0, 1e-15);
  EXPECT_NEAR(tau_upper_bound(1.0, 0.75), 3.0 / 7.0, 1e-15);
  EXPECT_LE(tau, tau_upper_bound(1.0, 0.75));
  EXPECT_THROW(tau_upper_bound(1.0, 0.0), InvalidArgument);
}

TEST(LowerBound, Values) {
  // Unit-diagonal correlation matrix with B = I: 1/(1+t) after normalization.
  const SpdMatrix k = build_exponential_kernel(grid_points(5), 0.1);
  const TauContext ctx = TauContext::build(k, SpdMatrix::identity(25));
  EXPECT_DOUBLE_EQ(tau_lower_bound(0.0, k.trace(), 25.0, 25, ctx.trace_b_inv), 1.0);
  EXPECT_LE(1.0, ctx.tau0);
  EXPECT_NEAR(tau_lower_bound(2.0, 25.0, 25.0, 25, 25.0), 1.0 / 3.0, 1e-15);
  // A = cI is the equality case.
  EXPECT_NEAR(tau_lower_bound(0.5, 4 * 2.0, 4.0, 4), 4.0 / 2.5, 1e-15);
  EXPECT_DOUBLE_EQ(tau_lower_bound(0.0, 4.0, 2.0, 2), 1.0);
  EXPECT_THROW(tau_lower_bound(-2.0, 1.0, 1.0, 1), InvalidArgument);
}

TEST(Bounds, OrderingOnRandomPencils) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto c = testutil::random_spd(15, 100 + seed, 1e-2, 1e2);
    const SpdMatrix a = SpdMatrix::dense(c.m);
    const TauContext ctx = TauContext::build(a, SpdMatrix::identity(15));
    EXPECT_EQ(tau_upper_bound(0.0, ctx.tau0), ctx.tau0);
    for (double t : logspace(1e-4, 1e4, 30)) {
      const double tau = (c.lambda.array() + t).inverse().mean();
      EXPECT_LE(tau, tau_upper_bound(t, ctx.tau0) * (1 + 1e-12));
      EXPECT_LE(tau_lower_bound(t, a.trace(), 15.0, 15, ctx.trace_b_inv), tau * (1 + 1e-12));
    }
  }
}

TEST(HarmonicMean, Value) { EXPECT_DOUBLE_EQ(harmonic_mean(std::vector<double>{1, 2, 4}), 3.0 / 1.75); }

TEST(InterpolantPoints, Validation) {
  InterpolantPoints p;
  p.t = {1.0, 0.5};
  p.tau = {1.0, 0.5};
  EXPECT_THROW(p.validate(), InvalidArgument);
  p.t = {0.5, 1.0};
  p.tau = {0.5, 0.6};
  try {
    p.validate();
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("raise n_v"), std::string::npos);
  }
  p.tau = {0.6, 0.5};
  EXPECT_NO_THROW(p.validate());
  EXPECT_THROW(p.validate(0.7), InvalidArgument);
  p.tau = {0.6, -0.5};
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(DefaultNodes, CentredOnInverseTau0) {
  const auto n = default_nodes(100.0, 5);
  ASSERT_EQ(n.size(), 5u);
  EXPECT_NEAR(n[2], 1e-2, 1e-15);
  EXPECT_NEAR(n.front(), 1e-4, 1e-18);
  EXPECT_NEAR(n.back(), 1.0, 1e-14);
  EXPECT_NEAR(default_nodes(4.0, 1)[0], 0.25, 1e-15);
}

TEST(FitBasis, EmptyIsUpperBound) {
  const DiagonalCase c(Eigen::Vector3d(1, 2, 5));
  const Interpolant f = fit_basis(c.ctx, InterpolantPoints{});
  for (double t : logspace(1e-3, 1e3, 20)) EXPECT_LE(rel(f(t), tau_upper_bound(t, c.ctx.tau0)), 1e-15);
}

TEST(FitBasis, ReproducesNodesAndBeatsBound) {
  const DiagonalCase c(Eigen::Vector3d(1, 2, 5));
  const std::vector<double> nodes = {0.1, 1.0, 10.0};
  const Interpolant f = fit_basis(c.ctx, c.points(nodes));
  EXPECT_EQ(f.p(), 3);
  EXPECT_EQ(f.scale(), 10.0);
  for (double t : nodes) EXPECT_LE(rel(f(t), c.tau(t)), 1e-8);
  const auto sweep = logspace(1e-3, 1e3, 200);
  EXPECT_LT(max_rel_error(f, c, sweep), max_rel_error(Interpolant::bound(c.ctx.tau0), c, sweep));
}

TEST(FitBasis, OriginAsymptoteAndFloor) {
  const DiagonalCase c(Eigen::Vector4d(0.5, 1, 3, 8));
  const Interpolant f = fit_basis(c.ctx, c.points({0.1, 1.0}));
  EXPECT_EQ(f(0.0), c.ctx.tau0);
  const double big = 1e8 / c.ctx.tau0;
  EXPECT_LE(std::abs(big * f(big) - 1.0), 0.01);
  EXPECT_THROW(f(1e-5), InvalidArgument);
  EXPECT_NO_THROW(f.evaluate(1e-5, true));
  EXPECT_THROW(f(-1.0), InvalidArgument);
}

TEST(FitBasis, NonPositiveResult) {
  const Interpolant f = Interpolant::basis(1.0, {-100.0}, 1.0, gram_schmidt(1), {1.0});
  EXPECT_THROW(f(0.5), NonPositiveResult);
}

TEST(FitBasis, OrderMismatch) {
  const DiagonalCase c(Eigen::Vector3d(1, 2, 5));
  EXPECT_THROW(fit_basis(c.ctx, c.points({0.1, 1.0}), gram_schmidt(3)), InvalidArgument);
}

TEST(FitBasis, ConditioningWithOrthogonalFunctions) {
  const SpdMatrix k = build_exponential_kernel(grid_points(10), 0.1);
  const TauContext ctx = TauContext::build(k, SpdMatrix::identity(100));
  const TauFunction tau(ctx, TraceOptions{});
  for (int p = 1; p <= 9; ++p) {
    const InterpolantPoints pts = compute_interpolant_points(tau, logspace(1e-4, 1e3, p));
    const Interpolant f = fit_basis(ctx, pts);
    EXPECT_LT(f.condition(), 1e10) << p;
    EXPECT_LT(f.residual(), 1e-10) << p;
    for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_LE(rel(f(pts.t[i]), pts.tau[i]), 1e-8) << p;
  }
}

TEST(FitRational, OrderZeroIsBound) {
  const DiagonalCase c(Eigen::Vector3d(1, 2, 5));
  const Interpolant f = fit_rational(c.ctx, InterpolantPoints{}, 0);
  EXPECT_EQ(f.p(), 0);
  EXPECT_NEAR(f.denominator()[0], 1.0 / c.ctx.tau0, 1e-16);
  const Interpolant g = Interpolant::rational(2.0, {1.0}, {0.5}, {});
  EXPECT_NEAR(g(1.0), 2.0 / 3.0, 1e-15);
}

TEST(FitRational, ReproducesNodesOriginAsymptote) {
  const DiagonalCase c((Eigen::VectorXd(6) << 1e-3, 0.01, 0.2, 1, 4, 30).finished());
  for (int p : {1, 2, 3}) {
    const auto nodes = logspace(1e-3, 10.0, 2 * p);
    const Interpolant f = fit_rational(c.ctx, c.points(nodes), p);
    for (double t : nodes) EXPECT_LE(rel(f(t), c.tau(t)), 1e-8) << p;
    EXPECT_EQ(f(0.0), c.ctx.tau0);
    EXPECT_NEAR(f.numerator()[0], f.denominator()[0] * c.ctx.tau0, 1e-15 * std::abs(f.numerator()[0]));
    const double big = 1e8 / c.ctx.tau0;
    EXPECT_LE(std::abs(big * f(big) - 1.0), 0.01) << p;
    EXPECT_LE(std::abs(1e12 * f(1e12) - 1.0), 1e-6) << p;
  }
}

TEST(FitRational, ExactForRationalTau) {
  // Two distinct eigenvalues: tau is itself a p = 1 rational function.
  const DiagonalCase c(Eigen::Vector2d(1, 3));
  const Interpolant f = fit_rational(c.ctx, c.points({0.5, 2.0}), 1);
  for (double t : logspace(1e-3, 1e3, 50)) EXPECT_LE(rel(f(t), c.tau(t)), 1e-12);
}

TEST(FitRational, PoleReportedWithRoots) {
  const DiagonalCase c(Eigen::Vector2d(1, 3));
  const Interpolant f = fit_rational(c.ctx, c.points({0.5, 2.0}), 1);
  const auto poles = f.poles();
  ASSERT_EQ(poles.size(), 2u);
  EXPECT_NEAR(poles[0], -3.0, 1e-10);
  EXPECT_NEAR(poles[1], -1.0, 1e-10);
  try {
    fit_rational(c.ctx, c.points({0.5, 2.0}), 1, EvalInterval{-2.0, 10.0});
    FAIL() << "expected PoleInDomain";
  } catch (const PoleInDomain& e) {
    EXPECT_EQ(e.roots().size(), 2u);
    EXPECT_NE(std::string(e.what()).find("move the interpolant points"), std::string::npos);
  }
}

TEST(FitRational, WrongNodeCount) {
  const DiagonalCase c(Eigen::Vector2d(1, 3));
  EXPECT_THROW(fit_rational(c.ctx, c.points({0.5, 2.0, 3.0}), 1), InvalidArgument);
}

TEST(SolveDense, Singular) {
  Eigen::Matrix2d m;
  m << 1, 2, 2, 4;
  EXPECT_THROW(detail::solve_dense(m, Eigen::Vector2d(1, 1), "test"), SingularSystem);
}

TEST(OrderZero, AllFormsMatchClosedForm) {
  const double tau0 = 6.459507714836217;
  const TauContext ctx = TauContext::from_values(tau0, 1.0, 1);
  const Interpolant r = fit_rational(ctx, InterpolantPoints{}, 0);
  const Interpolant b = fit_basis(ctx, InterpolantPoints{});
  for (double t : logspace(1e-6, 1e6, 100)) {
    const double ref = tau0 / (1.0 + t * tau0);
    EXPECT_LE(rel(r(t), ref), 1e-15) << t;
    EXPECT_LE(rel(b(t), ref), 1e-15) << t;
  }
}

TEST(Interpolant, JsonRoundTrip) {
  const DiagonalCase c((Eigen::VectorXd(5) << 0.1, 0.5, 1, 4, 9).finished());
  const Interpolant r = fit_rational(c.ctx, c.points({0.01, 0.1, 1.0, 10.0}), 2);
  const Interpolant b = fit_basis(c.ctx, c.points({0.01, 0.1, 1.0, 10.0}));
  for (const Interpolant& f : {r, b, Interpolant::bound(2.0)}) {
    const auto j = to_json(f);
    const Interpolant g = interpolant_from_json(nlohmann::ordered_json::parse(j.dump()));
    EXPECT_EQ(g.variant(), f.variant());
    for (double t : {0.05, 0.5, 5.0}) EXPECT_EQ(g(t), f(t));
  }
  EXPECT_EQ(to_json(r)["variant"], "rational");
  EXPECT_EQ(to_json(r)["coefficients"].size(), 5u);
}

TEST(Interpolant, ConcurrentEvaluation) {
  const DiagonalCase c((Eigen::VectorXd(5) << 0.1, 0.5, 1, 4, 9).finished());
  const Interpolant f = fit_rational(c.ctx, c.points({0.01, 0.1, 1.0, 10.0}), 2);
  const auto ts = logspace(1e-3, 1e3, 500);
  std::vector<double> out(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) { out[i] = f(ts[i]); }, 4);
  for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_EQ(out[i], f(ts[i]));
}

TEST(Inequality, EqualityCases) {
  const auto tr = [](const Eigen::MatrixXd& m) { return m.inverse().trace(); };
  const Eigen::MatrixXd i3 = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_NEAR(1.0 / tr(i3 + i3), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(1.0 / tr(i3) + 1.0 / tr(i3), 2.0 / 3.0, 1e-15);
  const Eigen::MatrixXd a = Eigen::Vector2d(1, 4).asDiagonal();
  EXPECT_LE(rel(1.0 / tr(a + 2 * a), 1.0 / tr(a) + 1.0 / tr(2 * a)), 1e-10);
}

TEST(Inequality, SuiteHasNoViolations) {
  const InequalityReport r = check_inequality_suite(100, 20, 3, 1000);
  EXPECT_EQ(r.total_violations(), 0);
  EXPECT_EQ(r.superadditive.cases, 100);
  EXPECT_EQ(r.harmonic.cases, 1000);
  EXPECT_GE(r.superadditive.worst_slack, -1e-12);
  EXPECT_EQ(to_json(r).size(), 4u);
}

#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "ortho_reference.hpp"
#include "traceinv/ortho.hpp"

using namespace traceinv;

TEST(HaarInnerProduct, SmallCases) {
  EXPECT_EQ(haar_inner_product_basis(1, 1), Rational(1));
  EXPECT_EQ(haar_inner_product_basis(1, 2), Rational(6, 5));
  EXPECT_EQ(haar_inner_product_basis(2, 1), Rational(6, 5));
  EXPECT_EQ(haar_inner_product_basis(2, 2), Rational(3, 2));
  EXPECT_THROW(haar_inner_product_basis(0, 1), InvalidArgument);
}

TEST(HaarInnerProduct, MatchesQuadrature) {
  boost::math::quadrature::tanh_sinh<double> q;
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 4; ++j) {
      const double a = 1.0 / (i + 1) + 1.0 / (j + 1);
      const double v = q.integrate([a](double t) { return std::pow(t, a - 1.0); }, 0.0, 1.0);
      EXPECT_NEAR(v, haar_inner_product_basis(i, j).convert_to<double>(), 1e-10);
    }
  }
}

TEST(GramSchmidt, ReferenceRows) {
  const OrthoCoefficients c = gram_schmidt(9);
  ASSERT_EQ(c.order(), 9);
  const auto& rows = testutil::ortho_rows();
  for (int i = 1; i <= 9; ++i) {
    const OrthoRow& r = c.row(i);
    EXPECT_EQ(r.sign, testutil::kOrthoSigns[static_cast<std::size_t>(i - 1)]) << i;
    EXPECT_EQ(r.radicand, Rational(2, i + 1)) << i;
    ASSERT_EQ(r.a.size(), static_cast<std::size_t>(i));
    for (int j = 0; j < i; ++j) EXPECT_EQ(r.a[static_cast<std::size_t>(j)], BigInt(rows[i - 1][j])) << i << "," << j;
  }
}

TEST(GramSchmidt, SpotRows) {
  const OrthoCoefficients c2 = gram_schmidt(2);
  EXPECT_EQ(c2.row(2).sign, -1);
  EXPECT_EQ(c2.row(2).a, (std::vector<BigInt>{6, -5}));
  EXPECT_NEAR(c2.row(2).alpha(), -std::sqrt(2.0 / 3.0), 1e-15);
  const OrthoCoefficients c3 = gram_schmidt(3);
  EXPECT_EQ(c3.row(3).a, (std::vector<BigInt>{20, -40, 21}));
  EXPECT_EQ(c3.row(3).sign, 1);
}

TEST(GramSchmidt, ExactOrthonormality) {
  const int p = 12;
  const OrthoCoefficients c = gram_schmidt(p);
  for (int i = 1; i <= p; ++i) {
    for (int j = 1; j <= p; ++j) {
      const Rational form = haar_bilinear(c.row(i).a, c.row(j).a);
      if (i == j) {
        EXPECT_EQ(c.row(i).radicand * form, Rational(1)) << i;
      } else {
        EXPECT_EQ(form, Rational(0)) << i << "," << j;
      }
    }
  }
}

TEST(GramSchmidt, PrimitiveIntegerRows) {
  const OrthoCoefficients c = gram_schmidt(12);
  for (int i = 1; i <= 12; ++i) {
    BigInt g = 0;
    for (const auto& a : c.row(i).a) g = boost::multiprecision::gcd(g, a);
    EXPECT_EQ(g, BigInt(1)) << i;
    EXPECT_GT(c.row(i).a.front(), 0) << i;
    EXPECT_NE(c.row(i).a.back(), 0) << i;
  }
}

TEST(GramSchmidt, OrderGuard) {
  EXPECT_THROW(gram_schmidt(0), InvalidArgument);
  EXPECT_THROW(gram_schmidt(13), InvalidArgument);
  EXPECT_EQ(gram_schmidt(9).truncated(4).order(), 4);
}

TEST(EvalOrthoFunction, Values) {
  const OrthoCoefficients c = gram_schmidt(9);
  for (int i = 1; i <= 9; ++i) EXPECT_EQ(eval_ortho_function(c, i, 0.0), 0.0);
  EXPECT_NEAR(eval_ortho_function(c, 1, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(eval_ortho_function(c, 2, 1.0), -std::sqrt(2.0 / 3.0), 1e-14);
  EXPECT_NEAR(eval_ortho_function(c, 2, 1.0), -0.8165, 1e-4);
}

TEST(EvalOrthoFunction, NumericalOrthonormality) {
  const OrthoCoefficients c = gram_schmidt(6);
  boost::math::quadrature::tanh_sinh<double> q;
  for (int i = 1; i <= 6; ++i) {
    for (int j = i; j <= 6; ++j) {
      auto f = [&](double t) { return eval_ortho_function(c, i, t) * eval_ortho_function(c, j, t) / t; };
      const double v = q.integrate(f, 0.0, 1.0);
      EXPECT_NEAR(v, i == j ? 1.0 : 0.0, 1e-8) << i << "," << j;
    }
  }
}

TEST(OrthoOutput, TableAndJson) {
  const OrthoCoefficients c = gram_schmidt(3);
  const std::string table = format_table(c);
  EXPECT_NE(table.find("+sqrt(2/2)"), std::string::npos);
  EXPECT_NE(table.find("-sqrt(2/3)"), std::string::npos);
  EXPECT_NE(table.find("+sqrt(2/4)    20   -40    21\n"), std::string::npos);
  const auto j = to_json(c);
  EXPECT_EQ(j["p"], 3);
  EXPECT_EQ(j["rows"][1]["a"].dump(), "[6,-5]");
  EXPECT_EQ(j["rows"][1]["alpha_squared"], "2/3");
}

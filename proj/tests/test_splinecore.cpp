#include "c1vol/splinecore.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace c1vol;

TEST(SplineConfig, DimensionsFollowKnotCounts) {
  for (int p = 3; p <= 7; ++p)
    for (int r = 1; r <= p - 2; ++r)
      for (int k = 0; k <= 4; ++k) {
        SplineSpaceConfig c{p, r, k};
        EXPECT_EQ(c.n(), static_cast<int>(oracle::open_knots(p, r, k).size()) - p - 1);
        EXPECT_EQ(c.n0(), UnivariateSpace(p, r + 1, k).dim());
        EXPECT_EQ(c.n1(), UnivariateSpace(p - 2, r, k).dim());
      }
}

TEST(SplineConfig, RejectsInadmissibleTriples) {
  EXPECT_THROW((SplineSpaceConfig{2, 1, 0}.validate()), ParameterError);
  EXPECT_THROW((SplineSpaceConfig{4, 3, 0}.validate()), ParameterError);
  EXPECT_THROW((SplineSpaceConfig{4, 0, 0}.validate()), ParameterError);
  EXPECT_THROW((SplineSpaceConfig{4, 1, -1}.validate()), ParameterError);
  EXPECT_NO_THROW((SplineSpaceConfig{3, 1, 0}.validate()));
}

TEST(UnivariateSpace, KnotsMatchOpenUniformVector) {
  UnivariateSpace s(5, 2, 3);
  EXPECT_EQ(s.knots(), oracle::open_knots(5, 2, 3));
}

TEST(UnivariateSpace, GrevilleAreKnotAverages) {
  UnivariateSpace s(4, 1, 2);
  auto t = s.knots();
  auto g = s.greville();
  ASSERT_EQ(static_cast<int>(g.size()), s.dim());
  for (int j = 0; j < s.dim(); ++j) {
    Rational avg(0);
    for (int i = 1; i <= 4; ++i) avg += t[j + i];
    avg /= 4;
    EXPECT_EQ(g[j], avg);
  }
  EXPECT_EQ(g.front(), 0);
  EXPECT_EQ(g.back(), 1);
}

TEST(BasisAt, ExactValuesMatchCoxDeBoor) {
  for (auto [p, r, k] : std::vector<std::array<int, 3>>{{3, 1, 0}, {4, 2, 3}, {5, 1, 2}, {2, 0, 2}, {6, 3, 1}}) {
    UnivariateSpace s(p, r, k);
    auto t = oracle::open_knots(p, r, k);
    for (int num = 0; num <= 24; ++num) {
      Rational x(num, 24);
      x.canonicalize();
      auto b = basis_at<Rational>(s, x, std::min(p, 3));
      for (int j = 0; j < s.dim(); ++j)
        for (int d = 0; d <= std::min(p, 3); ++d) {
          EXPECT_EQ(b.value(j, d), oracle::bspline(t, p, j, x, d)) << "p" << p << " j" << j << " d" << d << " x" << x;
        }
    }
  }
}

TEST(BasisAt, PartitionOfUnityAndDerivativesSumToZero) {
  UnivariateSpace s(5, 2, 3);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0, 1);
  for (int i = 0; i < 100; ++i) {
    auto b = basis_at<double>(s, U(rng), 2);
    double s0 = 0, s1 = 0, s2 = 0;
    for (int a = 0; a <= 5; ++a) {
      s0 += b.ders[0][a];
      s1 += b.ders[1][a];
      s2 += b.ders[2][a];
    }
    EXPECT_NEAR(s0, 1.0, 1e-14);
    EXPECT_NEAR(s1, 0.0, 1e-11);
    EXPECT_NEAR(s2, 0.0, 1e-9);
  }
}

TEST(BasisAt, PrimeFieldAgreesWithRationalImage) {
  UnivariateSpace s(4, 1, 2);
  Rational x(5, 7);
  auto q = basis_at<Rational>(s, x, 2);
  auto f = basis_at<FpA>(s, x, 2);
  ASSERT_EQ(q.first, f.first);
  for (int d = 0; d <= 2; ++d)
    for (int a = 0; a <= 4; ++a) EXPECT_EQ(f.ders[d][a], to_scalar<FpA>(q.ders[d][a]));
}

TEST(EvalBspline, RejectsBadIndices) {
  UnivariateSpace s(3, 1, 0);
  EXPECT_THROW(eval_bspline(s, -1, 0.5, 0), std::out_of_range);
  EXPECT_THROW(eval_bspline(s, s.dim(), 0.5, 0), std::out_of_range);
  EXPECT_THROW(eval_bspline(s, 0, 0.5, -1), std::out_of_range);
  EXPECT_DOUBLE_EQ(eval_bspline(s, 0, 0.5, 4), 0.0);
}

TEST(MFunction, EndConditions) {
  SplineSpaceConfig c{5, 2, 1};
  Rational z(0);
  EXPECT_EQ(m_function<Rational>(c, 0, z, 0), 1);
  EXPECT_EQ(m_function<Rational>(c, 0, z, 1), 0);
  EXPECT_EQ(m_function<Rational>(c, 1, z, 0), 0);
  EXPECT_EQ(m_function<Rational>(c, 1, z, 1), 1);
}

TEST(RFunction, DerivativeMatchesScaledBsplineDerivativeOnlyWithoutInteriorKnots) {
  // R_j = h (N_{j-1} - N_j) over S^{p-1,r}; for k = 0 this equals N'_j / p of S^{p,r+1}
  SplineSpaceConfig c0{4, 1, 0};
  UnivariateSpace tr0(4, 2, 0);
  for (int j = 0; j < c0.n0(); ++j)
    EXPECT_NEAR(r_function(c0, j, 0.37, 0), eval_bspline(tr0, j, 0.37, 1) / 4, 1e-14);
  SplineSpaceConfig c1{4, 1, 1};
  UnivariateSpace tr1(4, 2, 1);
  double worst = 0;
  for (int j = 0; j < c1.n0(); ++j)
    worst = std::max(worst, std::abs(r_function(c1, j, 0.37, 0) - eval_bspline(tr1, j, 0.37, 1) / 4));
  EXPECT_GT(worst, 1e-3);
}

TEST(GaussLegendre, MatchesGolubWelsch) {
  for (int q = 1; q <= 10; ++q) {
    std::vector<double> x, w, xo, wo;
    gauss_legendre(q, x, w);
    oracle::golub_welsch(q, xo, wo);
    std::vector<std::pair<double, double>> a, b;
    for (int i = 0; i < q; ++i) {
      a.push_back({x[i], w[i]});
      b.push_back({xo[i], wo[i]});
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (int i = 0; i < q; ++i) {
      EXPECT_NEAR(a[i].first, b[i].first, 1e-13);
      EXPECT_NEAR(a[i].second, b[i].second, 1e-13);
    }
  }
}

TEST(EvalTensor3, ReproducesTrilinearMonomial) {
  // x*y*z has Greville-linear coefficients in each direction
  UnivariateSpace s(3, 1, 1);
  auto g = s.greville();
  TensorCoeffs3 c(s.dim());
  for (int a = 0; a < s.dim(); ++a)
    for (int b = 0; b < s.dim(); ++b)
      for (int e = 0; e < s.dim(); ++e) c(a, b, e) = g[a].get_d() * g[b].get_d() * g[e].get_d();
  std::array<double, 3> x{0.3, 0.71, 0.55};
  EXPECT_NEAR(eval_tensor3(s, c, x), 0.3 * 0.71 * 0.55, 1e-14);
  EXPECT_NEAR(eval_tensor3(s, c, x, {1, 1, 0}), 0.55, 1e-13);
}

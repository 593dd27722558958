#include "c1vol/approx.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace c1vol;

namespace {

const MultiPatchVolume& fixture() {
  static const MultiPatchVolume vol = load_volume_file(oracle::data("threepatch_s53.json"));
  return vol;
}

// Exact volume of a trilinear hexahedron: the Jacobian determinant is a
// polynomial of degree (2,2,2), integrated exactly.
Rational exact_patch_volume(const MultiPatchVolume& vol, int p) { return vol.jacobian_det(p).integrate(); }

}  // namespace

TEST(BuiltinTarget, Specs) {
  auto z = builtin_target("builtin:cos-sin-cos");
  EXPECT_NEAR(z({1.0, 2.0, 3.0}), 5 * std::cos(0.5) * std::sin(1.0) * std::cos(1.5), 1e-15);
  EXPECT_DOUBLE_EQ(builtin_target("constant:2.5")({7, 8, 9}), 2.5);
  EXPECT_DOUBLE_EQ(builtin_target("linear:x2")({7, 8, 9}), 8);
  EXPECT_THROW(builtin_target("sin"), std::invalid_argument);
}

TEST(Quadrature, ReproducesExactPatchVolumes) {
  const auto& vol = fixture();
  UnivariateSpace S(3, 1, 1);
  VolumeQuadrature Q(vol, S, 4);
  const int K = Q.elements_per_dir(), nq = Q.points_per_element();
  for (int p = 0; p < vol.num_patches(); ++p) {
    double sum = 0;
    for (int e3 = 0; e3 < K; ++e3)
      for (int e2 = 0; e2 < K; ++e2)
        for (int e1 = 0; e1 < K; ++e1) {
          auto base = Q.point_base(p, e1, e2, e3);
          for (int i = 0; i < nq; ++i) sum += Q.weight(base + i);
        }
    double exact = std::abs(exact_patch_volume(vol, p).get_d());
    EXPECT_NEAR(sum, exact, 1e-12 * exact);
  }
}

TEST(Gram, EntriesMatchBruteForceQuadrature) {
  const auto& vol = fixture();
  SplineSpaceConfig cfg{3, 1, 1};
  auto B = build_space(vol, cfg);
  GramOperator G(vol, B, 4);
  std::vector<double> gx, gw;
  oracle::golub_welsch(4, gx, gw);
  oracle::TensorEval te{oracle::open_knots(3, 1, 1), 3, B.ss.n()};
  auto as_map = [](const IsogeometricFunction& f, int p) {
    std::map<std::uint32_t, double> m;
    if (auto* c = f.coeffs(p))
      for (auto& [i, v] : *c) m[i] = v;
    return m;
  };
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<long> pick(0, B.dim() - 1);
  for (int t = 0; t < 6; ++t) {
    long i = pick(rng), j = t < 3 ? i : pick(rng);
    if (t == 5) j = B.dim() - 1;
    double ref = 0;
    for (int p = 0; p < vol.num_patches(); ++p) {
      auto fi = as_map(B.functions[i], p), fj = as_map(B.functions[j], p);
      if (fi.empty() || fj.empty()) continue;
      oracle::Trilinear T;
      for (int b = 0; b < 8; ++b)
        for (int c = 0; c < 3; ++c) T.X[b][c] = vol.corner(p, b)[c].get_d();
      for (int e3 = 0; e3 < 2; ++e3)
        for (int e2 = 0; e2 < 2; ++e2)
          for (int e1 = 0; e1 < 2; ++e1)
            for (int a = 0; a < 4; ++a)
              for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c) {
                  std::array<double, 3> u{(e1 + gx[a]) / 2, (e2 + gx[b]) / 2, (e3 + gx[c]) / 2};
                  double w = gw[a] * gw[b] * gw[c] / 8 * std::abs(oracle::det3(T.jacobian(u)));
                  ref += w * te.value(fi, u) * te.value(fj, u);
                }
    }
    Eigen::VectorXd col = G.column(j);
    EXPECT_NEAR(col[i], ref, 1e-12 * std::max(1.0, std::abs(ref))) << i << " " << j;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(B.dim());
    e[j] = 1;
    EXPECT_NEAR(G.apply(e)[i], ref, 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST(Fit, ReproducesConstantsAndCoordinates) {
  const auto& vol = fixture();
  auto B = build_space(vol, SplineSpaceConfig{3, 1, 0});
  auto one = l2_fit(vol, B, builtin_target("constant:1"));
  EXPECT_LE(one.e_volume, 1e-10);
  EXPECT_LE(one.e_faces, 1e-10);
  EXPECT_LE(one.e_edge, 1e-10);
  for (auto spec : {"linear:x1", "linear:x2", "linear:x3"}) {
    auto r = l2_fit(vol, B, builtin_target(spec));
    EXPECT_LE(r.e_volume, 1e-9) << spec;
  }
}

TEST(Fit, DenseAndIterativeSolversAgree) {
  const auto& vol = fixture();
  auto B = build_space(vol, SplineSpaceConfig{4, 1, 1});
  auto z = builtin_target("builtin:cos-sin-cos");
  auto dense = l2_fit(vol, B, z);
  FitOptions it;
  it.dense_limit = 0;
  auto cg = l2_fit(vol, B, z, it);
  EXPECT_EQ(dense.solver, "dense-ldlt");
  EXPECT_EQ(cg.solver, "pcg");
  EXPECT_LE(cg.relative_residual, 1e-12);
  EXPECT_NEAR(cg.e_volume, dense.e_volume, 1e-8 * dense.e_volume);
  EXPECT_NEAR(cg.e_edge, dense.e_edge, 1e-6 * dense.e_edge);
}

TEST(Fit, GalerkinOrthogonalityAndProjection) {
  const auto& vol = fixture();
  auto B = build_space(vol, SplineSpaceConfig{3, 1, 1});
  auto z = builtin_target("builtin:cos-sin-cos");
  auto r = l2_fit(vol, B, z);
  GramOperator G(vol, B, 4);
  Eigen::VectorXd res = G.rhs(z) - G.apply(r.c);
  double znorm = 0;
  {
    const auto& Q = G.quadrature();
    const int K = Q.elements_per_dir(), nq = Q.points_per_element();
    for (int p = 0; p < Q.num_patches(); ++p)
      for (int e = 0; e < K * K * K; ++e) {
        auto base = Q.point_base(p, e % K, (e / K) % K, e / K / K);
        for (int i = 0; i < nq; ++i) znorm += Q.weight(base + i) * std::pow(z(Q.point(base + i)), 2);
      }
    znorm = std::sqrt(znorm);
  }
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<long> pick(0, B.dim() - 1);
  for (int t = 0; t < 20; ++t) {
    long i = pick(rng);
    double phinorm = std::sqrt(G.column(i)[i]);
    EXPECT_LE(std::abs(res[i]), 1e-9 * znorm * phinorm);
  }
  // fitting the fitted function again returns the same coefficients
  Eigen::VectorXd b2 = G.apply(r.c);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(G.dense());
  Eigen::VectorXd c2 = ldlt.solve(b2);
  EXPECT_LE((c2 - r.c).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, r.c.cwiseAbs().maxCoeff()));
}

TEST(Fit, ErrorsDecreaseUnderRefinement) {
  const auto& vol = fixture();
  auto z = builtin_target("builtin:cos-sin-cos");
  double prev = 1e300;
  for (int L = 0; L <= 1; ++L) {
    auto B = build_space(vol, SplineSpaceConfig{4, 1, (1 << L) - 1});
    auto r = l2_fit(vol, B, z);
    EXPECT_LT(r.e_volume, prev);
    prev = r.e_volume;
  }
}

TEST(Fit, ZeroTargetIsRejected) {
  const auto& vol = fixture();
  auto B = build_space(vol, SplineSpaceConfig{3, 1, 0});
  EXPECT_THROW(l2_fit(vol, B, builtin_target("constant:0")), std::invalid_argument);
}

#include "c1vol/c1space.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace c1vol;

namespace {

std::vector<std::vector<Rational>> exact_matrix(const EdgeSystem& sys, const SpaceSet& ss) {
  // Rows rebuilt through the rational path; the double assembly is only a check here.
  auto A = sys.assemble<Rational>(ss);
  std::vector<std::vector<Rational>> m(A.num_rows(), std::vector<Rational>(sys.num_cols(), Rational(0)));
  for (int i = 0; i < A.num_rows(); ++i)
    for (auto& [c, v] : A.rows[i]) m[i][c] += v;
  return m;
}

}  // namespace

TEST(Classify, FixturesAreInSubclass) {
  for (auto name : {"threepatch_s53.json", "fourpatch_nongeneric_s52.json"}) {
    auto vol = load_volume_file(oracle::data(name));
    auto info = classify_subclassA(vol);
    ASSERT_TRUE(info.has_value()) << name;
    EXPECT_EQ(static_cast<int>(info->views.size()), vol.num_patches());
  }
  EXPECT_FALSE(classify_subclassA(load_volume_file(oracle::data("twopatch.json"))).has_value());
}

TEST(EdgeKernel, ThreePatchMatchesGenericFormula) {
  auto vol = load_volume_file(oracle::data("threepatch_s53.json"));
  for (auto [p, r, k] : std::vector<std::array<int, 3>>{{3, 1, 0}, {3, 1, 3}, {4, 1, 1}, {5, 1, 1}, {5, 2, 2}}) {
    SpaceSet ss(SplineSpaceConfig{p, r, k});
    auto sys = assemble_subclassA(vol, ss);
    EXPECT_EQ(kernel_dimension(sys, ss), oracle::generic_edge_formula(3, p, r, k)) << p << r << k;
  }
}

TEST(EdgeKernel, FourPatchFixtureIsNonGeneric) {
  auto vol = load_volume_file(oracle::data("fourpatch_nongeneric_s52.json"));
  for (auto [p, r, k] : std::vector<std::array<int, 3>>{{3, 1, 0}, {4, 1, 1}, {6, 2, 3}}) {
    SpaceSet ss(SplineSpaceConfig{p, r, k});
    auto sys = assemble_subclassA(vol, ss);
    EXPECT_EQ(kernel_dimension(sys, ss), oracle::nongeneric_edge_formula(4, p, r, k)) << p << r << k;
  }
  // The printed corner makes the same connectivity generic again.
  auto printed = load_volume_file(oracle::data("fourpatch_nongeneric_s52_printed.json"));
  SpaceSet ss(SplineSpaceConfig{3, 1, 0});
  EXPECT_EQ(kernel_dimension(assemble_subclassA(printed, ss), ss), oracle::generic_edge_formula(4, 3, 1, 0));
}

TEST(EdgeKernel, ModularRankEqualsRationalRank) {
  auto vol = load_volume_file(oracle::data("threepatch_s53.json"));
  SpaceSet ss(SplineSpaceConfig{3, 1, 0});
  auto sys = assemble_subclassA(vol, ss);
  auto er = exact_rank(sys, ss);
  EXPECT_TRUE(er.consistent());
  EXPECT_EQ(er.rank(), oracle::rational_rank(exact_matrix(sys, ss)));
}

TEST(EdgeKernel, GeneralAssemblyAgreesWithSubclassTotals) {
  auto vol = load_volume_file(oracle::data("threepatch_s53.json"));
  SplineSpaceConfig cfg{3, 1, 0};
  auto a = count_dims(vol, cfg, BuildMode::subclassA);
  auto g = count_dims(vol, cfg, BuildMode::general);
  EXPECT_EQ(a.total(), g.total());
  EXPECT_EQ(a.total(), 76);
}

TEST(EdgeKernel, MdsAndSvdSpanTheSameSpace) {
  auto vol = load_volume_file(oracle::data("threepatch_s53.json"));
  SpaceSet ss(SplineSpaceConfig{3, 1, 0});
  auto sys = assemble_subclassA(vol, ss);
  auto m = kernel_basis(sys, ss, KernelMode::mds);
  auto s = kernel_basis(sys, ss, KernelMode::svd);
  ASSERT_EQ(m.dim(), 16);
  ASSERT_EQ(s.dim(), 16);
  EXPECT_FALSE(m.rank_warning) << m.warning;
  EXPECT_FALSE(s.rank_warning) << s.warning;
  EXPECT_LE(m.residual, 1e-10);
  EXPECT_LE(s.residual, 1e-10);
  Eigen::MatrixXd both(m.vectors.rows(), 32);
  both << m.vectors, s.vectors;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(both);
  auto sv = svd.singularValues();
  EXPECT_LT(sv[16] / sv[0], 1e-9);
  EXPECT_GT(sv[15] / sv[0], 1e-6);
}

TEST(EdgeKernel, MdsVectorsAreUnitOnDeterminingSet) {
  auto vol = load_volume_file(oracle::data("threepatch_s53.json"));
  SpaceSet ss(SplineSpaceConfig{4, 1, 1});
  auto sys = assemble_subclassA(vol, ss);
  auto kb = kernel_basis(sys, ss);
  ASSERT_EQ(static_cast<int>(kb.determining.size()), kb.dim());
  for (int j = 0; j < kb.dim(); ++j)
    for (int i = 0; i < kb.dim(); ++i) EXPECT_NEAR(kb.vectors(kb.determining[i], j), i == j ? 1.0 : 0.0, 1e-12);
}

TEST(EdgeFunctions, AreC1) {
  auto vol = load_volume_file(oracle::data("threepatch_s53.json"));
  SplineSpaceConfig cfg{4, 1, 1};
  auto B = build_space(vol, cfg, {BuildMode::subclassA});
  C1Basis edge_only = B;
  edge_only.functions.erase(edge_only.functions.begin(), edge_only.functions.begin() + B.dim_patch + B.dim_face);
  ASSERT_EQ(edge_only.dim(), oracle::generic_edge_formula(3, 4, 1, 1));
  auto rep = c1_audit(vol, edge_only, 50, 4);
  EXPECT_TRUE(rep.pass()) << rep.max_value_jump << " " << rep.max_grad_jump_rel;
}

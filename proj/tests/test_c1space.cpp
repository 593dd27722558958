#include "c1vol/c1space.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace c1vol;

TEST(BuildMode, ParseAndResolve) {
  EXPECT_EQ(parse_build_mode("auto"), BuildMode::automatic);
  EXPECT_EQ(parse_build_mode("general"), BuildMode::general);
  EXPECT_THROW(parse_build_mode("fast"), std::invalid_argument);
  EXPECT_EQ(resolve_mode(load_volume_file(oracle::data("twopatch.json")), BuildMode::automatic),
            BuildMode::two_patch);
  EXPECT_EQ(resolve_mode(load_volume_file(oracle::data("threepatch_s53.json")), BuildMode::automatic),
            BuildMode::subclassA);
}

TEST(CountDims, TwoPatchClosedForm) {
  auto vol = load_volume_file(oracle::data("twopatch.json"));
  for (int p = 3; p <= 6; ++p)
    for (int k = 0; k <= 3; ++k) {
      SplineSpaceConfig cfg{p, 1, k};
      auto rep = count_dims(vol, cfg);
      EXPECT_EQ(rep.mode, BuildMode::two_patch);
      EXPECT_EQ(rep.total(), oracle::two_patch_dimension(cfg.n(), cfg.n0(), cfg.n1())) << p << " " << k;
      EXPECT_EQ(rep.dim_patch, rep.expected_patch);
      EXPECT_EQ(rep.dim_face, rep.expected_face);
    }
}

TEST(CountDims, ThreePatchFamiliesAtCoarsestLevel) {
  auto vol = load_volume_file(oracle::data("threepatch_s53.json"));
  auto rep = count_dims(vol, SplineSpaceConfig{3, 1, 0});
  EXPECT_EQ(rep.dim_patch, 48);
  EXPECT_EQ(rep.dim_face, 12);
  EXPECT_EQ(rep.dim_edge, 16);
  auto fine = count_dims(vol, SplineSpaceConfig{5, 1, 1});
  EXPECT_EQ(fine.dim_patch, 1920);
  EXPECT_EQ(fine.dim_face, 234);
  EXPECT_EQ(fine.dim_edge, 37);
}

TEST(BuildSpace, CountsMatchConstruction) {
  auto vol = load_volume_file(oracle::data("threepatch_s53.json"));
  for (auto mode : {BuildMode::subclassA, BuildMode::general}) {
    SplineSpaceConfig cfg{3, 1, 1};
    auto rep = count_dims(vol, cfg, mode);
    auto B = build_space(vol, cfg, {mode});
    EXPECT_EQ(B.dim_patch, rep.dim_patch);
    EXPECT_EQ(B.dim_face, rep.dim_face);
    EXPECT_EQ(B.dim_edge, rep.dim_edge);
    EXPECT_EQ(B.dim(), rep.total());
  }
}

TEST(BuildSpace, OrderingAndDisjointPatchWindows) {
  auto vol = load_volume_file(oracle::data("threepatch_s53.json"));
  auto B = build_space(vol, SplineSpaceConfig{4, 1, 1});
  std::set<std::pair<int, std::uint32_t>> patch_dofs;
  for (long i = 0; i < B.dim(); ++i) {
    auto fam = B.functions[i].tag.family;
    if (i < B.dim_patch)
      EXPECT_EQ(fam, Family::patch);
    else if (i < B.dim_patch + B.dim_face)
      EXPECT_TRUE(fam == Family::inner_face0 || fam == Family::inner_face1);
    else
      EXPECT_EQ(fam, Family::edge);
  }
  for (long i = 0; i < B.dim_patch; ++i) {
    auto& [patch, c] = *B.functions[i].parts().begin();
    EXPECT_TRUE(patch_dofs.insert({patch, c[0].first}).second);
  }
  // patch functions control coefficients that no face or edge function touches
  for (long i = B.dim_patch; i < B.dim(); ++i)
    for (auto& [patch, c] : B.functions[i].parts())
      for (auto& [idx, v] : c) EXPECT_EQ(patch_dofs.count({patch, idx}), 0u) << i;
}

TEST(BuildSpace, RejectsPlanarInterface) {
  auto vol = load_volume_file(oracle::data("twocube.json"));
  EXPECT_THROW(build_space(vol, SplineSpaceConfig{3, 1, 0}), GluingError);
}

TEST(Audit, TwoPatchBasisIsC1) {
  auto vol = load_volume_file(oracle::data("twopatch.json"));
  for (int p = 3; p <= 5; ++p) {
    auto B = build_space(vol, SplineSpaceConfig{p, 1, 0});
    auto rep = c1_audit(vol, B, 100, 9);
    EXPECT_TRUE(rep.pass()) << p << ": " << rep.max_value_jump << " " << rep.max_grad_jump_rel;
  }
}

TEST(Audit, GeneralModeBasisIsC1) {
  auto vol = load_volume_file(oracle::data("threepatch_s53.json"));
  auto B = build_space(vol, SplineSpaceConfig{3, 1, 0}, {BuildMode::general});
  auto rep = c1_audit(vol, B, 40, 2);
  EXPECT_TRUE(rep.pass()) << rep.max_value_jump << " " << rep.max_grad_jump_rel;
}

TEST(Audit, CorruptedCoefficientFails) {
  auto vol = load_volume_file(oracle::data("threepatch_s53.json"));
  auto B = build_space(vol, SplineSpaceConfig{3, 1, 0});
  auto rep = c1_audit(vol, B, 20, 5);
  ASSERT_TRUE(rep.pass());
  auto& f = B.functions[B.dim_patch];  // first face function
  IsogeometricFunction bad = f;
  int patch = bad.parts().begin()->first;
  bad.add(patch, bad.parts().begin()->second.front().first, 0.25);
  bad.finalize();
  B.functions[B.dim_patch] = bad;
  EXPECT_FALSE(c1_audit(vol, B, 20, 5).pass());
}

TEST(Evaluate, RejectsWrongLength) {
  auto vol = load_volume_file(oracle::data("threepatch_s53.json"));
  auto B = build_space(vol, SplineSpaceConfig{3, 1, 0});
  EXPECT_THROW(B.evaluate(Eigen::VectorXd::Zero(3), 0, {0.5, 0.5, 0.5}), std::invalid_argument);
}

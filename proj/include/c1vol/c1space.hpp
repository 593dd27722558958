#pragma once

// The C1 space as a direct sum of patch, face and edge families, for the
// two-patch case, the one-inner-edge subclass and the general case.

#include "c1vol/edgespace.hpp"

#include <random>

namespace c1vol {

enum class BuildMode { automatic, two_patch, subclassA, general };

inline const char* build_mode_name(BuildMode m) {
  switch (m) {
    case BuildMode::automatic: return "auto";
    case BuildMode::two_patch: return "two-patch";
    case BuildMode::subclassA: return "subclassA";
    case BuildMode::general: return "general";
  }
  return "?";
}

inline BuildMode parse_build_mode(const std::string& s) {
  if (s == "auto") return BuildMode::automatic;
  if (s == "two-patch") return BuildMode::two_patch;
  if (s == "subclassA") return BuildMode::subclassA;
  if (s == "general") return BuildMode::general;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

/// Mode picked from the topology only.
inline BuildMode resolve_mode(const MultiPatchVolume& vol, BuildMode requested) {
  const bool two = vol.num_patches() == 2 && vol.inc.inner_faces().size() == 1 && vol.inc.inner_edges().empty();
  const bool sub = classify_subclassA(vol).has_value();
  switch (requested) {
    case BuildMode::automatic:
      if (two) return BuildMode::two_patch;
      if (sub) return BuildMode::subclassA;
      return BuildMode::general;
    case BuildMode::two_patch:
      if (!two) throw TopologyError("two-patch mode needs exactly two patches sharing one face");
      return requested;
    case BuildMode::subclassA:
      if (!sub) throw TopologyError("volume is not in the one-inner-edge subclass");
      return requested;
    case BuildMode::general: return requested;
  }
  return requested;
}

struct DimsReport {
  BuildMode mode = BuildMode::general;
  SplineSpaceConfig cfg;
  long dim_patch = 0, dim_face = 0, dim_edge = 0;
  long total() const { return dim_patch + dim_face + dim_edge; }
  // closed forms of the patch and face counts, for comparison
  long expected_patch = 0, expected_face = 0;
  int edge_rank_a = 0, edge_rank_b = 0, edge_unknowns = 0;
};

/// Index windows of the families, shared by counting and construction.
class FamilyWindows {
 public:
  FamilyWindows(const MultiPatchVolume& vol, const SpaceSet& ss, BuildMode mode) : vol_(&vol), ss_(&ss), mode_(mode) {
    if (mode == BuildMode::subclassA) sub_ = classify_subclassA(vol);
  }

  /// Patch family of patch i as view-frame indices.
  template <class F>
  void for_each_patch_index(int i, F&& f) const {
    const int n = ss_->n();
    PatchView view{i, CubeSymmetry::identity()};
    int lo1 = 0, lo2 = 0, lo3 = 0, hi1 = n - 1, hi2 = n - 1, hi3 = n - 1;
    if (mode_ == BuildMode::general) {
      lo1 = lo2 = lo3 = 2;
      hi1 = hi2 = hi3 = n - 3;
    } else if (mode_ == BuildMode::subclassA) {
      view = sub_->views[i].view;
      lo1 = lo2 = 2;
    } else {
      auto iv = standard_form_interface(*vol_, vol_->inc.inner_faces()[0]);
      if (iv.side0.patch == i) {
        view = iv.side0;
        lo1 = 2;
      } else {
        view = iv.side1;
        lo2 = 2;
      }
    }
    for (int j3 = lo3; j3 <= hi3; ++j3)
      for (int j2 = lo2; j2 <= hi2; ++j2)
        for (int j1 = lo1; j1 <= hi1; ++j1) f(view, std::array<int, 3>{j1, j2, j3});
  }

  /// Inner face family indices (j1, a, b) outside the edge system.
  template <class F>
  void for_each_inner_face_index(F&& f) const {
    const int n0 = ss_->n0(), n1 = ss_->n1();
    for (int j1 = 0; j1 < 2; ++j1) {
      const int m = j1 == 0 ? n0 : n1;
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          bool keep = true;
          if (mode_ == BuildMode::general) {
            keep = middle_index(a, 3 - j1, m - 4 + j1) && middle_index(b, 3 - j1, m - 4 + j1);
          } else if (mode_ == BuildMode::subclassA) {
            keep = a >= 3 - j1;
          }
          if (keep) f(j1, a, b);
        }
    }
  }

  /// Boundary face indices (view frame) outside the edge system, general mode.
  template <class F>
  void for_each_boundary_index(F&& f) const {
    if (mode_ != BuildMode::general) return;
    const int n = ss_->n();
    for (int j1 = 0; j1 < 2; ++j1)
      for (int b = 2; b <= n - 3; ++b)
        for (int a = 2; a <= n - 3; ++a) f(std::array<int, 3>{j1, a, b});
  }

  const std::optional<SubclassInfo>& subclass() const { return sub_; }

 private:
  const MultiPatchVolume* vol_;
  const SpaceSet* ss_;
  BuildMode mode_;
  std::optional<SubclassInfo> sub_;
};

inline long closed_form_patch(BuildMode mode, const SpaceSet& ss, int patches) {
  const long n = ss.n();
  switch (mode) {
    case BuildMode::general: return patches * std::max(0L, n - 4) * std::max(0L, n - 4) * std::max(0L, n - 4);
    case BuildMode::subclassA: return patches * n * (n - 2) * (n - 2);
    default: return patches * n * n * (n - 2);
  }
}

inline long closed_form_face(BuildMode mode, const SpaceSet& ss, int inner, int boundary) {
  const long n = ss.n(), n0 = ss.n0(), n1 = ss.n1();
  auto sq = [](long x) { return std::max(0L, x) * std::max(0L, x); };
  switch (mode) {
    case BuildMode::general: return inner * (sq(n0 - 6) + sq(n1 - 4)) + boundary * 2 * sq(n - 4);
    case BuildMode::subclassA: return inner * (n0 * (n0 - 3) + n1 * (n1 - 2));
    default: return inner * (n0 * n0 + n1 * n1);
  }
}

/// Dimension counts without materializing any function.
inline DimsReport count_dims(const MultiPatchVolume& vol, const SplineSpaceConfig& cfg,
                             BuildMode requested = BuildMode::automatic) {
  SpaceSet ss(cfg);
  DimsReport rep;
  rep.cfg = cfg;
  rep.mode = resolve_mode(vol, requested);
  FamilyWindows w(vol, ss, rep.mode);
  for (int i = 0; i < vol.num_patches(); ++i) w.for_each_patch_index(i, [&](const auto&, const auto&) { ++rep.dim_patch; });
  long per_face = 0;
  w.for_each_inner_face_index([&](int, int, int) { ++per_face; });
  long per_boundary = 0;
  w.for_each_boundary_index([&](const auto&) { ++per_boundary; });
  const int ni = static_cast<int>(vol.inc.inner_faces().size()), nb = static_cast<int>(vol.inc.boundary_faces().size());
  rep.dim_face = per_face * ni + per_boundary * nb;
  rep.expected_patch = closed_form_patch(rep.mode, ss, vol.num_patches());
  rep.expected_face = closed_form_face(rep.mode, ss, ni, nb);
  if (rep.mode != BuildMode::two_patch) {
    EdgeSystem sys = rep.mode == BuildMode::subclassA ? assemble_subclassA(vol, ss) : assemble_general(vol, ss);
    auto er = exact_rank(sys, ss);
    rep.edge_rank_a = er.rank_a;
    rep.edge_rank_b = er.rank_b;
    rep.edge_unknowns = sys.num_cols();
    rep.dim_edge = sys.num_cols() - er.rank();
  }
  return rep;
}

struct BuildOptions {
  BuildMode mode = BuildMode::automatic;
  KernelMode kernel = KernelMode::mds;
  double rank_tol = 1e-9;
  bool check_assumption = true;
};

/// Basis of the C1 space; patch functions first, then face functions, then
/// edge functions.
class C1Basis {
 public:
  BuildMode mode = BuildMode::general;
  SpaceSet ss;
  std::vector<IsogeometricFunction> functions;
  long dim_patch = 0, dim_face = 0, dim_edge = 0;
  KernelBasis kernel;
  std::vector<GluingData> gluings;  // frames of the face families, one per inner face
  std::map<int, int> gluing_of_face;

  long dim() const { return static_cast<long>(functions.size()); }

  /// Value of sum_i c_i phi_i on one patch.
  double evaluate(const Eigen::VectorXd& c, int patch, const std::array<double, 3>& xi,
                  const std::array<int, 3>& d = {0, 0, 0}) const {
    if (c.size() != dim()) throw std::invalid_argument("coefficient vector does not match the basis dimension");
    std::array<LocalBasis<double>, 3> b;
    for (int k = 0; k < 3; ++k) b[k] = basis_at<double>(ss.S, xi[k], d[k]);
    double s = 0.0;
    for (long i = 0; i < dim(); ++i) {
      if (c[i] == 0.0) continue;
      if (auto* co = functions[i].coeffs(patch)) s += c[i] * IsogeometricFunction::eval_with(ss.n(), *co, b, d);
    }
    return s;
  }
};

inline void require_assumption(const MultiPatchVolume& vol, const SplineSpaceConfig& cfg) {
  auto rep = check_assumption1(vol, cfg);
  for (auto& f : rep.faces)
    if (!f.pass()) throw GluingError("genericity assumption fails on inner face " + std::to_string(f.face));
}

inline C1Basis build_space(const MultiPatchVolume& vol, const SplineSpaceConfig& cfg, const BuildOptions& opt = {}) {
  C1Basis B;
  B.ss = SpaceSet(cfg);
  B.mode = resolve_mode(vol, opt.mode);
  if (opt.check_assumption) require_assumption(vol, cfg);
  const SpaceSet& ss = B.ss;
  FamilyWindows w(vol, ss, B.mode);
  for (int i = 0; i < vol.num_patches(); ++i)
    w.for_each_patch_index(i, [&](const PatchView& v, const std::array<int, 3>& J) {
      auto I = view_to_patch_index(v.sym, ss.n(), J);
      B.functions.push_back(patch_function(vol, ss, i, I));
    });
  B.dim_patch = static_cast<long>(B.functions.size());

  std::optional<EdgeSystem> sys;
  if (B.mode == BuildMode::subclassA) sys = assemble_subclassA(vol, ss);
  if (B.mode == BuildMode::general) sys = assemble_general(vol, ss);
  if (sys) {
    B.gluings = sys->gluings;
    B.gluing_of_face = sys->gluing_of_face;
  } else {
    int f = vol.inc.inner_faces()[0];
    B.gluings.push_back(compute_gluing(vol, f));
    B.gluing_of_face[f] = 0;
  }
  for (int f : vol.inc.inner_faces()) {
    FaceExtractor ex(vol, ss, B.gluings[B.gluing_of_face.at(f)]);
    w.for_each_inner_face_index([&](int j1, int a, int b) { B.functions.push_back(ex.build(j1, a, b)); });
  }
  for (int f : vol.inc.boundary_faces())
    w.for_each_boundary_index([&](const std::array<int, 3>& J) {
      B.functions.push_back(boundary_face_function(vol, ss, f, J));
    });
  B.dim_face = static_cast<long>(B.functions.size()) - B.dim_patch;
  if (sys) {
    B.kernel = kernel_basis(*sys, ss, opt.kernel, opt.rank_tol);
    auto edge = realize_edge_functions(vol, ss, *sys, B.kernel);
    for (auto& f : edge) B.functions.push_back(std::move(f));
    B.dim_edge = static_cast<long>(edge.size());
  }
  return B;
}

// ---------------------------------------------------------------------------
// C1 audit

struct AuditReport {
  double max_value_jump = 0.0;
  double max_grad_jump_rel = 0.0;
  long worst_function = -1;
  int worst_face = -1;
  std::vector<std::pair<int, double>> per_face_grad;  // face, worst relative gradient jump
  bool pass(double value_tol = 1e-11, double grad_tol = 1e-9) const {
    return max_value_jump <= value_tol && max_grad_jump_rel <= grad_tol;
  }
};

/// Samples every basis function across every inner face. The gradient jump is
/// taken relative to the largest gradient component seen on the face or the
/// largest coefficient of the function on any patch, whichever is bigger.
inline AuditReport c1_audit(const MultiPatchVolume& vol, const C1Basis& B, int samples = 100,
                            std::uint64_t seed = 1) {
  AuditReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int n = B.ss.n();
  for (int f : vol.inc.inner_faces()) {
    auto iv = standard_form_interface(vol, f);
    std::array<const PatchView*, 2> views{&iv.side0, &iv.side1};
    struct Side {
      int patch;
      std::array<std::array<LocalBasis<double>, 3>, 4> basis;  // value, d1, d2, d3
      Eigen::Matrix3d JinvT;
    };
    std::vector<std::array<Side, 2>> pts;
    for (int s = 0; s < samples; ++s) {
      double t1 = U(rng), t2 = U(rng);
      std::array<Side, 2> pair;
      for (int side = 0; side < 2; ++side) {
        std::array<double, 3> y = side == 0 ? std::array<double, 3>{0.0, t1, t2} : std::array<double, 3>{t1, 0.0, t2};
        auto xi = views[side]->sym.apply(y);
        Side& S = pair[side];
        S.patch = views[side]->patch;
        for (int q = 0; q < 4; ++q)
          for (int k = 0; k < 3; ++k) S.basis[q][k] = basis_at<double>(B.ss.S, xi[k], q == k + 1 ? 1 : 0);
        Eigen::Matrix3d J;
        for (int k = 0; k < 3; ++k) {
          std::array<int, 3> d{0, 0, 0};
          d[k] = 1;
          auto c = vol.eval<double>(S.patch, xi, d);
          for (int i = 0; i < 3; ++i) J(i, k) = c[i];
        }
        S.JinvT = J.inverse().transpose();
      }
      pts.push_back(std::move(pair));
    }
    double face_worst = 0.0;
    for (long i = 0; i < B.dim(); ++i) {
      const auto& fn = B.functions[i];
      auto* c0 = fn.coeffs(views[0]->patch);
      auto* c1 = fn.coeffs(views[1]->patch);
      if (!c0 && !c1) continue;
      double cmax = 0.0;
      for (auto& [patch, c] : fn.parts())
        for (auto& e : c) cmax = std::max(cmax, std::abs(e.second));
      double vj = 0.0, gj = 0.0, gs = cmax;
      for (auto& pair : pts) {
        std::array<double, 2> val{};
        std::array<Eigen::Vector3d, 2> grad;
        for (int side = 0; side < 2; ++side) {
          const auto* c = side == 0 ? c0 : c1;
          const Side& S = pair[side];
          Eigen::Vector3d dp = Eigen::Vector3d::Zero();
          val[side] = 0.0;
          if (c) {
            val[side] = IsogeometricFunction::eval_with(n, *c, S.basis[0], {0, 0, 0});
            for (int k = 0; k < 3; ++k) {
              std::array<int, 3> d{0, 0, 0};
              d[k] = 1;
              dp[k] = IsogeometricFunction::eval_with(n, *c, S.basis[k + 1], d);
            }
          }
          grad[side] = S.JinvT * dp;
          gs = std::max(gs, grad[side].cwiseAbs().maxCoeff());
        }
        vj = std::max(vj, std::abs(val[0] - val[1]));
        gj = std::max(gj, (grad[0] - grad[1]).cwiseAbs().maxCoeff());
      }
      double rel = gs > 0 ? gj / gs : 0.0;
      face_worst = std::max(face_worst, rel);
      if (vj > rep.max_value_jump || rel > rep.max_grad_jump_rel) {
        rep.worst_function = i;
        rep.worst_face = f;
      }
      rep.max_value_jump = std::max(rep.max_value_jump, vj);
      rep.max_grad_jump_rel = std::max(rep.max_grad_jump_rel, rel);
    }
    rep.per_face_grad.push_back({f, face_worst});
  }
  return rep;
}

}  // namespace c1vol

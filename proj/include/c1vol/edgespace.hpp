#pragma once

// Compatibility systems around edges and vertices. The unknowns are the
// coefficients of face functions that reach an edge, plus tensor coefficients
// attached to edges and vertices; the rows ask mixed first derivatives of the
// pieces to agree along every edge. The kernel gives the edge space.

#include "c1vol/c1basis.hpp"
#include "c1vol/linalg.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace c1vol {

enum class SystemMode { subclassA, general };

inline const char* mode_name(SystemMode m) { return m == SystemMode::subclassA ? "subclassA" : "general"; }

/// A block of unknowns sharing one frame: the face functions of a face, or
/// the tensor coefficients attached to an (edge, patch) or (vertex, patch).
struct ColumnGroup {
  enum class Kind { inner_face, boundary_face, edge, vertex };
  Kind kind = Kind::inner_face;
  int entity = -1;
  int patch = -1;   // owner patch for tensor groups
  PatchView view;   // frame of tensor groups
  int gluing = -1;  // index into EdgeSystem::gluings for inner faces
  std::vector<int> columns;
  std::vector<std::array<int, 3>> index;  // (j1, a, b) for inner faces, tensor index otherwise
};

enum class RowKind { face_face, face_edge, edge_vertex };

inline const char* row_kind_name(RowKind k) {
  switch (k) {
    case RowKind::face_face: return "face-face";
    case RowKind::face_edge: return "face-edge";
    case RowKind::edge_vertex: return "edge-vertex";
  }
  return "?";
}

/// d^deriv (plus - minus) = 0 on `patch` at `point` of the frame.
struct RowSpec {
  RowKind kind;
  int patch;
  PatchView frame;
  std::array<Rational, 3> point;
  std::array<int, 3> deriv;
  int plus, minus;  // group ids
};

struct Unknown {
  int group;
  std::array<int, 3> index;
};

class EdgeSystem {
 public:
  SystemMode mode = SystemMode::general;
  std::vector<GluingData> gluings;
  std::map<int, int> gluing_of_face;
  std::vector<ColumnGroup> groups;
  std::vector<Unknown> unknowns;
  std::vector<RowSpec> rows;

  int num_cols() const { return static_cast<int>(unknowns.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_group(ColumnGroup g) {
    groups.push_back(std::move(g));
    return static_cast<int>(groups.size()) - 1;
  }
  void add_unknown(int group, const std::array<int, 3>& idx) {
    groups[group].columns.push_back(num_cols());
    groups[group].index.push_back(idx);
    unknowns.push_back({group, idx});
  }

  /// Evaluates the rows in the scalar type T (double or a prime field).
  template <class T>
  SparseMatrix<T> assemble(const SpaceSet& ss, TraceChoice choice = TraceChoice::derivative) const {
    std::vector<GluingEval<T>> ge;
    for (auto& g : gluings) ge.emplace_back(g, ss.cfg);
    SparseMatrix<T> A;
    A.cols = num_cols();
    A.rows.reserve(rows.size());
    for (const auto& r : rows) {
      SparseRow<T> row;
      eval_group<T>(ss, ge, choice, groups[r.plus], r, T(1), row);
      eval_group<T>(ss, ge, choice, groups[r.minus], r, T(-1), row);
      normalize_row(row);
      A.rows.push_back(std::move(row));
    }
    return A;
  }

 private:
  template <class T>
  void eval_group(const SpaceSet& ss, const std::vector<GluingEval<T>>& ge, TraceChoice choice,
                  const ColumnGroup& g, const RowSpec& r, T sign, SparseRow<T>& out) const {
    PatchView Y;
    int side = -1;
    if (g.kind == ColumnGroup::Kind::inner_face) {
      const auto& gl = gluings[g.gluing];
      if (gl.views.side0.patch == r.patch)
        side = 0;
      else if (gl.views.side1.patch == r.patch)
        side = 1;
      else
        throw std::logic_error("row patch does not touch the face group");
      Y = side == 0 ? gl.views.side0 : gl.views.side1;
    } else {
      if (g.patch != r.patch) throw std::logic_error("row patch does not own the tensor group");
      Y = g.view;
    }
    // coordinates of the row frame expressed in the frame of the group
    const CubeSymmetry Tm = Y.sym.inverse().after(r.frame.sym);
    const std::array<Rational, 3> y = Tm.apply(r.point);
    auto [dy, s] = Tm.pull_derivs(r.deriv);
    const T sg = s < 0 ? T(0) - sign : sign;
    if (side >= 0) {
      FaceSideEvaluator<T> ev(ss, ge[g.gluing], side, y, dy, choice);
      if (ev.all_zero()) return;
      for (std::size_t i = 0; i < g.columns.size(); ++i) {
        T v = ev(g.index[i][0], g.index[i][1], g.index[i][2]);
        if (!scalar_is_zero(v)) out.push_back({g.columns[i], sg * v});
      }
    } else {
      TensorPointEvaluator<T> ev(ss.S, y, dy);
      for (std::size_t i = 0; i < g.columns.size(); ++i) {
        T v = ev(g.index[i]);
        if (!scalar_is_zero(v)) out.push_back({g.columns[i], sg * v});
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Classification

/// Inner edge and patch views of a volume in the subclass with exactly one
/// inner edge shared by all patches, or nullopt.
struct SubclassInfo {
  int edge = -1;
  std::vector<EdgeView> views;  // one per patch, in patch order
};

inline std::optional<SubclassInfo> classify_subclassA(const MultiPatchVolume& vol) {
  auto inner = vol.inc.inner_edges();
  if (inner.size() != 1) return std::nullopt;
  const int e = inner[0];
  const auto& E = vol.inc.edges[e];
  if (static_cast<int>(E.owners.size()) != vol.num_patches()) return std::nullopt;
  auto faces = vol.inc.inner_faces();
  if (faces.size() != E.owners.size()) return std::nullopt;
  for (int f : faces)
    if (std::find(E.faces.begin(), E.faces.end(), f) == E.faces.end()) return std::nullopt;
  SubclassInfo info;
  info.edge = e;
  for (int m = 0; m < vol.num_patches(); ++m) info.views.push_back(standard_form_edge(vol, e, m));
  // every inner face must be left of one patch and right of another
  for (int f : faces) {
    int l = 0, r = 0;
    for (auto& v : info.views) {
      l += v.face_left == f;
      r += v.face_right == f;
    }
    if (l != 1 || r != 1) return std::nullopt;
  }
  return info;
}

// ---------------------------------------------------------------------------
// Assembly

namespace detail {

inline void add_edge_rows(EdgeSystem& sys, const SpaceSet& ss, int patch, const PatchView& frame, int left,
                          int right, int edge_group) {
  const auto zeta = ss.S.greville();
  for (int l2 = 0; l2 < 2; ++l2)
    for (int l1 = 0; l1 < 2; ++l1)
      for (const auto& z : zeta) {
        std::array<Rational, 3> pt{Rational(0), Rational(0), z};
        std::array<int, 3> d{l1, l2, 0};
        sys.rows.push_back({RowKind::face_face, patch, frame, pt, d, left, right});
        sys.rows.push_back({RowKind::face_edge, patch, frame, pt, d, left, edge_group});
      }
}

}  // namespace detail

/// Reduced system for a volume with one inner edge: face unknowns next to the
/// edge and one block of edge unknowns per patch.
inline EdgeSystem assemble_subclassA(const MultiPatchVolume& vol, const SpaceSet& ss) {
  auto info = classify_subclassA(vol);
  if (!info) throw TopologyError("volume is not in the one-inner-edge subclass");
  EdgeSystem sys;
  sys.mode = SystemMode::subclassA;
  const int n = ss.n(), n0 = ss.n0(), n1 = ss.n1();
  std::map<int, int> face_group;
  for (int f : vol.inc.inner_faces()) {
    int m0 = -1, m1 = -1;
    for (int m = 0; m < vol.num_patches(); ++m) {
      if (info->views[m].face_left == f) m0 = m;
      if (info->views[m].face_right == f) m1 = m;
    }
    InterfaceViews iv{info->views[m0].view, info->views[m1].view};
    sys.gluings.push_back(compute_gluing(vol, iv, f));
    const int gid = static_cast<int>(sys.gluings.size()) - 1;
    sys.gluing_of_face[f] = gid;
    ColumnGroup g;
    g.kind = ColumnGroup::Kind::inner_face;
    g.entity = f;
    g.gluing = gid;
    int grp = sys.add_group(g);
    face_group[f] = grp;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < n0; ++b) sys.add_unknown(grp, {0, a, b});
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < n1; ++b) sys.add_unknown(grp, {1, a, b});
  }
  std::vector<int> edge_group(vol.num_patches());
  for (int m = 0; m < vol.num_patches(); ++m) {
    ColumnGroup g;
    g.kind = ColumnGroup::Kind::edge;
    g.entity = info->edge;
    g.patch = m;
    g.view = info->views[m].view;
    edge_group[m] = sys.add_group(g);
    for (int j1 = 0; j1 < 2; ++j1)
      for (int j2 = 0; j2 < 2; ++j2)
        for (int j3 = 0; j3 < n; ++j3) sys.add_unknown(edge_group[m], {j1, j2, j3});
  }
  for (int m = 0; m < vol.num_patches(); ++m) {
    const auto& ev = info->views[m];
    detail::add_edge_rows(sys, ss, m, ev.view, face_group.at(ev.face_left), face_group.at(ev.face_right),
                          edge_group[m]);
  }
  return sys;
}

inline bool middle_index(int j, int lo, int count_minus) { return j >= lo && j <= count_minus; }

/// Full system over all edges and vertices of the volume.
inline EdgeSystem assemble_general(const MultiPatchVolume& vol, const SpaceSet& ss) {
  EdgeSystem sys;
  sys.mode = SystemMode::general;
  const int n = ss.n(), n0 = ss.n0(), n1 = ss.n1();
  std::vector<int> face_group(vol.inc.faces.size(), -1);
  for (int f = 0; f < static_cast<int>(vol.inc.faces.size()); ++f) {
    ColumnGroup g;
    g.entity = f;
    if (vol.inc.faces[f].inner()) {
      sys.gluings.push_back(compute_gluing(vol, f));
      g.kind = ColumnGroup::Kind::inner_face;
      g.gluing = static_cast<int>(sys.gluings.size()) - 1;
      sys.gluing_of_face[f] = g.gluing;
      int grp = face_group[f] = sys.add_group(g);
      for (int a = 0; a < n0; ++a)
        for (int b = 0; b < n0; ++b)
          if (!(middle_index(a, 3, n0 - 4) && middle_index(b, 3, n0 - 4))) sys.add_unknown(grp, {0, a, b});
      for (int a = 0; a < n1; ++a)
        for (int b = 0; b < n1; ++b)
          if (!(middle_index(a, 2, n1 - 3) && middle_index(b, 2, n1 - 3))) sys.add_unknown(grp, {1, a, b});
    } else {
      g.kind = ColumnGroup::Kind::boundary_face;
      g.view = standard_form_boundary(vol, f);
      g.patch = g.view.patch;
      int grp = face_group[f] = sys.add_group(g);
      for (int j1 = 0; j1 < 2; ++j1)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            if (!(middle_index(a, 2, n - 3) && middle_index(b, 2, n - 3))) sys.add_unknown(grp, {j1, a, b});
    }
  }
  std::map<std::pair<int, int>, int> edge_group;
  std::map<std::pair<int, int>, EdgeView> edge_view;
  for (int e = 0; e < static_cast<int>(vol.inc.edges.size()); ++e)
    for (auto& [m, le] : vol.inc.edges[e].owners) {
      (void)le;
      EdgeView ev = standard_form_edge(vol, e, m);
      ColumnGroup g;
      g.kind = ColumnGroup::Kind::edge;
      g.entity = e;
      g.patch = m;
      g.view = ev.view;
      int grp = sys.add_group(g);
      edge_group[{e, m}] = grp;
      edge_view[{e, m}] = ev;
      for (int j1 = 0; j1 < 2; ++j1)
        for (int j2 = 0; j2 < 2; ++j2)
          for (int j3 = 0; j3 < n; ++j3) sys.add_unknown(grp, {j1, j2, j3});
    }
  std::map<std::pair<int, int>, int> vertex_group;
  for (int v = 0; v < static_cast<int>(vol.inc.vertices.size()); ++v)
    for (auto& [m, corner] : vol.inc.vertices[v].owners) {
      (void)corner;
      ColumnGroup g;
      g.kind = ColumnGroup::Kind::vertex;
      g.entity = v;
      g.patch = m;
      g.view = standard_form_vertex(vol, v, m);
      int grp = sys.add_group(g);
      vertex_group[{v, m}] = grp;
      for (int j3 = 0; j3 < 2; ++j3)
        for (int j2 = 0; j2 < 2; ++j2)
          for (int j1 = 0; j1 < 2; ++j1) sys.add_unknown(grp, {j1, j2, j3});
    }
  for (auto& [key, ev] : edge_view)
    detail::add_edge_rows(sys, ss, key.second, ev.view, face_group[ev.face_left], face_group[ev.face_right],
                          edge_group.at(key));
  for (auto& [key, vgrp] : vertex_group) {
    const int v = key.first, m = key.second;
    const PatchView& frame = sys.groups[vgrp].view;
    for (int e : vol.inc.patch_edges[m]) {
      const auto& ek = vol.inc.edges[e].key;
      if (ek[0] != v && ek[1] != v) continue;
      for (int d3 = 0; d3 < 2; ++d3)
        for (int d2 = 0; d2 < 2; ++d2)
          for (int d1 = 0; d1 < 2; ++d1)
            sys.rows.push_back({RowKind::edge_vertex, m, frame, {Rational(0), Rational(0), Rational(0)},
                                {d1, d2, d3}, vgrp, edge_group.at({e, m})});
    }
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Rank and kernel

struct ExactRank {
  int rank_a = 0, rank_b = 0;
  int rank() const { return std::max(rank_a, rank_b); }
  bool consistent() const { return rank_a == rank_b; }
};

/// Rank of the system over two large primes; both are lower bounds of the
/// rational rank and agree unless a prime divides a pivot by accident.
inline ExactRank exact_rank(const EdgeSystem& sys, const SpaceSet& ss, TraceChoice choice = TraceChoice::derivative) {
  ExactRank r;
  r.rank_a = modular_rank(sys.assemble<FpA>(ss, choice));
  r.rank_b = modular_rank(sys.assemble<FpB>(ss, choice));
  return r;
}

inline int kernel_dimension(const EdgeSystem& sys, const SpaceSet& ss, TraceChoice choice = TraceChoice::derivative) {
  return sys.num_cols() - exact_rank(sys, ss, choice).rank();
}

enum class KernelMode { mds, svd };

struct KernelBasis {
  KernelMode mode = KernelMode::mds;
  int exact_rank = 0;
  int numerical_rank = 0;  // from singular values (svd mode) or equal to exact_rank
  bool rank_warning = false;
  std::string warning;
  Eigen::MatrixXd vectors;  // num_cols x dim
  std::vector<int> determining;  // free unknowns of the echelon form (mds mode)
  double residual = 0.0;   // max |A v| over unit-max-norm vectors, rows scaled to unit max-abs
  int dim() const { return static_cast<int>(vectors.cols()); }
};

inline Eigen::MatrixXd scaled_dense(const SparseMatrix<double>& A) {
  Eigen::MatrixXd M = A.dense();
  for (int i = 0; i < M.rows(); ++i) {
    double s = M.row(i).cwiseAbs().maxCoeff();
    if (s > 0) M.row(i) /= s;
  }
  return M;
}

inline KernelBasis kernel_basis(const EdgeSystem& sys, const SpaceSet& ss, KernelMode mode = KernelMode::mds,
                                double tol = 1e-9) {
  KernelBasis out;
  out.mode = mode;
  auto er = exact_rank(sys, ss);
  out.exact_rank = er.rank();
  if (!er.consistent()) {
    out.rank_warning = true;
    out.warning = "prime-field ranks disagree (" + std::to_string(er.rank_a) + " vs " + std::to_string(er.rank_b) + ")";
  }
  Eigen::MatrixXd M = scaled_dense(sys.assemble<double>(ss));
  const int cols = sys.num_cols();
  if (mode == KernelMode::mds) {
    auto ek = echelon_kernel(M, out.exact_rank);
    out.vectors = ek.basis;
    out.determining = ek.free_cols;
    out.numerical_rank = out.exact_rank;
    if (ek.first_rejected > tol * 1e3 * std::max(1.0, ek.smallest_pivot)) {
      out.rank_warning = true;
      out.warning += " remaining entry " + std::to_string(ek.first_rejected) + " after exact rank";
    }
  } else {
    auto sv = svd_rank(M, tol);
    out.numerical_rank = sv.rank;
    out.vectors = sv.kernel;
    if (sv.ambiguous || sv.rank != out.exact_rank) {
      out.rank_warning = true;
      out.warning += " singular value cut ambiguous: " + std::to_string(sv.rank) + " or " +
                     std::to_string(sv.rank_alternative) + " (exact " + std::to_string(out.exact_rank) + ")";
    }
  }
  if (out.vectors.cols() > 0 && M.rows() > 0) {
    Eigen::MatrixXd R = M * out.vectors;
    for (int j = 0; j < out.vectors.cols(); ++j) {
      double vn = out.vectors.col(j).cwiseAbs().maxCoeff();
      out.residual = std::max(out.residual, R.col(j).cwiseAbs().maxCoeff() / vn);
    }
  }
  (void)cols;
  return out;
}

// ---------------------------------------------------------------------------
// Realization

/// Functions represented by the individual unknowns, built lazily.
class UnknownFunctions {
 public:
  UnknownFunctions(const MultiPatchVolume& vol, const SpaceSet& ss, const EdgeSystem& sys,
                   TraceChoice choice = TraceChoice::derivative)
      : vol_(&vol), ss_(&ss), sys_(&sys), choice_(choice), cache_(sys.num_cols()) {}

  const IsogeometricFunction& get(int col) const {
    auto& slot = cache_[col];
    if (slot) return *slot;
    const Unknown& u = sys_->unknowns[col];
    const ColumnGroup& g = sys_->groups[u.group];
    IsogeometricFunction f;
    if (g.kind == ColumnGroup::Kind::inner_face) {
      auto it = extractors_.find(g.gluing);
      if (it == extractors_.end())
        it = extractors_
                 .emplace(g.gluing, std::make_unique<FaceExtractor>(*vol_, *ss_, sys_->gluings[g.gluing], choice_))
                 .first;
      f = it->second->build(u.index[0], u.index[1], u.index[2]);
    } else {
      Family fam = g.kind == ColumnGroup::Kind::boundary_face ? Family::boundary_face : Family::edge;
      f = view_tensor_function(g.view, *ss_, u.index, {fam, g.entity, u.index});
    }
    slot = std::make_unique<IsogeometricFunction>(std::move(f));
    return *slot;
  }

  /// Sign of an unknown's function in the assembled edge function.
  double weight(int col) const {
    switch (sys_->groups[sys_->unknowns[col].group].kind) {
      case ColumnGroup::Kind::inner_face:
      case ColumnGroup::Kind::boundary_face: return 1.0;
      case ColumnGroup::Kind::edge: return -1.0;
      case ColumnGroup::Kind::vertex: return 1.0;
    }
    return 0.0;
  }

 private:
  const MultiPatchVolume* vol_;
  const SpaceSet* ss_;
  const EdgeSystem* sys_;
  TraceChoice choice_;
  mutable std::vector<std::unique_ptr<IsogeometricFunction>> cache_;
  mutable std::map<int, std::unique_ptr<FaceExtractor>> extractors_;
};

/// Expands every kernel vector into a function: face parts minus edge parts,
/// plus vertex parts in the general system.
inline std::vector<IsogeometricFunction> realize_edge_functions(const MultiPatchVolume& vol, const SpaceSet& ss,
                                                                const EdgeSystem& sys, const KernelBasis& kb) {
  UnknownFunctions uf(vol, ss, sys);
  std::vector<IsogeometricFunction> out;
  for (int j = 0; j < kb.dim(); ++j) {
    IsogeometricFunction f;
    f.tag = {Family::edge, j, {0, 0, 0}};
    const double scale = kb.vectors.col(j).cwiseAbs().maxCoeff();
    for (int c = 0; c < sys.num_cols(); ++c) {
      double x = kb.vectors(c, j);
      if (std::abs(x) <= 1e-14 * scale) continue;
      const double w = x * uf.weight(c);
      for (auto& [patch, coeffs] : uf.get(c).parts())
        for (auto& [idx, v] : coeffs) f.add(patch, idx, w * v);
    }
    f.finalize(1e-14 * scale);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace c1vol

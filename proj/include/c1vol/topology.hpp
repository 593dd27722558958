#pragma once

// Trilinear multi-patch volumes: corner data, derived incidence, the 48
// symmetries of the unit cube, and reparameterized views of patches.
//
// Corner convention of a patch (bit b of the corner index is the value of
// xi_{b+1}, xi1 fastest):
//
//        6-----------7
//       /|          /|       xi3
//      4-----------5 |        |  xi2
//      | |         | |        | /
//      | 2---------|-3        |/
//      |/          |/         +---- xi1
//      0-----------1

#include "c1vol/field.hpp"
#include "c1vol/polyalgebra.hpp"
#include "c1vol/splinecore.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace c1vol {

using Vec3 = std::array<Rational, 3>;

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularPatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

template <class T>
T det3(const std::array<T, 3>& a, const std::array<T, 3>& b, const std::array<T, 3>& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

// ---------------------------------------------------------------------------
// Cube symmetries

/// eta_k = flip[k] ? 1 - xi_{perm[k]} : xi_{perm[k]}.
struct CubeSymmetry {
  std::array<int, 3> perm{0, 1, 2};
  std::array<bool, 3> flip{false, false, false};

  /// The 48 symmetries in a fixed order: permutations lexicographically, then
  /// flip masks 0..7 (bit k flips axis k).
  static const std::vector<CubeSymmetry>& all() {
    static const std::vector<CubeSymmetry> list = [] {
      std::vector<CubeSymmetry> out;
      std::array<int, 3> p{0, 1, 2};
      do {
        for (int m = 0; m < 8; ++m) {
          CubeSymmetry s;
          s.perm = p;
          for (int k = 0; k < 3; ++k) s.flip[k] = (m >> k) & 1;
          out.push_back(s);
        }
      } while (std::next_permutation(p.begin(), p.end()));
      return out;
    }();
    return list;
  }
  static CubeSymmetry identity() { return {}; }

  int index() const {
    const auto& l = all();
    for (std::size_t i = 0; i < l.size(); ++i)
      if (l[i] == *this) return static_cast<int>(i);
    return -1;
  }
  bool operator==(const CubeSymmetry& o) const { return perm == o.perm && flip == o.flip; }

  template <class X>
  std::array<X, 3> apply(const std::array<X, 3>& xi) const {
    std::array<X, 3> eta;
    for (int k = 0; k < 3; ++k) eta[k] = flip[k] ? X(X(1) - xi[perm[k]]) : xi[perm[k]];
    return eta;
  }
  int apply_corner(int b) const {
    int out = 0;
    for (int k = 0; k < 3; ++k) {
      int bit = (b >> perm[k]) & 1;
      if (flip[k]) bit ^= 1;
      out |= bit << k;
    }
    return out;
  }
  /// (*this) after `first`: x -> this->apply(first.apply(x)).
  CubeSymmetry after(const CubeSymmetry& first) const {
    CubeSymmetry s;
    for (int k = 0; k < 3; ++k) {
      s.perm[k] = first.perm[perm[k]];
      s.flip[k] = flip[k] != first.flip[perm[k]];
    }
    return s;
  }
  CubeSymmetry inverse() const {
    CubeSymmetry s;
    for (int k = 0; k < 3; ++k) {
      s.perm[perm[k]] = k;
      s.flip[perm[k]] = flip[k];
    }
    return s;
  }
  /// Determinant of the linear part.
  int sign() const {
    int inv = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (perm[i] > perm[j]) ++inv;
    int s = inv % 2 ? -1 : 1;
    for (bool f : flip)
      if (f) s = -s;
    return s;
  }
  /// For derivatives `d` taken in the argument frame of apply(), the matching
  /// multi-index in the image frame plus the sign picked up.
  std::pair<std::array<int, 3>, int> pull_derivs(const std::array<int, 3>& d) const {
    std::array<int, 3> out{0, 0, 0};
    int s = 1;
    for (int k = 0; k < 3; ++k) {
      out[k] = d[perm[k]];
      if (flip[k] && d[perm[k]] % 2) s = -s;
    }
    return {out, s};
  }
};

// ---------------------------------------------------------------------------
// Incidence

struct FaceInfo {
  std::array<int, 4> key;                    // sorted vertex ids
  std::vector<std::pair<int, int>> owners;   // (patch, local face = 2*axis + side)
  bool inner() const { return owners.size() == 2; }
};

struct EdgeInfo {
  std::array<int, 2> key;                    // sorted vertex ids
  std::vector<std::pair<int, int>> owners;   // (patch, local edge id)
  std::vector<int> faces;                    // global faces containing the edge
  bool inner = false;                        // no boundary face contains it
};

struct VertexInfo {
  std::vector<std::pair<int, int>> owners;   // (patch, corner)
  std::vector<int> edges;
  bool inner = false;
};

struct Incidence {
  std::vector<FaceInfo> faces;
  std::vector<EdgeInfo> edges;
  std::vector<VertexInfo> vertices;
  std::vector<std::array<int, 6>> patch_faces;
  std::vector<std::array<int, 12>> patch_edges;

  std::vector<int> inner_faces() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < faces.size(); ++i)
      if (faces[i].inner()) out.push_back(static_cast<int>(i));
    return out;
  }
  std::vector<int> boundary_faces() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < faces.size(); ++i)
      if (!faces[i].inner()) out.push_back(static_cast<int>(i));
    return out;
  }
  std::vector<int> inner_edges() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (edges[i].inner) out.push_back(static_cast<int>(i));
    return out;
  }
};

/// Corners of local face 2*axis+side, ordered by the bits of the two free axes.
inline std::array<int, 4> local_face_corners(int lf) {
  const int axis = lf / 2, side = lf % 2;
  std::array<int, 4> out{};
  int n = 0;
  for (int b = 0; b < 8; ++b)
    if (((b >> axis) & 1) == side) out[n++] = b;
  return out;
}

/// Local edge 4*axis + m runs along `axis`; m packs the two fixed bits of the
/// other axes (lower axis first).
inline std::array<int, 2> local_edge_corners(int le) {
  const int axis = le / 4, m = le % 4;
  int o0 = axis == 0 ? 1 : 0, o1 = axis == 2 ? 1 : 2;
  int base = ((m & 1) << o0) | (((m >> 1) & 1) << o1);
  return {base, base | (1 << axis)};
}

// ---------------------------------------------------------------------------
// Volume

class MultiPatchVolume {
 public:
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 8>> patches;
  Incidence inc;
  std::vector<int> orientation;  // sign of det grad F per patch

  int num_patches() const { return static_cast<int>(patches.size()); }
  const Vec3& corner(int patch, int b) const { return vertices[patches[patch][b]]; }

  /// Trilinear map and partials (each derivative order at most 1).
  template <class T = double, class X>
  std::array<T, 3> eval(int patch, const std::array<X, 3>& xi, const std::array<int, 3>& d = {0, 0, 0}) const {
    std::array<T, 3> out{T(0), T(0), T(0)};
    for (int b = 0; b < 8; ++b) {
      T w(1);
      for (int k = 0; k < 3; ++k) {
        const int bit = (b >> k) & 1;
        T x = to_x<T>(xi[k]);
        if (d[k] >= 2) {
          w = T(0);
        } else if (d[k] == 1) {
          w *= bit ? T(1) : T(-1);
        } else {
          w *= bit ? x : T(T(1) - x);
        }
      }
      if (scalar_is_zero(w)) continue;
      const Vec3& c = corner(patch, b);
      for (int i = 0; i < 3; ++i) out[i] += w * to_scalar<T>(c[i]);
    }
    return out;
  }

  /// Coordinate functions of patch i as exact trivariate polynomials.
  std::array<TrivarPoly, 3> map_polys(int patch) const {
    std::array<TrivarPoly, 3> out;
    for (int b = 0; b < 8; ++b) {
      TrivarPoly w = TrivarPoly::constant(1);
      for (int k = 0; k < 3; ++k) {
        TrivarPoly x = TrivarPoly::variable(k);
        w = w * (((b >> k) & 1) ? x : TrivarPoly::constant(1) - x);
      }
      for (int i = 0; i < 3; ++i) out[i] += w * corner(patch, b)[i];
    }
    return out;
  }

  TrivarPoly jacobian_det(int patch) const {
    auto F = map_polys(patch);
    std::array<std::array<TrivarPoly, 3>, 3> J;  // J[i][k] = d F_i / d xi_k
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) J[i][k] = F[i].diff(k);
    return J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
           J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
           J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
  }

 private:
  template <class T, class X>
  static T to_x(const X& x) {
    if constexpr (std::is_same_v<X, double>)
      return T(x);
    else
      return to_scalar<T>(x);
  }
};

template <class T = double, class X>
std::array<T, 3> eval_patch(const MultiPatchVolume& vol, int patch, const std::array<X, 3>& xi,
                            const std::array<int, 3>& d = {0, 0, 0}) {
  return vol.eval<T>(patch, xi, d);
}

struct NonsingularReport {
  enum class Status { certified, violation, inconclusive };
  Status status = Status::inconclusive;
  int sign = 0;                       // orientation when certified
  std::array<double, 3> point{0, 0, 0};  // sample where the sign failed
  double value = 0.0;
};

/// Bernstein certificate on the determinant (with two bisection rounds),
/// falling back to a 33^3 sample grid.
inline NonsingularReport check_nonsingular(const MultiPatchVolume& vol, int patch) {
  NonsingularReport rep;
  TrivarPoly det = vol.jacobian_det(patch);
  int s = bernstein_sign_certificate(det, 2);
  if (s != 0) {
    rep.status = NonsingularReport::Status::certified;
    rep.sign = s;
    return rep;
  }
  const int g = 33;
  double first = 0.0;
  for (int a = 0; a < g; ++a)
    for (int b = 0; b < g; ++b)
      for (int c = 0; c < g; ++c) {
        std::array<double, 3> x{double(a) / (g - 1), double(b) / (g - 1), double(c) / (g - 1)};
        double v = det.eval<double>(x);
        if (first == 0.0) first = v;
        if (v == 0.0 || v * first < 0.0) {
          rep.status = NonsingularReport::Status::violation;
          rep.point = x;
          rep.value = v;
          return rep;
        }
      }
  rep.status = NonsingularReport::Status::inconclusive;
  rep.sign = first > 0 ? 1 : -1;
  return rep;
}

namespace detail {

inline void build_incidence(MultiPatchVolume& vol) {
  Incidence inc;
  const int np = vol.num_patches();
  std::map<std::array<int, 4>, int> face_id;
  std::map<std::array<int, 2>, int> edge_id;
  inc.patch_faces.resize(np);
  inc.patch_edges.resize(np);
  inc.vertices.resize(vol.vertices.size());
  for (int i = 0; i < np; ++i) {
    for (int lf = 0; lf < 6; ++lf) {
      std::array<int, 4> key;
      auto lc = local_face_corners(lf);
      for (int j = 0; j < 4; ++j) key[j] = vol.patches[i][lc[j]];
      std::sort(key.begin(), key.end());
      auto [it, fresh] = face_id.try_emplace(key, static_cast<int>(inc.faces.size()));
      if (fresh) inc.faces.push_back({key, {}});
      inc.faces[it->second].owners.push_back({i, lf});
      inc.patch_faces[i][lf] = it->second;
    }
    for (int le = 0; le < 12; ++le) {
      auto lc = local_edge_corners(le);
      std::array<int, 2> key{vol.patches[i][lc[0]], vol.patches[i][lc[1]]};
      std::sort(key.begin(), key.end());
      auto [it, fresh] = edge_id.try_emplace(key, static_cast<int>(inc.edges.size()));
      if (fresh) inc.edges.push_back({key, {}, {}, false});
      inc.edges[it->second].owners.push_back({i, le});
      inc.patch_edges[i][le] = it->second;
    }
    for (int b = 0; b < 8; ++b) inc.vertices[vol.patches[i][b]].owners.push_back({i, b});
  }
  for (auto& f : inc.faces)
    if (f.owners.size() > 2) throw TopologyError("face shared by more than two patches");
  for (std::size_t e = 0; e < inc.edges.size(); ++e) {
    auto& E = inc.edges[e];
    std::set<int> fs;
    for (auto [pi, le] : E.owners) {
      auto ec = local_edge_corners(le);
      for (int lf = 0; lf < 6; ++lf) {
        auto fc = local_face_corners(lf);
        if (std::find(fc.begin(), fc.end(), ec[0]) != fc.end() &&
            std::find(fc.begin(), fc.end(), ec[1]) != fc.end())
          fs.insert(inc.patch_faces[pi][lf]);
      }
    }
    E.faces.assign(fs.begin(), fs.end());
    E.inner = std::all_of(E.faces.begin(), E.faces.end(), [&](int f) { return inc.faces[f].inner(); });
    for (int v : E.key) inc.vertices[v].edges.push_back(static_cast<int>(e));
  }
  for (std::size_t v = 0; v < inc.vertices.size(); ++v) {
    auto& V = inc.vertices[v];
    bool inner = true;
    for (auto [pi, b] : V.owners)
      for (int lf = 0; lf < 6; ++lf) {
        auto fc = local_face_corners(lf);
        if (std::find(fc.begin(), fc.end(), b) != fc.end() && !inc.faces[inc.patch_faces[pi][lf]].inner())
          inner = false;
      }
    V.inner = inner;
  }
  vol.inc = std::move(inc);
}

/// Every pair of patches must meet in nothing, a common vertex, a common edge
/// or a common face.
inline void check_conforming(const MultiPatchVolume& vol) {
  const int np = vol.num_patches();
  for (int i = 0; i < np; ++i) {
    std::set<int> si(vol.patches[i].begin(), vol.patches[i].end());
    if (si.size() != 8) throw TopologyError("patch " + std::to_string(i) + " repeats a vertex");
    for (int j = i + 1; j < np; ++j) {
      std::set<int> sj(vol.patches[j].begin(), vol.patches[j].end());
      std::vector<int> common;
      std::set_intersection(si.begin(), si.end(), sj.begin(), sj.end(), std::back_inserter(common));
      if (common.size() == 8) throw TopologyError("duplicate patches " + std::to_string(i) + ", " + std::to_string(j));
      if (common.size() <= 1) continue;
      bool ok = false;
      if (common.size() == 2) {
        std::array<int, 2> key{common[0], common[1]};
        for (int le = 0; le < 12 && !ok; ++le) {
          auto a = vol.inc.edges[vol.inc.patch_edges[i][le]].key;
          if (a == key)
            for (int me = 0; me < 12; ++me)
              if (vol.inc.edges[vol.inc.patch_edges[j][me]].key == key) ok = true;
        }
      } else if (common.size() == 4) {
        for (int lf = 0; lf < 6; ++lf) {
          const auto& F = vol.inc.faces[vol.inc.patch_faces[i][lf]];
          std::array<int, 4> key{common[0], common[1], common[2], common[3]};
          if (F.key == key && F.inner()) ok = true;
        }
      }
      if (!ok)
        throw TopologyError("patches " + std::to_string(i) + " and " + std::to_string(j) +
                            " do not meet in a common vertex, edge or face");
    }
  }
}

}  // namespace detail

/// Builds the volume and its incidence. validate rejects non-conforming
/// meshes, unused or duplicated vertices, and singular patches.
inline MultiPatchVolume make_volume(std::vector<Vec3> vertices, std::vector<std::array<int, 8>> patches,
                                    bool validate = true) {
  MultiPatchVolume vol;
  vol.vertices = std::move(vertices);
  vol.patches = std::move(patches);
  const int nv = static_cast<int>(vol.vertices.size());
  for (auto& p : vol.patches)
    for (int v : p)
      if (v < 0 || v >= nv) throw TopologyError("vertex index " + std::to_string(v) + " out of range");
  detail::build_incidence(vol);
  vol.orientation.assign(vol.patches.size(), 1);
  if (!validate) {
    for (int i = 0; i < vol.num_patches(); ++i) {
      double d = vol.jacobian_det(i).eval<double>(std::array<double, 3>{0.5, 0.5, 0.5});
      vol.orientation[i] = d < 0 ? -1 : 1;
    }
    return vol;
  }
  for (int v = 0; v < nv; ++v)
    if (vol.inc.vertices[v].owners.empty()) throw TopologyError("vertex " + std::to_string(v) + " is unused");
  {
    std::set<Vec3> seen(vol.vertices.begin(), vol.vertices.end());
    if (static_cast<int>(seen.size()) != nv) throw TopologyError("two vertices share coordinates");
  }
  detail::check_conforming(vol);
  for (int i = 0; i < vol.num_patches(); ++i) {
    auto rep = check_nonsingular(vol, i);
    if (rep.status == NonsingularReport::Status::violation)
      throw SingularPatchError("patch " + std::to_string(i) + " has a vanishing Jacobian");
    vol.orientation[i] = rep.sign;
  }
  return vol;
}

inline Rational json_number(const nlohmann::json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.dump());
  if (j.is_number()) return parse_rational(j.dump());
  throw ParseError("coordinate must be a number or a rational string");
}

inline MultiPatchVolume load_volume(const std::string& text, bool validate = true) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("patches"))
    throw ParseError("volume document needs \"vertices\" and \"patches\"");
  std::vector<Vec3> verts;
  for (auto& v : doc["vertices"]) {
    if (!v.is_array() || v.size() != 3) throw ParseError("vertex must have 3 coordinates");
    verts.push_back({json_number(v[0]), json_number(v[1]), json_number(v[2])});
  }
  std::vector<std::array<int, 8>> patches;
  for (auto& p : doc["patches"]) {
    if (!p.is_array() || p.size() != 8) throw ParseError("patch must list 8 vertex indices");
    std::array<int, 8> a{};
    for (int b = 0; b < 8; ++b) {
      if (!p[b].is_number_integer()) throw ParseError("vertex index must be an integer");
      a[b] = p[b].get<int>();
    }
    patches.push_back(a);
  }
  if (patches.empty()) throw ParseError("volume has no patches");
  return make_volume(std::move(verts), std::move(patches), validate);
}

inline MultiPatchVolume load_volume_file(const std::string& path, bool validate = true) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_volume(ss.str(), validate);
}

inline std::string volume_to_json(const MultiPatchVolume& vol) {
  nlohmann::json doc;
  doc["vertices"] = nlohmann::json::array();
  for (auto& v : vol.vertices) doc["vertices"].push_back({to_string(v[0]), to_string(v[1]), to_string(v[2])});
  doc["patches"] = vol.patches;
  return doc.dump(1);
}

// ---------------------------------------------------------------------------
// Views

/// A patch seen through a symmetry: G(eta) = F(sym(eta)).
struct PatchView {
  int patch = -1;
  CubeSymmetry sym;

  int corner_vertex(const MultiPatchVolume& vol, int b) const { return vol.patches[patch][sym.apply_corner(b)]; }
  const Vec3& corner(const MultiPatchVolume& vol, int b) const { return vol.vertices[corner_vertex(vol, b)]; }

  template <class T = double, class X>
  std::array<T, 3> eval(const MultiPatchVolume& vol, const std::array<X, 3>& eta,
                        const std::array<int, 3>& d = {0, 0, 0}) const {
    auto [dd, s] = sym.pull_derivs(d);
    auto v = vol.eval<T>(patch, sym.apply(eta), dd);
    if (s < 0)
      for (auto& c : v) c = -c;
    return v;
  }
  int orientation(const MultiPatchVolume& vol) const { return sym.sign() * vol.orientation[patch]; }

  /// Coordinate polynomials of the reparameterized map.
  std::array<TrivarPoly, 3> map_polys(const MultiPatchVolume& vol) const {
    std::array<TrivarPoly, 3> out;
    for (int b = 0; b < 8; ++b) {
      TrivarPoly w = TrivarPoly::constant(1);
      for (int k = 0; k < 3; ++k) {
        TrivarPoly x = TrivarPoly::variable(k);
        w = w * (((b >> k) & 1) ? x : TrivarPoly::constant(1) - x);
      }
      for (int i = 0; i < 3; ++i) out[i] += w * corner(vol, b)[i];
    }
    return out;
  }
};

struct InterfaceViews {
  PatchView side0;  // face at eta1 = 0, (t1, t2) = (eta2, eta3)
  PatchView side1;  // face at eta2 = 0, (t1, t2) = (eta1, eta3)
};

/// Standard form of an inner face: side0(0,t1,t2) = side1(t1,0,t2), both
/// positively oriented. The lower patch index becomes side 0; ties are broken
/// by the lowest symmetry index.
inline InterfaceViews standard_form_interface(const MultiPatchVolume& vol, int face) {
  const auto& F = vol.inc.faces.at(face);
  if (!F.inner()) throw TopologyError("face " + std::to_string(face) + " is not an inner face");
  int pa = F.owners[0].first, pb = F.owners[1].first;
  if (pa > pb) std::swap(pa, pb);
  const auto& syms = CubeSymmetry::all();
  for (const auto& s0 : syms) {
    PatchView v0{pa, s0};
    if (v0.orientation(vol) < 0) continue;
    std::array<int, 4> want{};
    bool on_face = true;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        int vid = v0.corner_vertex(vol, (a << 1) | (b << 2));
        want[a + 2 * b] = vid;
        if (std::find(F.key.begin(), F.key.end(), vid) == F.key.end()) on_face = false;
      }
    if (!on_face) continue;
    for (const auto& s1 : syms) {
      PatchView v1{pb, s1};
      if (v1.orientation(vol) < 0) continue;
      bool ok = true;
      for (int a = 0; a < 2 && ok; ++a)
        for (int b = 0; b < 2 && ok; ++b)
          if (v1.corner_vertex(vol, a | (b << 2)) != want[a + 2 * b]) ok = false;
      if (ok) return {v0, v1};
    }
  }
  throw std::logic_error("no standard form for inner face " + std::to_string(face));
}

/// Boundary face at eta1 = 0, positively oriented, lowest symmetry index.
inline PatchView standard_form_boundary(const MultiPatchVolume& vol, int face) {
  const auto& F = vol.inc.faces.at(face);
  if (F.inner()) throw TopologyError("face " + std::to_string(face) + " is not a boundary face");
  const int pi = F.owners[0].first;
  for (const auto& s : CubeSymmetry::all()) {
    PatchView v{pi, s};
    if (v.orientation(vol) < 0) continue;
    bool ok = true;
    for (int b = 0; b < 8 && ok; b += 2)
      if (std::find(F.key.begin(), F.key.end(), v.corner_vertex(vol, b)) == F.key.end()) ok = false;
    if (ok) return v;
  }
  throw std::logic_error("no standard form for boundary face");
}

struct EdgeView {
  PatchView view;   // edge at eta1 = eta2 = 0, lower vertex id at the origin
  int face_left;    // global face at eta1 = 0
  int face_right;   // global face at eta2 = 0
};

/// View of a patch around one of its edges. The lower vertex id sits at the
/// origin and the edge runs along eta3; orientation makes the view unique.
inline EdgeView standard_form_edge(const MultiPatchVolume& vol, int edge, int patch) {
  const auto& E = vol.inc.edges.at(edge);
  for (const auto& s : CubeSymmetry::all()) {
    PatchView v{patch, s};
    if (v.orientation(vol) < 0) continue;
    if (v.corner_vertex(vol, 0) != E.key[0] || v.corner_vertex(vol, 4) != E.key[1]) continue;
    int lf_left = -1, lf_right = -1;
    // local faces of the patch that contain the view faces eta1 = 0 / eta2 = 0
    auto face_of = [&](std::array<int, 4> corners) {
      std::array<int, 4> key;
      for (int j = 0; j < 4; ++j) key[j] = v.corner_vertex(vol, corners[j]);
      std::sort(key.begin(), key.end());
      for (int lf = 0; lf < 6; ++lf)
        if (vol.inc.faces[vol.inc.patch_faces[patch][lf]].key == key) return vol.inc.patch_faces[patch][lf];
      return -1;
    };
    lf_left = face_of({0, 2, 4, 6});
    lf_right = face_of({0, 1, 4, 5});
    return {v, lf_left, lf_right};
  }
  throw TopologyError("patch " + std::to_string(patch) + " does not contain edge " + std::to_string(edge));
}

/// View of a patch with the given vertex at the origin (lowest positive symmetry).
inline PatchView standard_form_vertex(const MultiPatchVolume& vol, int vertex, int patch) {
  for (const auto& s : CubeSymmetry::all()) {
    PatchView v{patch, s};
    if (v.orientation(vol) < 0) continue;
    if (v.corner_vertex(vol, 0) == vertex) return v;
  }
  throw TopologyError("patch " + std::to_string(patch) + " does not contain vertex " + std::to_string(vertex));
}

/// Coefficients b with eval(b, eta) = eval(a, sym(eta)).
inline TensorCoeffs3 transform_coeffs(const TensorCoeffs3& a, const CubeSymmetry& sym) {
  const int n = a.n;
  TensorCoeffs3 b(n);
  std::array<int, 3> I{};
  for (I[2] = 0; I[2] < n; ++I[2])
    for (I[1] = 0; I[1] < n; ++I[1])
      for (I[0] = 0; I[0] < n; ++I[0]) {
        std::array<int, 3> J{};
        for (int k = 0; k < 3; ++k) J[sym.perm[k]] = sym.flip[k] ? n - 1 - I[k] : I[k];
        b(J[0], J[1], J[2]) = a(I[0], I[1], I[2]);
      }
  return b;
}

}  // namespace c1vol

#pragma once

// Basis functions of the C1 space: tensor functions of one patch, boundary
// face functions, and the two-sided inner face functions built from a trace
// and a transversal derivative on the interface.

#include "c1vol/gluing.hpp"
#include "c1vol/splinecore.hpp"
#include "c1vol/topology.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace c1vol {

class MembershipError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The univariate spaces used by the construction.
struct SpaceSet {
  SplineSpaceConfig cfg;
  UnivariateSpace S;      // S^{p,r}
  UnivariateSpace trace;  // S^{p,r+1}, traces of j1 = 0 functions
  UnivariateSpace low;    // S^{p-2,r}, transversal data of j1 = 1 functions
  UnivariateSpace mid;    // S^{p-1,r}, only for the printed R family

  SpaceSet() = default;
  explicit SpaceSet(const SplineSpaceConfig& c)
      : cfg((c.validate(), c)),
        S(c.p, c.r, c.k),
        trace(c.p, c.r + 1, c.k),
        low(c.p - 2, c.r, c.k),
        mid(c.p - 1, c.r, c.k) {}

  int n() const { return S.dim(); }
  int n0() const { return trace.dim(); }
  int n1() const { return low.dim(); }
};

/// How the transversal data of the j1 = 0 face functions is chosen.
enum class TraceChoice {
  derivative,  // f1 = d1 d2 f0 / (p lambda vol); lies in the space for every k
  printed,     // f1 = p / (lambda vol) R x R; only a member for k = 0
};

// ---------------------------------------------------------------------------
// Function representation

enum class Family { patch, boundary_face, inner_face0, inner_face1, edge };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::patch: return "patch";
    case Family::boundary_face: return "boundary-face";
    case Family::inner_face0: return "inner-face-0";
    case Family::inner_face1: return "inner-face-1";
    case Family::edge: return "edge";
  }
  return "?";
}

struct FunctionTag {
  Family family = Family::patch;
  int entity = -1;  // patch, face or edge id
  std::array<int, 3> index{0, 0, 0};
};

using SparseCoeffs = std::vector<std::pair<std::uint32_t, double>>;

/// A piecewise function given by sparse B-spline coefficients per patch; a
/// missing patch means the function vanishes there.
class IsogeometricFunction {
 public:
  FunctionTag tag;

  void add(int patch, std::uint32_t idx, double v) { parts_[patch].push_back({idx, v}); }

  /// Sorts, merges duplicates and drops entries with |v| <= drop.
  void finalize(double drop = 0.0) {
    for (auto it = parts_.begin(); it != parts_.end();) {
      auto& c = it->second;
      std::sort(c.begin(), c.end(), [](auto& a, auto& b) { return a.first < b.first; });
      SparseCoeffs out;
      for (auto& e : c) {
        if (!out.empty() && out.back().first == e.first)
          out.back().second += e.second;
        else
          out.push_back(e);
      }
      out.erase(std::remove_if(out.begin(), out.end(), [&](auto& e) { return std::abs(e.second) <= drop; }),
                out.end());
      if (out.empty()) {
        it = parts_.erase(it);
      } else {
        c = std::move(out);
        ++it;
      }
    }
  }

  const std::map<int, SparseCoeffs>& parts() const { return parts_; }
  bool touches(int patch) const { return parts_.count(patch) > 0; }
  const SparseCoeffs* coeffs(int patch) const {
    auto it = parts_.find(patch);
    return it == parts_.end() ? nullptr : &it->second;
  }

  TensorCoeffs3 dense(int patch, int n) const {
    TensorCoeffs3 t(n);
    if (auto* c = coeffs(patch))
      for (auto& [i, v] : *c) t.a[i] = v;
    return t;
  }

  /// Value or partial derivative on one patch, in its own parameter frame.
  double eval(const UnivariateSpace& S, int patch, const std::array<double, 3>& xi,
              const std::array<int, 3>& d = {0, 0, 0}) const {
    auto* c = coeffs(patch);
    if (!c) return 0.0;
    std::array<LocalBasis<double>, 3> b;
    for (int k = 0; k < 3; ++k) b[k] = basis_at<double>(S, xi[k], d[k]);
    return eval_with(S.dim(), *c, b, d);
  }

  static double eval_with(int n, const SparseCoeffs& c, const std::array<LocalBasis<double>, 3>& b,
                          const std::array<int, 3>& d) {
    double s = 0.0;
    const std::uint32_t nn = static_cast<std::uint32_t>(n);
    for (auto& [idx, v] : c) {
      int j1 = static_cast<int>(idx % nn), j2 = static_cast<int>((idx / nn) % nn), j3 = static_cast<int>(idx / nn / nn);
      double w = b[0].value(j1, d[0]);
      if (w == 0.0) continue;
      w *= b[1].value(j2, d[1]);
      if (w == 0.0) continue;
      s += v * w * b[2].value(j3, d[2]);
    }
    return s;
  }

 private:
  std::map<int, SparseCoeffs> parts_;
};

inline std::uint32_t flat_index(int n, const std::array<int, 3>& I) {
  return static_cast<std::uint32_t>((I[2] * n + I[1]) * n + I[0]);
}

/// Index in the original patch frame of the view index J.
inline std::array<int, 3> view_to_patch_index(const CubeSymmetry& sym, int n, const std::array<int, 3>& J) {
  std::array<int, 3> I{};
  for (int k = 0; k < 3; ++k) I[k] = sym.flip[k] ? n - 1 - J[sym.perm[k]] : J[sym.perm[k]];
  return I;
}

inline IsogeometricFunction patch_function(const MultiPatchVolume& vol, const SpaceSet& ss, int patch,
                                           const std::array<int, 3>& J) {
  const int n = ss.n();
  if (patch < 0 || patch >= vol.num_patches()) throw std::out_of_range("patch id out of range");
  for (int j : J)
    if (j < 0 || j >= n) throw std::out_of_range("tensor index out of range");
  IsogeometricFunction f;
  f.tag = {Family::patch, patch, J};
  f.add(patch, flat_index(n, J), 1.0);
  return f;
}

/// Tensor function given by an index in a view frame.
inline IsogeometricFunction view_tensor_function(const PatchView& view, const SpaceSet& ss,
                                                 const std::array<int, 3>& J, FunctionTag tag) {
  IsogeometricFunction f;
  f.tag = tag;
  f.add(view.patch, flat_index(ss.n(), view_to_patch_index(view.sym, ss.n(), J)), 1.0);
  return f;
}

/// Boundary face function with view index (j1, j2, j3), j1 in {0, 1}.
inline IsogeometricFunction boundary_face_function(const MultiPatchVolume& vol, const SpaceSet& ss, int face,
                                                   const std::array<int, 3>& J) {
  if (J[0] < 0 || J[0] > 1) throw std::out_of_range("boundary face function needs j1 in {0,1}");
  for (int j : J)
    if (j < 0 || j >= ss.n()) throw std::out_of_range("tensor index out of range");
  return view_tensor_function(standard_form_boundary(vol, face), ss, J, {Family::boundary_face, face, J});
}

// ---------------------------------------------------------------------------
// Pointwise evaluation of inner face functions in a side frame

/// Gluing polynomials of one face cached in the scalar type T.
template <class T>
struct GluingEval {
  std::array<BivarEval<T>, 2> alpha, beta, gamma;
  T c_derivative;  // 1 / (p lambda vol)
  T c_printed;     // p / (lambda vol)

  GluingEval() = default;
  GluingEval(const GluingData& g, const SplineSpaceConfig& cfg) {
    if (!g.splittable) throw GluingError("face is planar; the gluing data cannot be split");
    alpha = {BivarEval<T>(g.alpha0), BivarEval<T>(g.alpha1)};
    beta = {BivarEval<T>(g.beta0), BivarEval<T>(g.beta1)};
    gamma = {BivarEval<T>(g.gamma0), BivarEval<T>(g.gamma1)};
    Rational lv = g.lambda * g.vol;
    c_derivative = to_scalar<T>(Rational(1) / (lv * cfg.p));
    c_printed = to_scalar<T>(Rational(cfg.p) / lv);
  }
};

/// Value or partial of every face function of one face on one side at a
/// single point y of the side frame. The face sits at y1 = 0 on side 0 and
/// at y2 = 0 on side 1; partial orders are at most 1 per axis.
template <class T>
class FaceSideEvaluator {
 public:
  template <class X>
  FaceSideEvaluator(const SpaceSet& ss, const GluingEval<T>& ge, int side, const std::array<X, 3>& y,
                    const std::array<int, 3>& d, TraceChoice choice)
      : choice_(choice) {
    const int ax = side == 0 ? 0 : 1;
    const int a1 = side == 0 ? 1 : 0;
    e_ = {d[a1], d[2]};
    dn_ = d[ax];
    for (int v : d)
      if (v < 0 || v > 1) throw std::invalid_argument("face evaluator supports partial orders 0 and 1");
    sgn_ = side == 0 ? T(1) : T(-1);
    tr1_ = basis_at<T>(ss.trace, y[a1], 2);
    tr2_ = basis_at<T>(ss.trace, y[2], 2);
    lo1_ = basis_at<T>(ss.low, y[a1], 1);
    lo2_ = basis_at<T>(ss.low, y[2], 1);
    if (choice == TraceChoice::printed) {
      mi1_ = basis_at<T>(ss.mid, y[a1], 2);
      mi2_ = basis_at<T>(ss.mid, y[2], 2);
      h_ = to_scalar<T>(ss.cfg.h());
      n0_ = ss.n0();
    }
    auto m = basis_at<T>(ss.S, y[ax], dn_);
    m0_ = m.value(0, dn_) + m.value(1, dn_);
    m1_ = to_scalar<T>(ss.cfg.h() / ss.cfg.p) * m.value(1, dn_);
    T t1, t2;
    if constexpr (std::is_same_v<X, double>) {
      t1 = T(y[a1]);
      t2 = T(y[2]);
    } else {
      t1 = to_scalar<T>(y[a1]);
      t2 = to_scalar<T>(y[2]);
    }
    for (int f1 = 0; f1 <= e_[0]; ++f1)
      for (int f2 = 0; f2 <= e_[1]; ++f2) {
        al_[f1][f2] = ge.alpha[side](t1, t2, f1, f2);
        be_[f1][f2] = ge.beta[side](t1, t2, f1, f2);
        ga_[f1][f2] = ge.gamma[side](t1, t2, f1, f2);
      }
    cd_ = ge.c_derivative;
    cp_ = ge.c_printed;
    zero_ = scalar_is_zero(m0_) && scalar_is_zero(m1_);
  }

  /// True when every face function vanishes at this point to this order.
  bool all_zero() const { return zero_; }

  T operator()(int j1, int a, int b) const {
    if (zero_) return T(0);
    if (j1 == 0) {
      T A = tr1_.value(a, e_[0]) * tr2_.value(b, e_[1]);
      T B = term(be_, tr1_, tr2_, a, b, 1, 0) + term(ga_, tr1_, tr2_, a, b, 0, 1);
      if (choice_ == TraceChoice::derivative)
        B += sgn_ * cd_ * term(al_, tr1_, tr2_, a, b, 1, 1);
      else
        B += sgn_ * cp_ * r_term(a, b);
      return A * m0_ + B * m1_;
    }
    return sgn_ * term(al_, lo1_, lo2_, a, b, 0, 0) * m1_;
  }

 private:
  using Tab = std::array<std::array<T, 2>, 2>;

  // d^e (P * N_a^{(u1)} N_b^{(u2)}) by the product rule.
  T term(const Tab& P, const LocalBasis<T>& b1, const LocalBasis<T>& b2, int a, int b, int u1, int u2) const {
    T s(0);
    for (int f1 = 0; f1 <= e_[0]; ++f1)
      for (int f2 = 0; f2 <= e_[1]; ++f2) {
        T v = b1.value(a, u1 + f1);
        if (scalar_is_zero(v)) continue;
        v *= b2.value(b, u2 + f2);
        if (scalar_is_zero(v)) continue;
        s += P[e_[0] - f1][e_[1] - f2] * v;  // binomials are 1 for orders <= 1
      }
    return s;
  }

  T r_value(const LocalBasis<T>& m, int j, int d) const {
    T v(0);
    if (j >= 1) v += m.value(j - 1, d);
    if (j <= n0_ - 2) v -= m.value(j, d);
    return h_ * v;
  }

  T r_term(int a, int b) const {
    T s(0);
    for (int f1 = 0; f1 <= e_[0]; ++f1)
      for (int f2 = 0; f2 <= e_[1]; ++f2)
        s += al_[e_[0] - f1][e_[1] - f2] * r_value(mi1_, a, f1) * r_value(mi2_, b, f2);
    return s;
  }

  TraceChoice choice_;
  std::array<int, 2> e_{};
  int dn_ = 0;
  T sgn_{}, m0_{}, m1_{}, cd_{}, cp_{}, h_{};
  int n0_ = 0;
  bool zero_ = false;
  LocalBasis<T> tr1_, tr2_, lo1_, lo2_, mi1_, mi2_;
  Tab al_{}, be_{}, ga_{};
};

/// Values of all tensor B-splines (one partial per axis) at one point.
template <class T>
class TensorPointEvaluator {
 public:
  template <class X>
  TensorPointEvaluator(const UnivariateSpace& S, const std::array<X, 3>& y, const std::array<int, 3>& d) : d_(d) {
    for (int k = 0; k < 3; ++k) b_[k] = basis_at<T>(S, y[k], d[k]);
  }
  T operator()(const std::array<int, 3>& J) const {
    return b_[0].value(J[0], d_[0]) * b_[1].value(J[1], d_[1]) * b_[2].value(J[2], d_[2]);
  }
  const LocalBasis<T>& axis(int k) const { return b_[k]; }

 private:
  std::array<int, 3> d_;
  std::array<LocalBasis<T>, 3> b_;
};

// ---------------------------------------------------------------------------
// Coefficient extraction of inner face functions

/// Turns the inner face functions of one face into B-spline coefficients.
/// Each tensor layer next to the face is a bivariate spline; it is recovered
/// by collocation at the Greville points of the coefficients that can be
/// active on its support, then compared with the exact expression at Gauss
/// points of every element of the support.
class FaceExtractor {
 public:
  FaceExtractor(const MultiPatchVolume& vol, const SpaceSet& ss, const GluingData& g,
                TraceChoice choice = TraceChoice::derivative, double tol = 1e-10)
      : ss_(&ss), g_(&g), ge_(g, ss.cfg), choice_(choice), tol_(tol) {
    (void)vol;
    const int p = ss.cfg.p, K = ss.cfg.k + 1;
    for (auto& z : ss.S.greville()) pts_.push_back(z.get_d());
    greville_count_ = static_cast<int>(pts_.size());
    std::vector<double> gx, gw;
    gauss_legendre(p + 1, gx, gw);
    for (int e = 0; e < K; ++e)
      for (double x : gx) pts_.push_back((e + x) / K);
    const int np = static_cast<int>(pts_.size());
    for (int i = 0; i < np; ++i) {
      tr_.push_back(basis_at<double>(ss.trace, pts_[i], 1));
      lo_.push_back(basis_at<double>(ss.low, pts_[i], 0));
      sp_.push_back(basis_at<double>(ss.S, pts_[i], 0));
      if (choice == TraceChoice::printed) mi_.push_back(basis_at<double>(ss.mid, pts_[i], 0));
    }
    for (int s = 0; s < 2; ++s) {
      for (auto* tab : {&al_[s], &be_[s], &ga_[s]}) tab->assign(static_cast<std::size_t>(np) * np, 0.0);
      for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j) {
          std::size_t q = static_cast<std::size_t>(i) * np + j;
          al_[s][q] = ge_.alpha[s](pts_[i], pts_[j]);
          be_[s][q] = ge_.beta[s](pts_[i], pts_[j]);
          ga_[s][q] = ge_.gamma[s](pts_[i], pts_[j]);
        }
    }
  }

  /// Inner face function (j1, a, b): a, b index S^{p,r+1} for j1 = 0 and
  /// S^{p-2,r} for j1 = 1.
  IsogeometricFunction build(int j1, int a, int b) const {
    const SpaceSet& ss = *ss_;
    const int nab = j1 == 0 ? ss.n0() : ss.n1();
    if (j1 < 0 || j1 > 1 || a < 0 || b < 0 || a >= nab || b >= nab)
      throw std::out_of_range("inner face function index out of range");
    const UnivariateSpace& U = j1 == 0 ? ss.trace : ss.low;
    auto [e1lo, e1hi] = element_range(U, a);
    auto [e2lo, e2hi] = element_range(U, b);
    auto [w1lo, w1hi] = window(e1lo, e1hi);
    auto [w2lo, w2hi] = window(e2lo, e2hi);
    if (choice_ == TraceChoice::printed && j1 == 0) {
      // R_a is supported on the union of two neighbouring B-splines of S^{p-1,r}
      widen(a, e1lo, e1hi, w1lo, w1hi);
      widen(b, e2lo, e2hi, w2lo, w2hi);
    }
    const int m1 = w1hi - w1lo + 1, m2 = w2hi - w2lo + 1;
    const Eigen::MatrixXd& C1 = inverse_collocation(w1lo, w1hi);
    const Eigen::MatrixXd& C2 = inverse_collocation(w2lo, w2hi);

    IsogeometricFunction f;
    f.tag = {j1 == 0 ? Family::inner_face0 : Family::inner_face1, g_->face, {j1, a, b}};
    const double hp = ss.cfg.h().get_d() / ss.cfg.p;
    const int n = ss.n();
    const std::array<PatchView, 2> views{g_->views.side0, g_->views.side1};
    for (int side = 0; side < 2; ++side) {
      // layer 0 carries the trace, layer 1 the trace plus (h/p) times the transversal data
      for (int layer = 0; layer < 2; ++layer) {
        if (j1 == 1 && layer == 0) continue;
        Eigen::MatrixXd V(m1, m2);
        for (int i = 0; i < m1; ++i)
          for (int j = 0; j < m2; ++j) V(i, j) = layer_value(side, layer, j1, a, b, w1lo + i, w2lo + j, hp);
        Eigen::MatrixXd coef = C1 * V * C2.transpose();
        check_layer(side, layer, j1, a, b, coef, w1lo, w2lo, e1lo, e1hi, e2lo, e2hi, hp);
        for (int i = 0; i < m1; ++i)
          for (int j = 0; j < m2; ++j) {
            double v = coef(i, j);
            if (v == 0.0) continue;
            std::array<int, 3> J = side == 0 ? std::array<int, 3>{layer, w1lo + i, w2lo + j}
                                             : std::array<int, 3>{w1lo + i, layer, w2lo + j};
            f.add(views[side].patch, flat_index(n, view_to_patch_index(views[side].sym, n, J)), v);
          }
      }
    }
    f.finalize(1e-15);
    return f;
  }

  const GluingData& gluing() const { return *g_; }

 private:
  // Trace A and transversal data B of the side at 1D grid points (i, j).
  std::pair<double, double> trace_pair(int side, int j1, int a, int b, int i, int j) const {
    const std::size_t q = static_cast<std::size_t>(i) * pts_.size() + j;
    const double sg = side == 0 ? 1.0 : -1.0;
    if (j1 == 1) return {0.0, sg * al_[side][q] * lo_[i].value(a, 0) * lo_[j].value(b, 0)};
    const double na = tr_[i].value(a, 0), nb = tr_[j].value(b, 0);
    const double da = tr_[i].value(a, 1), db = tr_[j].value(b, 1);
    double B = be_[side][q] * da * nb + ga_[side][q] * na * db;
    if (choice_ == TraceChoice::derivative) {
      B += sg * ge_.c_derivative * al_[side][q] * da * db;
    } else {
      const double h = ss_->cfg.h().get_d();
      const int n0 = ss_->n0();
      auto R = [&](const LocalBasis<double>& m, int c) {
        double v = 0.0;
        if (c >= 1) v += m.value(c - 1, 0);
        if (c <= n0 - 2) v -= m.value(c, 0);
        return h * v;
      };
      B += sg * ge_.c_printed * al_[side][q] * R(mi_[i], a) * R(mi_[j], b);
    }
    return {na * nb, B};
  }

  double layer_value(int side, int layer, int j1, int a, int b, int i, int j, double hp) const {
    auto [A, B] = trace_pair(side, j1, a, b, i, j);
    return layer == 0 ? A : A + hp * B;
  }

  std::pair<int, int> element_range(const UnivariateSpace& U, int j) const {
    const int K = ss_->cfg.k + 1;
    const auto& t = U.knots_double();
    int lo = static_cast<int>(std::floor(t[j] * K + 1e-9));
    int hi = static_cast<int>(std::ceil(t[j + U.degree() + 1] * K - 1e-9)) - 1;
    return {std::clamp(lo, 0, K - 1), std::clamp(hi, 0, K - 1)};
  }

  std::pair<int, int> window(int elo, int ehi) const {
    const int p = ss_->cfg.p, mult = p - ss_->cfg.r;
    // span index of element e is p + e * mult
    return {p + elo * mult - p, p + ehi * mult};
  }

  void widen(int c, int& elo, int& ehi, int& wlo, int& whi) const {
    for (int j : {c - 1, c}) {
      if (j < 0 || j >= ss_->mid.dim()) continue;
      auto [lo, hi] = element_range(ss_->mid, j);
      elo = std::min(elo, lo);
      ehi = std::max(ehi, hi);
    }
    auto [l, h] = window(elo, ehi);
    wlo = l;
    whi = h;
  }

  const Eigen::MatrixXd& inverse_collocation(int lo, int hi) const {
    auto key = std::make_pair(lo, hi);
    auto it = inv_cache_.find(key);
    if (it != inv_cache_.end()) return it->second;
    const int m = hi - lo + 1;
    Eigen::MatrixXd N(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) N(i, j) = sp_[lo + i].value(lo + j, 0);
    return inv_cache_.emplace(key, N.partialPivLu().inverse()).first->second;
  }

  void check_layer(int side, int layer, int j1, int a, int b, const Eigen::MatrixXd& coef, int w1lo, int w2lo,
                   int e1lo, int e1hi, int e2lo, int e2hi, double hp) const {
    const int q = ss_->cfg.p + 1;
    double scale = 0.0, worst = 0.0;
    for (int e1 = e1lo; e1 <= e1hi; ++e1)
      for (int i = greville_count_ + e1 * q; i < greville_count_ + (e1 + 1) * q; ++i)
        for (int e2 = e2lo; e2 <= e2hi; ++e2)
          for (int j = greville_count_ + e2 * q; j < greville_count_ + (e2 + 1) * q; ++j) {
            double exact = layer_value(side, layer, j1, a, b, i, j, hp);
            double s = 0.0;
            for (int u = 0; u < coef.rows(); ++u) {
              double bu = sp_[i].value(w1lo + u, 0);
              if (bu == 0.0) continue;
              for (int v = 0; v < coef.cols(); ++v) s += coef(u, v) * bu * sp_[j].value(w2lo + v, 0);
            }
            scale = std::max(scale, std::abs(exact));
            worst = std::max(worst, std::abs(exact - s));
          }
    if (worst > tol_ * std::max(1.0, scale))
      throw MembershipError("face " + std::to_string(g_->face) + " function (" + std::to_string(j1) + "," +
                            std::to_string(a) + "," + std::to_string(b) + ") side " + std::to_string(side) +
                            " is not in the spline space (residual " + std::to_string(worst) + ")");
  }

  const SpaceSet* ss_;
  const GluingData* g_;
  GluingEval<double> ge_;
  TraceChoice choice_;
  double tol_;
  std::vector<double> pts_;  // Greville points of S, then Gauss points per element
  int greville_count_ = 0;
  std::vector<LocalBasis<double>> tr_, lo_, sp_, mi_;
  std::array<std::vector<double>, 2> al_, be_, ga_;
  mutable std::map<std::pair<int, int>, Eigen::MatrixXd> inv_cache_;
};

inline IsogeometricFunction inner_face_function(const MultiPatchVolume& vol, const SpaceSet& ss,
                                                const GluingData& g, int j1, int a, int b,
                                                TraceChoice choice = TraceChoice::derivative) {
  return FaceExtractor(vol, ss, g, choice).build(j1, a, b);
}

// ---------------------------------------------------------------------------
// Physical gradients and C1 jumps

/// Gradient in physical space from parametric partials and the Jacobian.
inline std::array<double, 3> physical_gradient(const MultiPatchVolume& vol, int patch, const std::array<double, 3>& xi,
                                               const std::array<double, 3>& dpar) {
  Eigen::Matrix3d J;
  for (int k = 0; k < 3; ++k) {
    std::array<int, 3> d{0, 0, 0};
    d[k] = 1;
    auto c = vol.eval<double>(patch, xi, d);
    for (int i = 0; i < 3; ++i) J(i, k) = c[i];
  }
  Eigen::Vector3d g = J.transpose().fullPivLu().solve(Eigen::Vector3d(dpar[0], dpar[1], dpar[2]));
  return {g[0], g[1], g[2]};
}

struct JumpSample {
  double value_jump = 0.0;
  double grad_jump = 0.0;  // absolute
  double grad_scale = 0.0;
};

/// Value and gradient jump of f across an inner face at face point (t1, t2).
inline JumpSample face_jump(const MultiPatchVolume& vol, const SpaceSet& ss, const InterfaceViews& iv,
                            const IsogeometricFunction& f, double t1, double t2) {
  JumpSample out;
  std::array<double, 3> y0{0.0, t1, t2}, y1{t1, 0.0, t2};
  std::array<const PatchView*, 2> views{&iv.side0, &iv.side1};
  std::array<double, 2> val{};
  std::array<std::array<double, 3>, 2> grad{};
  for (int s = 0; s < 2; ++s) {
    const PatchView& v = *views[s];
    auto xi = v.sym.apply(s == 0 ? y0 : y1);
    std::array<double, 3> dp{};
    for (int k = 0; k < 3; ++k) {
      std::array<int, 3> d{0, 0, 0};
      d[k] = 1;
      dp[k] = f.eval(ss.S, v.patch, xi, d);
    }
    val[s] = f.eval(ss.S, v.patch, xi);
    grad[s] = physical_gradient(vol, v.patch, xi, dp);
  }
  out.value_jump = std::abs(val[0] - val[1]);
  double gj = 0.0, gs = 0.0;
  for (int i = 0; i < 3; ++i) {
    gj = std::max(gj, std::abs(grad[0][i] - grad[1][i]));
    gs = std::max({gs, std::abs(grad[0][i]), std::abs(grad[1][i])});
  }
  out.grad_jump = gj;
  out.grad_scale = gs;
  return out;
}

}  // namespace c1vol

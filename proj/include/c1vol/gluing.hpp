#pragma once

// Gluing data of an inner face in standard form, its bilinear splitting, and
// the checks of the genericity assumption on the interface.

#include "c1vol/polyalgebra.hpp"
#include "c1vol/splinecore.hpp"
#include "c1vol/topology.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <string>
#include <vector>

namespace c1vol {

class GluingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using BivarVec = std::array<BivarPoly, 3>;

struct GluingData {
  int face = -1;
  InterfaceViews views;
  std::array<Vec3, 12> labels;  // face corners 0,2,4,6; side-0 corners; side-1 far corners 8..11

  Rational lambda;
  Rational vol;
  bool splittable = false;  // vol != 0
  bool negated = false;     // alphas came out negative and were flipped

  BivarPoly alpha0, alpha1, beta, gamma;
  BivarPoly beta0, beta1, gamma0, gamma1, delta0, delta1;

  // Partials of the two maps on the face, as functions of (t1, t2).
  std::array<BivarVec, 3> dF0;  // d/dxi_k of side 0 at (0, t1, t2)
  std::array<BivarVec, 3> dF1;  // d/dxi_k of side 1 at (t1, 0, t2)
};

namespace detail {

inline BivarPoly det3_poly(const BivarVec& a, const BivarVec& b, const BivarVec& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

inline BivarVec constant_vec(const Vec3& v) {
  return {BivarPoly::constant(v[0]), BivarPoly::constant(v[1]), BivarPoly::constant(v[2])};
}

}  // namespace detail

/// Gluing data for an interface given by two views in standard form.
inline GluingData compute_gluing(const MultiPatchVolume& vol, const InterfaceViews& views, int face = -1) {
  GluingData g;
  g.face = face;
  g.views = views;
  auto F0 = views.side0.map_polys(vol);
  auto F1 = views.side1.map_polys(vol);
  for (int k = 0; k < 3; ++k)
    for (int c = 0; c < 3; ++c) {
      g.dF0[k][c] = restrict_to_plane(F0[c].diff(k), 0, Rational(0), {1, 2}).trimmed();
      g.dF1[k][c] = restrict_to_plane(F1[c].diff(k), 1, Rational(0), {0, 2}).trimmed();
    }
  for (int b = 0; b < 8; ++b) g.labels[b] = views.side0.corner(vol, b);
  const std::array<int, 4> far{2, 3, 6, 7};
  for (int j = 0; j < 4; ++j) g.labels[8 + j] = views.side1.corner(vol, far[j]);

  BivarPoly d0 = detail::det3_poly(g.dF0[0], g.dF0[1], g.dF0[2]);
  BivarPoly d1 = detail::det3_poly(g.dF1[0], g.dF1[1], g.dF1[2]);
  Rational den = (d0 * d0 + d1 * d1).integrate();
  if (sgn(den) == 0) throw GluingError("degenerate interface: both Jacobians vanish");
  g.lambda = (d0 + d1).integrate() / den;
  if (sgn(g.lambda) < 0) {
    // Both sides are negatively oriented; flipping lambda keeps the relation.
    g.lambda = -g.lambda;
    g.negated = true;
  }
  g.alpha0 = (d0 * g.lambda).trimmed();
  g.alpha1 = (d1 * g.lambda).trimmed();
  g.beta = (detail::det3_poly(g.dF1[1], g.dF1[2], g.dF0[0]) * g.lambda).trimmed();
  g.gamma = (detail::det3_poly(g.dF1[0], g.dF1[1], g.dF0[0]) * g.lambda).trimmed();

  const Vec3& X0 = g.labels[0];
  const Vec3& X2 = g.labels[2];
  const Vec3& X4 = g.labels[4];
  const Vec3& X6 = g.labels[6];
  g.vol = det3(X2 - X0, X4 - X0, X6 - X0);
  g.splittable = sgn(g.vol) != 0;
  if (g.splittable) {
    auto split = [&](const Vec3& a, const Vec3& b, const BivarVec& v) {
      return (detail::det3_poly(detail::constant_vec(a), detail::constant_vec(b), v) * (Rational(1) / g.vol))
          .trimmed();
    };
    g.beta0 = split(X6 - X2, X0 - X4, g.dF0[0]);
    g.beta1 = split(X6 - X2, X0 - X4, g.dF1[1]);
    g.gamma0 = split(X6 - X4, X2 - X0, g.dF0[0]);
    g.gamma1 = split(X6 - X4, X2 - X0, g.dF1[1]);
    g.delta0 = split(X2 - X0, X4 - X0, g.dF0[0]);
    g.delta1 = split(X2 - X0, X4 - X0, g.dF1[1]);
  }
  return g;
}

inline GluingData compute_gluing(const MultiPatchVolume& vol, int face) {
  return compute_gluing(vol, standard_form_interface(vol, face), face);
}

/// Residuals of the exact identities; all zero for consistent data.
struct GluingIdentities {
  bool cond_mapping = false;
  bool beta_split = false;
  bool gamma_split = false;
  bool alpha0_split = false;
  bool alpha1_split = false;
  bool all() const { return cond_mapping && beta_split && gamma_split && alpha0_split && alpha1_split; }
};

inline GluingIdentities verify_gluing_identities(const GluingData& g) {
  GluingIdentities r;
  bool ok = true;
  for (int c = 0; c < 3; ++c) {
    BivarPoly res = g.alpha0 * g.dF1[1][c] + g.alpha1 * g.dF0[0][c] - g.beta * g.dF1[0][c] - g.gamma * g.dF1[2][c];
    if (!res.is_zero()) ok = false;
  }
  r.cond_mapping = ok;
  if (!g.splittable) return r;
  const BivarPoly t1 = BivarPoly::variable(0), t2 = BivarPoly::variable(1);
  const Rational lv = g.lambda * g.vol;
  r.beta_split = (g.beta - (g.beta0 * g.alpha1 + g.beta1 * g.alpha0)).is_zero();
  r.gamma_split = (g.gamma - (g.gamma0 * g.alpha1 + g.gamma1 * g.alpha0)).is_zero();
  r.alpha0_split = (g.alpha0 - (g.delta0 - t1 * g.gamma0 - t2 * g.beta0) * lv).is_zero();
  r.alpha1_split = (g.alpha1 + (g.delta1 - t1 * g.gamma1 - t2 * g.beta1) * lv).is_zero();
  return r;
}

/// Transversal direction d at (t1, t2), computed from side 0 or side 1.
inline std::array<double, 3> transversal_direction(const GluingData& g, int side, double t1, double t2) {
  auto ev = [&](const BivarPoly& p) { return p.eval<double>(std::array<double, 2>{t1, t2}); };
  std::array<double, 3> d{};
  if (side == 0) {
    double a = ev(g.alpha0), b = ev(g.beta0), c = ev(g.gamma0);
    if (a == 0.0) throw GluingError("alpha vanishes");
    for (int i = 0; i < 3; ++i)
      d[i] = (ev(g.dF0[0][i]) - b * ev(g.dF0[1][i]) - c * ev(g.dF0[2][i])) / a;
  } else {
    double a = ev(g.alpha1), b = ev(g.beta1), c = ev(g.gamma1);
    if (a == 0.0) throw GluingError("alpha vanishes");
    for (int i = 0; i < 3; ++i)
      d[i] = (b * ev(g.dF1[0][i]) + c * ev(g.dF1[2][i]) - ev(g.dF1[1][i])) / a;
  }
  return d;
}

struct FaceAssumptionReport {
  int face = -1;
  bool planar = false;
  std::array<EffectiveBidegree, 4> bidegrees;  // alpha0, alpha1, beta, gamma
  bool full_bidegrees = false;
  std::vector<std::array<int, 2>> beta_grid_roots, gamma_grid_roots;
  bool gcd_constant = false;
  int alpha0_sign = 0, alpha1_sign = 0;  // Bernstein certificate, 0 = not certified
  bool alpha_positive() const { return alpha0_sign > 0 && alpha1_sign > 0; }
  bool pass() const {
    return !planar && full_bidegrees && beta_grid_roots.empty() && gamma_grid_roots.empty() && gcd_constant;
  }
};

struct Assumption1Report {
  std::vector<FaceAssumptionReport> faces;
  bool pass() const {
    for (auto& f : faces)
      if (!f.pass()) return false;
    return true;
  }
};

inline FaceAssumptionReport check_face_assumption(const GluingData& g, int k) {
  FaceAssumptionReport r;
  r.face = g.face;
  r.planar = !g.splittable;
  r.bidegrees = {effective_bidegree(g.alpha0), effective_bidegree(g.alpha1), effective_bidegree(g.beta),
                 effective_bidegree(g.gamma)};
  const std::array<std::array<int, 2>, 4> full{{{2, 2}, {2, 2}, {3, 2}, {2, 3}}};
  r.full_bidegrees = true;
  for (int i = 0; i < 4; ++i)
    if (r.bidegrees[i].zero || r.bidegrees[i].d1 != full[i][0] || r.bidegrees[i].d2 != full[i][1])
      r.full_bidegrees = false;
  const Rational h = ratio(1, k + 1);
  for (int a = 1; a <= k; ++a)
    for (int b = 1; b <= k; ++b) {
      std::array<Rational, 2> t{h * a, h * b};
      if (sgn(g.beta.eval_exact(t)) == 0) r.beta_grid_roots.push_back({a, b});
      if (sgn(g.gamma.eval_exact(t)) == 0) r.gamma_grid_roots.push_back({a, b});
    }
  r.alpha0_sign = bernstein_sign_certificate(g.alpha0, 4);
  r.alpha1_sign = bernstein_sign_certificate(g.alpha1, 4);
  r.gcd_constant = g.alpha0.is_zero() || g.alpha1.is_zero() ? false : !common_roots_check(g.alpha0, g.alpha1);
  return r;
}

inline Assumption1Report check_assumption1(const MultiPatchVolume& vol, const SplineSpaceConfig& cfg) {
  Assumption1Report rep;
  for (int f : vol.inc.inner_faces()) rep.faces.push_back(check_face_assumption(compute_gluing(vol, f), cfg.k));
  return rep;
}

inline nlohmann::json to_json(const GluingData& g) {
  auto bideg = [](const BivarPoly& p) {
    auto d = effective_bidegree(p);
    return nlohmann::json::array({d.d1, d.d2});
  };
  nlohmann::json j;
  j["face"] = g.face;
  j["lambda"] = to_string(g.lambda);
  j["lambda_approx"] = g.lambda.get_d();
  j["vol"] = to_string(g.vol);
  j["bidegree_alpha0"] = bideg(g.alpha0);
  j["bidegree_alpha1"] = bideg(g.alpha1);
  j["bidegree_beta"] = bideg(g.beta);
  j["bidegree_gamma"] = bideg(g.gamma);
  j["identities_hold"] = verify_gluing_identities(g).all();
  return j;
}

inline nlohmann::json to_json(const FaceAssumptionReport& r) {
  nlohmann::json j;
  j["face"] = r.face;
  j["planar"] = r.planar;
  j["full_bidegrees"] = r.full_bidegrees;
  nlohmann::json bd = nlohmann::json::array();
  for (auto& b : r.bidegrees) bd.push_back({b.d1, b.d2});
  j["bidegrees"] = bd;
  j["beta_grid_roots"] = r.beta_grid_roots;
  j["gamma_grid_roots"] = r.gamma_grid_roots;
  j["gcd_constant"] = r.gcd_constant;
  j["alpha_positive"] = r.alpha_positive();
  j["pass"] = r.pass();
  return j;
}

}  // namespace c1vol

#pragma once

// Univariate B-spline spaces on open uniform knot vectors over [0,1] and
// tensor-product evaluation.

#include "c1vol/field.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>
#include <vector>

namespace c1vol {

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Admissible triple (p, r, k) of the trivariate space S^{p,r}_h.
struct SplineSpaceConfig {
  int p = 3;
  int r = 1;
  int k = 0;

  void validate() const {
    if (p < 3 || r < 1 || r > p - 2 || k < 0)
      throw ParameterError("inadmissible (p,r,k) = (" + std::to_string(p) + "," +
                           std::to_string(r) + "," + std::to_string(k) + ")");
  }
  Rational h() const { return ratio(1, k + 1); }
  int n() const { return p + 1 + k * (p - r); }
  int n0() const { return p + 1 + k * (p - r - 1); }
  int n1() const { return p - 1 + k * (p - r - 2); }
};

struct SpaceDims {
  int n, n0, n1;
};

inline SpaceDims space_dims(int p, int r, int k) {
  SplineSpaceConfig c{p, r, k};
  c.validate();
  return {c.n(), c.n0(), c.n1()};
}

/// S^{degree,regularity}_h on k+1 uniform elements. Regularity may equal the
/// degree (no interior knots: global polynomials) or be -1 (discontinuous).
class UnivariateSpace {
 public:
  UnivariateSpace() = default;
  UnivariateSpace(int degree, int regularity, int k) : deg_(degree), reg_(regularity), k_(k) {
    if (degree < 0 || k < 0 || regularity < -1 || regularity > degree)
      throw ParameterError("invalid univariate space");
    const int mult = degree - regularity;
    for (int i = 0; i <= degree; ++i) knots_.push_back(Rational(0));
    for (int e = 1; e <= k; ++e)
      for (int m = 0; m < mult; ++m) knots_.push_back(ratio(e, k + 1));
    for (int i = 0; i <= degree; ++i) knots_.push_back(Rational(1));
    for (auto& t : knots_) dknots_.push_back(t.get_d());
    dim_ = static_cast<int>(knots_.size()) - degree - 1;
  }

  int degree() const { return deg_; }
  int regularity() const { return reg_; }
  int k() const { return k_; }
  int dim() const { return dim_; }
  Rational h() const { return ratio(1, k_ + 1); }
  const std::vector<Rational>& knots() const { return knots_; }
  const std::vector<double>& knots_double() const { return dknots_; }
  bool operator==(const UnivariateSpace& o) const {
    return deg_ == o.deg_ && reg_ == o.reg_ && k_ == o.k_;
  }

  /// Knot averages; strictly increasing with ends 0 and 1.
  std::vector<Rational> greville() const {
    std::vector<Rational> z(dim_);
    if (deg_ == 0) {
      for (int j = 0; j < dim_; ++j) z[j] = (knots_[j] + knots_[j + 1]) / 2;
      return z;
    }
    for (int j = 0; j < dim_; ++j) {
      Rational s = 0;
      for (int i = 1; i <= deg_; ++i) s += knots_[j + i];
      z[j] = s / deg_;
    }
    return z;
  }

  /// Index mu with t_mu <= x < t_{mu+1}; the last element is closed.
  int span(double x) const {
    if (x < 0.0 || x > 1.0) throw std::out_of_range("evaluation point outside [0,1]");
    if (x >= 1.0) return dim_ - 1;
    auto it = std::upper_bound(dknots_.begin(), dknots_.end(), x);
    return static_cast<int>(it - dknots_.begin()) - 1;
  }
  int span(const Rational& x) const {
    if (sgn(x) < 0 || x > 1) throw std::out_of_range("evaluation point outside [0,1]");
    if (x >= 1) return dim_ - 1;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    return static_cast<int>(it - knots_.begin()) - 1;
  }

  /// Element index of x (0..k), consistent with span().
  int element(double x) const {
    int e = static_cast<int>(x * (k_ + 1));
    return std::clamp(e, 0, k_);
  }

  template <class T>
  const std::vector<T>& knots_as() const {
    if constexpr (std::is_same_v<T, double>) {
      return dknots_;
    } else {
      static thread_local std::map<std::array<int, 3>, std::vector<T>> cache;
      auto key = std::array<int, 3>{deg_, reg_, k_};
      auto it = cache.find(key);
      if (it == cache.end()) {
        std::vector<T> v;
        for (auto& t : knots_) v.push_back(to_scalar<T>(t));
        it = cache.emplace(key, std::move(v)).first;
      }
      return it->second;
    }
  }

 private:
  int deg_ = 0, reg_ = -1, k_ = 0, dim_ = 0;
  std::vector<Rational> knots_;
  std::vector<double> dknots_;
};

/// Nonzero basis functions and derivatives at one point: ders[d][i] belongs to
/// N_{first+i}. Derivatives beyond the degree are zero.
template <class T>
struct LocalBasis {
  int first = 0;
  std::vector<std::vector<T>> ders;

  T value(int j, int d) const {
    int i = j - first;
    if (i < 0 || i >= static_cast<int>(ders[0].size()) || d >= static_cast<int>(ders.size()))
      return T(0);
    return ders[d][i];
  }
};

namespace detail {

template <class T>
LocalBasis<T> local_basis(const std::vector<T>& U, int p, int mu, const T& x, int nder) {
  // Piegl-Tiller A2.3, valid over any field.
  LocalBasis<T> out;
  out.first = mu - p;
  std::vector<std::vector<T>> ndu(p + 1, std::vector<T>(p + 1, T(0)));
  std::vector<T> left(p + 1, T(0)), right(p + 1, T(0));
  ndu[0][0] = T(1);
  for (int j = 1; j <= p; ++j) {
    left[j] = x - U[mu + 1 - j];
    right[j] = U[mu + j] - x;
    T saved(0);
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      T temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  out.ders.assign(nder + 1, std::vector<T>(p + 1, T(0)));
  for (int j = 0; j <= p; ++j) out.ders[0][j] = ndu[j][p];
  std::vector<std::vector<T>> a(2, std::vector<T>(p + 1, T(0)));
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = T(1);
    for (int k = 1; k <= std::min(nder, p); ++k) {
      T d(0);
      int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      int j1 = rk >= -1 ? 1 : -rk;
      int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      out.ders[k][r] = d;
      std::swap(s1, s2);
    }
  }
  T fac(p);
  for (int k = 1; k <= std::min(nder, p); ++k) {
    for (int j = 0; j <= p; ++j) out.ders[k][j] *= fac;
    fac *= T(p - k);
  }
  return out;
}

}  // namespace detail

/// All nonzero basis functions of `space` at x with derivatives up to nder.
template <class T, class X>
LocalBasis<T> basis_at(const UnivariateSpace& space, const X& x, int nder) {
  const int mu = space.span(x);
  T xt;
  if constexpr (std::is_same_v<X, double>)
    xt = T(x);
  else
    xt = to_scalar<T>(x);
  return detail::local_basis<T>(space.knots_as<T>(), space.degree(), mu, xt, nder);
}

/// Value or derivative of the single B-spline N_j.
template <class T = double, class X>
T eval_bspline(const UnivariateSpace& space, int j, const X& x, int deriv) {
  if (j < 0 || j >= space.dim()) throw std::out_of_range("B-spline index out of range");
  if (deriv < 0) throw std::out_of_range("negative derivative order");
  return basis_at<T>(space, x, deriv).value(j, deriv);
}

/// The auxiliary family R_j, j in 0..n0-1, built from S^{p-1,r} exactly as
/// printed (h times differences of consecutive B-splines).
template <class T = double, class X>
T r_function(const SplineSpaceConfig& cfg, int j, const X& x, int deriv) {
  cfg.validate();
  const int n0 = cfg.n0();
  if (j < 0 || j >= n0) throw std::out_of_range("R index out of range");
  UnivariateSpace low(cfg.p - 1, cfg.r, cfg.k);
  auto b = basis_at<T>(low, x, deriv);
  T h = to_scalar<T>(cfg.h());
  T v(0);
  if (j >= 1) v += b.value(j - 1, deriv);
  if (j <= n0 - 2) v -= b.value(j, deriv);
  return h * v;
}

/// M_0 = N_0 + N_1 and M_1 = (h/p) N_1 in S^{p,r}.
template <class T = double, class X>
T m_function(const SplineSpaceConfig& cfg, int j, const X& x, int deriv) {
  if (j != 0 && j != 1) throw std::out_of_range("M index must be 0 or 1");
  UnivariateSpace s(cfg.p, cfg.r, cfg.k);
  auto b = basis_at<T>(s, x, deriv);
  if (j == 0) return b.value(0, deriv) + b.value(1, deriv);
  return to_scalar<T>(cfg.h() / cfg.p) * b.value(1, deriv);
}

/// Dense coefficient tensor a_{j1,j2,j3} over S^{p,r} in each direction.
struct TensorCoeffs3 {
  int n = 0;
  std::vector<double> a;

  TensorCoeffs3() = default;
  explicit TensorCoeffs3(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_ * n_, 0.0) {}
  std::size_t index(int j1, int j2, int j3) const {
    return (static_cast<std::size_t>(j3) * n + j2) * n + j1;
  }
  double& operator()(int j1, int j2, int j3) { return a[index(j1, j2, j3)]; }
  double operator()(int j1, int j2, int j3) const { return a[index(j1, j2, j3)]; }
};

/// Value or mixed partial of a tensor-product spline at xi.
template <class X>
double eval_tensor3(const UnivariateSpace& space, const TensorCoeffs3& c, const std::array<X, 3>& xi,
                    const std::array<int, 3>& derivs = {0, 0, 0}) {
  if (c.n != space.dim()) throw std::invalid_argument("coefficient tensor does not match space");
  std::array<LocalBasis<double>, 3> b;
  for (int d = 0; d < 3; ++d) b[d] = basis_at<double>(space, xi[d], derivs[d]);
  const int p = space.degree();
  double s = 0.0;
  for (int i3 = 0; i3 <= p; ++i3) {
    double w3 = b[2].ders[derivs[2]][i3];
    if (w3 == 0.0) continue;
    for (int i2 = 0; i2 <= p; ++i2) {
      double w23 = w3 * b[1].ders[derivs[1]][i2];
      if (w23 == 0.0) continue;
      for (int i1 = 0; i1 <= p; ++i1)
        s += w23 * b[0].ders[derivs[0]][i1] * c(b[0].first + i1, b[1].first + i2, b[2].first + i3);
    }
  }
  return s;
}

/// Gauss-Legendre nodes and weights on [0,1].
inline void gauss_legendre(int q, std::vector<double>& x, std::vector<double>& w) {
  x.assign(q, 0.0);
  w.assign(q, 0.0);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < q; ++i) {
    double z = std::cos(pi * (i + 0.75) / (q + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < q; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = q * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[q - 1 - i] = 0.5 * (1.0 + z);
    w[q - 1 - i] = 1.0 / ((1.0 - z * z) * pp * pp);
  }
}

}  // namespace c1vol

#pragma once

// Dense polynomials in D variables with exact rational coefficients in the
// monomial basis, plus Bernstein conversion and a common-factor test.

#include "c1vol/field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace c1vol {

template <int D>
class Poly {
 public:
  using Index = std::array<int, D>;

  Poly() { deg_.fill(0); c_.assign(1, Rational(0)); }
  explicit Poly(const Index& deg) : deg_(deg) { c_.assign(size_of(deg), Rational(0)); }

  static Poly constant(const Rational& v) {
    Poly p;
    p.c_[0] = v;
    return p;
  }
  /// The coordinate function t_axis.
  static Poly variable(int axis) {
    Index d{};
    d[axis] = 1;
    Poly p(d);
    Index e{};
    e[axis] = 1;
    p.at(e) = 1;
    return p;
  }

  const Index& degree() const { return deg_; }
  const std::vector<Rational>& coeffs() const { return c_; }

  Rational& at(const Index& e) { return c_[flat(e)]; }
  const Rational& at(const Index& e) const { return c_[flat(e)]; }
  Rational coeff(const Index& e) const {
    for (int i = 0; i < D; ++i)
      if (e[i] < 0 || e[i] > deg_[i]) return Rational(0);
    return c_[flat(e)];
  }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Rational& q) { return sgn(q) == 0; });
  }

  template <class F>
  void for_each(F&& f) const {
    Index e{};
    for (std::size_t i = 0; i < c_.size(); ++i) {
      f(e, c_[i]);
      advance(e, deg_);
    }
  }

  Poly operator+(const Poly& o) const {
    Index d;
    for (int i = 0; i < D; ++i) d[i] = std::max(deg_[i], o.deg_[i]);
    Poly r(d);
    for_each([&](const Index& e, const Rational& v) { r.at(e) += v; });
    o.for_each([&](const Index& e, const Rational& v) { r.at(e) += v; });
    return r;
  }
  Poly operator-() const {
    Poly r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }
  Poly operator-(const Poly& o) const { return *this + (-o); }
  Poly operator*(const Poly& o) const {
    Index d;
    for (int i = 0; i < D; ++i) d[i] = deg_[i] + o.deg_[i];
    Poly r(d);
    for_each([&](const Index& e, const Rational& v) {
      if (sgn(v) == 0) return;
      o.for_each([&](const Index& f, const Rational& w) {
        if (sgn(w) == 0) return;
        Index g;
        for (int i = 0; i < D; ++i) g[i] = e[i] + f[i];
        r.at(g) += v * w;
      });
    });
    return r;
  }
  Poly operator*(const Rational& s) const {
    Poly r = *this;
    for (auto& v : r.c_) v *= s;
    return r;
  }
  friend Poly operator*(const Rational& s, const Poly& p) { return p * s; }
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  bool operator==(const Poly& o) const { return (*this - o).is_zero(); }

  /// Partial derivative in direction axis.
  Poly diff(int axis) const {
    Index d = deg_;
    d[axis] = std::max(0, deg_[axis] - 1);
    Poly r(d);
    for_each([&](const Index& e, const Rational& v) {
      if (e[axis] == 0) return;
      Index f = e;
      f[axis] -= 1;
      r.at(f) += v * e[axis];
    });
    return r;
  }

  /// Exact integral over the unit box.
  Rational integrate() const {
    Rational s = 0;
    for_each([&](const Index& e, const Rational& v) {
      Rational w = v;
      for (int i = 0; i < D; ++i) w /= (e[i] + 1);
      s += w;
    });
    return s;
  }

  /// Evaluation with coefficients mapped into T; X is Rational or double.
  template <class T, class X>
  T eval(const std::array<X, D>& x) const {
    std::array<std::vector<T>, D> pw;
    for (int i = 0; i < D; ++i) {
      T xi;
      if constexpr (std::is_same_v<X, double>)
        xi = T(x[i]);
      else
        xi = to_scalar<T>(x[i]);
      pw[i].assign(deg_[i] + 1, T(1));
      for (int j = 1; j <= deg_[i]; ++j) pw[i][j] = pw[i][j - 1] * xi;
    }
    T s(0);
    for_each([&](const Index& e, const Rational& v) {
      if (sgn(v) == 0) return;
      T t = to_scalar<T>(v);
      for (int i = 0; i < D; ++i) t *= pw[i][e[i]];
      s += t;
    });
    return s;
  }
  Rational eval_exact(const std::array<Rational, D>& x) const { return eval<Rational>(x); }

  /// Drops trailing zero layers so that the degree box is tight.
  Poly trimmed() const {
    bool zero = false;
    Index d = effective_degree(0.0, &zero);
    Poly r(d);
    for_each([&](const Index& e, const Rational& v) {
      for (int i = 0; i < D; ++i)
        if (e[i] > d[i]) return;
      r.at(e) = v;
    });
    return r;
  }

  /// Smallest degree box holding every coefficient above tol*max|c|.
  /// tol = 0 is the exact test.
  Index effective_degree(double tol = 0.0, bool* is_zero_flag = nullptr) const {
    double mx = 0.0;
    if (tol > 0.0)
      for (auto& v : c_) mx = std::max(mx, std::abs(v.get_d()));
    Index d{};
    bool any = false;
    for_each([&](const Index& e, const Rational& v) {
      bool nz = tol > 0.0 ? std::abs(v.get_d()) > tol * mx : sgn(v) != 0;
      if (!nz) return;
      any = true;
      for (int i = 0; i < D; ++i) d[i] = std::max(d[i], e[i]);
    });
    if (is_zero_flag) *is_zero_flag = !any;
    return d;
  }

  /// Bernstein coefficients on [0,1]^D for the degree box `box`.
  Poly to_bernstein(const Index& box) const {
    Index eff = effective_degree();
    for (int i = 0; i < D; ++i)
      if (box[i] < eff[i] && !is_zero()) throw std::invalid_argument("Bernstein box degree too small");
    // t^e = sum_{j>=e} C(j,e)/C(n,e) B_j^n, applied per direction.
    Poly out(box);
    for_each([&](const Index& e, const Rational& v) {
      if (sgn(v) == 0) return;
      Index j{};
      std::vector<Index> targets;
      std::function<void(int, Index&, Rational)> rec = [&](int axis, Index& cur, Rational w) {
        if (axis == D) {
          out.at(cur) += w;
          return;
        }
        for (int jj = e[axis]; jj <= box[axis]; ++jj) {
          cur[axis] = jj;
          rec(axis + 1, cur, w * Rational(binom(jj, e[axis]), binom(box[axis], e[axis])));
        }
      };
      rec(0, j, v);
    });
    return out;
  }

  /// Monomial coefficients from Bernstein coefficients on the box degree().
  static Poly from_bernstein(const Poly& b) {
    Poly out(b.degree());
    const Index n = b.degree();
    b.for_each([&](const Index& j, const Rational& v) {
      if (sgn(v) == 0) return;
      // B_j^n(t) = sum_{e>=j} (-1)^{e-j} C(n,e) C(e,j) t^e
      Index cur{};
      std::function<void(int, Rational)> rec = [&](int axis, Rational w) {
        if (axis == D) {
          out.at(cur) += w;
          return;
        }
        for (int e = j[axis]; e <= n[axis]; ++e) {
          cur[axis] = e;
          Rational f(binom(n[axis], e) * binom(e, j[axis]));
          if ((e - j[axis]) % 2) f = -f;
          rec(axis + 1, w * f);
        }
      };
      rec(0, v);
    });
    return out;
  }

  static long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  }

 private:
  static std::size_t size_of(const Index& d) {
    std::size_t s = 1;
    for (int i = 0; i < D; ++i) s *= static_cast<std::size_t>(d[i] + 1);
    return s;
  }
  std::size_t flat(const Index& e) const {
    std::size_t f = 0;
    for (int i = D - 1; i >= 0; --i) f = f * (deg_[i] + 1) + e[i];
    return f;
  }
  static void advance(Index& e, const Index& d) {
    for (int i = 0; i < D; ++i) {
      if (++e[i] <= d[i]) return;
      e[i] = 0;
    }
  }

  Index deg_;
  std::vector<Rational> c_;
};

using BivarPoly = Poly<2>;
using TrivarPoly = Poly<3>;

template <int D>
Poly<D> poly_mul(const Poly<D>& a, const Poly<D>& b) { return a * b; }
template <int D>
Poly<D> poly_add(const Poly<D>& a, const Poly<D>& b) { return a + b; }
template <int D>
Poly<D> poly_diff(const Poly<D>& a, int axis) { return a.diff(axis); }

struct EffectiveBidegree {
  int d1 = 0, d2 = 0;
  bool zero = false;
};

inline EffectiveBidegree effective_bidegree(const BivarPoly& p, double tol = 0.0) {
  bool z = false;
  auto d = p.effective_degree(tol, &z);
  return {d[0], d[1], z};
}

/// Restriction of a trivariate polynomial to the plane x_axis = value; the
/// remaining two variables keep their order and become (t1, t2).
inline BivarPoly restrict_to_plane(const TrivarPoly& f, int axis, const Rational& value) {
  std::array<int, 2> other{};
  for (int i = 0, j = 0; i < 3; ++i)
    if (i != axis) other[j++] = i;
  const auto& d = f.degree();
  BivarPoly r({d[other[0]], d[other[1]]});
  f.for_each([&](const TrivarPoly::Index& e, const Rational& v) {
    if (sgn(v) == 0) return;
    Rational w = v;
    for (int i = 0; i < e[axis]; ++i) w *= value;
    r.at({e[other[0]], e[other[1]]}) += w;
  });
  return r;
}

/// Restriction to the plane x_axis = value with the two free variables
/// assigned to (t1, t2) in the order given by `order` (a permutation of the
/// two remaining axes).
inline BivarPoly restrict_to_plane(const TrivarPoly& f, int axis, const Rational& value,
                                   const std::array<int, 2>& order) {
  const auto& d = f.degree();
  BivarPoly r({d[order[0]], d[order[1]]});
  f.for_each([&](const TrivarPoly::Index& e, const Rational& v) {
    if (sgn(v) == 0) return;
    Rational w = v;
    for (int i = 0; i < e[axis]; ++i) w *= value;
    r.at({e[order[0]], e[order[1]]}) += w;
  });
  return r;
}

/// Polynomial evaluator with coefficients cached in the scalar type T.
template <class T>
class BivarEval {
 public:
  BivarEval() = default;
  explicit BivarEval(const BivarPoly& p) : d1_(p.degree()[0]), d2_(p.degree()[1]) {
    c_.assign((d1_ + 1) * (d2_ + 1), T(0));
    p.for_each([&](const BivarPoly::Index& e, const Rational& v) {
      c_[e[1] * (d1_ + 1) + e[0]] = to_scalar<T>(v);
    });
  }
  /// Partial derivative of order (a, b) at (x, y).
  T operator()(const T& x, const T& y, int a = 0, int b = 0) const {
    T s(0);
    T py(1);
    for (int j = b; j <= d2_; ++j) {
      T row(0), px(1);
      for (int i = a; i <= d1_; ++i) {
        row += c_[j * (d1_ + 1) + i] * px * T(falling(i, a));
        px *= x;
      }
      s += row * py * T(falling(j, b));
      py *= y;
    }
    return s;
  }

 private:
  static long falling(int n, int k) {
    long r = 1;
    for (int i = 0; i < k; ++i) r *= (n - i);
    return r;
  }
  int d1_ = 0, d2_ = 0;
  std::vector<T> c_;
};

namespace detail {

using UPoly = std::vector<Rational>;  // univariate, ascending powers

inline void utrim(UPoly& p) {
  while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

inline UPoly umod(UPoly a, const UPoly& b) {
  utrim(a);
  while (a.size() >= b.size() && !a.empty()) {
    Rational f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
    a.pop_back();
    utrim(a);
  }
  return a;
}

inline UPoly ugcd(UPoly a, UPoly b) {
  utrim(a);
  utrim(b);
  while (!b.empty()) {
    UPoly r = umod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

/// Coefficients of p seen as a polynomial in t_axis over Q[t_other].
inline std::vector<UPoly> as_univariate_over(const BivarPoly& p, int axis) {
  const auto& d = p.degree();
  const int other = 1 - axis;
  std::vector<UPoly> out(d[axis] + 1, UPoly(d[other] + 1, Rational(0)));
  p.for_each([&](const BivarPoly::Index& e, const Rational& v) { out[e[axis]][e[other]] += v; });
  for (auto& u : out) utrim(u);
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

inline Rational ueval(const UPoly& p, const Rational& x) {
  Rational s = 0;
  for (std::size_t i = p.size(); i-- > 0;) s = s * x + p[i];
  return s;
}

inline Rational det_exact(std::vector<std::vector<Rational>> m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && sgn(m[piv][c]) == 0) ++piv;
    if (piv == n) return Rational(0);
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (sgn(m[r][c]) == 0) continue;
      Rational f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

/// Whether Res_{t_axis}(P, Q) vanishes identically as a polynomial in the
/// other variable (both must have positive degree in t_axis).
inline bool resultant_vanishes(const BivarPoly& P, const BivarPoly& Q, int axis) {
  auto a = as_univariate_over(P, axis);
  auto b = as_univariate_over(Q, axis);
  const int m = static_cast<int>(a.size()) - 1, n = static_cast<int>(b.size()) - 1;
  if (m <= 0 || n <= 0) return false;
  const int other = 1 - axis;
  const int bound = m * Q.degree()[other] + n * P.degree()[other];
  for (int s = 0; s <= bound; ++s) {
    Rational x(2 * s + 1, 7);
    std::vector<std::vector<Rational>> S(m + n, std::vector<Rational>(m + n, Rational(0)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= m; ++j) S[i][i + j] = ueval(a[m - j], x);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j <= n; ++j) S[n + i][i + j] = ueval(b[n - j], x);
    if (sgn(det_exact(S)) != 0) return false;
  }
  return true;
}

inline UPoly content_over(const BivarPoly& p, int axis) {
  auto coeffs = as_univariate_over(p, axis);
  UPoly g;
  for (auto& c : coeffs) g = ugcd(g, c);
  return g;
}

}  // namespace detail

/// True when P and Q appear to share a non-constant factor. exact = true uses
/// resultants and contents over Q; otherwise a sampling heuristic on [0,1]^2.
inline bool common_roots_check(const BivarPoly& P, const BivarPoly& Q, bool exact = true,
                               int density = 64, double tol = 1e-10) {
  if (P.is_zero() || Q.is_zero()) throw std::invalid_argument("common_roots_check needs nonzero input");
  if (exact) {
    for (int axis = 0; axis < 2; ++axis)
      if (detail::resultant_vanishes(P, Q, axis)) return true;
    // A common factor free of t_axis divides both contents over Q[t_other].
    for (int axis = 0; axis < 2; ++axis) {
      auto g = detail::ugcd(detail::content_over(P, axis), detail::content_over(Q, axis));
      if (g.size() > 1) return true;
    }
    return false;
  }
  double sp = 0, sq = 0;
  for (auto& c : P.coeffs()) sp = std::max(sp, std::abs(c.get_d()));
  for (auto& c : Q.coeffs()) sq = std::max(sq, std::abs(c.get_d()));
  BivarEval<double> ep(P), eq(Q);
  for (int i = 0; i <= density; ++i)
    for (int j = 0; j <= density; ++j) {
      double x = double(i) / density, y = double(j) / density;
      if (std::abs(ep(x, y)) / sp + std::abs(eq(x, y)) / sq < tol) return true;
    }
  return false;
}

/// P with x_axis replaced by a + b*x_axis.
template <int D>
Poly<D> affine_axis(const Poly<D>& P, int axis, const Rational& a, const Rational& b) {
  Poly<D> r(P.degree());
  P.for_each([&](const typename Poly<D>::Index& e, const Rational& v) {
    if (sgn(v) == 0) return;
    const int m = e[axis];
    Rational bp = 1;
    for (int j = 0; j <= m; ++j) {
      Rational ap = 1;
      for (int i = 0; i < m - j; ++i) ap *= a;
      auto f = e;
      f[axis] = j;
      r.at(f) += v * Rational(Poly<D>::binom(m, j)) * ap * bp;
      bp *= b;
    }
  });
  return r;
}

/// +1 (or -1) when the Bernstein coefficients on [0,1]^D, after at most
/// `depth` rounds of uniform bisection, certify P > 0 (or P < 0); 0 otherwise.
template <int D>
int bernstein_sign_certificate(const Poly<D>& P, int depth) {
  auto sign_of = [](const Poly<D>& q) {
    auto b = q.to_bernstein(q.degree());
    bool pos = true, neg = true;
    for (auto& c : b.coeffs()) {
      if (sgn(c) <= 0) pos = false;
      if (sgn(c) >= 0) neg = false;
    }
    return pos ? 1 : (neg ? -1 : 0);
  };
  std::function<int(const Poly<D>&, int)> rec = [&](const Poly<D>& q, int left) -> int {
    int s = sign_of(q);
    if (s != 0 || left == 0) return s;
    std::vector<Poly<D>> pieces{q};
    for (int axis = 0; axis < D; ++axis) {
      std::vector<Poly<D>> next;
      for (auto& piece : pieces) {
        next.push_back(affine_axis(piece, axis, Rational(0), Rational(1, 2)));
        next.push_back(affine_axis(piece, axis, Rational(1, 2), Rational(1, 2)));
      }
      pieces = std::move(next);
    }
    int common = 2;
    for (auto& piece : pieces) {
      int t = rec(piece, left - 1);
      if (t == 0) return 0;
      if (common == 2) common = t;
      if (t != common) return 0;
    }
    return common;
  };
  return rec(P, depth);
}

}  // namespace c1vol

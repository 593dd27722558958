#pragma once

// Reference computations written independently of the library, used as
// test oracles.

#include "c1vol/field.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#ifndef C1VOL_DATA_DIR
#define C1VOL_DATA_DIR "data"
#endif

namespace oracle {

using c1vol::Rational;

inline std::string data(const std::string& name) { return std::string(C1VOL_DATA_DIR) + "/" + name; }

/// Open uniform knot vector: p+1 fold ends, interior knots e/(k+1) repeated p-r times.
inline std::vector<Rational> open_knots(int p, int r, int k) {
  std::vector<Rational> t(p + 1, Rational(0));
  for (int e = 1; e <= k; ++e)
    for (int m = 0; m < p - r; ++m) {
      Rational q(e, k + 1);
      q.canonicalize();
      t.push_back(q);
    }
  t.insert(t.end(), p + 1, Rational(1));
  return t;
}

/// Cox-de Boor recursion, derivatives by the two-term rule. Right-continuous,
/// except that the last nonempty span is closed at the right end.
inline Rational bspline(const std::vector<Rational>& t, int p, int j, const Rational& x, int d = 0) {
  if (d > p) return Rational(0);
  if (d > 0) {
    Rational out(0);
    Rational a = t[j + p] - t[j], b = t[j + p + 1] - t[j + 1];
    if (sgn(a) != 0) out += Rational(p) / a * bspline(t, p - 1, j, x, d - 1);
    if (sgn(b) != 0) out -= Rational(p) / b * bspline(t, p - 1, j + 1, x, d - 1);
    return out;
  }
  if (p == 0) {
    if (t[j] <= x && x < t[j + 1]) return Rational(1);
    if (x == t.back() && t[j] < t[j + 1] && t[j + 1] == t.back()) return Rational(1);
    return Rational(0);
  }
  Rational out(0);
  Rational a = t[j + p] - t[j], b = t[j + p + 1] - t[j + 1];
  if (sgn(a) != 0) out += (x - t[j]) / a * bspline(t, p - 1, j, x);
  if (sgn(b) != 0) out += (t[j + p + 1] - x) / b * bspline(t, p - 1, j + 1, x);
  return out;
}

inline double bspline_d(const std::vector<Rational>& t, int p, int j, double x, int d = 0) {
  Rational q(x);
  return bspline(t, p, j, q, d).get_d();
}

/// Gauss-Legendre rule on [0,1] from the eigenvalues of the Jacobi matrix.
inline void golub_welsch(int q, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(q, q);
  for (int i = 1; i < q; ++i) J(i, i - 1) = J(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x.resize(q);
  w.resize(q);
  for (int i = 0; i < q; ++i) {
    x[i] = 0.5 * (es.eigenvalues()[i] + 1.0);
    double v = es.eigenvectors()(0, i);
    w[i] = v * v;
  }
}

/// Rank by exact rational Gaussian elimination.
inline int rational_rank(std::vector<std::vector<Rational>> m) {
  int rank = 0;
  const int rows = static_cast<int>(m.size());
  const int cols = rows ? static_cast<int>(m[0].size()) : 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (sgn(m[r][c]) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[piv], m[rank]);
    for (int r = rank + 1; r < rows; ++r) {
      if (sgn(m[r][c]) == 0) continue;
      Rational f = m[r][c] / m[rank][c];
      for (int cc = c; cc < cols; ++cc) m[r][cc] -= f * m[rank][cc];
    }
    ++rank;
  }
  return rank;
}

/// Trilinear map from its eight corners (corner b at bits (b&1, b>>1&1, b>>2&1)).
struct Trilinear {
  std::array<std::array<double, 3>, 8> X;

  std::array<double, 3> operator()(const std::array<double, 3>& u) const {
    std::array<double, 3> out{0, 0, 0};
    for (int b = 0; b < 8; ++b) {
      double w = 1;
      for (int k = 0; k < 3; ++k) w *= ((b >> k) & 1) ? u[k] : 1 - u[k];
      for (int i = 0; i < 3; ++i) out[i] += w * X[b][i];
    }
    return out;
  }
  /// Columns are the partials along u1, u2, u3.
  std::array<std::array<double, 3>, 3> jacobian(const std::array<double, 3>& u) const {
    std::array<std::array<double, 3>, 3> J{};
    for (int b = 0; b < 8; ++b)
      for (int k = 0; k < 3; ++k) {
        double w = ((b >> k) & 1) ? 1.0 : -1.0;
        for (int m = 0; m < 3; ++m)
          if (m != k) w *= ((b >> m) & 1) ? u[m] : 1 - u[m];
        for (int i = 0; i < 3; ++i) J[i][k] += w * X[b][i];
      }
    return J;
  }
};

inline double det3(const std::array<std::array<double, 3>, 3>& J) {
  return J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) - J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
         J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
}

/// Physical gradient g with J^T g = dpar, by Cramer's rule.
inline std::array<double, 3> gradient(const std::array<std::array<double, 3>, 3>& J, const std::array<double, 3>& dpar) {
  std::array<std::array<double, 3>, 3> Jt{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) Jt[i][k] = J[k][i];
  const double D = det3(Jt);
  std::array<double, 3> g{};
  for (int c = 0; c < 3; ++c) {
    auto M = Jt;
    for (int i = 0; i < 3; ++i) M[i][c] = dpar[i];
    g[c] = det3(M) / D;
  }
  return g;
}

/// Value and parametric gradient of a tensor spline from sparse coefficients
/// (flat index (j3*n + j2)*n + j1), by the recursion above.
struct TensorEval {
  std::vector<Rational> knots;
  int p, n;
  double value(const std::map<std::uint32_t, double>& c, const std::array<double, 3>& u,
               const std::array<int, 3>& d = {0, 0, 0}) const {
    double s = 0;
    for (auto& [idx, v] : c) {
      int j[3] = {static_cast<int>(idx % n), static_cast<int>((idx / n) % n), static_cast<int>(idx / n / n)};
      double w = v;
      for (int k = 0; k < 3 && w != 0.0; ++k) w *= bspline_d(knots, p, j[k], u[k], d[k]);
      s += w;
    }
    return s;
  }
};

/// Published closed forms used as references.
inline long two_patch_dimension(long n, long n0, long n1) { return 2 * n * n * (n - 2) + n0 * n0 + n1 * n1; }

inline int generic_edge_formula(int nu, int p, int r, int k) {
  return 3 * p + 1 + nu * (p - 1) + k * std::max(0, (nu + 3) * (p - r - 3) + 3);
}

inline int nongeneric_edge_formula(int nu, int p, int r, int k) {
  return 3 * p + 2 + nu * (p - 1) + k * std::max(0, (nu + 3) * (p - r - 3) + 4);
}

}  // namespace oracle

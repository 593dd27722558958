#pragma once

// Rank and kernel computations for the sparse compatibility systems: exact
// rank over a prime field, and real kernels by complete-pivot elimination or
// by singular values.

#include "c1vol/field.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace c1vol {

template <class T>
using SparseRow = std::vector<std::pair<int, T>>;

/// Rows of a sparse matrix with a fixed number of columns.
template <class T>
struct SparseMatrix {
  int cols = 0;
  std::vector<SparseRow<T>> rows;

  int num_rows() const { return static_cast<int>(rows.size()); }

  Eigen::MatrixXd dense() const {
    static_assert(std::is_same_v<T, double>);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(num_rows(), cols);
    for (int i = 0; i < num_rows(); ++i)
      for (auto& [c, v] : rows[i]) M(i, c) += v;
    return M;
  }
};

template <class T>
void normalize_row(SparseRow<T>& r) {
  std::sort(r.begin(), r.end(), [](auto& a, auto& b) { return a.first < b.first; });
  SparseRow<T> out;
  for (auto& e : r) {
    if (!out.empty() && out.back().first == e.first)
      out.back().second += e.second;
    else
      out.push_back(e);
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](auto& e) { return scalar_is_zero(e.second); }), out.end());
  r = std::move(out);
}

/// Exact rank over a prime field by incremental sparse elimination.
template <class F>
int modular_rank(const SparseMatrix<F>& A) {
  std::unordered_map<int, SparseRow<F>> pivots;  // leading column -> monic row
  int rank = 0;
  SparseRow<F> tmp;
  for (const auto& r0 : A.rows) {
    SparseRow<F> r = r0;
    normalize_row(r);
    while (!r.empty()) {
      auto it = pivots.find(r.front().first);
      if (it == pivots.end()) break;
      const F f = r.front().second;
      const auto& pr = it->second;
      tmp.clear();
      std::size_t i = 0, j = 0;
      while (i < r.size() || j < pr.size()) {
        if (j == pr.size() || (i < r.size() && r[i].first < pr[j].first)) {
          tmp.push_back(r[i++]);
        } else if (i == r.size() || pr[j].first < r[i].first) {
          tmp.push_back({pr[j].first, F(0) - f * pr[j].second});
          ++j;
        } else {
          F v = r[i].second - f * pr[j].second;
          if (!v.is_zero()) tmp.push_back({r[i].first, v});
          ++i;
          ++j;
        }
      }
      r.swap(tmp);
    }
    if (r.empty()) continue;
    F inv = r.front().second.inverse();
    for (auto& e : r) e.second *= inv;
    pivots.emplace(r.front().first, std::move(r));
    ++rank;
  }
  return rank;
}

/// Kernel of a dense real matrix whose rank is known, from an LU factorization
/// with complete pivoting cut at that rank. The free columns index the kernel
/// vectors, each of which has a 1 at its own free column and zeros at the
/// other free columns.
struct EchelonKernel {
  std::vector<int> pivot_cols, free_cols;
  Eigen::MatrixXd basis;  // cols x (cols - rank)
  double smallest_pivot = 0.0;
  double first_rejected = 0.0;  // next pivot after `rank` steps
};

inline EchelonKernel echelon_kernel(const Eigen::MatrixXd& A, int rank) {
  const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
  if (rank < 0 || rank > std::min(m, n)) throw std::invalid_argument("rank out of range");
  EchelonKernel out;
  out.basis = Eigen::MatrixXd::Zero(n, n - rank);
  if (m == 0 || rank == 0) {
    for (int j = 0; j < n; ++j) {
      out.free_cols.push_back(j);
      out.basis(j, j) = 1.0;
    }
    return out;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::MatrixXd& LU = lu.matrixLU();
  const auto& Q = lu.permutationQ().indices();
  out.smallest_pivot = std::abs(LU(rank - 1, rank - 1));
  if (rank < std::min(m, n)) out.first_rejected = std::abs(LU(rank, rank));
  for (int s = 0; s < rank; ++s) out.pivot_cols.push_back(Q[s]);
  for (int s = rank; s < n; ++s) out.free_cols.push_back(Q[s]);
  Eigen::MatrixXd X = -LU.topRightCorner(rank, n - rank);
  LU.topLeftCorner(rank, rank).triangularView<Eigen::Upper>().solveInPlace(X);
  for (int f = 0; f < n - rank; ++f) {
    out.basis(Q[rank + f], f) = 1.0;
    for (int s = 0; s < rank; ++s) out.basis(Q[s], f) = X(s, f);
  }
  return out;
}

struct SvdRank {
  int rank = 0;
  double sigma_max = 0.0;
  double gap_ratio = 0.0;  // sigma just above the cut over sigma just below it
  bool ambiguous = false;
  int rank_alternative = 0;
  Eigen::MatrixXd kernel;  // cols x (cols - rank), orthonormal
};

/// Numerical rank with singular values below tol * sigma_max counted as zero.
inline SvdRank svd_rank(const Eigen::MatrixXd& A, double tol = 1e-9) {
  SvdRank out;
  const int n = static_cast<int>(A.cols());
  if (A.rows() == 0 || n == 0) {
    out.kernel = Eigen::MatrixXd::Identity(n, n);
    return out;
  }
  Eigen::MatrixXd M = A;
  if (M.rows() < n) {
    M.conservativeResize(n, n);
    M.bottomRows(n - A.rows()).setZero();
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  out.sigma_max = s.size() ? s[0] : 0.0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > tol * out.sigma_max) ++out.rank;
  double above = out.rank > 0 ? s[out.rank - 1] : 0.0;
  double below = out.rank < s.size() ? s[out.rank] : 0.0;
  out.gap_ratio = below > 0 ? above / below : std::numeric_limits<double>::infinity();
  out.rank_alternative = out.rank;
  if (out.gap_ratio < 10.0) {
    out.ambiguous = true;
    // the neighbouring cut that would be picked by a slightly different tolerance
    out.rank_alternative = below > tol * out.sigma_max / 10.0 ? out.rank + 1 : out.rank - 1;
  }
  out.kernel = svd.matrixV().rightCols(n - out.rank);
  return out;
}

}  // namespace c1vol

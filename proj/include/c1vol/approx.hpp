#pragma once

// L2 projection onto the C1 space and relative errors on the volume, on the
// inner faces and on the inner edges.

#include "c1vol/c1space.hpp"

#include <Eigen/Sparse>

#include <functional>

namespace c1vol {

using ScalarField = std::function<double(const std::array<double, 3>&)>;

class IllConditionedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Target functions reachable from the command line.
inline ScalarField builtin_target(const std::string& spec) {
  if (spec == "builtin:cos-sin-cos")
    return [](const std::array<double, 3>& x) {
      return 5.0 * std::cos(x[0] / 2) * std::sin(x[1] / 2) * std::cos(x[2] / 2);
    };
  if (spec.rfind("constant:", 0) == 0) {
    double c = std::stod(spec.substr(9));
    return [c](const std::array<double, 3>&) { return c; };
  }
  if (spec == "linear:x1") return [](const std::array<double, 3>& x) { return x[0]; };
  if (spec == "linear:x2") return [](const std::array<double, 3>& x) { return x[1]; };
  if (spec == "linear:x3") return [](const std::array<double, 3>& x) { return x[2]; };
  throw std::invalid_argument("unknown target '" + spec + "'");
}

/// Tensor Gauss rule on every element of every patch, with the B-spline
/// tables needed for sum factorization.
class VolumeQuadrature {
 public:
  VolumeQuadrature(const MultiPatchVolume& vol, const UnivariateSpace& S, int q)
      : S_(&S), P_(S.degree() + 1), Q_(q), K_(S.k() + 1), np_(vol.num_patches()) {
    std::vector<double> gx, gw;
    gauss_legendre(q, gx, gw);
    gw_ = gw;
    B_.assign(static_cast<std::size_t>(K_) * Q_ * P_, 0.0);
    first_.assign(K_, 0);
    for (int e = 0; e < K_; ++e)
      for (int i = 0; i < Q_; ++i) {
        double x = (e + gx[i]) / K_;
        auto lb = basis_at<double>(S, x, 0);
        first_[e] = lb.first;
        for (int a = 0; a < P_; ++a) B_[(static_cast<std::size_t>(e) * Q_ + i) * P_ + a] = lb.ders[0][a];
      }
    const int nq = Q_ * Q_ * Q_;
    const double hv = 1.0 / (static_cast<double>(K_) * K_ * K_);
    w_.assign(static_cast<std::size_t>(np_) * K_ * K_ * K_ * nq, 0.0);
    x_.assign(w_.size(), {0, 0, 0});
    for (int p = 0; p < np_; ++p)
      for (int e3 = 0; e3 < K_; ++e3)
        for (int e2 = 0; e2 < K_; ++e2)
          for (int e1 = 0; e1 < K_; ++e1) {
            std::size_t base = point_base(p, e1, e2, e3);
            for (int i3 = 0; i3 < Q_; ++i3)
              for (int i2 = 0; i2 < Q_; ++i2)
                for (int i1 = 0; i1 < Q_; ++i1) {
                  std::array<double, 3> xi{(e1 + gx[i1]) / K_, (e2 + gx[i2]) / K_, (e3 + gx[i3]) / K_};
                  Eigen::Matrix3d J;
                  for (int k = 0; k < 3; ++k) {
                    std::array<int, 3> d{0, 0, 0};
                    d[k] = 1;
                    auto c = vol.eval<double>(p, xi, d);
                    for (int r = 0; r < 3; ++r) J(r, k) = c[r];
                  }
                  std::size_t at = base + (static_cast<std::size_t>(i3) * Q_ + i2) * Q_ + i1;
                  w_[at] = gw[i1] * gw[i2] * gw[i3] * std::abs(J.determinant()) * hv;
                  x_[at] = vol.eval<double>(p, xi);
                }
          }
  }

  int elements_per_dir() const { return K_; }
  int points_per_element() const { return Q_ * Q_ * Q_; }
  int num_patches() const { return np_; }
  const UnivariateSpace& space() const { return *S_; }
  std::size_t point_base(int p, int e1, int e2, int e3) const {
    return ((((static_cast<std::size_t>(p) * K_ + e3) * K_ + e2) * K_ + e1)) * Q_ * Q_ * Q_;
  }
  double weight(std::size_t at) const { return w_[at]; }
  const std::array<double, 3>& point(std::size_t at) const { return x_[at]; }
  int first(int e) const { return first_[e]; }

  /// Values at the element's points of the spline with tensor coefficients u.
  void interpolate(const double* u, int n, int e1, int e2, int e3, double* out) const {
    const int P = P_, Q = Q_;
    const int f1 = first_[e1], f2 = first_[e2], f3 = first_[e3];
    std::vector<double>& t1 = buf1_;
    std::vector<double>& t2 = buf2_;
    t1.assign(static_cast<std::size_t>(P) * P * Q, 0.0);
    t2.assign(static_cast<std::size_t>(P) * Q * Q, 0.0);
    const double* B1 = &B_[static_cast<std::size_t>(e1) * Q * P];
    const double* B2 = &B_[static_cast<std::size_t>(e2) * Q * P];
    const double* B3 = &B_[static_cast<std::size_t>(e3) * Q * P];
    for (int a3 = 0; a3 < P; ++a3)
      for (int a2 = 0; a2 < P; ++a2) {
        const double* row = u + (static_cast<std::size_t>(f3 + a3) * n + (f2 + a2)) * n + f1;
        for (int i1 = 0; i1 < Q; ++i1) {
          double s = 0.0;
          for (int a1 = 0; a1 < P; ++a1) s += B1[i1 * P + a1] * row[a1];
          t1[(a3 * P + a2) * Q + i1] = s;
        }
      }
    for (int a3 = 0; a3 < P; ++a3)
      for (int i2 = 0; i2 < Q; ++i2)
        for (int a2 = 0; a2 < P; ++a2) {
          double b = B2[i2 * P + a2];
          for (int i1 = 0; i1 < Q; ++i1) t2[(a3 * Q + i2) * Q + i1] += b * t1[(a3 * P + a2) * Q + i1];
        }
    std::fill(out, out + Q * Q * Q, 0.0);
    for (int i3 = 0; i3 < Q; ++i3)
      for (int a3 = 0; a3 < P; ++a3) {
        double b = B3[i3 * P + a3];
        for (int j = 0; j < Q * Q; ++j) out[i3 * Q * Q + j] += b * t2[a3 * Q * Q + j];
      }
  }

  /// Adds B^T v to the tensor coefficients u (transpose of interpolate).
  void project_add(const double* v, int n, int e1, int e2, int e3, double* u) const {
    const int P = P_, Q = Q_;
    const int f1 = first_[e1], f2 = first_[e2], f3 = first_[e3];
    std::vector<double>& t2 = buf2_;
    std::vector<double>& t1 = buf1_;
    t2.assign(static_cast<std::size_t>(P) * Q * Q, 0.0);
    t1.assign(static_cast<std::size_t>(P) * P * Q, 0.0);
    const double* B1 = &B_[static_cast<std::size_t>(e1) * Q * P];
    const double* B2 = &B_[static_cast<std::size_t>(e2) * Q * P];
    const double* B3 = &B_[static_cast<std::size_t>(e3) * Q * P];
    for (int i3 = 0; i3 < Q; ++i3)
      for (int a3 = 0; a3 < P; ++a3) {
        double b = B3[i3 * P + a3];
        for (int j = 0; j < Q * Q; ++j) t2[a3 * Q * Q + j] += b * v[i3 * Q * Q + j];
      }
    for (int a3 = 0; a3 < P; ++a3)
      for (int i2 = 0; i2 < Q; ++i2)
        for (int a2 = 0; a2 < P; ++a2) {
          double b = B2[i2 * P + a2];
          for (int i1 = 0; i1 < Q; ++i1) t1[(a3 * P + a2) * Q + i1] += b * t2[(a3 * Q + i2) * Q + i1];
        }
    for (int a3 = 0; a3 < P; ++a3)
      for (int a2 = 0; a2 < P; ++a2) {
        double* row = u + (static_cast<std::size_t>(f3 + a3) * n + (f2 + a2)) * n + f1;
        for (int a1 = 0; a1 < P; ++a1) {
          double s = 0.0;
          for (int i1 = 0; i1 < Q; ++i1) s += B1[i1 * P + a1] * t1[(a3 * P + a2) * Q + i1];
          row[a1] += s;
        }
      }
  }

  /// Elements on which the coefficient index range [lo, hi] of one axis is active.
  std::pair<int, int> element_range(int lo, int hi) const {
    int elo = K_, ehi = -1;
    for (int e = 0; e < K_; ++e)
      if (first_[e] <= hi && first_[e] + P_ - 1 >= lo) {
        elo = std::min(elo, e);
        ehi = std::max(ehi, e);
      }
    return {elo, ehi};
  }

 private:
  const UnivariateSpace* S_;
  int P_, Q_, K_, np_;
  std::vector<double> gw_, B_;
  std::vector<int> first_;
  std::vector<double> w_;
  std::vector<std::array<double, 3>> x_;
  mutable std::vector<double> buf1_, buf2_;
};

/// Box of elements where a sparse coefficient list is active, per axis.
struct ElementBox {
  std::array<int, 3> lo{0, 0, 0}, hi{-1, -1, -1};
};

inline ElementBox support_box(const VolumeQuadrature& Q, const SparseCoeffs& c, int n) {
  std::array<int, 3> mn{n, n, n}, mx{-1, -1, -1};
  for (auto& [idx, v] : c) {
    (void)v;
    int j[3] = {static_cast<int>(idx % n), static_cast<int>((idx / n) % n), static_cast<int>(idx / n / n)};
    for (int k = 0; k < 3; ++k) {
      mn[k] = std::min(mn[k], j[k]);
      mx[k] = std::max(mx[k], j[k]);
    }
  }
  ElementBox b;
  for (int k = 0; k < 3; ++k) std::tie(b.lo[k], b.hi[k]) = Q.element_range(mn[k], mx[k]);
  return b;
}

/// Weighted mass operator of one patch applied to tensor coefficients u,
/// restricted to a box of elements; the result is added to out.
inline void mass_apply(const VolumeQuadrature& Q, int patch, const double* u, double* out, const ElementBox& box,
                       std::vector<double>& scratch) {
  const int n = Q.space().dim();
  const int nq = Q.points_per_element();
  scratch.resize(nq);
  for (int e3 = box.lo[2]; e3 <= box.hi[2]; ++e3)
    for (int e2 = box.lo[1]; e2 <= box.hi[1]; ++e2)
      for (int e1 = box.lo[0]; e1 <= box.hi[0]; ++e1) {
        Q.interpolate(u, n, e1, e2, e3, scratch.data());
        std::size_t base = Q.point_base(patch, e1, e2, e3);
        for (int i = 0; i < nq; ++i) scratch[i] *= Q.weight(base + i);
        Q.project_add(scratch.data(), n, e1, e2, e3, out);
      }
}

struct FitOptions {
  int q = 0;  // Gauss points per direction and element; 0 means p + 1
  long dense_limit = 4000;
  double cg_tol = 1e-13;
  int cg_max_iter = 5000;
};

struct FitResult {
  Eigen::VectorXd c;
  double e_volume = 0.0, e_faces = 0.0, e_edge = 0.0;
  std::string solver;
  int iterations = 0;
  double relative_residual = 0.0;
  double min_scaled_pivot = 0.0;  // dense path: smallest LDLT pivot of the Jacobi-scaled Gram matrix
};

/// Gram system of a basis; products are matrix-free on each patch.
class GramOperator {
 public:
  GramOperator(const MultiPatchVolume& vol, const C1Basis& B, int q)
      : vol_(&vol), B_(&B), Q_(vol, B.ss.S, q), n_(B.ss.n()) {
    const long dim = B.dim();
    const long nn = static_cast<long>(n_) * n_ * n_;
    for (int p = 0; p < vol.num_patches(); ++p) {
      std::vector<Eigen::Triplet<double>> t;
      for (long i = 0; i < dim; ++i)
        if (auto* c = B.functions[i].coeffs(p))
          for (auto& [idx, v] : *c) t.emplace_back(static_cast<int>(idx), static_cast<int>(i), v);
      Eigen::SparseMatrix<double> C(nn, dim);
      C.setFromTriplets(t.begin(), t.end());
      C.makeCompressed();
      C_.push_back(std::move(C));
    }
    boxes_.resize(dim);
    for (long i = 0; i < dim; ++i)
      for (auto& [p, c] : B.functions[i].parts()) boxes_[i].push_back({p, support_box(Q_, c, n_)});
  }

  const VolumeQuadrature& quadrature() const { return Q_; }
  long dim() const { return B_->dim(); }

  Eigen::VectorXd apply(const Eigen::VectorXd& c) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());
    ElementBox all;
    all.lo = {0, 0, 0};
    all.hi = {Q_.elements_per_dir() - 1, Q_.elements_per_dir() - 1, Q_.elements_per_dir() - 1};
    for (int p = 0; p < Q_.num_patches(); ++p) {
      Eigen::VectorXd u = C_[p] * c;
      Eigen::VectorXd mu = Eigen::VectorXd::Zero(u.size());
      mass_apply(Q_, p, u.data(), mu.data(), all, scratch_);
      out += C_[p].transpose() * mu;
    }
    return out;
  }

  /// Column i of the Gram matrix restricted to the rows `rows` (all if empty).
  Eigen::VectorXd column(long i) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());
    const long nn = static_cast<long>(n_) * n_ * n_;
    if (static_cast<long>(work_.size()) != nn) {
      work_.assign(nn, 0.0);
      mwork_.assign(nn, 0.0);
    }
    for (auto& [p, box] : boxes_[i]) {
      auto* c = B_->functions[i].coeffs(p);
      for (auto& [idx, v] : *c) work_[idx] = v;
      mass_apply(Q_, p, work_.data(), mwork_.data(), box, scratch_);
      for (auto& [idx, v] : *c) work_[idx] = 0.0;
      Eigen::Map<const Eigen::VectorXd> mu(mwork_.data(), nn);
      out += C_[p].transpose() * mu;
      std::fill(mwork_.begin(), mwork_.end(), 0.0);
    }
    return out;
  }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd G(dim(), dim());
    for (long i = 0; i < dim(); ++i) G.col(i) = column(i);
    return 0.5 * (G + G.transpose());
  }

  Eigen::VectorXd rhs(const ScalarField& z) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());
    const int K = Q_.elements_per_dir(), nq = Q_.points_per_element();
    const long nn = static_cast<long>(n_) * n_ * n_;
    std::vector<double> v(nq);
    for (int p = 0; p < Q_.num_patches(); ++p) {
      Eigen::VectorXd r = Eigen::VectorXd::Zero(nn);
      for (int e3 = 0; e3 < K; ++e3)
        for (int e2 = 0; e2 < K; ++e2)
          for (int e1 = 0; e1 < K; ++e1) {
            std::size_t base = Q_.point_base(p, e1, e2, e3);
            for (int i = 0; i < nq; ++i) v[i] = Q_.weight(base + i) * z(Q_.point(base + i));
            Q_.project_add(v.data(), n_, e1, e2, e3, r.data());
          }
      out += C_[p].transpose() * r;
    }
    return out;
  }

  /// Tensor coefficients on patch p of sum_i c_i phi_i.
  Eigen::VectorXd patch_coeffs(int p, const Eigen::VectorXd& c) const { return C_[p] * c; }

  const MultiPatchVolume& volume() const { return *vol_; }
  const C1Basis& basis() const { return *B_; }

 private:
  const MultiPatchVolume* vol_;
  const C1Basis* B_;
  VolumeQuadrature Q_;
  int n_;
  std::vector<Eigen::SparseMatrix<double>> C_;
  std::vector<std::vector<std::pair<int, ElementBox>>> boxes_;
  mutable std::vector<double> scratch_, work_, mwork_;
};

/// Block preconditioner: patch functions are grouped into tensor index boxes
/// per patch and inverted through the Kronecker product of 1D mass matrices
/// scaled by the mean Jacobian; all other functions form one dense block.
class BlockPreconditioner {
 public:
  BlockPreconditioner(const MultiPatchVolume& vol, const C1Basis& B, const GramOperator& G) {
    const auto& S = B.ss.S;
    const int n = S.dim();
    // 1D mass matrix on [0,1]
    std::vector<double> gx, gw;
    const int q = S.degree() + 1;
    gauss_legendre(q, gx, gw);
    Eigen::MatrixXd M1 = Eigen::MatrixXd::Zero(n, n);
    for (int e = 0; e <= S.k(); ++e)
      for (int i = 0; i < q; ++i) {
        double x = (e + gx[i]) / (S.k() + 1);
        auto lb = basis_at<double>(S, x, 0);
        for (int a = 0; a <= S.degree(); ++a)
          for (int b = 0; b <= S.degree(); ++b)
            M1(lb.first + a, lb.first + b) += gw[i] / (S.k() + 1) * lb.ders[0][a] * lb.ders[0][b];
      }
    const long dim = B.dim();
    std::vector<char> in_patch(dim, 0);
    for (int p = 0; p < vol.num_patches(); ++p) {
      PatchBlock blk;
      std::array<int, 3> lo{n, n, n}, hi{-1, -1, -1};
      for (long i = 0; i < B.dim_patch; ++i) {
        if (B.functions[i].tag.entity != p) continue;
        auto idx = B.functions[i].tag.index;
        for (int k = 0; k < 3; ++k) {
          lo[k] = std::min(lo[k], idx[k]);
          hi[k] = std::max(hi[k], idx[k]);
        }
        blk.members.push_back({i, idx});
      }
      if (blk.members.empty()) continue;
      long count = 1;
      for (int k = 0; k < 3; ++k) count *= hi[k] - lo[k] + 1;
      if (count != static_cast<long>(blk.members.size())) continue;  // not a box; falls into the dense block
      blk.lo = lo;
      for (int k = 0; k < 3; ++k) {
        blk.m[k] = hi[k] - lo[k] + 1;
        blk.chol[k] = Eigen::LLT<Eigen::MatrixXd>(M1.block(lo[k], lo[k], blk.m[k], blk.m[k]));
      }
      // mean |det J| over the patch
      double vol_p = 0.0;
      const auto& Q = G.quadrature();
      const int K = Q.elements_per_dir(), nq = Q.points_per_element();
      for (int e3 = 0; e3 < K; ++e3)
        for (int e2 = 0; e2 < K; ++e2)
          for (int e1 = 0; e1 < K; ++e1) {
            std::size_t base = Q.point_base(p, e1, e2, e3);
            for (int i = 0; i < nq; ++i) vol_p += Q.weight(base + i);
          }
      blk.scale = 1.0 / vol_p;
      for (auto& [i, idx] : blk.members) in_patch[i] = 1;
      blocks_.push_back(std::move(blk));
    }
    for (long i = 0; i < dim; ++i)
      if (!in_patch[i]) rest_.push_back(i);
    if (!rest_.empty()) {
      Eigen::MatrixXd D(rest_.size(), rest_.size());
      for (std::size_t a = 0; a < rest_.size(); ++a) {
        Eigen::VectorXd col = G.column(rest_[a]);
        for (std::size_t b = 0; b < rest_.size(); ++b) D(b, a) = col[rest_[b]];
      }
      D = 0.5 * (D + D.transpose());
      dense_.compute(D);
    }
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& r) const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(r.size());
    for (auto& blk : blocks_) {
      const int m1 = blk.m[0], m2 = blk.m[1], m3 = blk.m[2];
      Eigen::VectorXd t(static_cast<long>(m1) * m2 * m3);
      for (auto& [i, idx] : blk.members)
        t[((idx[2] - blk.lo[2]) * m2 + (idx[1] - blk.lo[1])) * m1 + (idx[0] - blk.lo[0])] = r[i];
      // axis 1
      for (long s = 0; s < static_cast<long>(m2) * m3; ++s) {
        Eigen::Map<Eigen::VectorXd> seg(t.data() + s * m1, m1);
        seg = blk.chol[0].solve(Eigen::VectorXd(seg));
      }
      // axis 2
      Eigen::VectorXd line(m2);
      for (int i3 = 0; i3 < m3; ++i3)
        for (int i1 = 0; i1 < m1; ++i1) {
          for (int i2 = 0; i2 < m2; ++i2) line[i2] = t[(static_cast<long>(i3) * m2 + i2) * m1 + i1];
          line = blk.chol[1].solve(line);
          for (int i2 = 0; i2 < m2; ++i2) t[(static_cast<long>(i3) * m2 + i2) * m1 + i1] = line[i2];
        }
      // axis 3
      Eigen::VectorXd col(m3);
      for (int i2 = 0; i2 < m2; ++i2)
        for (int i1 = 0; i1 < m1; ++i1) {
          for (int i3 = 0; i3 < m3; ++i3) col[i3] = t[(static_cast<long>(i3) * m2 + i2) * m1 + i1];
          col = blk.chol[2].solve(col);
          for (int i3 = 0; i3 < m3; ++i3) t[(static_cast<long>(i3) * m2 + i2) * m1 + i1] = col[i3];
        }
      for (auto& [i, idx] : blk.members)
        z[i] = blk.scale * t[((idx[2] - blk.lo[2]) * m2 + (idx[1] - blk.lo[1])) * m1 + (idx[0] - blk.lo[0])];
    }
    if (!rest_.empty()) {
      Eigen::VectorXd rr(rest_.size());
      for (std::size_t a = 0; a < rest_.size(); ++a) rr[a] = r[rest_[a]];
      Eigen::VectorXd zz = dense_.solve(rr);
      for (std::size_t a = 0; a < rest_.size(); ++a) z[rest_[a]] = zz[a];
    }
    return z;
  }

 private:
  struct PatchBlock {
    std::vector<std::pair<long, std::array<int, 3>>> members;
    std::array<int, 3> lo{}, m{};
    std::array<Eigen::LLT<Eigen::MatrixXd>, 3> chol;
    double scale = 1.0;
  };
  std::vector<PatchBlock> blocks_;
  std::vector<long> rest_;
  Eigen::LDLT<Eigen::MatrixXd> dense_;
};

/// Relative L2 errors of the fit on the inner faces and the inner edges.
struct RegionErrors {
  double faces = 0.0, edge = 0.0;
};

inline RegionErrors interface_errors(const MultiPatchVolume& vol, const C1Basis& B, const GramOperator& G,
                                     const Eigen::VectorXd& c, const ScalarField& z, int q) {
  const auto& S = B.ss.S;
  const int n = S.dim(), K = S.k() + 1;
  std::vector<double> gx, gw;
  gauss_legendre(q, gx, gw);
  std::map<int, TensorCoeffs3> coeffs;
  auto tensor = [&](int p) -> const TensorCoeffs3& {
    auto it = coeffs.find(p);
    if (it != coeffs.end()) return it->second;
    TensorCoeffs3 t(n);
    Eigen::VectorXd u = G.patch_coeffs(p, c);
    for (long i = 0; i < u.size(); ++i) t.a[i] = u[i];
    return coeffs.emplace(p, std::move(t)).first->second;
  };
  auto cross = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return std::array<double, 3>{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  };
  auto norm = [](const std::array<double, 3>& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); };
  RegionErrors out;
  double num = 0.0, den = 0.0;
  for (int f : vol.inc.inner_faces()) {
    PatchView v = standard_form_interface(vol, f).side0;
    const auto& t = tensor(v.patch);
    for (int e1 = 0; e1 < K; ++e1)
      for (int e2 = 0; e2 < K; ++e2)
        for (int i1 = 0; i1 < q; ++i1)
          for (int i2 = 0; i2 < q; ++i2) {
            std::array<double, 3> y{0.0, (e1 + gx[i1]) / K, (e2 + gx[i2]) / K};
            auto xi = v.sym.apply(y);
            auto d1 = v.eval<double>(vol, y, {0, 1, 0});
            auto d2 = v.eval<double>(vol, y, {0, 0, 1});
            double w = gw[i1] * gw[i2] * norm(cross(d1, d2)) / (static_cast<double>(K) * K);
            double zz = z(vol.eval<double>(v.patch, xi));
            double zh = eval_tensor3(S, t, xi);
            num += w * (zh - zz) * (zh - zz);
            den += w * zz * zz;
          }
  }
  out.faces = den > 0 ? std::sqrt(num / den) : 0.0;
  num = den = 0.0;
  for (int e : vol.inc.inner_edges()) {
    int p = vol.inc.edges[e].owners[0].first;
    EdgeView ev = standard_form_edge(vol, e, p);
    const auto& t = tensor(p);
    for (int e3 = 0; e3 < K; ++e3)
      for (int i3 = 0; i3 < q; ++i3) {
        std::array<double, 3> y{0.0, 0.0, (e3 + gx[i3]) / K};
        auto xi = ev.view.sym.apply(y);
        double w = gw[i3] * norm(ev.view.eval<double>(vol, y, {0, 0, 1})) / K;
        double zz = z(vol.eval<double>(p, xi));
        double zh = eval_tensor3(S, t, xi);
        num += w * (zh - zz) * (zh - zz);
        den += w * zz * zz;
      }
  }
  out.edge = den > 0 ? std::sqrt(num / den) : 0.0;
  return out;
}

inline double volume_error(const GramOperator& G, const Eigen::VectorXd& c, const ScalarField& z) {
  const auto& Q = G.quadrature();
  const int K = Q.elements_per_dir(), nq = Q.points_per_element(), n = Q.space().dim();
  std::vector<double> v(nq);
  double num = 0.0, den = 0.0;
  for (int p = 0; p < Q.num_patches(); ++p) {
    Eigen::VectorXd u = G.patch_coeffs(p, c);
    for (int e3 = 0; e3 < K; ++e3)
      for (int e2 = 0; e2 < K; ++e2)
        for (int e1 = 0; e1 < K; ++e1) {
          Q.interpolate(u.data(), n, e1, e2, e3, v.data());
          std::size_t base = Q.point_base(p, e1, e2, e3);
          for (int i = 0; i < nq; ++i) {
            double zz = z(Q.point(base + i));
            double w = Q.weight(base + i);
            num += w * (v[i] - zz) * (v[i] - zz);
            den += w * zz * zz;
          }
        }
  }
  if (den == 0.0) throw std::invalid_argument("target has zero norm on the volume");
  return std::sqrt(num / den);
}

/// Least-squares fit of z in the span of the basis.
inline FitResult l2_fit(const MultiPatchVolume& vol, const C1Basis& B, const ScalarField& z,
                        const FitOptions& opt = {}) {
  const int q = opt.q > 0 ? opt.q : B.ss.cfg.p + 1;
  GramOperator G(vol, B, q);
  Eigen::VectorXd b = G.rhs(z);
  FitResult res;
  if (B.dim() <= opt.dense_limit) {
    Eigen::MatrixXd A = G.dense();
    Eigen::VectorXd d = A.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd As = d.asDiagonal() * A * d.asDiagonal();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(As);
    Eigen::VectorXd D = ldlt.vectorD();
    res.min_scaled_pivot = D.minCoeff();
    if (ldlt.info() != Eigen::Success || D.minCoeff() <= 1e-14 * D.maxCoeff())
      throw IllConditionedError("Gram matrix is numerically singular (scaled pivot ratio " +
                                std::to_string(D.minCoeff() / D.maxCoeff()) + ")");
    res.c = d.asDiagonal() * ldlt.solve(d.asDiagonal() * b);
    res.solver = "dense-ldlt";
    res.relative_residual = (A * res.c - b).norm() / b.norm();
  } else {
    BlockPreconditioner P(vol, B, G);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(B.dim());
    Eigen::VectorXd r = b, zr = P.apply(r), p = zr;
    double rz = r.dot(zr);
    const double bn = b.norm();
    int it = 0;
    for (; it < opt.cg_max_iter && r.norm() > opt.cg_tol * bn; ++it) {
      Eigen::VectorXd Ap = G.apply(p);
      double alpha = rz / p.dot(Ap);
      x += alpha * p;
      r -= alpha * Ap;
      zr = P.apply(r);
      double rz2 = r.dot(zr);
      p = zr + (rz2 / rz) * p;
      rz = rz2;
    }
    res.c = x;
    res.iterations = it;
    res.solver = "pcg";
    res.relative_residual = (G.apply(x) - b).norm() / bn;
  }
  res.e_volume = volume_error(G, res.c, z);
  auto re = interface_errors(vol, B, G, res.c, z, q);
  res.e_faces = re.faces;
  res.e_edge = re.edge;
  return res;
}

}  // namespace c1vol

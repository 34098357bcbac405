#include "relaxctl/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace relaxctl {

namespace {

struct RawEig {
  Vector eigenvalues;
  Matrix right;  // column k: right eigenvector of M
  Matrix left;   // column k: eigenvector of M† with eigenvalue λ_k*
};

RawEig eig_nonhermitian(const Superoperator& m) {
  const lapack_int n = m.dim();
  Matrix a = m.m;  // zgeev overwrites
  RawEig out;
  out.eigenvalues.resize(n);
  out.right.resize(n, n);
  out.left.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'V', 'V', n,
      reinterpret_cast<lapack_complex_double*>(a.data()), n,
      reinterpret_cast<lapack_complex_double*>(out.eigenvalues.data()),
      reinterpret_cast<lapack_complex_double*>(out.left.data()), n,
      reinterpret_cast<lapack_complex_double*>(out.right.data()), n);
  if (info != 0)
    throw std::runtime_error("zgeev failed, info = " + std::to_string(info));
  return out;
}

// Transitive grouping of eigenvalue indices within cluster_tol. Indices are
// assumed sorted so that cluster members are contiguous.
std::vector<std::vector<int>> eigenvalue_clusters(const Vector& w,
                                                  double cluster_tol) {
  const int n = static_cast<int>(w.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (std::abs(w(a) - w(b)) <= cluster_tol) parent[find(b)] = find(a);
  std::vector<std::vector<int>> groups(n);
  for (int k = 0; k < n; ++k) groups[find(k)].push_back(k);
  std::vector<std::vector<int>> out;
  for (auto& g : groups)
    if (!g.empty()) out.push_back(std::move(g));
  return out;
}

// Deterministic ±1 canonicalization of a hermitian mode: trace positive, or
// when traceless, the dominant entry oriented positive.
double canonical_sign(const Matrix& r) {
  const double t = r.trace().real();
  if (std::abs(t) > 1e-8) return t > 0 ? 1.0 : -1.0;
  Eigen::Index bi = 0, bj = 0;
  double best = -1.0;
  for (Eigen::Index j = 0; j < r.cols(); ++j)
    for (Eigen::Index i = 0; i < r.rows(); ++i)
      if (std::abs(r(i, j)) > best) {
        best = std::abs(r(i, j));
        bi = i;
        bj = j;
      }
  const double key = r(bi, bj).real() + r(bi, bj).imag();
  return key >= 0 ? 1.0 : -1.0;
}

// Rotate a degenerate real-eigenvalue cluster to a hermitian mode basis.
// Requires the cluster span to be closed under adjoint; silently skips
// otherwise (synthetic non-physical generators need not be closed).
void hermitian_rotate_cluster(const std::vector<int>& idx, Matrix& right,
                              Matrix& left) {
  const int m = static_cast<int>(idx.size());
  const Eigen::Index n2 = right.rows();
  Matrix rc(n2, m), lc(n2, m);
  for (int j = 0; j < m; ++j) {
    rc.col(j) = right.col(idx[j]);
    lc.col(j) = left.col(idx[j]);
  }
  // adjoint coefficients a_j: vec(r_j†) expanded in the cluster basis
  Matrix adj(n2, m);
  for (int j = 0; j < m; ++j) adj.col(j) = vec(unvec(rc.col(j)).adjoint());
  const Matrix a = lc.adjoint() * adj;
  const double closure = (adj - rc * a).norm() / adj.norm();
  if (closure > 1e-6) return;

  // hermitian candidates r_j + r_j† and (r_j − r_j†)/i, as real combinations
  Matrix cand(n2, 2 * m);
  const Complex i_unit(0.0, 1.0);
  for (int j = 0; j < m; ++j) {
    cand.col(2 * j) = rc.col(j) + adj.col(j);
    cand.col(2 * j + 1) = (rc.col(j) - adj.col(j)) / i_unit;
  }
  // real QR keeps linear combinations real, hence hermitian
  Eigen::MatrixXd flat(2 * n2, 2 * m);
  flat.topRows(n2) = cand.real();
  flat.bottomRows(n2) = cand.imag();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(flat);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(2 * n2, m);
  Matrix rc_new(n2, m);
  for (int j = 0; j < m; ++j)
    rc_new.col(j) = q.col(j).head(n2) + i_unit * q.col(j).tail(n2);

  Matrix gram = lc.adjoint() * rc_new;
  Eigen::FullPivLU<Matrix> lu(gram);
  if (!lu.isInvertible()) return;
  Matrix lc_new = lc * lu.inverse().adjoint();
  for (int j = 0; j < m; ++j) {
    Matrix lmat = unvec(lc_new.col(j));
    lc_new.col(j) = vec(0.5 * (lmat + lmat.adjoint()).eval());
  }
  // hermitization nudges the Gram matrix; one more correction pass
  Matrix gram2 = lc_new.adjoint() * rc_new;
  Eigen::FullPivLU<Matrix> lu2(gram2);
  if (!lu2.isInvertible()) return;
  lc_new = lc_new * lu2.inverse().adjoint();

  for (int j = 0; j < m; ++j) {
    const double s = canonical_sign(unvec(rc_new.col(j)));
    right.col(idx[j]) = s * rc_new.col(j);
    left.col(idx[j]) = s * lc_new.col(j);
  }
}

}  // namespace

double LiouvilleSpectrum::biorthonormality_residual() const {
  const Matrix gram = left.adjoint() * right;
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

double biorthonormalize(const Vector& eigenvalues, Matrix& right, Matrix& left,
                        double cluster_tol) {
  double worst_cond = 1.0;
  for (const auto& cluster : eigenvalue_clusters(eigenvalues, cluster_tol)) {
    const int m = static_cast<int>(cluster.size());
    const Eigen::Index n2 = right.rows();
    Matrix rc(n2, m), lc(n2, m);
    for (int j = 0; j < m; ++j) {
      rc.col(j) = right.col(cluster[j]);
      lc.col(j) = left.col(cluster[j]);
    }
    const Matrix gram = lc.adjoint() * rc;
    if (m == 1 && std::abs(gram(0, 0)) < 1e-12)
      throw DefectiveLiouvillian(
          "near-parallel left/right pair at eigenvalue " +
          std::to_string(eigenvalues(cluster[0]).real()) + " + " +
          std::to_string(eigenvalues(cluster[0]).imag()) + "i");
    Eigen::JacobiSVD<Matrix> svd(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin < 1e-12 * std::max(1.0, smax))
      throw DefectiveLiouvillian("singular degenerate-cluster Gram matrix");
    worst_cond = std::max(worst_cond, smax / smin);
    // L ← L G⁻†  so that  L† R = I on the cluster
    const Matrix ginv = svd.matrixV() *
                        svd.singularValues().cwiseInverse().asDiagonal() *
                        svd.matrixU().adjoint();
    lc = lc * ginv.adjoint();
    for (int j = 0; j < m; ++j) left.col(cluster[j]) = lc.col(j);
  }
  return worst_cond;
}

LiouvilleSpectrum diagonalize(const Superoperator& m, double tol_zero) {
  RawEig raw = eig_nonhermitian(m);
  const int n = m.dim();

  // residual check: a large per-mode residual signals a defective matrix
  const double mnorm = m.m.norm();
  const Matrix mr = m.m * raw.right;
  for (int k = 0; k < n; ++k) {
    const double res = (mr.col(k) - raw.eigenvalues(k) * raw.right.col(k)).norm();
    if (res > 1e-8 * std::max(1.0, mnorm))
      throw DefectiveLiouvillian("eigenmode residual " + std::to_string(res));
  }

  // sort Re descending, ties Im descending
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Complex wa = raw.eigenvalues(a), wb = raw.eigenvalues(b);
    if (wa.real() != wb.real()) return wa.real() > wb.real();
    return wa.imag() > wb.imag();
  });

  // Re-ties are only exact up to round-off, and a tie group may hold several
  // conjugate pairs; regroup so each pair sits adjacent, +Im member first.
  {
    const double tie_tol =
        1e-9 * std::max(1.0, raw.eigenvalues.cwiseAbs().maxCoeff());
    std::vector<int> regrouped;
    regrouped.reserve(n);
    int g0 = 0;
    while (g0 < n) {
      int g1 = g0 + 1;
      while (g1 < n &&
             std::abs(raw.eigenvalues(order[g1]).real() -
                      raw.eigenvalues(order[g1 - 1]).real()) <= tie_tol)
        ++g1;
      std::vector<int> pos, neg, real_part;
      for (int k = g0; k < g1; ++k) {
        const double im = raw.eigenvalues(order[k]).imag();
        if (im > tie_tol)
          pos.push_back(order[k]);
        else if (im < -tie_tol)
          neg.push_back(order[k]);
        else
          real_part.push_back(order[k]);
      }
      for (int p : pos) {
        regrouped.push_back(p);
        const Complex target = std::conj(raw.eigenvalues(p));
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < neg.size(); ++j) {
          const double d = std::abs(raw.eigenvalues(neg[j]) - target);
          if (d < best_d) {
            best_d = d;
            best = static_cast<int>(j);
          }
        }
        if (best >= 0) {
          regrouped.push_back(neg[best]);
          neg.erase(neg.begin() + best);
        }
      }
      for (int k : real_part) regrouped.push_back(k);
      for (int k : neg) regrouped.push_back(k);  // unpaired leftovers
      g0 = g1;
    }
    order = std::move(regrouped);
  }

  LiouvilleSpectrum s;
  s.eigenvalues.resize(n);
  s.right.resize(n, n);
  s.left.resize(n, n);
  for (int k = 0; k < n; ++k) {
    s.eigenvalues(k) = raw.eigenvalues(order[k]);
    s.right.col(k) = raw.right.col(order[k]).normalized();
    s.left.col(k) = raw.left.col(order[k]);
  }

  const double max_abs_re = s.eigenvalues.real().cwiseAbs().maxCoeff();
  s.tol_zero = tol_zero >= 0 ? tol_zero : std::max(1e-9 * max_abs_re, 1e-12);

  s.gram_condition = biorthonormalize(s.eigenvalues, s.right, s.left);

  // exact conjugate pairing: r of the -Im partner replaced by r† of the +Im one
  for (int k = 0; k + 1 < n; ++k) {
    const Complex wk = s.eigenvalues(k);
    if (wk.imag() <= s.tol_zero) continue;
    if (std::abs(s.eigenvalues(k + 1) - std::conj(wk)) > 1e-9) continue;
    const Vector r_adj = vec(unvec(s.right.col(k)).adjoint().eval());
    const Vector l_adj = vec(unvec(s.left.col(k)).adjoint().eval());
    const Complex g = l_adj.dot(r_adj);
    if (std::abs(g - Complex(1.0)) < 1e-6) {
      s.right.col(k + 1) = r_adj;
      s.left.col(k + 1) = l_adj;
      ++k;
    }
  }

  // hermitian basis for clusters of real eigenvalues
  for (const auto& cluster : eigenvalue_clusters(s.eigenvalues, 1e-9)) {
    bool all_real = true;
    for (int k : cluster)
      all_real = all_real && std::abs(s.eigenvalues(k).imag()) <= s.tol_zero;
    if (all_real) hermitian_rotate_cluster(cluster, s.right, s.left);
  }

  // gauge: modes with nonzero trace (the non-decaying sector) are scaled to
  // unit trace, so the steady state is the k=1 mode itself and its overlap
  // coefficient is exactly 1
  for (int k = 0; k < n; ++k) {
    const Complex t = unvec(s.right.col(k)).trace();
    if (std::abs(t) > 1e-8) {
      s.right.col(k) /= t;
      s.left.col(k) *= std::conj(t);
    }
  }

  if (s.biorthonormality_residual() > 1e-8)
    throw DefectiveLiouvillian("biorthonormality residual " +
                               std::to_string(s.biorthonormality_residual()));

  s.d_s = 0;
  for (int k = 0; k < n; ++k)
    if (std::abs(s.eigenvalues(k).real()) <= s.tol_zero) ++s.d_s;
  return s;
}

DensityMatrix steady_state(const LiouvilleSpectrum& s) {
  if (s.d_s < 1) throw std::runtime_error("no non-decaying mode found");
  if (s.d_s > 1) throw DegenerateSteadyState(s.d_s);
  Matrix r = s.right_mode(0);
  const Complex t = r.trace();
  if (std::abs(t) < 1e-12)
    throw std::runtime_error("steady mode has vanishing trace");
  r /= t;
  return DensityMatrix(0.5 * (r + r.adjoint().eval()));
}

Vector overlaps(const LiouvilleSpectrum& s, const Matrix& rho) {
  if (rho.rows() != s.dim())
    throw std::invalid_argument("overlaps: dimension mismatch");
  return s.left.adjoint() * vec(rho);
}

Matrix reconstruct(const LiouvilleSpectrum& s, const Vector& c) {
  return unvec(s.right * c);
}

}  // namespace relaxctl

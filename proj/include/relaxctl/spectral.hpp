#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "relaxctl/model.hpp"
#include "relaxctl/operators.hpp"

namespace relaxctl {

/// Biorthonormalization failed: near-parallel left/right vectors signal a
/// Jordan block (non-diagonalizable generator).
struct DefectiveLiouvillian : std::runtime_error {
  explicit DefectiveLiouvillian(const std::string& what)
      : std::runtime_error(what) {}
};

struct DegenerateSteadyState : std::runtime_error {
  int d_s;
  explicit DegenerateSteadyState(int ds)
      : std::runtime_error("steady state degenerate, d_s = " +
                           std::to_string(ds)),
        d_s(ds) {}
};

/// Sorted eigensystem of a Liouvillian with biorthonormal left/right modes.
/// Modes are stored column-stacked: column k of `right` is vec(r_k).
/// Invariants: Re λ sorted descending (ties: Im descending, conjugate pairs
/// adjacent with the +Im member first); Tr(ℓ_k† r_m) = δ_km; modes with real
/// eigenvalue are hermitian.
struct LiouvilleSpectrum {
  Vector eigenvalues;   // length d²
  Matrix right;         // d² × d², column k = vec(r_k)
  Matrix left;          // d² × d², column k = vec(ℓ_k)
  int d_s = 0;          // number of eigenvalues with vanishing real part
  double tol_zero = 0;
  double gram_condition = 1.0;  // worst degenerate-cluster Gram conditioning

  int dim() const { return static_cast<int>(std::llround(std::sqrt(double(right.rows())))); }
  int n_modes() const { return static_cast<int>(eigenvalues.size()); }
  Matrix right_mode(int k) const { return unvec(right.col(k)); }
  Matrix left_mode(int k) const { return unvec(left.col(k)); }

  double biorthonormality_residual() const;
};

/// Full non-hermitian eigendecomposition of M with mode post-processing.
/// tol_zero < 0 selects the default 1e-9·max|Re λ| with floor 1e-12.
LiouvilleSpectrum diagonalize(const Superoperator& m, double tol_zero = -1.0);

/// In-place pairing/normalization of raw left/right eigenvector columns.
/// Columns of `right`/`left` must correspond entrywise to `eigenvalues`
/// (left column k is an eigenvector of M† with eigenvalue λ_k*).
/// Degenerate clusters (|λ_a − λ_b| ≤ cluster_tol, transitive) are repaired
/// through an LU solve of the cluster Gram matrix. Returns the worst cluster
/// condition number seen.
double biorthonormalize(const Vector& eigenvalues, Matrix& right, Matrix& left,
                        double cluster_tol = 1e-9);

/// Unique steady state r_1/Tr(r_1), hermitized. Throws DegenerateSteadyState
/// when d_s > 1.
DensityMatrix steady_state(const LiouvilleSpectrum& s);

/// c_k = Tr(ℓ_k† ρ) for all modes.
Vector overlaps(const LiouvilleSpectrum& s, const Matrix& rho);

/// Σ_k c_k r_k.
Matrix reconstruct(const LiouvilleSpectrum& s, const Vector& c);

}  // namespace relaxctl

#pragma once

#include <vector>

#include "relaxctl/operators.hpp"

namespace relaxctl {

// Vectorization convention used throughout: COLUMN STACKING, vec(A) takes the
// columns of A in order (Eigen's native memory layout). Under it
// vec(AXB) = (Bᵀ ⊗ A) vec(X), and Tr(A†B) = vec(A)† vec(B).
Vector vec(const Matrix& a);
Matrix unvec(const Vector& v);

/// Long-range Ising chain with uniform spontaneous decay.
struct ModelParams {
  int n_qubits = 5;
  double h_x = 1.0;
  double J = 1.25;
  double alpha = 1.0;   // interaction-range exponent
  double gamma = 1.0;   // decay rate

  int dim() const { return 1 << n_qubits; }
  void validate() const;
};

/// H = h_x Σ_i σ_i^x + J Σ_{i<j} σ_i^z σ_j^z / |i-j|^α  (open boundaries)
Matrix build_hamiltonian(const ModelParams& p);

/// L_i = √γ σ_i^-, one per site.
std::vector<Matrix> build_jumps(const ModelParams& p);

struct Superoperator {
  Matrix m;  // d² × d², acts on column-stacked vec(ρ)
  int dim() const { return static_cast<int>(m.rows()); }
};

/// Matrix of the GKSL generator: vec(ℒ[ρ]) = M vec(ρ).
Superoperator vectorize_liouvillian(const Matrix& h,
                                    const std::vector<Matrix>& jumps);

Superoperator liouvillian(const ModelParams& p);

/// Direct (non-vectorized) evaluation of ℒ[ρ]; oracle for the superoperator.
Matrix apply_generator(const Matrix& h, const std::vector<Matrix>& jumps,
                       const Matrix& rho);

}  // namespace relaxctl

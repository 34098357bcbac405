#pragma once

#include "relaxctl/operators.hpp"

namespace relaxctl {

struct SpectrumMismatch : std::runtime_error {
  explicit SpectrumMismatch(double dev)
      : std::runtime_error("sorted spectra differ by " + std::to_string(dev)) {}
};

/// Minimal rotation in span{ψ₁, ψ₂} with U|ψ₁⟩ ∝ |ψ₂⟩: U = exp(θh),
/// θ = arccos|⟨ψ₂|ψ₁⟩|, h ∝ |ψ₂⟩⟨ψ₁| − |ψ₁⟩⟨ψ₂|. Returns the identity when
/// the states coincide up to phase.
Matrix geodesic_unitary(const Vector& psi1, const Vector& psi2);

/// U = Σ_i |φ₂,i⟩⟨φ₁,i| pairing eigenvectors of two isospectral states in
/// ascending eigenvalue order. Throws SpectrumMismatch beyond 1e-8.
Matrix spectral_unitary(const DensityMatrix& rho1, const DensityMatrix& rho2);

/// Geodesic unitary for (numerically) pure states, spectral otherwise.
Matrix realizing_unitary(const DensityMatrix& rho1, const DensityMatrix& rho2);

/// Shared-angle product rotation, U = ⊗_i exp(iθσ_i^z/2) exp(iφσ_i^y/2).
struct RestrictedAngles {
  double theta = 0;
  double phi = 0;
};

Matrix restricted_unitary(const RestrictedAngles& a, int n_qubits);

/// Squared-overlap (Uhlmann) fidelity F(ρ,σ) = (Tr√(√ρ σ √ρ))².
double fidelity(const Matrix& rho, const Matrix& sigma);

enum class RestrictedObjective { Infidelity, TraceDistance };

struct RestrictedOptimum {
  RestrictedAngles angles;
  double objective = 0;       // refined value
  double grid_objective = 0;  // best coarse-grid value
};

/// Deterministic 64×64 grid over [−π,π)² followed by Nelder–Mead refinement
/// of the chosen objective for ρ̌ = U(θ,φ) ρ₀ U†(θ,φ) against ρ_target.
RestrictedOptimum optimize_restricted(
    const DensityMatrix& rho0, const DensityMatrix& rho_target, int n_qubits,
    RestrictedObjective obj = RestrictedObjective::Infidelity,
    int grid_points = 64);

/// Serial reference for the grid stage; returns the objective at every grid
/// node in row-major (θ-major) order.
std::vector<double> restricted_grid_serial(const DensityMatrix& rho0,
                                           const DensityMatrix& rho_target,
                                           int n_qubits, RestrictedObjective obj,
                                           int grid_points);
/// OpenMP version of the same kernel; identical output ordering.
std::vector<double> restricted_grid(const DensityMatrix& rho0,
                                    const DensityMatrix& rho_target,
                                    int n_qubits, RestrictedObjective obj,
                                    int grid_points);

}  // namespace relaxctl

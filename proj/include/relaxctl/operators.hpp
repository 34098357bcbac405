#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaxctl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Entrywise tolerance for hermiticity checks.
inline constexpr double kHermTol = 1e-10;
// Smallest admissible eigenvalue of a density matrix (round-off allowance).
inline constexpr double kPsdTol = 1e-9;

enum class PauliAxis { X, Y, Z, Minus };

Matrix pauli(PauliAxis axis);

/// I ⊗ ... ⊗ σ^axis ⊗ ... ⊗ I acting on `site` (1-based) of an N-qubit chain.
/// Throws std::out_of_range for site outside 1..N.
Matrix pauli_on_site(PauliAxis axis, int site, int n_qubits);

Matrix kron(const Matrix& a, const Matrix& b);

double hermiticity_residual(const Matrix& a);
bool is_hermitian(const Matrix& a, double tol = kHermTol);

/// Tr(A† B), the Hilbert-Schmidt inner product.
Complex trace_inner(const Matrix& a, const Matrix& b);

struct HermitianEig {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns, unitary
};

/// Eigendecomposition A = V D V† of a (tolerance-)hermitian matrix.
/// Throws std::invalid_argument when the input is not hermitian.
HermitianEig hermitian_eig(const Matrix& a);

/// Validated quantum state: unit trace, hermitian, positive semidefinite
/// within fixed tolerances.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix rho);

  const Matrix& mat() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }
  double purity() const { return purity_; }

  static DensityMatrix pure(const Vector& psi);
  /// |↓...↓⟩⟨↓...↓| in the convention |↓⟩ = (0,1)ᵀ (last basis vector).
  static DensityMatrix all_down(int n_qubits);
  static DensityMatrix maximally_mixed(int dim);

 private:
  Matrix mat_;
  double purity_;
};

}  // namespace relaxctl

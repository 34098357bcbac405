#include "relaxctl/operators.hpp"

#include <cmath>

namespace relaxctl {

Matrix pauli(PauliAxis axis) {
  Matrix m(2, 2);
  const Complex i(0.0, 1.0);
  switch (axis) {
    case PauliAxis::X:
      m << 0, 1, 1, 0;
      break;
    case PauliAxis::Y:
      m << 0, -i, i, 0;
      break;
    case PauliAxis::Z:
      m << 1, 0, 0, -1;
      break;
    case PauliAxis::Minus:
      // lowering operator |↓⟩⟨↑| in the basis |↑⟩=(1,0)ᵀ, |↓⟩=(0,1)ᵀ
      m << 0, 0, 1, 0;
      break;
  }
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix pauli_on_site(PauliAxis axis, int site, int n_qubits) {
  if (site < 1 || site > n_qubits)
    throw std::out_of_range("pauli_on_site: site " + std::to_string(site) +
                            " outside 1.." + std::to_string(n_qubits));
  Matrix out = Matrix::Identity(1, 1);
  for (int q = 1; q <= n_qubits; ++q) {
    if (q == site)
      out = kron(out, pauli(axis));
    else
      out = kron(out, Matrix::Identity(2, 2));
  }
  return out;
}

double hermiticity_residual(const Matrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& a, double tol) {
  return hermiticity_residual(a) <= tol;
}

Complex trace_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("trace_inner: dimension mismatch");
  return (a.adjoint() * b).trace();
}

HermitianEig hermitian_eig(const Matrix& a) {
  if (!is_hermitian(a))
    throw std::invalid_argument("hermitian_eig: input not hermitian, residual " +
                                std::to_string(hermiticity_residual(a)));
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eig: solver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

DensityMatrix::DensityMatrix(Matrix rho) : mat_(std::move(rho)) {
  if (!mat_.allFinite())
    throw std::invalid_argument("DensityMatrix: non-finite entries");
  if (std::abs(mat_.trace() - Complex(1.0)) > 1e-10)
    throw std::invalid_argument("DensityMatrix: trace != 1");
  if (!is_hermitian(mat_))
    throw std::invalid_argument("DensityMatrix: not hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
  purity_ = (mat_ * mat_).trace().real();
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  Vector n = psi / psi.norm();
  return DensityMatrix(n * n.adjoint());
}

DensityMatrix DensityMatrix::all_down(int n_qubits) {
  const Eigen::Index d = Eigen::Index(1) << n_qubits;
  Vector psi = Vector::Zero(d);
  psi(d - 1) = 1.0;
  return pure(psi);
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(Matrix::Identity(dim, dim) / double(dim));
}

}  // namespace relaxctl

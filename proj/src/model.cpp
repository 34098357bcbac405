#include "relaxctl/model.hpp"

#include <cmath>

namespace relaxctl {

Vector vec(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unvec(const Vector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
  if (d * d != v.size()) throw std::invalid_argument("unvec: length not a square");
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

void ModelParams::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("ModelParams: N >= 1 required");
  if (gamma < 0) throw std::invalid_argument("ModelParams: gamma >= 0 required");
  if (alpha <= 0) throw std::invalid_argument("ModelParams: alpha > 0 required");
}

Matrix build_hamiltonian(const ModelParams& p) {
  p.validate();
  const int d = p.dim();
  Matrix h = Matrix::Zero(d, d);
  for (int i = 1; i <= p.n_qubits; ++i)
    h += p.h_x * pauli_on_site(PauliAxis::X, i, p.n_qubits);
  for (int i = 1; i <= p.n_qubits; ++i)
    for (int j = i + 1; j <= p.n_qubits; ++j)
      h += (p.J / std::pow(double(j - i), p.alpha)) *
           pauli_on_site(PauliAxis::Z, i, p.n_qubits) *
           pauli_on_site(PauliAxis::Z, j, p.n_qubits);
  return h;
}

std::vector<Matrix> build_jumps(const ModelParams& p) {
  p.validate();
  std::vector<Matrix> jumps;
  jumps.reserve(p.n_qubits);
  const double root_gamma = std::sqrt(p.gamma);
  for (int i = 1; i <= p.n_qubits; ++i)
    jumps.push_back(root_gamma * pauli_on_site(PauliAxis::Minus, i, p.n_qubits));
  return jumps;
}

Superoperator vectorize_liouvillian(const Matrix& h,
                                    const std::vector<Matrix>& jumps) {
  const Eigen::Index d = h.rows();
  const Matrix id = Matrix::Identity(d, d);
  const Complex i_unit(0.0, 1.0);
  Matrix m = -i_unit * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& l : jumps) {
    if (l.rows() != d || l.cols() != d)
      throw std::invalid_argument("vectorize_liouvillian: dimension mismatch");
    const Matrix ldl = l.adjoint() * l;
    m += kron(l.conjugate(), l);
    m -= 0.5 * kron(id, ldl);
    m -= 0.5 * kron(ldl.transpose(), id);
  }
  return {std::move(m)};
}

Superoperator liouvillian(const ModelParams& p) {
  return vectorize_liouvillian(build_hamiltonian(p), build_jumps(p));
}

Matrix apply_generator(const Matrix& h, const std::vector<Matrix>& jumps,
                       const Matrix& rho) {
  if (h.rows() != rho.rows())
    throw std::invalid_argument("apply_generator: dimension mismatch");
  const Complex i_unit(0.0, 1.0);
  Matrix out = -i_unit * (h * rho - rho * h);
  for (const auto& l : jumps) {
    const Matrix ldl = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
  }
  return out;
}

}  // namespace relaxctl

#include "relaxctl/unitary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "relaxctl/dynamics.hpp"

namespace relaxctl {

namespace {

Matrix psd_sqrt(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint().eval()));
  RealVector d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

double wrap_angle(double x) {
  const double two_pi = 2.0 * std::numbers::pi;
  x = std::fmod(x + std::numbers::pi, two_pi);
  if (x < 0) x += two_pi;
  return x - std::numbers::pi;
}

}  // namespace

Matrix geodesic_unitary(const Vector& psi1, const Vector& psi2) {
  const Vector p = psi1 / psi1.norm();
  Vector t = psi2 / psi2.norm();
  Complex overlap = t.dot(p);  // ⟨ψ₂|ψ₁⟩
  if (std::abs(overlap) > 1e-14) t *= overlap / std::abs(overlap);
  const double c = std::min(std::abs(overlap), 1.0);
  if (c >= 1.0 - 1e-12)
    return Matrix::Identity(p.size(), p.size());  // degenerate geodesic

  const double theta = std::acos(c);
  Vector q = t - c * p;
  q /= q.norm();
  // exp(θ(qp† − pq†)) restricted to span{p,q}; identity on the complement
  Matrix u = Matrix::Identity(p.size(), p.size());
  u += std::sin(theta) * (q * p.adjoint() - p * q.adjoint());
  u += (std::cos(theta) - 1.0) * (p * p.adjoint() + q * q.adjoint());
  return u;
}

Matrix spectral_unitary(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  const HermitianEig e1 = hermitian_eig(rho1.mat());
  const HermitianEig e2 = hermitian_eig(rho2.mat());
  const double dev = (e1.eigenvalues - e2.eigenvalues).cwiseAbs().maxCoeff();
  if (dev > 1e-8) throw SpectrumMismatch(dev);
  return e2.eigenvectors * e1.eigenvectors.adjoint();
}

Matrix realizing_unitary(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  if (rho1.purity() >= 1.0 - 1e-10 && rho2.purity() >= 1.0 - 1e-10) {
    const HermitianEig e1 = hermitian_eig(rho1.mat());
    const HermitianEig e2 = hermitian_eig(rho2.mat());
    const auto last = e1.eigenvectors.cols() - 1;
    return geodesic_unitary(e1.eigenvectors.col(last), e2.eigenvectors.col(last));
  }
  return spectral_unitary(rho1, rho2);
}

Matrix restricted_unitary(const RestrictedAngles& a, int n_qubits) {
  const Complex i_unit(0.0, 1.0);
  Matrix uz(2, 2), uy(2, 2);
  uz << std::exp(i_unit * (a.theta / 2.0)), 0, 0, std::exp(-i_unit * (a.theta / 2.0));
  uy << std::cos(a.phi / 2.0), std::sin(a.phi / 2.0), -std::sin(a.phi / 2.0),
      std::cos(a.phi / 2.0);
  const Matrix u1 = uz * uy;
  Matrix u = Matrix::Identity(1, 1);
  for (int q = 0; q < n_qubits; ++q) u = kron(u, u1);
  return u;
}

double fidelity(const Matrix& rho, const Matrix& sigma) {
  const Matrix root = psd_sqrt(rho);
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      0.5 * ((root * sigma * root).eval() +
             (root * sigma * root).adjoint().eval()),
      Eigen::EigenvaluesOnly);
  const double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return tr * tr;
}

namespace {

double restricted_objective(const DensityMatrix& rho0,
                            const DensityMatrix& rho_target, int n_qubits,
                            RestrictedObjective obj, double theta, double phi) {
  const Matrix u = restricted_unitary({theta, phi}, n_qubits);
  const Matrix rho_check = u * rho0.mat() * u.adjoint();
  if (obj == RestrictedObjective::TraceDistance)
    return trace_distance(rho_check, rho_target.mat());
  return 1.0 - fidelity(rho_check, rho_target.mat());
}

}  // namespace

std::vector<double> restricted_grid_serial(const DensityMatrix& rho0,
                                           const DensityMatrix& rho_target,
                                           int n_qubits, RestrictedObjective obj,
                                           int g) {
  std::vector<double> out(size_t(g) * g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * i / g;
      const double phi = -std::numbers::pi + 2.0 * std::numbers::pi * j / g;
      out[size_t(i) * g + j] =
          restricted_objective(rho0, rho_target, n_qubits, obj, theta, phi);
    }
  return out;
}

std::vector<double> restricted_grid(const DensityMatrix& rho0,
                                    const DensityMatrix& rho_target,
                                    int n_qubits, RestrictedObjective obj,
                                    int g) {
  std::vector<double> out(size_t(g) * g);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * i / g;
      const double phi = -std::numbers::pi + 2.0 * std::numbers::pi * j / g;
      out[size_t(i) * g + j] =
          restricted_objective(rho0, rho_target, n_qubits, obj, theta, phi);
    }
  return out;
}

RestrictedOptimum optimize_restricted(const DensityMatrix& rho0,
                                      const DensityMatrix& rho_target,
                                      int n_qubits, RestrictedObjective obj,
                                      int g) {
  const std::vector<double> grid =
      restricted_grid(rho0, rho_target, n_qubits, obj, g);
  // row-major scan with strict '<' keeps the lexicographically first optimum
  size_t best = 0;
  for (size_t k = 1; k < grid.size(); ++k)
    if (grid[k] < grid[best]) best = k;
  const double step = 2.0 * std::numbers::pi / g;
  double theta0 = -std::numbers::pi + step * double(best / g);
  double phi0 = -std::numbers::pi + step * double(best % g);

  auto f = [&](double th, double ph) {
    return restricted_objective(rho0, rho_target, n_qubits, obj, th, ph);
  };

  // Nelder–Mead on (θ,φ), seeded at the grid optimum
  struct Pt {
    double x, y, v;
  };
  std::array<Pt, 3> sx = {Pt{theta0, phi0, grid[best]},
                          Pt{theta0 + 0.5 * step, phi0, f(theta0 + 0.5 * step, phi0)},
                          Pt{theta0, phi0 + 0.5 * step, f(theta0, phi0 + 0.5 * step)}};
  for (int it = 0; it < 400; ++it) {
    std::sort(sx.begin(), sx.end(), [](const Pt& a, const Pt& b) { return a.v < b.v; });
    if (sx[2].v - sx[0].v < 1e-10) break;
    const double cx = 0.5 * (sx[0].x + sx[1].x), cy = 0.5 * (sx[0].y + sx[1].y);
    Pt refl{cx + (cx - sx[2].x), cy + (cy - sx[2].y), 0};
    refl.v = f(refl.x, refl.y);
    if (refl.v < sx[0].v) {
      Pt exp_{cx + 2 * (cx - sx[2].x), cy + 2 * (cy - sx[2].y), 0};
      exp_.v = f(exp_.x, exp_.y);
      sx[2] = exp_.v < refl.v ? exp_ : refl;
    } else if (refl.v < sx[1].v) {
      sx[2] = refl;
    } else {
      Pt con{cx + 0.5 * (sx[2].x - cx), cy + 0.5 * (sx[2].y - cy), 0};
      con.v = f(con.x, con.y);
      if (con.v < sx[2].v) {
        sx[2] = con;
      } else {
        for (int k = 1; k < 3; ++k) {
          sx[k].x = sx[0].x + 0.5 * (sx[k].x - sx[0].x);
          sx[k].y = sx[0].y + 0.5 * (sx[k].y - sx[0].y);
          sx[k].v = f(sx[k].x, sx[k].y);
        }
      }
    }
  }
  std::sort(sx.begin(), sx.end(), [](const Pt& a, const Pt& b) { return a.v < b.v; });

  RestrictedOptimum out;
  out.grid_objective = grid[best];
  if (sx[0].v <= grid[best]) {
    out.angles = {wrap_angle(sx[0].x), wrap_angle(sx[0].y)};
    out.objective = sx[0].v;
  } else {
    out.angles = {wrap_angle(theta0), wrap_angle(phi0)};
    out.objective = grid[best];
  }
  return out;
}

}  // namespace relaxctl

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relaxctl/spectral.hpp"
#include "test_util.hpp"

using namespace relaxctl;

namespace {

ModelParams make_params(int n, double h, double j, double alpha, double gamma) {
  ModelParams p;
  p.n_qubits = n;
  p.h_x = h;
  p.J = j;
  p.alpha = alpha;
  p.gamma = gamma;
  return p;
}

Superoperator amplitude_damping(double gamma) {
  ModelParams p = make_params(1, 0.0, 0.0, 1.0, gamma);
  return liouvillian(p);
}

// Raw eigendecomposition with left columns matched greedily to conj(λ_k);
// feeds biorthonormalize the same way diagonalize does internally.
void raw_eigensystem(const Matrix& m, Vector& evals, Matrix& right,
                     Matrix& left) {
  Eigen::ComplexEigenSolver<Matrix> es_r(m);
  Eigen::ComplexEigenSolver<Matrix> es_l(m.adjoint());
  evals = es_r.eigenvalues();
  right = es_r.eigenvectors();
  const int n = int(m.rows());
  left.resize(n, n);
  std::vector<bool> used(n, false);
  for (int k = 0; k < n; ++k) {
    int pick = -1;
    double best = 1e300;
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = std::abs(es_l.eigenvalues()(j) - std::conj(evals(k)));
      if (d < best) {
        best = d;
        pick = j;
      }
    }
    used[pick] = true;
    left.col(k) = es_l.eigenvectors().col(pick);
  }
}

}  // namespace

TEST_CASE("diagonalize amplitude damping") {
  const LiouvilleSpectrum s = diagonalize(amplitude_damping(1.0));
  REQUIRE(s.n_modes() == 4);
  CHECK(s.d_s == 1);
  CHECK(std::abs(s.eigenvalues(0)) < 1e-12);
  CHECK(s.eigenvalues(1).real() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(s.eigenvalues(2).real() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(s.eigenvalues(3).real() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(s.biorthonormality_residual() < 1e-10);

  SUBCASE("steady state is the dark state |down><down|") {
    const DensityMatrix inf = steady_state(s);
    CHECK(std::abs(inf.mat()(1, 1) - Complex(1.0)) < 1e-10);
    CHECK(std::abs(inf.mat()(0, 0)) < 1e-10);
  }
  SUBCASE("real-eigenvalue modes are hermitian") {
    for (int k = 0; k < 4; ++k)
      if (std::abs(s.eigenvalues(k).imag()) <= s.tol_zero)
        CHECK(hermiticity_residual(s.right_mode(k)) < 1e-8);
  }
}

TEST_CASE("diagonalize zero generator") {
  Superoperator m{Matrix::Zero(4, 4)};
  const LiouvilleSpectrum s = diagonalize(m);
  CHECK(s.d_s == 4);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(s.eigenvalues(k)) < 1e-12);
  CHECK_THROWS_AS(steady_state(s), DegenerateSteadyState);
}

TEST_CASE("spectrum ordering and pairing at N=2") {
  const LiouvilleSpectrum s =
      diagonalize(liouvillian(make_params(2, 1.0, 1.25, 1.0, 1.0)));
  CHECK(s.d_s == 1);
  for (int k = 1; k < s.n_modes(); ++k) {
    CHECK(s.eigenvalues(k).real() <= s.eigenvalues(k - 1).real() + 1e-12);
    CHECK(s.eigenvalues(k).real() <= s.tol_zero);
  }
  SUBCASE("conjugate pairs adjacent, +Im first, modes adjoint-related") {
    for (int k = 0; k < s.n_modes(); ++k) {
      if (s.eigenvalues(k).imag() <= s.tol_zero) continue;
      REQUIRE(k + 1 < s.n_modes());
      CHECK(std::abs(s.eigenvalues(k + 1) - std::conj(s.eigenvalues(k))) <
            1e-9);
      const Matrix rk = s.right_mode(k);
      const Matrix rk1 = s.right_mode(k + 1);
      CHECK((rk1 - rk.adjoint()).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  SUBCASE("spectral reconstruction of the generator") {
    const Superoperator m = liouvillian(make_params(2, 1.0, 1.25, 1.0, 1.0));
    const Matrix recon =
        s.right * s.eigenvalues.asDiagonal() * s.left.adjoint();
    CHECK((recon - m.m).norm() < 1e-7);
  }
}

TEST_CASE("overlaps and reconstruct") {
  const LiouvilleSpectrum s =
      diagonalize(liouvillian(make_params(2, 1.0, 1.25, 1.0, 1.0)));
  std::mt19937 rng(7);

  SUBCASE("steady state has c_1 = 1, decaying overlaps vanish") {
    const Vector c = overlaps(s, steady_state(s).mat());
    CHECK(std::abs(c(0) - Complex(1.0)) < 1e-8);
    for (int k = 1; k < s.n_modes(); ++k) CHECK(std::abs(c(k)) < 1e-8);
  }
  SUBCASE("completeness: reconstruct(overlaps(rho)) = rho") {
    for (int trial = 0; trial < 10; ++trial) {
      const DensityMatrix rho = testutil::random_density(4, rng);
      const Matrix back = reconstruct(s, overlaps(s, rho.mat()));
      CHECK((back - rho.mat()).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  SUBCASE("adjoint swaps conjugate-pair coefficients") {
    const Matrix a = testutil::random_complex(4, 4, rng);
    const Vector c = overlaps(s, a);
    const Vector cd = overlaps(s, a.adjoint());
    for (int k = 0; k < s.n_modes(); ++k) {
      if (std::abs(s.eigenvalues(k).imag()) <= s.tol_zero) {
        CHECK(std::abs(cd(k) - std::conj(c(k))) < 1e-8);
      } else if (s.eigenvalues(k).imag() > 0) {
        REQUIRE(k + 1 < s.n_modes());
        CHECK(std::abs(cd(k) - std::conj(c(k + 1))) < 1e-8);
        CHECK(std::abs(cd(k + 1) - std::conj(c(k))) < 1e-8);
      }
    }
  }
}

TEST_CASE("biorthonormalize") {
  SUBCASE("nondegenerate spectrum") {
    Vector evals;
    Matrix right, left;
    const Superoperator m =
        liouvillian(make_params(2, 0.9, 0.7, 1.0, 0.8));
    raw_eigensystem(m.m, evals, right, left);
    biorthonormalize(evals, right, left);
    const Matrix gram = left.adjoint() * right;
    CHECK((gram - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("two identical damping blocks: degenerate Gram repair") {
    const Matrix block = amplitude_damping(1.0).m;
    Matrix m = Matrix::Zero(8, 8);
    m.topLeftCorner(4, 4) = block;
    m.bottomRightCorner(4, 4) = block;
    Vector evals;
    Matrix right, left;
    raw_eigensystem(m, evals, right, left);
    biorthonormalize(evals, right, left);
    const Matrix gram = left.adjoint() * right;
    CHECK((gram - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("idempotence on already-normalized input") {
    Vector evals;
    Matrix right, left;
    const Superoperator m =
        liouvillian(make_params(2, 0.9, 0.7, 1.0, 0.8));
    raw_eigensystem(m.m, evals, right, left);
    biorthonormalize(evals, right, left);
    const Matrix r2 = right, l2 = left;
    Matrix right_b = right, left_b = left;
    biorthonormalize(evals, right_b, left_b);
    CHECK((right_b - r2).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((left_b - l2).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("gamma=0 closed system reports full degeneracy") {
  const LiouvilleSpectrum s =
      diagonalize(liouvillian(make_params(1, 0.0, 0.0, 1.0, 0.0)));
  CHECK(s.d_s == 4);
  CHECK_THROWS_AS(steady_state(s), DegenerateSteadyState);
}

TEST_CASE("steady state residual at N=3 model parameters") {
  const ModelParams p = make_params(3, 1.0, 1.25, 1.0, 1.0);
  const Superoperator m = liouvillian(p);
  const LiouvilleSpectrum s = diagonalize(m);
  CHECK(s.d_s == 1);
  const DensityMatrix inf = steady_state(s);
  CHECK((m.m * vec(inf.mat())).cwiseAbs().maxCoeff() < 1e-8);
}

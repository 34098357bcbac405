#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relaxctl/operators.hpp"
#include "test_util.hpp"

using namespace relaxctl;
using testutil::random_hermitian;
using testutil::random_unitary;

namespace {
const Complex kI(0, 1);
}

TEST_CASE("pauli_on_site places single-qubit operators") {
  SUBCASE("z on a single qubit") {
    const Matrix z = pauli_on_site(PauliAxis::Z, 1, 1);
    CHECK(z(0, 0) == Complex(1));
    CHECK(z(1, 1) == Complex(-1));
    CHECK(std::abs(z(0, 1)) == 0);
  }
  SUBCASE("x on site 2 of 2 is I otimes sigma_x") {
    const Matrix m = pauli_on_site(PauliAxis::X, 2, 2);
    const Matrix expect = kron(Matrix::Identity(2, 2), pauli(PauliAxis::X));
    CHECK((m - expect).cwiseAbs().maxCoeff() == 0);
  }
  SUBCASE("lowering operator maps up to down") {
    // |up> = (1,0), |down> = (0,1): single nonzero entry at (1,0)
    const Matrix sm = pauli_on_site(PauliAxis::Minus, 1, 1);
    CHECK(sm(1, 0) == Complex(1));
    CHECK(std::abs(sm(0, 0)) + std::abs(sm(0, 1)) + std::abs(sm(1, 1)) == 0);
  }
  SUBCASE("site out of range throws") {
    CHECK_THROWS_AS(pauli_on_site(PauliAxis::Z, 0, 2), std::out_of_range);
    CHECK_THROWS_AS(pauli_on_site(PauliAxis::Z, 3, 2), std::out_of_range);
  }
}

TEST_CASE("pauli algebra") {
  SUBCASE("distinct sites commute") {
    for (int n = 2; n <= 3; ++n)
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
          if (i == j) continue;
          const Matrix a = pauli_on_site(PauliAxis::X, i, n);
          const Matrix b = pauli_on_site(PauliAxis::Y, j, n);
          CHECK((a * b - b * a).cwiseAbs().maxCoeff() < 1e-14);
        }
  }
  SUBCASE("same site: sigma_x sigma_y = i sigma_z") {
    for (int n = 1; n <= 3; ++n)
      for (int i = 1; i <= n; ++i) {
        const Matrix lhs = pauli_on_site(PauliAxis::X, i, n) *
                           pauli_on_site(PauliAxis::Y, i, n);
        const Matrix rhs = kI * pauli_on_site(PauliAxis::Z, i, n);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
      }
  }
}

TEST_CASE("trace_inner") {
  const Matrix i2 = Matrix::Identity(2, 2);
  CHECK(trace_inner(i2, i2) == Complex(2));
  CHECK(std::abs(trace_inner(pauli(PauliAxis::X), pauli(PauliAxis::Y))) <
        1e-15);
  CHECK(trace_inner(pauli(PauliAxis::Z), pauli(PauliAxis::Z)) == Complex(2));

  SUBCASE("trace_inner(A, A) is real nonnegative") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix a = testutil::random_complex(6, 6, rng);
      const Complex v = trace_inner(a, a);
      CHECK(std::abs(v.imag()) < 1e-12 * std::abs(v));
      CHECK(v.real() >= 0);
    }
  }
}

TEST_CASE("hermitian_eig") {
  SUBCASE("identity and sigma_z") {
    const HermitianEig ei = hermitian_eig(Matrix::Identity(2, 2));
    CHECK(ei.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(ei.eigenvalues(1) == doctest::Approx(1.0));
    const HermitianEig ez = hermitian_eig(pauli(PauliAxis::Z));
    CHECK(ez.eigenvalues(0) == doctest::Approx(-1.0));
    CHECK(ez.eigenvalues(1) == doctest::Approx(1.0));
  }
  SUBCASE("reconstruction and unitarity, random 8x8") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix a = random_hermitian(8, rng);
      const HermitianEig e = hermitian_eig(a);
      const Matrix recon = e.eigenvectors * e.eigenvalues.asDiagonal() *
                           e.eigenvectors.adjoint();
      CHECK((recon - a).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((e.eigenvectors.adjoint() * e.eigenvectors -
             Matrix::Identity(8, 8))
                .cwiseAbs()
                .maxCoeff() < 1e-10);
      for (int k = 1; k < 8; ++k)
        CHECK(e.eigenvalues(k) >= e.eigenvalues(k - 1));
    }
  }
  SUBCASE("spectrum invariant under unitary conjugation") {
    std::mt19937 rng(17);
    const Matrix a = random_hermitian(6, rng);
    const Matrix u = random_unitary(6, rng);
    const HermitianEig e1 = hermitian_eig(a);
    const HermitianEig e2 = hermitian_eig((u * a * u.adjoint()).eval());
    CHECK((e1.eigenvalues - e2.eigenvalues).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("non-hermitian input rejected") {
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(hermitian_eig(bad), std::invalid_argument);
  }
}

TEST_CASE("DensityMatrix validation") {
  CHECK_NOTHROW(DensityMatrix::maximally_mixed(4));
  CHECK(DensityMatrix::maximally_mixed(4).purity() == doctest::Approx(0.25));

  SUBCASE("all_down is the last basis projector") {
    const DensityMatrix rho = DensityMatrix::all_down(2);
    CHECK(rho.mat()(3, 3) == Complex(1));
    CHECK(std::abs(rho.mat()(0, 0)) == 0);
    CHECK(rho.purity() == doctest::Approx(1.0));
  }
  SUBCASE("trace violation rejected") {
    CHECK_THROWS_AS(DensityMatrix(Matrix::Identity(2, 2)),
                    std::invalid_argument);
  }
  SUBCASE("non-hermitian rejected") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = 0.3;
    CHECK_THROWS_AS(DensityMatrix{m}, std::invalid_argument);
  }
  SUBCASE("negative eigenvalue rejected") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.5;
    m(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix{m}, std::invalid_argument);
  }
  SUBCASE("pure state from vector") {
    std::mt19937 rng(3);
    const Vector psi = testutil::random_pure(8, rng);
    const DensityMatrix rho = DensityMatrix::pure(psi);
    CHECK(rho.purity() == doctest::Approx(1.0));
  }
}

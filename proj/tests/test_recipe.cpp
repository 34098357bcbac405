#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relaxctl/recipe.hpp"
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

const LiouvilleSpectrum& n2_spectrum() {
  static const LiouvilleSpectrum s =
      diagonalize(liouvillian(make_params(2, 1.0, 1.25, 1.0, 1.0)));
  return s;
}

const LiouvilleSpectrum& damping_spectrum() {
  static const LiouvilleSpectrum s =
      diagonalize(liouvillian(make_params(1, 0.0, 0.0, 1.0, 1.0)));
  return s;
}

}  // namespace

TEST_CASE("close_under_conjugation") {
  const LiouvilleSpectrum& s = n2_spectrum();
  SUBCASE("real eigenvalue: unchanged") {
    CHECK(std::abs(s.eigenvalues(1).imag()) <= s.tol_zero);
    const TargetSet a = close_under_conjugation(TargetSet{{1}}, s);
    CHECK(a.indices == std::vector<int>{1});
  }
  SUBCASE("complex eigenvalue: partner added") {
    // modes 3,4 (0-based 2,3) form the first conjugate pair at N=2
    REQUIRE(s.eigenvalues(2).imag() > s.tol_zero);
    const TargetSet a = close_under_conjugation(TargetSet{{2}}, s);
    CHECK(a.indices == std::vector<int>{2, 3});
  }
  SUBCASE("out of range rejected") {
    CHECK_THROWS_AS(close_under_conjugation(TargetSet{{99}}, s),
                    std::out_of_range);
  }
}

TEST_CASE("project_out") {
  std::mt19937 rng(2);
  Vector c = testutil::random_complex(6, 1, rng);
  SUBCASE("empty target is the identity") {
    CHECK((project_out(c, TargetSet{}) - c).cwiseAbs().maxCoeff() == 0);
  }
  SUBCASE("targeted entries zeroed, rest untouched") {
    const Vector out = project_out(c, TargetSet{{1, 4}});
    CHECK(std::abs(out(1)) == 0);
    CHECK(std::abs(out(4)) == 0);
    CHECK(out(0) == c(0));
    CHECK(out(5) == c(5));
  }
  SUBCASE("amplitude damping, project the population mode") {
    // rho0 = |up><up|; suppressing the lambda=-gamma mode leaves the steady
    // part plus coherence modes only
    const LiouvilleSpectrum& s = damping_spectrum();
    Vector psi_up = Vector::Zero(2);
    psi_up(0) = 1.0;
    const Vector c0 = overlaps(s, DensityMatrix::pure(psi_up).mat());
    const Vector ct = project_out(c0, TargetSet{{3}});
    const Matrix back = reconstruct(s, ct);
    // coherences of |up><up| are zero; after removing the population mode
    // only the steady state remains
    CHECK((back - steady_state(s).mat()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("rescale_alpha_s") {
  const LiouvilleSpectrum& s = n2_spectrum();
  std::mt19937 rng(3);
  const DensityMatrix rho = testutil::random_density(4, rng);
  Vector c = overlaps(s, rho.mat());
  SUBCASE("unit trace gives alpha_s = 1") {
    CHECK(rescale_alpha_s(c, s) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("trace 2 gives alpha_s = 1/2") {
    CHECK(rescale_alpha_s((2.0 * c).eval(), s) ==
          doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("decaying modes are traceless: projection never changes alpha_s") {
    const Vector ct = project_out(c, TargetSet{{1, 2, 3}});
    CHECK(rescale_alpha_s(ct, s) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("vanishing trace rejected") {
    Vector zero = Vector::Zero(s.n_modes());
    CHECK_THROWS_AS(rescale_alpha_s(zero, s), VanishingTrace);
  }
}

TEST_CASE("rescale_alpha") {
  std::mt19937 rng(5);
  SUBCASE("no projection: alpha_plus = 1 recovers rho0") {
    for (int trial = 0; trial < 20; ++trial) {
      const DensityMatrix rho0 = testutil::random_density(4, rng);
      // split rho0 into a "steady-like" part and the remainder, no projection
      const Matrix sigma_s = Matrix::Identity(4, 4) / 4.0;
      const Matrix sigma = rho0.mat() - sigma_s;
      const AlphaDiagnostics d = rescale_alpha(sigma_s, sigma, rho0.purity());
      CHECK(d.alpha_plus == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(d.c <= 1e-12);  // maximally mixed part is never purer than rho0
    }
  }
  SUBCASE("pure rho0 gives C < 0 hence Delta > 0") {
    for (int trial = 0; trial < 20; ++trial) {
      const DensityMatrix rho0 =
          DensityMatrix::pure(testutil::random_pure(4, rng));
      const Matrix sigma_s =
          testutil::random_density(4, rng).mat() * 0.9;  // purity < 1
      const Matrix sigma = testutil::random_hermitian(4, rng);
      const AlphaDiagnostics d =
          rescale_alpha(sigma_s, (sigma - Matrix::Identity(4, 4) *
                                              (sigma.trace() / 4.0)).eval(),
                        rho0.purity());
      CHECK(d.c < 0);
      CHECK(d.delta > 0);
    }
  }
  SUBCASE("degenerate direction rejected") {
    CHECK_THROWS_AS(rescale_alpha(Matrix::Identity(4, 4) / 4.0,
                                  Matrix::Zero(4, 4), 1.0),
                    DegenerateDirection);
  }
  SUBCASE("orthogonal direction with C > 0 has no real root") {
    // B = 0 and C > 0 forces Delta = -AC < 0
    Matrix sigma_s = Matrix::Zero(4, 4);
    sigma_s(0, 0) = sigma_s(1, 1) = 0.5;  // purity 1/2
    Matrix sigma = Matrix::Zero(4, 4);
    sigma(2, 2) = 1.0;
    sigma(3, 3) = -1.0;  // traceless, orthogonal to sigma_s
    CHECK_THROWS_AS(rescale_alpha(sigma_s, sigma, 0.3), NegativeDiscriminant);
  }
}

TEST_CASE("check_reality agrees with the discriminant") {
  std::mt19937 rng(11);
  int geometric_cases = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const DensityMatrix rho0 = testutil::random_density(4, rng);
    const Matrix sigma_s = testutil::random_hermitian(4, rng);
    Matrix sigma = testutil::random_hermitian(4, rng);
    sigma -= Matrix::Identity(4, 4) * (sigma.trace() / 4.0);
    const RealityReport r = check_reality(sigma_s, sigma, rho0);
    CHECK(r.real_roots == (r.delta >= 0));
    if (r.geometric_defined) {
      ++geometric_cases;
      const bool geometric = r.cos2_theta_m < r.cos2_theta + 1e-9;
      CHECK(geometric == r.real_roots);
    }
  }
  CHECK(geometric_cases > 0);
}

TEST_CASE("spectrum_match") {
  std::mt19937 rng(13);
  SUBCASE("idempotent on rho0 itself") {
    const DensityMatrix rho0 = testutil::random_density(6, rng);
    CHECK((spectrum_match(rho0, rho0.mat()) - rho0.mat())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
  SUBCASE("pure rho0 yields the top-eigenvector projector") {
    const DensityMatrix rho0 = DensityMatrix::pure(testutil::random_pure(6, rng));
    const Matrix bar = testutil::random_density(6, rng).mat();
    const Matrix out = spectrum_match(rho0, bar);
    const HermitianEig e = hermitian_eig(bar);
    const Vector top = e.eigenvectors.col(5);
    CHECK((out - top * top.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("sorted spectra equal for random inputs") {
    const DensityMatrix rho0 = testutil::random_density(6, rng);
    const Matrix bar = testutil::random_hermitian(6, rng);
    const Matrix out = spectrum_match(rho0, bar);
    const HermitianEig e0 = hermitian_eig(rho0.mat());
    const HermitianEig eo = hermitian_eig(out);
    CHECK((e0.eigenvalues - eo.eigenvalues).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("cost") {
  const LiouvilleSpectrum& s = n2_spectrum();
  const DensityMatrix rho0 = DensityMatrix::all_down(2);
  SUBCASE("empty target costs zero") {
    CHECK(cost(rho0.mat(), TargetSet{}, s) == 0);
  }
  SUBCASE("generic state has positive cost") {
    CHECK(cost(rho0.mat(), TargetSet{{1, 2, 3}}, s) > 0);
  }
  SUBCASE("projection zeroes the cost exactly") {
    const TargetSet a = close_under_conjugation(TargetSet{{1, 2}}, s);
    const Vector ct = project_out(overlaps(s, rho0.mat()), a);
    CHECK(cost(reconstruct(s, ct), a, s) < 1e-12);
  }
}

TEST_CASE("suppress_modes") {
  const LiouvilleSpectrum& s = n2_spectrum();
  const DensityMatrix rho0 = DensityMatrix::all_down(2);

  SUBCASE("empty target converges immediately to rho0") {
    const SuppressionResult r = suppress_modes(rho0, s, TargetSet{});
    CHECK(r.converged);
    CHECK(r.n_iterations == 1);
    CHECK((r.rho_perp_mat - rho0.mat()).cwiseAbs().maxCoeff() < 1e-8);
  }

  SUBCASE("per-iteration invariants on a converging run") {
    const TargetSet a =
        close_under_conjugation(TargetSet::slowest_decaying(3), s);
    const SuppressionResult r = suppress_modes(rho0, s, a);
    CHECK(r.converged);
    CHECK(r.final_cost <= 1e-6);
    REQUIRE(!r.cost_history.empty());
    for (size_t i = 0; i < r.cost_history.size(); ++i) {
      CHECK(r.trace_residual_history[i] <= 1e-9);
      CHECK(r.purity_residual_history[i] <= 1e-9);
      CHECK(r.discriminant_history[i] > 0);  // pure initial state
    }
    // final state is a valid density matrix isospectral to rho0
    const DensityMatrix perp = r.rho_perp();
    const HermitianEig e0 = hermitian_eig(rho0.mat());
    const HermitianEig ep = hermitian_eig(perp.mat());
    CHECK((e0.eigenvalues - ep.eigenvalues).cwiseAbs().maxCoeff() < 1e-8);
  }

  SUBCASE("best root never loses to either fixed root") {
    const TargetSet a =
        close_under_conjugation(TargetSet::slowest_decaying(3), s);
    SuppressionConfig one;
    one.max_iterations = 1;
    one.epsilon = 1e-300;  // force a full single iteration
    SuppressionConfig cp = one, cm = one, cb = one;
    cp.root_choice = RootChoice::Plus;
    cm.root_choice = RootChoice::Minus;
    cb.root_choice = RootChoice::Best;
    const double plus = suppress_modes(rho0, s, a, cp).final_cost;
    const double minus = suppress_modes(rho0, s, a, cm).final_cost;
    const double best = suppress_modes(rho0, s, a, cb).final_cost;
    CHECK(best <= plus + 1e-12);
    CHECK(best <= minus + 1e-12);
  }

  SUBCASE("slowdown target stagnates with cost near 1e-1") {
    const TargetSet a = close_under_conjugation(
        TargetSet::all_decaying_except_slowest(s), s);
    const SuppressionResult r = suppress_modes(rho0, s, a);
    CHECK_FALSE(r.converged);
    CHECK(r.final_cost > 1e-6);
    CHECK(r.final_cost < 1.0);
    // stopped by the stagnation rule, not the iteration cap
    CHECK(r.n_iterations < 10000);
  }

  SUBCASE("stagnation rule fires exactly per its definition") {
    const TargetSet a = close_under_conjugation(
        TargetSet::all_decaying_except_slowest(s), s);
    SuppressionConfig cfg;
    const SuppressionResult r = suppress_modes(rho0, s, a, cfg);
    const int i = r.n_iterations;
    REQUIRE(i > cfg.delta_iter);
    const double ci = r.cost_history[i - 1];
    const double cprev = r.cost_history[i - 1 - cfg.delta_iter];
    CHECK(std::abs(ci - cprev) / std::max(cprev, 1e-300) <
          cfg.stagnation_p);
    // and did not fire one step earlier
    const double ci1 = r.cost_history[i - 2];
    const double cprev1 = r.cost_history[i - 2 - cfg.delta_iter];
    CHECK(std::abs(ci1 - cprev1) / std::max(cprev1, 1e-300) >=
          cfg.stagnation_p);
  }

  SUBCASE("invalid config rejected") {
    SuppressionConfig bad;
    bad.epsilon = 0;
    CHECK_THROWS_AS(suppress_modes(rho0, s, TargetSet{}, bad),
                    std::invalid_argument);
  }
}

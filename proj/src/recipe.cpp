#include "relaxctl/recipe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relaxctl {

void SuppressionConfig::validate() const {
  if (epsilon <= 0) throw std::invalid_argument("SuppressionConfig: epsilon > 0");
  if (max_iterations < 1)
    throw std::invalid_argument("SuppressionConfig: max_iterations >= 1");
  if (delta_iter < 1)
    throw std::invalid_argument("SuppressionConfig: delta_iter >= 1");
}

bool TargetSet::contains(int k) const {
  return std::binary_search(indices.begin(), indices.end(), k);
}

TargetSet TargetSet::slowest_decaying(int n) {
  TargetSet a;
  for (int k = 1; k < n; ++k) a.indices.push_back(k);  // 0-based: modes 2..n
  return a;
}

TargetSet TargetSet::all_decaying_except_slowest(const LiouvilleSpectrum& s) {
  int keep_upto = s.d_s;  // 0-based index of the slowest decaying mode
  if (keep_upto + 1 < s.n_modes() &&
      std::abs(s.eigenvalues(keep_upto).imag()) > s.tol_zero &&
      std::abs(s.eigenvalues(keep_upto + 1) -
               std::conj(s.eigenvalues(keep_upto))) <= 1e-9)
    ++keep_upto;  // complex λ₂: keep its conjugate partner as well
  TargetSet a;
  for (int k = keep_upto + 1; k < s.n_modes(); ++k) a.indices.push_back(k);
  return a;
}

TargetSet close_under_conjugation(const TargetSet& a,
                                  const LiouvilleSpectrum& s) {
  std::vector<int> out = a.indices;
  for (int k : a.indices) {
    if (k < 0 || k >= s.n_modes())
      throw std::out_of_range("TargetSet index out of range");
    const Complex w = s.eigenvalues(k);
    if (std::abs(w.imag()) <= s.tol_zero) continue;
    int partner = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int m = 0; m < s.n_modes(); ++m) {
      const double d = std::abs(s.eigenvalues(m) - std::conj(w));
      if (d < best) {
        best = d;
        partner = m;
      }
    }
    if (partner >= 0 && best <= 1e-6) out.push_back(partner);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return {std::move(out)};
}

Vector project_out(const Vector& c, const TargetSet& a) {
  Vector out = c;
  for (int k : a.indices) {
    if (k < 0 || k >= c.size())
      throw std::out_of_range("project_out: index out of range");
    out(k) = 0.0;
  }
  return out;
}

namespace {

Matrix hermitize(const Matrix& a) { return 0.5 * (a + a.adjoint().eval()); }

}  // namespace

double rescale_alpha_s(const Vector& c_tilde, const LiouvilleSpectrum& s) {
  const Complex t = reconstruct(s, c_tilde).trace();
  if (std::abs(t) <= 1e-12) throw VanishingTrace(std::abs(t));
  return 1.0 / t.real();
}

AlphaDiagnostics rescale_alpha(const Matrix& sigma_s_bar, const Matrix& sigma,
                               double purity0) {
  AlphaDiagnostics d;
  d.a = (sigma * sigma).trace().real();
  d.b = (sigma_s_bar * sigma).trace().real();
  d.c = (sigma_s_bar * sigma_s_bar).trace().real() - purity0;
  if (d.a <= 1e-14) throw DegenerateDirection();
  d.delta = d.b * d.b - d.a * d.c;
  if (d.delta < 0) throw NegativeDiscriminant(d.delta);
  const double root = std::sqrt(d.delta);
  d.alpha_plus = (-d.b + root) / d.a;
  d.alpha_minus = (-d.b - root) / d.a;
  return d;
}

RealityReport check_reality(const Matrix& sigma_s_bar, const Matrix& sigma,
                            const DensityMatrix& rho0) {
  RealityReport r;
  r.a = (sigma * sigma).trace().real();
  r.b = (sigma_s_bar * sigma).trace().real();
  r.c = (sigma_s_bar * sigma_s_bar).trace().real() - rho0.purity();
  r.delta = r.b * r.b - r.a * r.c;
  r.real_roots = r.delta >= 0;

  const double d = double(rho0.dim());
  const double ts = sigma_s_bar.trace().real();
  const double n_sq = rho0.purity() - 1.0 / d;
  const double vs_sq =
      (sigma_s_bar * sigma_s_bar).trace().real() - ts * ts / d;
  const double v_sq = r.a;  // σ̃ is traceless
  if (vs_sq > 1e-14 && v_sq > 1e-14) {
    r.cos2_theta = (r.b * r.b) / (vs_sq * v_sq);
    if (r.c > 0) {
      r.cos2_theta_m = 1.0 - n_sq / vs_sq;
      r.geometric_defined = true;
    }
  }
  return r;
}

Matrix spectrum_match(const DensityMatrix& rho0, const Matrix& rho_bar) {
  const HermitianEig e0 = hermitian_eig(rho0.mat());
  const HermitianEig eb = hermitian_eig(hermitize(rho_bar));
  return eb.eigenvectors * e0.eigenvalues.asDiagonal() *
         eb.eigenvectors.adjoint();
}

double cost(const Matrix& rho, const TargetSet& a, const LiouvilleSpectrum& s) {
  const Vector c = overlaps(s, rho);
  double out = 0;
  for (int k : a.indices) out += std::abs(c(k));
  return out;
}

SuppressionResult suppress_modes(const DensityMatrix& rho0,
                                 const LiouvilleSpectrum& s, const TargetSet& a,
                                 const SuppressionConfig& cfg) {
  cfg.validate();
  const double purity0 = rho0.purity();
  SuppressionResult res;
  Matrix rho_cur = rho0.mat();

  // Only the targeted and non-decaying coefficients are needed per iteration;
  // computing those few inner products directly keeps the loop O(|A| d²)
  // instead of a full d²×d² change of basis.
  auto mode_coeff = [&](const Matrix& rho, int k) {
    return s.left.col(k).dot(vec(rho));
  };
  auto target_cost = [&](const Matrix& rho) {
    double out = 0;
    for (int k : a.indices) out += std::abs(mode_coeff(rho, k));
    return out;
  };

  auto run = [&]() {
    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
      // Step 1: zero the targeted coefficients
      Matrix rho_tilde = rho_cur;
      for (int k : a.indices)
        rho_tilde -= mode_coeff(rho_cur, k) * s.right_mode(k);

      // Step 2: trace then purity restoration
      const Complex tr = rho_tilde.trace();
      if (std::abs(tr) <= 1e-12) throw VanishingTrace(std::abs(tr));
      const double alpha_s = 1.0 / tr.real();
      Matrix sigma_s = Matrix::Zero(rho_cur.rows(), rho_cur.cols());
      for (int k = 0; k < s.d_s; ++k)
        if (!a.contains(k)) sigma_s += mode_coeff(rho_cur, k) * s.right_mode(k);
      sigma_s = hermitize(sigma_s);
      const Matrix sigma = hermitize(rho_tilde - sigma_s);
      const Matrix sigma_s_bar = alpha_s * sigma_s;

      double alpha;
      Matrix rho_prime;
      double step_cost;
      AlphaDiagnostics diag;
      if (sigma.norm() < 1e-13) {
        // nothing left in the decaying sector (e.g. empty target on a
        // steady-state input); purity is fixed by the steady part alone
        alpha = 1.0;
        rho_prime = spectrum_match(rho0, sigma_s_bar);
        step_cost = target_cost(rho_prime);
      } else {
        diag = rescale_alpha(sigma_s_bar, sigma, purity0);
        auto evaluate = [&](double al) {
          Matrix rp = spectrum_match(rho0, sigma_s_bar + al * sigma);
          return std::make_pair(target_cost(rp), std::move(rp));
        };
        switch (cfg.root_choice) {
          case RootChoice::Plus: {
            alpha = diag.alpha_plus;
            std::tie(step_cost, rho_prime) = evaluate(alpha);
            break;
          }
          case RootChoice::Minus: {
            alpha = diag.alpha_minus;
            std::tie(step_cost, rho_prime) = evaluate(alpha);
            break;
          }
          case RootChoice::Best: {
            auto [cp, rp] = evaluate(diag.alpha_plus);
            auto [cm, rm] = evaluate(diag.alpha_minus);
            if (cm < cp) {
              alpha = diag.alpha_minus;
              step_cost = cm;
              rho_prime = std::move(rm);
            } else {
              alpha = diag.alpha_plus;
              step_cost = cp;
              rho_prime = std::move(rp);
            }
            break;
          }
        }
      }

      const Matrix rho_bar = sigma_s_bar + alpha * sigma;
      res.cost_history.push_back(step_cost);
      res.alpha_s_history.push_back(alpha_s);
      res.alpha_history.push_back(alpha);
      res.discriminant_history.push_back(diag.delta);
      res.trace_residual_history.push_back(std::abs(rho_bar.trace() - Complex(1.0)));
      res.purity_residual_history.push_back(
          std::abs((rho_bar * rho_bar).trace().real() - purity0));
      res.n_iterations = iter;
      rho_cur = rho_prime;

      if (step_cost <= cfg.epsilon) {
        res.converged = true;
        return;
      }
      if (iter > cfg.delta_iter) {
        const double prev = res.cost_history[iter - 1 - cfg.delta_iter];
        if (std::abs(step_cost - prev) / std::max(prev, 1e-300) <
            cfg.stagnation_p)
          return;
      }
    }
  };

  try {
    run();
  } catch (RecipeError& e) {
    res.final_cost = res.cost_history.empty() ? 0.0 : res.cost_history.back();
    res.rho_perp_mat = rho_cur;
    e.partial = res;
    throw;
  }

  res.final_cost = res.cost_history.empty() ? 0.0 : res.cost_history.back();
  res.rho_perp_mat = rho_cur;
  return res;
}

}  // namespace relaxctl

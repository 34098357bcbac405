#pragma once

#include <optional>
#include <vector>

#include "relaxctl/spectral.hpp"

namespace relaxctl {

enum class RootChoice { Plus, Minus, Best };

struct SuppressionConfig {
  double epsilon = 1e-6;       // cost tolerance
  int delta_iter = 100;        // stagnation window ΔI
  double stagnation_p = 1e-6;  // relative-change threshold
  int max_iterations = 10000;
  RootChoice root_choice = RootChoice::Best;

  void validate() const;
};

/// Indices (0-based) of left modes to suppress. Must be closed under
/// conjugate pairing before use.
struct TargetSet {
  std::vector<int> indices;  // sorted, unique

  bool contains(int k) const;
  bool empty() const { return indices.empty(); }

  /// Modes 2..n in 1-based spectral order, i.e. the n−1 slowest decaying ones.
  static TargetSet slowest_decaying(int n);
  /// Every decaying mode except the slowest one (and its conjugate partner
  /// when the slowest eigenvalue is complex) — the slowdown target.
  static TargetSet all_decaying_except_slowest(const LiouvilleSpectrum& s);
};

struct SuppressionResult {
  Matrix rho_perp_mat;                 // final state, isospectral to ρ₀
  std::vector<double> cost_history;    // one entry per iteration
  std::vector<double> alpha_s_history;
  std::vector<double> alpha_history;
  std::vector<double> discriminant_history;
  std::vector<double> trace_residual_history;   // |Tr(ρ̄⊥) − 1|
  std::vector<double> purity_residual_history;  // |Tr(ρ̄⊥²) − Tr(ρ₀²)|
  double final_cost = 0;
  bool converged = false;
  int n_iterations = 0;
  Matrix unitary;  // filled by the state-preparation layer, may be empty

  DensityMatrix rho_perp() const { return DensityMatrix(rho_perp_mat); }
};

struct RecipeError : std::runtime_error {
  SuppressionResult partial;
  explicit RecipeError(const std::string& what) : std::runtime_error(what) {}
};
struct VanishingTrace : RecipeError {
  explicit VanishingTrace(double trace_abs)
      : RecipeError("projected operator trace magnitude " +
                    std::to_string(trace_abs) + " below 1e-12") {}
};
struct NegativeDiscriminant : RecipeError {
  double delta;
  explicit NegativeDiscriminant(double d)
      : RecipeError("purity-restoration discriminant " + std::to_string(d) +
                    " < 0, no real rescaling root"),
        delta(d) {}
};
struct DegenerateDirection : RecipeError {
  explicit DegenerateDirection()
      : RecipeError("decaying component vanishes, rescaling direction degenerate") {}
};

/// Augment A with the conjugate partner of every complex-eigenvalue member.
TargetSet close_under_conjugation(const TargetSet& a, const LiouvilleSpectrum& s);

/// Zero the coefficients of the targeted modes.
Vector project_out(const Vector& c, const TargetSet& a);

/// α_s = 1/Tr(ρ̃⊥); restores the trace since decaying modes are traceless.
double rescale_alpha_s(const Vector& c_tilde, const LiouvilleSpectrum& s);

struct AlphaDiagnostics {
  double a = 0, b = 0, c = 0;  // quadratic data: A α² + 2B α + C = 0
  double delta = 0;            // B² − AC
  double alpha_plus = 0, alpha_minus = 0;
};

/// Purity-restoring roots α± = (−B ± √(B²−AC))/A for the decaying component.
/// Throws NegativeDiscriminant / DegenerateDirection.
AlphaDiagnostics rescale_alpha(const Matrix& sigma_s_bar, const Matrix& sigma,
                               double purity0);

struct RealityReport {
  double a = 0, b = 0, c = 0, delta = 0;
  double cos2_theta = 0;    // alignment of σ̄_s with the rescaling direction
  double cos2_theta_m = 0;  // tangency threshold, defined when C > 0
  bool geometric_defined = false;
  bool real_roots = false;
};

/// Discriminant and the equivalent geometric tangency criterion.
RealityReport check_reality(const Matrix& sigma_s_bar, const Matrix& sigma,
                            const DensityMatrix& rho0);

/// ρ'⊥ = U₂ D₁ U₂†: keep ρ̄⊥'s eigenvectors, impose ρ₀'s spectrum
/// (both sorted ascending).
Matrix spectrum_match(const DensityMatrix& rho0, const Matrix& rho_bar);

/// C = Σ_{a∈A} |Tr(ℓ_a† ρ)|.
double cost(const Matrix& rho, const TargetSet& a, const LiouvilleSpectrum& s);

/// Iterated project / rescale / spectrum-match loop. Stops on cost ≤ ε,
/// stagnation over delta_iter iterations, or max_iterations.
SuppressionResult suppress_modes(const DensityMatrix& rho0,
                                 const LiouvilleSpectrum& s, const TargetSet& a,
                                 const SuppressionConfig& cfg = {});

}  // namespace relaxctl

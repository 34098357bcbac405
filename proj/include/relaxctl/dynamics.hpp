#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relaxctl/spectral.hpp"

namespace relaxctl {

/// d(ρ₁,ρ₂) = ½ Σ |eig(ρ₁−ρ₂)|.
double trace_distance(const Matrix& rho1, const Matrix& rho2);

/// ρ(t) = Σ_k Tr(ℓ_k†ρ₀) e^{tλ_k} r_k, hermitized.
Matrix evolve_spectral(const LiouvilleSpectrum& s, const Matrix& rho0, double t);

/// Adaptive Dormand–Prince integration of ρ̇ = ℒ[ρ]; oracle for the
/// spectral path. Relative tolerance 1e-10.
Matrix evolve_direct(const Matrix& h, const std::vector<Matrix>& jumps,
                     const Matrix& rho0, double t, double rel_tol = 1e-10);

struct Trajectory {
  std::vector<double> times;
  std::vector<double> distances;  // to the steady state, floored at 1e-14
  std::vector<std::vector<double>> mode_overlaps;  // optional |c_k e^{tλ_k}|
  std::string label;
};

/// 400 log-spaced points over [10⁻², 50]/|Re λ₂| unless overridden.
std::vector<double> default_time_grid(const LiouvilleSpectrum& s,
                                      int points = 400,
                                      double t_min_factor = 1e-2,
                                      double t_max_factor = 50.0);

Trajectory trajectory(const LiouvilleSpectrum& s, const DensityMatrix& rho0,
                      const std::vector<double>& t_grid,
                      const std::string& label = "",
                      bool with_mode_overlaps = false);

/// Serial reference for the distance kernel inside `trajectory`.
std::vector<double> trajectory_distances_serial(const LiouvilleSpectrum& s,
                                                const Matrix& rho0,
                                                const Matrix& rho_inf,
                                                const std::vector<double>& t_grid);
/// OpenMP version; identical values and ordering.
std::vector<double> trajectory_distances(const LiouvilleSpectrum& s,
                                         const Matrix& rho0,
                                         const Matrix& rho_inf,
                                         const std::vector<double>& t_grid);

struct NeverCrossed : std::runtime_error {
  explicit NeverCrossed(double min_dist)
      : std::runtime_error("trajectory never crosses threshold; min distance " +
                           std::to_string(min_dist)) {}
};

/// First crossing time below d_min, log-linear interpolation between
/// bracketing grid points.
double time_to_threshold(const Trajectory& traj, double d_min);

/// Gain = 1 − T⊥/T.
double relative_gain(double t_ref, double t_perp);

/// Least-squares slope of log d(t) over the window d ∈ [d_lo, d_hi].
/// Returns nullopt with fewer than min_points window samples.
std::optional<double> fit_tail_slope(const Trajectory& traj, double d_hi,
                                     double d_lo, int min_points = 5);

}  // namespace relaxctl

#pragma once

#include "relaxctl/dynamics.hpp"
#include "relaxctl/io.hpp"
#include "relaxctl/recipe.hpp"
#include "relaxctl/unitary.hpp"

namespace relaxctl {

struct ExperimentConfig {
  ModelParams model;  // single-point experiments (speedup, local-ops, slowdown)
  SuppressionConfig suppression;
  int n_min = 2;
  int n_max = 12;          // suppress modes 2..n for n in [n_min, n_max]
  double d_min = 1e-3;     // threshold for T, T⊥
  double t_max_marker = 0; // operational-window annotation, 0 = none
  int t_points = 400;
  double t_min_factor = 1e-2;
  double t_max_factor = 50.0;
  std::string output_dir = "out";
  long seed = 0;

  // sweep grid
  int sweep_n_qubits = 4;
  std::vector<double> sweep_alphas{0.5, 1.0, 2.0};
  double sweep_h_min = 0.25, sweep_h_max = 4.0;
  double sweep_j_min = 0.25, sweep_j_max = 4.0;
  int sweep_points = 6;        // per axis
  int sweep_max_modes = 20;    // decaying modes to attempt suppressing
  int sweep_stop_after_failures = 3;

  void validate() const;
  static ExperimentConfig from_key_values(const io::KeyValues& kv);
};

struct SpeedupReport {
  Vector eigenvalues;
  int d_s = 0;
  int n_star = 0;  // largest n reaching epsilon
  Trajectory rho0_traj;
  struct Entry {
    int n = 0;
    std::vector<int> target;  // closed set, 0-based
    SuppressionResult result;
    Trajectory traj;
    double expected_rate = 0;              // |Re λ_{n+1}|
    std::optional<double> fitted_slope;    // of log d(t)
  };
  std::vector<Entry> entries;
};

struct SweepPoint {
  double alpha = 0, h_x = 0, J = 0;
  double T = 0, T_perp = 0, gain = 0;
  int n_star = 0;
  bool converged = false;
  double overlap_a = 0;  // Σ_{k∈A} |c_k(ρ₀)| for the used target set
  std::string error;     // empty on success
};

struct SweepReport {
  std::vector<SweepPoint> points;
};

struct LocalOpsReport {
  Vector eigenvalues;
  Trajectory rho0_traj;
  Trajectory geodesic_traj;  // ρ⊥^(n_max) prepared exactly
  struct Entry {
    int n = 0;
    RestrictedAngles angles;
    double infidelity = 0, grid_infidelity = 0;
    double recipe_cost = 0;
    bool recipe_converged = false;
    Trajectory traj;  // ρ̌⊥^(n)
  };
  std::vector<Entry> entries;
};

struct SlowdownReport {
  double final_cost = 0;
  bool converged = false;
  Trajectory rho0_traj;
  Trajectory parallel_traj;    // ρ∥, exact preparation
  Trajectory restricted_traj;  // ρ̌∥ via the two-angle ansatz
  RestrictedAngles angles;
  double peak_ratio = 0;  // max over t ≥ 1/γ of d(ρ∥)/d(ρ₀)
};

SpeedupReport run_speedup(const ExperimentConfig& cfg);
SweepReport run_sweep(const ExperimentConfig& cfg);
LocalOpsReport run_local_ops(const ExperimentConfig& cfg);
SlowdownReport run_slowdown(const ExperimentConfig& cfg);

/// (t, distance, label) rows; one file per trajectory label.
void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory& traj);

}  // namespace relaxctl

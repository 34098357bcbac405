#include "relaxctl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relaxctl {

namespace {
constexpr double kDistanceFloor = 1e-14;
}

double trace_distance(const Matrix& rho1, const Matrix& rho2) {
  if (rho1.rows() != rho2.rows())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  const Matrix diff = rho1 - rho2;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (diff + diff.adjoint().eval()),
                                           Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Matrix evolve_spectral(const LiouvilleSpectrum& s, const Matrix& rho0,
                       double t) {
  Vector c = overlaps(s, rho0);
  for (Eigen::Index k = 0; k < c.size(); ++k)
    c(k) *= std::exp(t * s.eigenvalues(k));
  const Matrix rho = reconstruct(s, c);
  return 0.5 * (rho + rho.adjoint().eval());
}

Matrix evolve_direct(const Matrix& h, const std::vector<Matrix>& jumps,
                     const Matrix& rho0, double t, double rel_tol) {
  if (t < 0) throw std::invalid_argument("evolve_direct: t >= 0 required");
  if (t == 0) return rho0;

  // Dormand–Prince 5(4) coefficients
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double abs_tol = 1e-12;
  Matrix y = rho0;
  Matrix k1 = apply_generator(h, jumps, y);
  double time = 0;
  double dt = std::min(t, 0.1 / std::max(1.0, k1.norm()));
  int rejects_in_a_row = 0;

  while (time < t) {
    dt = std::min(dt, t - time);
    const Matrix k2 = apply_generator(h, jumps, (y + dt * a21 * k1).eval());
    const Matrix k3 =
        apply_generator(h, jumps, (y + dt * (a31 * k1 + a32 * k2)).eval());
    const Matrix k4 = apply_generator(
        h, jumps, (y + dt * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    const Matrix k5 = apply_generator(
        h, jumps, (y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    const Matrix k6 = apply_generator(
        h, jumps,
        (y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    const Matrix y_next =
        y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Matrix k7 = apply_generator(h, jumps, y_next);
    const Matrix err_mat =
        dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double scale = abs_tol + rel_tol * std::max(y.norm(), y_next.norm());
    const double err = err_mat.norm() / scale;

    if (err <= 1.0) {
      time += dt;
      y = y_next;
      k1 = k7;  // FSAL
      rejects_in_a_row = 0;
    } else if (++rejects_in_a_row > 50) {
      throw std::runtime_error("evolve_direct: step control failed at t = " +
                               std::to_string(time));
    }
    const double factor =
        std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
    dt *= factor;
    if (dt < 1e-14 * t)
      throw std::runtime_error("evolve_direct: step size underflow");
  }
  return 0.5 * (y + y.adjoint().eval());
}

std::vector<double> default_time_grid(const LiouvilleSpectrum& s, int points,
                                      double t_min_factor, double t_max_factor) {
  double rate = 1.0;
  if (s.d_s < s.n_modes())
    rate = std::abs(s.eigenvalues(s.d_s).real());  // slowest decay rate
  if (rate <= 0) rate = 1.0;
  const double t_lo = t_min_factor / rate, t_hi = t_max_factor / rate;
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = t_lo * std::pow(t_hi / t_lo, double(i) / (points - 1));
  return grid;
}

std::vector<double> trajectory_distances_serial(
    const LiouvilleSpectrum& s, const Matrix& rho0, const Matrix& rho_inf,
    const std::vector<double>& t_grid) {
  const Vector c0 = overlaps(s, rho0);
  std::vector<double> out(t_grid.size());
  for (size_t i = 0; i < t_grid.size(); ++i) {
    Vector c = c0;
    for (Eigen::Index k = 0; k < c.size(); ++k)
      c(k) *= std::exp(t_grid[i] * s.eigenvalues(k));
    const Matrix rho = reconstruct(s, c);
    out[i] = std::max(
        trace_distance(0.5 * (rho + rho.adjoint().eval()), rho_inf),
        kDistanceFloor);
  }
  return out;
}

std::vector<double> trajectory_distances(const LiouvilleSpectrum& s,
                                         const Matrix& rho0,
                                         const Matrix& rho_inf,
                                         const std::vector<double>& t_grid) {
  const Vector c0 = overlaps(s, rho0);
  std::vector<double> out(t_grid.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(t_grid.size()); ++i) {
    Vector c = c0;
    for (Eigen::Index k = 0; k < c.size(); ++k)
      c(k) *= std::exp(t_grid[i] * s.eigenvalues(k));
    const Matrix rho = reconstruct(s, c);
    out[i] = std::max(
        trace_distance(0.5 * (rho + rho.adjoint().eval()), rho_inf),
        kDistanceFloor);
  }
  return out;
}

Trajectory trajectory(const LiouvilleSpectrum& s, const DensityMatrix& rho0,
                      const std::vector<double>& t_grid,
                      const std::string& label, bool with_mode_overlaps) {
  for (size_t i = 1; i < t_grid.size(); ++i)
    if (t_grid[i] <= t_grid[i - 1])
      throw std::invalid_argument("trajectory: times must be strictly increasing");
  const DensityMatrix rho_inf = steady_state(s);
  Trajectory traj;
  traj.label = label;
  traj.times = t_grid;
  traj.distances = trajectory_distances(s, rho0.mat(), rho_inf.mat(), t_grid);
  if (with_mode_overlaps) {
    const Vector c0 = overlaps(s, rho0.mat());
    traj.mode_overlaps.resize(t_grid.size());
    for (size_t i = 0; i < t_grid.size(); ++i) {
      traj.mode_overlaps[i].resize(c0.size());
      for (Eigen::Index k = 0; k < c0.size(); ++k)
        traj.mode_overlaps[i][k] =
            std::abs(c0(k) * std::exp(t_grid[i] * s.eigenvalues(k)));
    }
  }
  return traj;
}

double time_to_threshold(const Trajectory& traj, double d_min) {
  double min_seen = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const double d = traj.distances[i];
    min_seen = std::min(min_seen, d);
    if (d <= d_min) {
      if (i == 0) return traj.times[0];
      const double d0 = traj.distances[i - 1], d1 = d;
      if (d0 <= d_min || d0 == d1) return traj.times[i];
      // log-linear in distance: exact for a single-mode exponential tail
      const double f = (std::log(d0) - std::log(d_min)) /
                       (std::log(d0) - std::log(d1));
      return traj.times[i - 1] + f * (traj.times[i] - traj.times[i - 1]);
    }
  }
  throw NeverCrossed(min_seen);
}

double relative_gain(double t_ref, double t_perp) {
  if (t_ref <= 0) throw std::invalid_argument("relative_gain: T > 0 required");
  return 1.0 - t_perp / t_ref;
}

std::optional<double> fit_tail_slope(const Trajectory& traj, double d_hi,
                                     double d_lo, int min_points) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const double d = traj.distances[i];
    if (d < d_lo || d > d_hi || d <= kDistanceFloor) continue;
    const double x = traj.times[i], y = std::log(d);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < min_points) return std::nullopt;
  const double denom = n * sxx - sx * sx;
  if (denom == 0) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace relaxctl

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "relaxctl/experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace relaxctl;

namespace {

// Exit codes by error class, per the external-interface contract.
enum ExitCode {
  kOk = 0,
  kUsage = 1,
  kConfigError = 2,
  kRecipeError = 3,
  kSpectralError = 4,
  kRuntimeError = 5,
};

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  int n = -1;         // --n override: n_max for speedup/local-ops, N for model
  double d_min = -1;  // --dmin override
};

ExperimentConfig load_config(const CliOptions& opt) {
  io::KeyValues kv;
  if (!opt.config_path.empty()) kv = io::read_config(opt.config_path);
  ExperimentConfig cfg = ExperimentConfig::from_key_values(kv);
  if (opt.d_min > 0) cfg.d_min = opt.d_min;
  if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  if (opt.n > 0) cfg.n_max = opt.n;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* sub, CliOptions& opt) {
  sub->add_option("--config", opt.config_path, "key = value config file")
      ->check(CLI::ExistingFile);
  sub->add_option("--n", opt.n, "largest suppressed-mode count n");
  sub->add_option("--dmin", opt.d_min, "distance threshold D_min");
  sub->add_option("--out", opt.out_dir, "output directory");
}

int cmd_spectrum(const ExperimentConfig& cfg) {
  const LiouvilleSpectrum sp = diagonalize(liouvillian(cfg.model));
  const fs::path out(cfg.output_dir);
  fs::create_directories(out);
  io::Csv csv;
  csv.header = {"k", "re_lambda", "im_lambda"};
  for (int k = 0; k < sp.n_modes(); ++k)
    csv.add_row({std::to_string(k + 1),
                 io::format_double(sp.eigenvalues(k).real()),
                 io::format_double(sp.eigenvalues(k).imag())});
  csv.write(out / "spectrum.csv");
  std::ofstream(out / "spectrum.json")
      << json{{"d_s", sp.d_s},
              {"tol_zero", sp.tol_zero},
              {"gram_condition", sp.gram_condition},
              {"re_lambda_2", sp.eigenvalues(sp.d_s).real()},
              {"biorthonormality_residual", sp.biorthonormality_residual()}}
             .dump(2)
      << "\n";
  std::cout << "d_s=" << sp.d_s
            << " re_lambda_2=" << io::format_double(sp.eigenvalues(sp.d_s).real())
            << "\n";
  return kOk;
}

int cmd_suppress(const ExperimentConfig& cfg) {
  const LiouvilleSpectrum sp = diagonalize(liouvillian(cfg.model));
  const DensityMatrix rho0 = DensityMatrix::all_down(cfg.model.n_qubits);
  const TargetSet a =
      close_under_conjugation(TargetSet::slowest_decaying(cfg.n_max), sp);
  const SuppressionResult r = suppress_modes(rho0, sp, a, cfg.suppression);

  const fs::path out(cfg.output_dir);
  fs::create_directories(out);
  io::Csv csv;
  csv.header = {"iteration", "cost"};
  for (size_t i = 0; i < r.cost_history.size(); ++i)
    csv.add_row({std::to_string(i + 1), io::format_double(r.cost_history[i])});
  csv.write(out / "cost_history.csv");
  std::ofstream(out / "suppress.json")
      << json{{"n", cfg.n_max},
              {"target", a.indices},
              {"final_cost", r.final_cost},
              {"converged", r.converged},
              {"n_iterations", r.n_iterations}}
             .dump(2)
      << "\n";
  std::cout << "final_cost=" << io::format_double(r.final_cost)
            << " converged=" << (r.converged ? "1" : "0")
            << " iterations=" << r.n_iterations << "\n";
  return kOk;
}

int cmd_evolve(const ExperimentConfig& cfg) {
  const LiouvilleSpectrum sp = diagonalize(liouvillian(cfg.model));
  const DensityMatrix rho0 = DensityMatrix::all_down(cfg.model.n_qubits);
  const std::vector<double> grid =
      default_time_grid(sp, cfg.t_points, cfg.t_min_factor, cfg.t_max_factor);
  const Trajectory traj = trajectory(sp, rho0, grid, "rho0");
  const fs::path out(cfg.output_dir);
  fs::create_directories(out);
  write_trajectory_csv(out / "traj_rho0.csv", traj);
  const double t = time_to_threshold(traj, cfg.d_min);
  std::cout << "T(" << io::format_double(cfg.d_min)
            << ")=" << io::format_double(t) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relaxation-timescale control for Markovian open quantum systems"};
  app.require_subcommand(1);

  CliOptions opt;
  CLI::App* spectrum = app.add_subcommand("spectrum", "Liouvillian eigenvalues");
  CLI::App* suppress =
      app.add_subcommand("suppress", "mode-suppression recipe for one n");
  CLI::App* evolve = app.add_subcommand("evolve", "initial-state trajectory");
  CLI::App* speedup =
      app.add_subcommand("speedup", "mode suppression for n = n_min..n_max");
  CLI::App* sweep = app.add_subcommand("sweep", "relative-gain parameter sweep");
  CLI::App* local_ops =
      app.add_subcommand("local-ops", "restricted two-angle preparations");
  CLI::App* slowdown =
      app.add_subcommand("slowdown", "suppress all but the slowest mode");
  for (CLI::App* sub :
       {spectrum, suppress, evolve, speedup, sweep, local_ops, slowdown})
    add_common(sub, opt);

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = load_config(opt);
    if (spectrum->parsed()) return cmd_spectrum(cfg);
    if (suppress->parsed()) return cmd_suppress(cfg);
    if (evolve->parsed()) return cmd_evolve(cfg);
    if (speedup->parsed()) {
      const SpeedupReport rep = run_speedup(cfg);
      std::cout << "n_star=" << rep.n_star << " d_s=" << rep.d_s << "\n";
      return kOk;
    }
    if (sweep->parsed()) {
      const SweepReport rep = run_sweep(cfg);
      int failed = 0;
      for (const auto& p : rep.points)
        if (!p.error.empty()) ++failed;
      std::cout << "points=" << rep.points.size() << " failed=" << failed
                << "\n";
      return kOk;
    }
    if (local_ops->parsed()) {
      const LocalOpsReport rep = run_local_ops(cfg);
      std::cout << "runs=" << rep.entries.size() << "\n";
      return kOk;
    }
    if (slowdown->parsed()) {
      const SlowdownReport rep = run_slowdown(cfg);
      std::cout << "final_cost=" << io::format_double(rep.final_cost)
                << " peak_ratio=" << io::format_double(rep.peak_ratio) << "\n";
      return kOk;
    }
  } catch (const RecipeError& e) {
    std::cerr << "recipe error: " << e.what() << "\n";
    return kRecipeError;
  } catch (const DefectiveLiouvillian& e) {
    std::cerr << "spectral error: " << e.what() << "\n";
    return kSpectralError;
  } catch (const DegenerateSteadyState& e) {
    std::cerr << "spectral error: " << e.what() << "\n";
    return kSpectralError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsage;
}

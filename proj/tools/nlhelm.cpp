// nlhelm: forward solves, coefficient identification, presets and self-checks
// for the axially symmetric nonlinear Helmholtz problem on a spherical shell.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "nlhelm/errors.hpp"
#include "nlhelm/forward.hpp"
#include "nlhelm/inverse.hpp"
#include "nlhelm/io.hpp"
#include "nlhelm/kernels.hpp"
#include "nlhelm/roundtrip.hpp"
#include "nlhelm/special.hpp"
#include "nlhelm/validate.hpp"

namespace fs = std::filesystem;
using namespace nlhelm;

namespace {

enum Exit : int { kOk = 0, kInput = 1, kSolver = 2, kValidation = 3 };

const json& section(const json& run, const char* name) {
  static const json empty;
  return run.contains(name) ? run[name] : empty;
}

ForwardConfig forward_from_run(const json& run) {
  return forward_config_from_json(run.contains("forward") ? run["forward"] : run);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

bool is_linear_plane_wave(const ForwardConfig& cfg) {
  return cfg.eps.is_constant() && cfg.eps.constant_value() == 0.0 && cfg.nu.is_constant() &&
         cfg.nu.constant_value() == 1.0 && cfg.boundary.kind == BoundarySpec::Kind::plane_wave;
}

void report_linear_check(const Trajectory& traj) {
  const auto& cfg = traj.config;
  const LegSeries u = traj.coefficients(traj.r.size() - 1);
  const auto j = spherical_bessel_j(cfg.N, cfg.k * cfg.R1);
  double err = 0.0;
  for (std::size_t l = 0; l <= cfg.N; ++l) {
    err = std::max(err, std::abs(u[l] - (2.0 * static_cast<double>(l) + 1.0) * i_pow(l) * j[l]));
  }
  std::printf("plane-wave check at R1: max |u_l - (2l+1) i^l j_l(kR1)| = %.3e (%s at 1e-6)\n", err,
              err <= 1e-6 ? "pass" : "FAIL");
}

Trajectory run_forward_to(const ForwardConfig& cfg, const fs::path& out) {
  ensure_dir(out);
  const auto start = std::chrono::steady_clock::now();
  Trajectory traj = solve_forward(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_trajectory(out / "trajectory.json", traj);
  write_field_csv(out / "field_R1.csv", traj, to_json(cfg));
  std::printf("forward: %zu accepted, %zu rejected steps, %zu rhs evaluations, %.2f s\n", traj.stats.accepted,
              traj.stats.rejected, traj.stats.rhs_evals, secs);
  std::printf("wrote %s and %s\n", (out / "trajectory.json").c_str(), (out / "field_R1.csv").c_str());
  if (is_linear_plane_wave(cfg)) report_linear_check(traj);
  return traj;
}

void run_inverse_to(const Trajectory& traj, InverseSettings s, const fs::path& out) {
  ensure_dir(out);
  if (!s.intensity_given) s.config.intensity = traj.config.intensity;
  if (s.auto_interval) s.config.interval = estimate_bounds(traj, s.bounds_grid);
  const InverseResult result = invert(traj, s.config);
  json echo{{"forward", to_json(traj.config)}, {"inverse", to_json(s.config)}};
  write_inverse_csv(out / "coefficients.csv", result, s.config.K, echo);
  std::printf("inverse: %zu rings, K=%zu, interval [%g, %g], intensity %s\n", result.rings.size(), s.config.K,
              s.config.interval.alpha, s.config.interval.beta, to_string(s.config.intensity).c_str());
  std::printf("wrote %s\n", (out / "coefficients.csv").c_str());
  if (!s.reference.empty()) {
    std::vector<double> errs;
    for (const auto& ring : result.rings) {
      double e = 0.0;
      for (std::size_t k = 0; k < s.config.K; ++k) e = std::max(e, std::abs(ring.a[k] - s.reference[k]));
      errs.push_back(e);
    }
    std::printf("deviation from reference: median %.3e, max %.3e over %zu rings\n", median(errs),
                *std::max_element(errs.begin(), errs.end()), errs.size());
  }
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const IntensityOutOfRange& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const DomainError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const TableTooSmall& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral forward and inverse solver for the nonlinear Helmholtz equation on a spherical shell"};
  app.require_subcommand(1);

  std::string config_path, traj_path, out_dir, preset_name, report_path;
  std::uint64_t seed = 1;
  bool corrupt_gamma = false;

  auto* fwd = app.add_subcommand("forward", "Integrate from R0 to R1; write trajectory.json and field_R1.csv");
  fwd->add_option("--config", config_path, "Run configuration (JSON)")->required();
  fwd->add_option("--out", out_dir, "Output directory")->required();

  auto* inv = app.add_subcommand("inverse", "Recover Chebyshev coefficients of F from a trajectory");
  inv->add_option("--config", config_path, "Run configuration with an \"inverse\" section (JSON)")->required();
  inv->add_option("--traj", traj_path, "Trajectory JSON written by 'forward'")->required();
  inv->add_option("--out", out_dir, "Output directory")->required();

  auto* rt = app.add_subcommand("roundtrip", "Random Chebyshev F, forward then invert, report ring errors");
  rt->add_option("--config", config_path, "Run configuration (JSON); sections forward, inverse, roundtrip")->required();

  auto* val = app.add_subcommand("validate", "Run the property checks and print a JSON report");
  val->add_option("--seed", seed, "Seed for the randomized checks");
  val->add_option("--report", report_path, "Also write the report to this file");
  val->add_flag("--corrupt-gamma", corrupt_gamma, "Perturb one Gamma entry (negative control)")->group("");

  auto* pre = app.add_subcommand("preset", "Run a built-in experiment end to end");
  pre->add_option("name", preset_name, "experiment1 | experiment2")->required();
  pre->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  if (*fwd) {
    return guarded([&] {
      const json run = load_json_file(config_path);
      run_forward_to(forward_from_run(run), out_dir);
      return kOk;
    });
  }
  if (*inv) {
    return guarded([&] {
      const json run = load_json_file(config_path);
      const InverseSettings s = inverse_settings_from_json(section(run, "inverse"));
      const Trajectory traj = read_trajectory(traj_path);
      run_inverse_to(traj, s, out_dir);
      return kOk;
    });
  }
  if (*rt) {
    return guarded([&] {
      const RoundtripConfig cfg = roundtrip_config_from_json(load_json_file(config_path));
      const RoundtripResult r = run_roundtrip(cfg);
      std::printf("roundtrip: seed %llu, K=%zu, interval [%.6g, %.6g] after %zu forward solve(s)\n",
                  static_cast<unsigned long long>(cfg.seed), cfg.K, r.truth.interval().alpha,
                  r.truth.interval().beta, r.attempts);
      std::printf("a_true:");
      for (double a : r.truth.coeffs()) std::printf(" %s", format_sci(a).c_str());
      std::printf("\nring error max_k |a_k - a_true_k|: median %.3e, max %.3e over %zu rings\n", r.median_error,
                  r.max_error, r.ring_errors.size());
      return kOk;
    });
  }
  if (*val) {
    return guarded([&] {
      const ValidationReport report = run_validate({seed, corrupt_gamma});
      const std::string text = report.to_json().dump(2) + "\n";
      std::cout << text;
      if (!report_path.empty()) write_text(report_path, text);
      std::fprintf(stderr, "validate: %s (kernels: %s)\n", report.passed() ? "all checks passed" : "FAILED",
                   std::string(kernels::isa_name(kernels::active_isa())).c_str());
      return report.passed() ? kOk : kValidation;
    });
  }
  if (*pre) {
    return guarded([&] {
      const json run = preset_config(preset_name);
      const fs::path out(out_dir);
      ensure_dir(out);
      write_text(out / "config.json", run.dump(2) + "\n");
      const Trajectory traj = run_forward_to(forward_from_run(run), out);
      run_inverse_to(traj, inverse_settings_from_json(run["inverse"]), out);
      return kOk;
    });
  }
  return kInput;
}

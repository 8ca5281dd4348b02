#include "kfield/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <sstream>

#include "kfield/csvio.hpp"
#include "kfield/diagnostics.hpp"
#include "kfield/stability.hpp"
#include "kfield/version.hpp"
#include "kfield/wave.hpp"

namespace kfield::cli {

namespace fs = std::filesystem;
using io::format_double;

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

CheckResult error_result(const std::string& name, double tol, const std::string& what) {
  CheckResult r;
  r.name = name;
  r.tolerance = tol;
  r.pass = false;
  r.detail = "error: " + what;
  return r;
}

std::string flags_token(std::uint8_t f) {
  std::string out;
  if (f & dyn::kFlagTurningPoint) out += "turning_point";
  if (f & dyn::kFlagSuperluminal) {
    if (!out.empty()) out += ';';
    out += "superluminal";
  }
  return out;
}

void write_trajectory_csv(const fs::path& path, const dyn::Trajectory& traj,
                          const dyn::GooSequence& goo, const dyn::Particle& particle,
                          const dyn::StepSeries* iso, const dyn::GeodesicReport* geo,
                          const dyn::StepSeries* closure) {
  io::CsvWriter csv("t,x,y,z,vx,vy,vz,goo,p0,iso_res,geo_res_max,eq10_res,flags");
  const double c = traj.c;
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const auto& s = traj.states[i];
    const double g = goo.values[i];
    const double p0 = particle.mass * c / std::sqrt(std::max(1e-300, 1.0 - g));
    const double iso_v = (iso && i > 0 && i - 1 < iso->values.size()) ? iso->values[i - 1] : 0.0;
    const double geo_v = (geo && i < geo->residual.size()) ? geo->residual[i] : 0.0;
    const double clo_v =
        (closure && i > 0 && i - 1 < closure->values.size()) ? closure->values[i - 1] : 0.0;
    csv.row({format_double(s.t), format_double(s.x.x), format_double(s.x.y),
             format_double(s.x.z), format_double(s.v.x), format_double(s.v.y),
             format_double(s.v.z), format_double(g), format_double(p0), format_double(iso_v),
             format_double(geo_v), format_double(clo_v), flags_token(goo.flags[i])});
  }
  csv.write_file(path.string());
}

}  // namespace

std::string resolve_output_dir(const Scenario& s, const RunOptions& opts) {
  if (!opts.output_dir.empty()) return opts.output_dir;
  if (!s.output_dir.empty()) return s.output_dir;
  if (const char* env = std::getenv("KFIELD_OUT"); env && *env) return env;
  return "out";
}

RunReport run_scenario(const Scenario& scenario, const RunOptions& opts) {
  Scenario s = scenario;
  if (opts.seed_override) s.seed = *opts.seed_override;

  RunReport report;
  report.scenario = s.name;
  report.schema_version = s.schema_version;
  report.version = kVersion;
  report.timestamp = utc_timestamp();
  report.seed = s.seed;
  report.scheme = dyn::to_string(s.scheme);
  report.h = s.h;
  report.n = s.n;

  const fs::path out_dir = fs::path(resolve_output_dir(s, opts)) / s.name;
  if (opts.write_artifacts) fs::create_directories(out_dir);

  const bool want_traj = (s.isotropy || s.geodesic || s.p0 || s.closure) &&
                         !opts.dispersion_only && !opts.stability_only;
  const bool want_disp = s.dispersion && !opts.trajectory_only_checks && !opts.stability_only;
  const bool want_stab = s.stability && !opts.trajectory_only_checks && !opts.dispersion_only;

  dyn::Potential potential;
  try {
    potential = build_potential(s);
  } catch (const Error& e) {
    report.checks.push_back(error_result("setup", 0.0, e.what()));
    return report;
  }

  if (want_traj) {
    try {
      const auto traj =
          dyn::integrate_newton(s.particle, potential, s.initial, s.h, s.n, s.scheme, s.c);
      const double energy = dyn::total_energy(s.particle, potential, s.initial);
      const auto metric = dyn::metric_from_energy(s.particle, potential, energy, s.c);
      const auto goo = dyn::goo_on_trajectory(traj);

      std::optional<dyn::StepSeries> iso, closure;
      std::optional<dyn::GeodesicReport> geo;

      if (s.isotropy) {
        auto series = dyn::isotropy_residual(traj, metric, s.isotropy->goo_min);
        CheckResult r;
        r.name = "isotropy";
        r.max_residual = series.max_abs;
        r.tolerance = s.isotropy->tol;
        r.pass = series.max_abs <= r.tolerance;
        r.excluded_steps = series.excluded;
        report.checks.push_back(r);
        iso = std::move(series);
      }
      if (s.geodesic) {
        auto rep = dyn::geodesic_residual(traj, metric, s.particle, s.geodesic->goo_min);
        CheckResult r;
        r.name = "geodesic";
        r.max_residual = rep.max_norm;
        r.tolerance = s.geodesic->tol;
        r.pass = rep.max_norm <= r.tolerance;
        r.excluded_steps = rep.excluded_steps;
        report.checks.push_back(r);
        geo = std::move(rep);
      }
      if (s.p0) {
        auto rep = dyn::four_momentum(traj, metric, s.particle, s.p0->goo_min);
        auto tau = dyn::proper_time(traj, metric, s.particle);
        CheckResult r;
        r.name = "p0";
        r.max_residual = rep.max_rel_deviation;
        r.tolerance = s.p0->tol;
        r.pass = rep.max_rel_deviation <= r.tolerance;
        r.excluded_steps = rep.excluded_steps;
        r.detail = std::string("proper-time convention: ") + tau.consistent;
        report.checks.push_back(r);
      }
      if (s.closure) {
        auto series = dyn::closure_residual_series(traj, metric, s.particle, s.closure->goo_min);
        CheckResult r;
        r.name = "eq10";
        r.max_residual = series.max_abs;
        r.tolerance = s.closure->tol;
        r.pass = series.max_abs <= r.tolerance;
        r.excluded_steps = series.excluded;
        report.checks.push_back(r);
        closure = std::move(series);
      }

      if (opts.write_artifacts) {
        write_trajectory_csv(out_dir / "trajectory.csv", traj, goo, s.particle,
                             iso ? &*iso : nullptr, geo ? &*geo : nullptr,
                             closure ? &*closure : nullptr);
      }
    } catch (const Error& e) {
      const double tol = s.geodesic ? s.geodesic->tol : 0.0;
      report.checks.push_back(error_result("trajectory", tol, e.what()));
    }
  }

  if (want_disp) {
    const auto& spec = *s.dispersion;
    try {
      io::CsvWriter csv("goo,kx,omega_best,phase_velocity,residual");
      double max_rel = 0.0;
      for (double g : spec.goo) {
        wave::Grid1p1 grid;
        grid.nx = spec.nx;
        grid.nt = spec.nt;
        grid.dx = spec.length / spec.nx;
        grid.dt = spec.cfl * grid.dx * std::sqrt(g) / s.c;
        grid.periodic_x = true;
        const auto results = wave::null_dispersion_scan(g, spec.kx, grid, s.c);
        const double v_null = s.c * std::sqrt(g);
        for (const auto& r : results) {
          max_rel = std::max(max_rel, std::abs(r.phase_velocity - v_null) / v_null);
          csv.row({format_double(g), format_double(r.probe.kx), format_double(r.probe.omega),
                   format_double(r.phase_velocity), format_double(r.residual)});
        }
      }
      CheckResult r;
      r.name = "dispersion";
      r.max_residual = max_rel;
      r.tolerance = spec.tol;
      r.pass = max_rel <= spec.tol;
      report.checks.push_back(r);
      if (opts.write_artifacts) csv.write_file((out_dir / "dispersion.csv").string());
    } catch (const Error& e) {
      report.checks.push_back(error_result("dispersion", spec.tol, e.what()));
    }
  }

  if (want_stab) {
    const auto& spec = *s.stability;
    try {
      stab::ScanOptions so;
      so.tolerance = spec.tol;
      so.samples = spec.samples;
      so.seed = s.seed;
      so.lyapunov.horizon = spec.horizon;
      so.lyapunov.renorm_interval = spec.renorm;
      so.lyapunov.step = 1e-2;
      so.lyapunov.convergence_floor = spec.tol;
      so.lyapunov.c = s.c;

      stab::StabilityScan scan;
      if (spec.energies.empty()) {
        // No energy grid: estimate at the scenario's own initial state.
        scan.tolerance = so.tolerance;
        scan.horizon = so.lyapunov.horizon;
        scan.renorm_interval = so.lyapunov.renorm_interval;
        scan.seed = s.seed;
        scan.samples_per_energy = 1;
        stab::StabilityEntry entry;
        entry.energy = dyn::total_energy(s.particle, potential, s.initial);
        try {
          const auto est = stab::max_lyapunov(s.particle, potential, s.initial, so.lyapunov);
          entry.lambda_raw = est.lambda;
          entry.lambda_max = std::max(0.0, est.lambda);
          entry.stable = entry.lambda_max <= so.tolerance;
          entry.converged = est.converged;
        } catch (const Error& e) {
          entry.error = e.what();
        }
        scan.entries.push_back(entry);
      } else {
        scan = stab::stationary_scan(s.particle, potential, spec.energies, so);
      }

      io::CsvWriter csv("E,lambda_max,classification,horizon,renorm,seed");
      bool any_unstable = false, all_stable = true, any_error = false;
      double lambda_peak = 0.0;
      for (const auto& e : scan.entries) {
        const std::string cls = !e.error.empty() ? "error" : (e.stable ? "stable" : "unstable");
        if (!e.error.empty()) any_error = true;
        if (!e.stable && e.error.empty()) any_unstable = true;
        all_stable = all_stable && e.stable;
        lambda_peak = std::max(lambda_peak, e.lambda_max);
        csv.row({format_double(e.energy), format_double(e.lambda_max), cls,
                 format_double(scan.horizon), format_double(scan.renorm_interval),
                 std::to_string(scan.seed)});
      }
      if (opts.write_artifacts) csv.write_file((out_dir / "stability.csv").string());

      CheckResult r;
      r.name = "stability";
      r.tolerance = spec.tol;
      if (any_error) {
        r.pass = false;
        r.detail = "error: some energies failed";
        r.max_residual = lambda_peak;
      } else if (spec.expect == "stable") {
        r.max_residual = lambda_peak;
        r.pass = all_stable;
      } else if (spec.expect == "unstable-band") {
        r.max_residual = lambda_peak;
        r.pass = any_unstable;
        r.detail = any_unstable ? "unstable band present" : "no unstable band found";
      } else {  // expect == "lambda"
        r.max_residual = std::abs(lambda_peak - spec.lambda_expect);
        r.tolerance = spec.lambda_rtol * std::abs(spec.lambda_expect);
        r.pass = r.max_residual <= r.tolerance;
      }
      report.checks.push_back(r);
    } catch (const Error& e) {
      report.checks.push_back(error_result("stability", spec.tol, e.what()));
    }
  }

  // report.json is always written, artifacts or not
  fs::create_directories(out_dir);
  write_report(report, (out_dir / "report.json").string());
  return report;
}

int exit_code_for(const RunReport& report) {
  bool any_fail = false;
  for (const auto& c : report.checks) {
    if (c.detail.rfind("error:", 0) == 0) return 1;
    if (!c.pass) any_fail = true;
  }
  return any_fail ? 2 : 0;
}

}  // namespace kfield::cli

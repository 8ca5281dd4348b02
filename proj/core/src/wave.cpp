#include "kfield/wave.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace kfield::wave {

bool Grid1p1::cfl_ok(double goo, double c) const { return dt <= dx * std::sqrt(goo) / c; }

std::vector<double> sample_probe(const PlaneWaveProbe& probe, const Grid1p1& grid) {
  std::vector<double> f(grid.size());
  for (int it = 0; it < grid.nt; ++it)
    for (int ix = 0; ix < grid.nx; ++ix)
      f[it * grid.nx + ix] =
          probe.amplitude * std::cos(probe.kx * grid.x(ix) - probe.omega * grid.t(it));
  return f;
}

namespace {

double second_diff_x(const std::vector<double>& f, const Grid1p1& g, int it, int ix) {
  const int left = (ix == 0) ? (g.periodic_x ? g.nx - 1 : -1) : ix - 1;
  const int right = (ix == g.nx - 1) ? (g.periodic_x ? 0 : -1) : ix + 1;
  if (left < 0 || right < 0) return 0.0;
  const double* row = f.data() + static_cast<size_t>(it) * g.nx;
  return (row[right] - 2.0 * row[ix] + row[left]) / (g.dx * g.dx);
}

}  // namespace

std::vector<double> apply_k_dalembert(const std::vector<double>& field, double goo,
                                      const Grid1p1& grid, double c) {
  std::vector<double> out(grid.size(), 0.0);
  const double inv_gc2 = 1.0 / (goo * c * c);
  const double inv_dt2 = 1.0 / (grid.dt * grid.dt);
  for (int it = 1; it + 1 < grid.nt; ++it) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const size_t i = static_cast<size_t>(it) * grid.nx + ix;
      const double dtt =
          (field[i + grid.nx] - 2.0 * field[i] + field[i - grid.nx]) * inv_dt2;
      out[i] = inv_gc2 * dtt - second_diff_x(field, grid, it, ix);
    }
  }
  return out;
}

std::vector<double> advance_k_wave(const std::vector<double>& prev,
                                   const std::vector<double>& cur, double goo,
                                   const Grid1p1& grid, double c) {
  if (!grid.cfl_ok(goo, c)) {
    std::ostringstream msg;
    msg << "explicit step unstable: dt = " << grid.dt << " > dx sqrt(g00)/c = "
        << grid.dx * std::sqrt(goo) / c;
    throw StabilityError(msg.str());
  }
  std::vector<double> next(grid.nx, 0.0);
  const double lam2 = goo * c * c * grid.dt * grid.dt / (grid.dx * grid.dx);
  for (int ix = 0; ix < grid.nx; ++ix) {
    const int left = (ix == 0) ? (grid.periodic_x ? grid.nx - 1 : -1) : ix - 1;
    const int right = (ix == grid.nx - 1) ? (grid.periodic_x ? 0 : -1) : ix + 1;
    if (left < 0 || right < 0) {
      next[ix] = 0.0;  // pinned boundary in the non-periodic case
      continue;
    }
    next[ix] = 2.0 * cur[ix] - prev[ix] + lam2 * (cur[right] - 2.0 * cur[ix] + cur[left]);
  }
  return next;
}

double probe_residual(const PlaneWaveProbe& probe, double goo, const Grid1p1& grid, double c) {
  const auto field = sample_probe(probe, grid);
  const auto lf = apply_k_dalembert(field, goo, grid, c);
  double m = 0.0;
  for (int it = 1; it + 1 < grid.nt; ++it) {
    const int x_begin = grid.periodic_x ? 0 : 1;
    const int x_end = grid.periodic_x ? grid.nx : grid.nx - 1;
    for (int ix = x_begin; ix < x_end; ++ix)
      m = std::max(m, std::abs(lf[static_cast<size_t>(it) * grid.nx + ix]));
  }
  return m / std::abs(probe.amplitude);
}

namespace {

// Golden-section minimization of a unimodal function on [lo, hi].
double golden_min(double lo, double hi, int iters, const std::function<double(double)>& f) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<DispersionResult> null_dispersion_scan(double goo, const std::vector<double>& kxs,
                                                   const Grid1p1& grid, double c) {
  std::vector<DispersionResult> out;
  out.reserve(kxs.size());
  const double omega_max = M_PI / grid.dt;  // time Nyquist
  for (double kx : kxs) {
    auto objective = [&](double w) {
      return probe_residual({w, kx, 1.0}, goo, grid, c);
    };
    const double w_best = golden_min(0.0, omega_max, 80, objective);

    DispersionResult r;
    r.probe = {w_best, kx, 1.0};
    r.goo = goo;
    r.residual = objective(w_best);
    r.phase_velocity = (kx != 0.0) ? w_best / kx : 0.0;
    const double vnull = c * std::sqrt(goo);
    const double envelope = std::max(kx * kx * grid.dx * grid.dx, 1e-10);
    r.classification =
        (std::abs(r.phase_velocity - vnull) <= envelope * vnull) ? "null" : "off-shell";
    out.push_back(r);
  }
  return out;
}

std::string classify_probe(const PlaneWaveProbe& probe, double goo, const Grid1p1& grid,
                           double m, double V, double c, double hbar) {
  const double vnull = c * std::sqrt(goo);
  const double pv = (probe.kx != 0.0) ? probe.omega / probe.kx : 0.0;
  const double envelope = std::max(probe.kx * probe.kx * grid.dx * grid.dx, 1e-10);
  if (std::abs(pv - vnull) <= envelope * vnull) return "null";
  if (m > 0.0 && kg_dispersion_residual(probe, V, m, c, hbar) <= 1e-9) return "massive";
  return "off-shell";
}

double kg_dispersion_residual(const PlaneWaveProbe& probe, double V, double m, double c,
                              double hbar) {
  const double E = hbar * probe.omega;
  const double p = hbar * probe.kx;
  const double lhs = (E - V) * (E - V) - c * c * p * p - m * m * c * c * c * c;
  return std::abs(lhs) / (E * E + 1.0);
}

double kg_on_shell_energy(double p, double V, double m, double c) {
  return V + std::sqrt(c * c * p * p + m * m * c * c * c * c);
}

}  // namespace kfield::wave

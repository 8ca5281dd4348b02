#pragma once

#include <string>
#include <vector>

#include "kfield/errors.hpp"

namespace kfield::wave {

/// Uniform 1+1D grid for the scalar wave operator. Space is periodic when
/// the flag is set; fields are stored row-major as field[it * nx + ix].
struct Grid1p1 {
  int nx = 0;
  int nt = 0;
  double dx = 0.0;
  double dt = 0.0;
  bool periodic_x = true;

  size_t size() const { return static_cast<size_t>(nx) * static_cast<size_t>(nt); }
  double x(int ix) const { return ix * dx; }
  double t(int it) const { return it * dt; }

  // Explicit stepping is stable when dt <= dx sqrt(g00) / c.
  bool cfl_ok(double goo, double c) const;
};

struct PlaneWaveProbe {
  double omega = 0.0;
  double kx = 0.0;
  double amplitude = 1.0;
};

// amplitude * cos(kx x - omega t) sampled over the grid.
std::vector<double> sample_probe(const PlaneWaveProbe& probe, const Grid1p1& grid);

/// Scalar wave operator of the constant-g00 background:
///   (1 / (g00 c^2)) d^2/dt^2 - d^2/dx^2
/// with second-order central stencils. Boundary nodes (first/last time
/// slice, and space edges when not periodic) carry zeros in the result.
/// Reduces coefficient-for-coefficient to the flat d'Alembertian at g00 = 1.
std::vector<double> apply_k_dalembert(const std::vector<double>& field, double goo,
                                      const Grid1p1& grid, double c = 1.0);

// One explicit update of the wave equation: given the field at two
// consecutive time slices, produce the next slice with the same stencil.
// Throws StabilityError when the CFL bound is violated.
std::vector<double> advance_k_wave(const std::vector<double>& prev,
                                   const std::vector<double>& cur, double goo,
                                   const Grid1p1& grid, double c = 1.0);

// Max-norm of the operator applied to the probe over interior nodes,
// divided by the probe amplitude.
double probe_residual(const PlaneWaveProbe& probe, double goo, const Grid1p1& grid,
                      double c = 1.0);

struct DispersionResult {
  PlaneWaveProbe probe;
  double goo = 1.0;
  double residual = 0.0;
  double phase_velocity = 0.0;
  std::string classification;  // "null" | "massive" | "off-shell"
};

/// For each wavenumber, find the frequency minimizing the discrete residual
/// (golden-section search below the time Nyquist) and report the phase
/// velocity omega/kx. On these backgrounds the minimizer sits on the
/// discrete null shell, so the phase velocity approaches c sqrt(g00) at
/// second order in dx.
std::vector<DispersionResult> null_dispersion_scan(double goo, const std::vector<double>& kxs,
                                                   const Grid1p1& grid, double c = 1.0);

// Closed-form dispersion residual |(E - V)^2 - c^2 p^2 - m^2 c^4| / (E^2 + 1)
// for a plane wave with E = hbar omega, p = hbar kx.
double kg_dispersion_residual(const PlaneWaveProbe& probe, double V, double m, double c,
                              double hbar);

// Tag a probe: "null" when it sits on the discrete null shell of the
// background (within the second-order envelope), "massive" when it satisfies
// the massive dispersion relation for (m, V) instead, "off-shell" otherwise.
std::string classify_probe(const PlaneWaveProbe& probe, double goo, const Grid1p1& grid,
                           double m, double V, double c = 1.0, double hbar = 1.0);

// On-shell energy E = V + sqrt(c^2 p^2 + m^2 c^4) for momentum p.
double kg_on_shell_energy(double p, double V, double m, double c);

}  // namespace kfield::wave

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kfield/dynamics.hpp"
#include "kfield/potential.hpp"

namespace kfield::cli {

// Per-check configuration for the trajectory checks. goo_min raises the
// exclusion floor on g00 (turning-point windows); 0 means the metric guard
// band alone decides.
struct CheckSpec {
  double tol = 0.0;
  double goo_min = 0.0;
};

struct DispersionSpec {
  double tol = 2e-3;
  std::vector<double> goo = {0.04, 0.25, 0.81};
  std::vector<double> kx = {1.0, 2.0, 3.0};
  int nx = 128;
  int nt = 32;
  double length = 6.283185307179586;  // periodic domain size
  double cfl = 0.5;                   // dt = cfl * dx * sqrt(goo) / c
};

struct StabilitySpec {
  double tol = 1e-2;
  std::vector<double> energies;  // empty: use the scenario's initial energy
  double horizon = 1e3;
  double renorm = 1.0;
  int samples = 8;
  std::string expect = "stable";  // "stable" | "unstable-band" | "lambda"
  double lambda_expect = 0.0;
  double lambda_rtol = 0.01;
};

/// Declarative experiment description consumed by the CLI. Defaults follow
/// the documented table: c = 1, hbar = 1, rk4, h = 1e-3, n = 1000, seed 0.
struct Scenario {
  int schema_version = 1;
  std::string name;

  dyn::Particle particle{};
  dyn::PotentialKind potential_kind = dyn::PotentialKind::Free;
  std::map<std::string, double> potential_params;
  std::vector<double> table_x, table_v;  // user-table samples

  double c = 1.0;
  double hbar = 1.0;

  dyn::Scheme scheme = dyn::Scheme::Rk4;
  double h = 1e-3;
  int n = 1000;
  dyn::State initial{0.0, {0.0, 0.0, 0.0}, {0.5, 0.0, 0.0}};

  std::optional<CheckSpec> isotropy;
  std::optional<CheckSpec> geodesic;
  std::optional<CheckSpec> p0;
  std::optional<CheckSpec> closure;  // serialized under the key "eq10"
  std::optional<DispersionSpec> dispersion;
  std::optional<StabilitySpec> stability;

  std::string output_dir;
  std::uint64_t seed = 0;
};

// Default tolerances, one place: isotropy 1e-3, geodesic 1e-6, p0 1e-8,
// closure 1e-9, dispersion 2e-3, stability 1e-2.
CheckSpec default_check(const std::string& name);

/// Parse and validate a scenario document. Strict mode rejects unknown keys
/// with path-qualified messages. When the document carries no "checks"
/// object, the four trajectory checks are enabled with default tolerances.
Scenario parse_scenario(const std::string& text, bool strict = false);

// Canonical serialization with every effective value filled in;
// parse(serialize(s)) reproduces s.
std::string serialize_scenario(const Scenario& s);

bool operator==(const Scenario& a, const Scenario& b);

dyn::Potential build_potential(const Scenario& s);

}  // namespace kfield::cli

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kfield/dynamics.hpp"

namespace kfield::stab {

/// Maximal Lyapunov exponent estimate from tangent-flow renormalization:
/// the variational equations are integrated alongside the motion and the
/// deviation vector is rescaled every `renorm_interval`; lambda is the mean
/// log stretch per unit time. Checkpoints at half and quarter horizon feed
/// the convergence flag.
struct LyapunovEstimate {
  double lambda = 0.0;          // raw estimate (may be slightly negative)
  double lambda_half = 0.0;     // estimate at half horizon
  double lambda_quarter = 0.0;  // estimate at quarter horizon
  bool converged = true;        // false when the last doubling moved > 10%
};

struct LyapunovOptions {
  double horizon = 1e3;
  double renorm_interval = 1.0;
  double step = 1e-3;
  double convergence_floor = 1e-2;  // absolute slack for the doubling test
  double c = 1.0;
};

LyapunovEstimate max_lyapunov(const dyn::Particle& particle, const dyn::Potential& potential,
                              const dyn::State& initial, const LyapunovOptions& opts = {});

struct StabilityEntry {
  double energy = 0.0;
  double lambda_max = 0.0;  // max over samples, clamped at 0
  double lambda_raw = 0.0;  // unclamped max over samples
  bool stable = false;
  bool converged = true;
  std::string error;  // non-empty when every sample failed
};

struct StabilityScan {
  std::vector<StabilityEntry> entries;  // ordered by energy index
  double tolerance = 1e-2;
  double horizon = 1e3;
  double renorm_interval = 1.0;
  std::uint64_t seed = 0;
  int samples_per_energy = 8;
};

struct ScanOptions {
  LyapunovOptions lyapunov{};
  double tolerance = 1e-2;  // |lambda| <= tolerance declares stable
  int samples = 8;
  std::uint64_t seed = 0;
  int jobs = 1;  // per-energy fan-out; merge order is fixed by energy index
};

/// Per-energy maximal exponent over deterministic seeded samples of initial
/// conditions on the energy shell (phase sampled along the x axis). Failures
/// are recorded per energy and the scan continues.
StabilityScan stationary_scan(const dyn::Particle& particle, const dyn::Potential& potential,
                              const std::vector<double>& energies, const ScanOptions& opts = {});

// Deterministic shell sampler used by the scan (exposed for tests): returns
// up to n states with total energy E, positions jittered over the allowed
// region of the x axis, velocity sign alternating.
std::vector<dyn::State> sample_energy_shell(const dyn::Particle& particle,
                                            const dyn::Potential& potential, double energy,
                                            int n, std::uint64_t seed);

}  // namespace kfield::stab

#include "kfield/stability.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>

#include "kfield/errors.hpp"

namespace kfield::stab {

namespace {

using dyn::Particle;
using dyn::Potential;
using dyn::State;

// Motion plus tangent flow: y = (x, v, dx, dv).
struct AugState {
  Vec3 x, v, tx, tv;
};

AugState rhs(const Particle& p, const Potential& pot, const AugState& y, double t) {
  AugState d;
  d.x = y.v;
  d.v = -(1.0 / p.mass) * pot.gradient(y.x, t);
  d.tx = y.tv;
  const Mat3 H = pot.hessian(y.x, t);
  for (int i = 0; i < 3; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) acc += H[i][j] * y.tx[j];
    d.tv[i] = -acc / p.mass;
  }
  return d;
}

AugState axpy(const AugState& y, double a, const AugState& d) {
  return {y.x + a * d.x, y.v + a * d.v, y.tx + a * d.tx, y.tv + a * d.tv};
}

void rk4_step(const Particle& p, const Potential& pot, AugState& y, double t, double h) {
  const AugState k1 = rhs(p, pot, y, t);
  const AugState k2 = rhs(p, pot, axpy(y, 0.5 * h, k1), t + 0.5 * h);
  const AugState k3 = rhs(p, pot, axpy(y, 0.5 * h, k2), t + 0.5 * h);
  const AugState k4 = rhs(p, pot, axpy(y, h, k3), t + h);
  y.x += (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
  y.v += (h / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
  y.tx += (h / 6.0) * (k1.tx + 2.0 * k2.tx + 2.0 * k3.tx + k4.tx);
  y.tv += (h / 6.0) * (k1.tv + 2.0 * k2.tv + 2.0 * k3.tv + k4.tv);
}

double tangent_norm(const AugState& y) { return std::sqrt(norm2(y.tx) + norm2(y.tv)); }

void check_finite(const AugState& y, double c, double t) {
  const double m = std::max(std::max(norm(y.x), norm(y.v)), tangent_norm(y));
  if (!std::isfinite(m)) throw StepError("non-finite state in tangent flow at t = " + std::to_string(t));
  if (norm(y.v) >= c)
    throw SuperluminalError("|v| >= c in tangent flow at t = " + std::to_string(t));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

LyapunovEstimate max_lyapunov(const Particle& particle, const Potential& potential,
                              const State& initial, const LyapunovOptions& opts) {
  if (opts.horizon <= 0.0 || opts.renorm_interval <= 0.0 || opts.step <= 0.0)
    throw Error("lyapunov horizon, renorm interval and step must be positive");

  AugState y;
  y.x = initial.x;
  y.v = initial.v;
  // Fixed deterministic tangent direction with support on every component.
  y.tx = {1.0, 0.5, 0.25};
  y.tv = {0.25, 0.5, 1.0};
  const double n0 = tangent_norm(y);
  y.tx *= 1.0 / n0;
  y.tv *= 1.0 / n0;

  double t = initial.t;
  double log_sum = 0.0;
  double elapsed = 0.0;

  LyapunovEstimate est;
  const double t_quarter = 0.25 * opts.horizon;
  const double t_half = 0.5 * opts.horizon;

  const int steps_per_interval = std::max(1, static_cast<int>(std::ceil(opts.renorm_interval / opts.step)));
  const double h = opts.renorm_interval / steps_per_interval;

  while (elapsed < opts.horizon - 1e-12) {
    for (int i = 0; i < steps_per_interval; ++i) {
      rk4_step(particle, potential, y, t, h);
      t += h;
    }
    elapsed += opts.renorm_interval;
    check_finite(y, opts.c, t);

    const double nrm = tangent_norm(y);
    log_sum += std::log(nrm);
    y.tx *= 1.0 / nrm;
    y.tv *= 1.0 / nrm;

    if (est.lambda_quarter == 0.0 && elapsed >= t_quarter) est.lambda_quarter = log_sum / elapsed;
    if (est.lambda_half == 0.0 && elapsed >= t_half) est.lambda_half = log_sum / elapsed;
  }
  est.lambda = log_sum / elapsed;

  const double delta = std::abs(est.lambda - est.lambda_half);
  est.converged = !(delta > 0.10 * std::abs(est.lambda) && delta > opts.convergence_floor);
  return est;
}

std::vector<State> sample_energy_shell(const Particle& particle, const Potential& potential,
                                       double energy, int n, std::uint64_t seed) {
  // Expand a symmetric bracket until the potential exceeds E at both ends.
  double L = 1.0;
  while (L < 1e6) {
    const bool lo = potential.value({-L, 0, 0}, 0.0) > energy;
    const bool hi = potential.value({L, 0, 0}, 0.0) > energy;
    if (lo && hi) break;
    L *= 2.0;
  }

  constexpr int kGrid = 2048;
  std::vector<double> allowed;
  for (int i = 0; i <= kGrid; ++i) {
    const double x = -L + 2.0 * L * i / kGrid;
    if (potential.value({x, 0, 0}, 0.0) <= energy) allowed.push_back(x);
  }
  if (allowed.empty())
    throw DomainError("no classically allowed region on the x axis at E = " +
                      std::to_string(energy));

  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<State> out;
  out.reserve(n);
  for (int j = 0; j < n; ++j) {
    const double q = (j + unit(rng)) / n;
    const size_t idx = std::min(allowed.size() - 1, static_cast<size_t>(q * allowed.size()));
    const double x = allowed[idx];
    const double kinetic = energy - potential.value({x, 0, 0}, 0.0);
    const double speed = std::sqrt(std::max(0.0, 2.0 * kinetic / particle.mass));
    State s;
    s.x = {x, 0.0, 0.0};
    s.v = {(j % 2 == 0 ? speed : -speed), 0.0, 0.0};
    out.push_back(s);
  }
  return out;
}

StabilityScan stationary_scan(const Particle& particle, const Potential& potential,
                              const std::vector<double>& energies, const ScanOptions& opts) {
  StabilityScan scan;
  scan.tolerance = opts.tolerance;
  scan.horizon = opts.lyapunov.horizon;
  scan.renorm_interval = opts.lyapunov.renorm_interval;
  scan.seed = opts.seed;
  scan.samples_per_energy = opts.samples;
  scan.entries.resize(energies.size());

  auto run_energy = [&](size_t idx) {
    StabilityEntry entry;
    entry.energy = energies[idx];
    const std::uint64_t seed_e = splitmix64(opts.seed ^ (0x517cc1b727220a95ULL * (idx + 1)));
    double raw = -std::numeric_limits<double>::infinity();
    bool any_ok = false;
    bool all_converged = true;
    std::string last_error;
    try {
      const auto samples =
          sample_energy_shell(particle, potential, energies[idx], opts.samples, seed_e);
      for (const auto& s : samples) {
        try {
          const auto est = max_lyapunov(particle, potential, s, opts.lyapunov);
          raw = std::max(raw, est.lambda);
          all_converged = all_converged && est.converged;
          any_ok = true;
        } catch (const Error& e) {
          last_error = e.what();
        }
      }
    } catch (const Error& e) {
      last_error = e.what();
    }
    if (!any_ok) {
      entry.error = last_error.empty() ? "all samples failed" : last_error;
      entry.stable = false;
    } else {
      entry.lambda_raw = raw;
      entry.lambda_max = std::max(0.0, raw);
      entry.stable = entry.lambda_max <= opts.tolerance;
      entry.converged = all_converged;
    }
    return entry;
  };

  if (opts.jobs > 1) {
    std::vector<std::future<StabilityEntry>> futures;
    futures.reserve(energies.size());
    for (size_t i = 0; i < energies.size(); ++i)
      futures.push_back(std::async(std::launch::async, run_energy, i));
    for (size_t i = 0; i < energies.size(); ++i) scan.entries[i] = futures[i].get();
  } else {
    for (size_t i = 0; i < energies.size(); ++i) scan.entries[i] = run_energy(i);
  }
  return scan;
}

}  // namespace kfield::stab

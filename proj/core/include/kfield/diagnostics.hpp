#pragma once

#include <cstdint>
#include <vector>

#include "kfield/connection.hpp"
#include "kfield/dynamics.hpp"
#include "kfield/metric.hpp"

namespace kfield::dyn {

/// Metric coefficient extended off-trajectory through energy conservation:
/// g00(x) = 2 (E - V(x)) / (m c^2), with analytic gradient. Reproduces the
/// on-trajectory definition v^2/c^2 for every trajectory of energy E in a
/// static potential. Values are validated lazily at evaluation.
geom::KMetricField metric_from_energy(const Particle& particle, const Potential& potential,
                                      double energy, double c = 1.0);

enum StateFlag : std::uint8_t {
  kFlagNone = 0,
  kFlagTurningPoint = 1,  // g00 at or below the singular guard (v ~ 0)
  kFlagSuperluminal = 2,  // g00 at or above 1 (|v| >= c)
};

struct GooSequence {
  std::vector<double> values;       // v_i v^i / c^2 per state
  std::vector<std::uint8_t> flags;  // StateFlag bits per state
  bool any_flagged = false;
};

// g00 along the trajectory from the squared speed. Singular states are
// flagged, never dropped; the sequence is always full length.
GooSequence goo_on_trajectory(const Trajectory& traj);

/// Per-step diagnostic series. Steps that cannot be evaluated (metric out of
/// domain, or g00 below the configured floor) carry 0 and are listed in
/// `excluded`; `max_abs` runs over included steps only.
struct StepSeries {
  std::vector<double> values;
  std::vector<int> excluded;
  double max_abs = 0.0;
};

// Chord residual of the isotropy condition per step:
//   r = (g00(mid) c^2 dt^2 - |dx|^2) / (g00(mid) c^2 dt^2),
// with the metric read at the arithmetic midpoint state.
StepSeries isotropy_residual(const Trajectory& traj, const geom::KMetricField& metric,
                             double goo_min = 0.0);

// Signed residual of the momentum-closure identity per step, midpoint
// differencing, normalized per unit step (divided by dt).
StepSeries closure_residual_series(const Trajectory& traj, const geom::KMetricField& metric,
                                   const Particle& particle, double goo_min = 0.0);

struct FourMomentum {
  double p0 = 0.0;
  Vec3 p{};
};

/// p^0 two ways: the closed form m c (1 - g00)^{-1/2} per state, and the
/// value transported through the connection along the trajectory. Transport
/// restarts from the closed form at the head of every contiguous included
/// segment; excluded steps are enumerated.
struct MomentumReport {
  std::vector<FourMomentum> closed_form;  // per state
  std::vector<double> transported_p0;     // per state (0 where not transported)
  std::vector<int> excluded_steps;
  double max_rel_deviation = 0.0;
};

MomentumReport four_momentum(const Trajectory& traj, const geom::KMetricField& metric,
                             const Particle& particle, double goo_min = 0.0);

/// Residual of the geodesic transport law: the four-momentum carried through
/// the connection (one RK4 substep per trajectory step, quintic Hermite
/// dense states) minus the four-momentum evaluated directly from the state,
/// componentwise, normalized by m c. Recorded per state index; transport
/// re-anchors at the head of each included segment, so the residual measures
/// drift at the integrator's own order.
struct GeodesicReport {
  std::vector<double> residual;  // per state, max-abs component of the 4-vector
  std::vector<int> excluded_steps;
  double max_norm = 0.0;
};

GeodesicReport geodesic_residual(const Trajectory& traj, const geom::KMetricField& metric,
                                 const Particle& particle, double goo_min = 0.0);

/// Proper-time accumulation under the two candidate conventions
///   a: dtau = (1 - g00)^{-1/2} dt      b: dtau = (1 - g00)^{+1/2} dt
/// plus the consistency check of p^0 = m c dt/dtau against the closed form.
/// Exactly one convention survives the check.
struct ProperTimeReport {
  std::vector<double> tau_a;  // per state
  std::vector<double> tau_b;
  double mismatch_a = 0.0;  // max relative deviation of implied p0 from closed form
  double mismatch_b = 0.0;
  char consistent = '?';
};

ProperTimeReport proper_time(const Trajectory& traj, const geom::KMetricField& metric,
                             const Particle& particle);

// Midpoint state of a step from the quintic Hermite interpolant built on
// (x, v, a) at both endpoints.
State hermite_midpoint(const State& s0, const Vec3& a0, const State& s1, const Vec3& a1);

}  // namespace kfield::dyn

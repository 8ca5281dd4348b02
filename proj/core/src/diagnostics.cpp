#include "kfield/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace kfield::dyn {

using geom::KMetricField;

geom::KMetricField metric_from_energy(const Particle& particle, const Potential& potential,
                                      double energy, double c) {
  const double scale = 2.0 / (particle.mass * c * c);
  KMetricField m;
  m.c = c;
  m.goo_fn = [potential, energy, scale](const Vec3& x, double t) {
    return scale * (energy - potential.value(x, t));
  };
  m.grad_fn = [potential, scale](const Vec3& x, double t) {
    return -scale * potential.gradient(x, t);
  };
  // Conservative potentials only: no explicit time dependence.
  m.dgoo_dt_fn = [](const Vec3&, double) { return 0.0; };
  return m;
}

GooSequence goo_on_trajectory(const Trajectory& traj) {
  GooSequence out;
  out.values.reserve(traj.states.size());
  out.flags.reserve(traj.states.size());
  const double c2 = traj.c * traj.c;
  const double eps = 1e-9;
  for (const auto& s : traj.states) {
    const double g = norm2(s.v) / c2;
    std::uint8_t f = kFlagNone;
    if (g <= eps) f |= kFlagTurningPoint;
    if (g >= 1.0) f |= kFlagSuperluminal;
    out.values.push_back(g);
    out.flags.push_back(f);
    if (f != kFlagNone) out.any_flagged = true;
  }
  return out;
}

namespace {

// Step is usable for metric-based diagnostics when g00 is finite, inside the
// guard band and above the configured floor at both endpoints and midpoint.
bool step_included(const Trajectory& traj, const KMetricField& metric, size_t n, double goo_min,
                   const State& mid) {
  const double floor_g = std::max(goo_min, metric.eps);
  auto ok = [&](const Vec3& x, double t) {
    if (!metric.in_domain(x, t)) return false;
    return metric.goo_raw(x, t) >= floor_g;
  };
  const State& s0 = traj.states[n];
  const State& s1 = traj.states[n + 1];
  return ok(s0.x, s0.t) && ok(s1.x, s1.t) && ok(mid.x, mid.t);
}

State arithmetic_midpoint(const State& s0, const State& s1) {
  return {0.5 * (s0.t + s1.t), 0.5 * (s0.x + s1.x), 0.5 * (s0.v + s1.v)};
}

FourMomentum direct_momentum(const State& s, double g, const Particle& particle, double c) {
  const double gamma_k = 1.0 / std::sqrt(1.0 - g);
  return {particle.mass * c * gamma_k, particle.mass * gamma_k * s.v};
}

// Transport rates of the momentum law at one state:
//   dp^0/dt = -R0 p^0,   dp^i/dt = (chi_i - (v^i/c) R0) p^0,
// with R0 = (Gamma^o_{nu o}) xdot^nu and chi_i = {^i_oo} c.
struct TransportRate {
  double r0 = 0.0;
  Vec3 chi{};
  Vec3 v{};
  double c = 1.0;
};

TransportRate transport_rate(const KMetricField& metric, const State& s) {
  const auto chr = geom::christoffel_at(metric, s.x, s.t);
  const auto tor = geom::torsion_time_components(metric, s.x, s.t);
  TransportRate r;
  r.c = metric.c;
  r.v = s.v;
  r.r0 = (chr[0][0][0] + tor[0]) * metric.c;
  for (int i = 1; i < 4; ++i) {
    r.r0 += (chr[0][i][0] + tor[i]) * s.v[i - 1];
    r.chi[i - 1] = chr[i][0][0] * metric.c;
  }
  return r;
}

struct P4 {
  double p0 = 0.0;
  Vec3 ps{};
};

P4 rate_apply(const TransportRate& r, const P4& p) {
  P4 d;
  d.p0 = -r.r0 * p.p0;
  d.ps = (r.chi - (1.0 / r.c) * r.r0 * r.v) * p.p0;
  return d;
}

// One RK4 step of the transport law across [t0, t1] with rates evaluated at
// the endpoints and the Hermite midpoint.
P4 transport_step(const P4& p, const TransportRate& r0, const TransportRate& rmid,
                  const TransportRate& r1, double h) {
  const P4 k1 = rate_apply(r0, p);
  const P4 k2 = rate_apply(rmid, {p.p0 + 0.5 * h * k1.p0, p.ps + 0.5 * h * k1.ps});
  const P4 k3 = rate_apply(rmid, {p.p0 + 0.5 * h * k2.p0, p.ps + 0.5 * h * k2.ps});
  const P4 k4 = rate_apply(r1, {p.p0 + h * k3.p0, p.ps + h * k3.ps});
  return {p.p0 + (h / 6.0) * (k1.p0 + 2.0 * k2.p0 + 2.0 * k3.p0 + k4.p0),
          p.ps + (h / 6.0) * (k1.ps + 2.0 * k2.ps + 2.0 * k3.ps + k4.ps)};
}

}  // namespace

State hermite_midpoint(const State& s0, const Vec3& a0, const State& s1, const Vec3& a1) {
  const double h = s1.t - s0.t;
  State mid;
  mid.t = s0.t + 0.5 * h;
  // Quintic two-point Taylor interpolant evaluated at the half step.
  mid.x = 0.5 * (s0.x + s1.x) + (5.0 / 32.0) * h * (s0.v - s1.v) +
          (1.0 / 64.0) * h * h * (a0 + a1);
  mid.v = (15.0 / 8.0) * (1.0 / h) * (s1.x - s0.x) - (7.0 / 16.0) * (s0.v + s1.v) -
          (1.0 / 32.0) * h * (a0 - a1);
  return mid;
}

StepSeries isotropy_residual(const Trajectory& traj, const KMetricField& metric, double goo_min) {
  StepSeries out;
  const size_t n = traj.steps();
  out.values.assign(n, 0.0);
  const double c2 = traj.c * traj.c;
  for (size_t i = 0; i < n; ++i) {
    const State& s0 = traj.states[i];
    const State& s1 = traj.states[i + 1];
    const State mid = arithmetic_midpoint(s0, s1);
    if (!step_included(traj, metric, i, goo_min, mid)) {
      out.excluded.push_back(static_cast<int>(i));
      continue;
    }
    const double g = metric.goo(mid.x, mid.t);
    const double dt = s1.t - s0.t;
    const double lhs = g * c2 * dt * dt;
    const double r = (lhs - norm2(s1.x - s0.x)) / lhs;
    out.values[i] = r;
    out.max_abs = std::max(out.max_abs, std::abs(r));
  }
  return out;
}

StepSeries closure_residual_series(const Trajectory& traj, const KMetricField& metric,
                                   const Particle& particle, double goo_min) {
  StepSeries out;
  const size_t n = traj.steps();
  out.values.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const State& s0 = traj.states[i];
    const State& s1 = traj.states[i + 1];
    const State mid = arithmetic_midpoint(s0, s1);
    if (!step_included(traj, metric, i, goo_min, mid)) {
      out.excluded.push_back(static_cast<int>(i));
      continue;
    }
    const double dt = s1.t - s0.t;
    const Vec4 dx{metric.c * dt, s1.x - s0.x};

    const double g0 = metric.goo(s0.x, s0.t);
    const double g1 = metric.goo(s1.x, s1.t);
    const double gm = metric.goo(mid.x, mid.t);
    const Vec3 dp = direct_momentum(s1, g1, particle, traj.c).p -
                    direct_momentum(s0, g0, particle, traj.c).p;
    const double p0_mid = particle.mass * traj.c / std::sqrt(1.0 - gm);

    const double r = geom::closure_residual(metric, mid.x, mid.t, dx, dp, p0_mid) / dt;
    out.values[i] = r;
    out.max_abs = std::max(out.max_abs, std::abs(r));
  }
  return out;
}

MomentumReport four_momentum(const Trajectory& traj, const KMetricField& metric,
                             const Particle& particle, double goo_min) {
  MomentumReport rep;
  const size_t n_states = traj.states.size();
  rep.closed_form.resize(n_states);
  rep.transported_p0.assign(n_states, 0.0);

  // The closed form is regular through turning points; only transport needs
  // the guarded band, so closed-form values use the raw field.
  for (size_t i = 0; i < n_states; ++i) {
    const State& s = traj.states[i];
    const double g = std::min(metric.goo_raw(s.x, s.t), 1.0 - metric.eps);
    rep.closed_form[i] = direct_momentum(s, g, particle, traj.c);
  }

  bool in_segment = false;
  double p0 = 0.0;
  for (size_t i = 0; i < traj.steps(); ++i) {
    const State mid = hermite_midpoint(traj.states[i], traj.accels[i], traj.states[i + 1],
                                       traj.accels[i + 1]);
    if (!step_included(traj, metric, i, goo_min, mid)) {
      rep.excluded_steps.push_back(static_cast<int>(i));
      in_segment = false;
      continue;
    }
    if (!in_segment) {
      p0 = rep.closed_form[i].p0;
      rep.transported_p0[i] = p0;
      in_segment = true;
    }
    const auto r0 = transport_rate(metric, traj.states[i]);
    const auto rm = transport_rate(metric, mid);
    const auto r1 = transport_rate(metric, traj.states[i + 1]);
    const double h = traj.states[i + 1].t - traj.states[i].t;
    const P4 next = transport_step({p0, {}}, r0, rm, r1, h);
    p0 = next.p0;
    rep.transported_p0[i + 1] = p0;
    const double rel = std::abs(p0 - rep.closed_form[i + 1].p0) / rep.closed_form[i + 1].p0;
    rep.max_rel_deviation = std::max(rep.max_rel_deviation, rel);
  }
  return rep;
}

GeodesicReport geodesic_residual(const Trajectory& traj, const KMetricField& metric,
                                 const Particle& particle, double goo_min) {
  GeodesicReport rep;
  const size_t n_states = traj.states.size();
  rep.residual.assign(n_states, 0.0);
  const double scale = 1.0 / (particle.mass * traj.c);

  auto direct = [&](size_t i) -> P4 {
    const State& s = traj.states[i];
    const double g = metric.goo(s.x, s.t);
    const FourMomentum fm = direct_momentum(s, g, particle, traj.c);
    return {fm.p0, fm.p};
  };

  bool in_segment = false;
  P4 p{};
  for (size_t i = 0; i < traj.steps(); ++i) {
    const State mid = hermite_midpoint(traj.states[i], traj.accels[i], traj.states[i + 1],
                                       traj.accels[i + 1]);
    if (!step_included(traj, metric, i, goo_min, mid)) {
      rep.excluded_steps.push_back(static_cast<int>(i));
      in_segment = false;
      continue;
    }
    if (!in_segment) {
      p = direct(i);
      in_segment = true;
    }
    const auto r0 = transport_rate(metric, traj.states[i]);
    const auto rm = transport_rate(metric, mid);
    const auto r1 = transport_rate(metric, traj.states[i + 1]);
    const double h = traj.states[i + 1].t - traj.states[i].t;
    p = transport_step(p, r0, rm, r1, h);

    const P4 d = direct(i + 1);
    const Vec4 diff{p.p0 - d.p0, p.ps - d.ps};
    const double r = max_abs(diff) * scale;
    rep.residual[i + 1] = r;
    rep.max_norm = std::max(rep.max_norm, r);
  }
  return rep;
}

ProperTimeReport proper_time(const Trajectory& traj, const KMetricField& metric,
                             const Particle& particle) {
  ProperTimeReport rep;
  const size_t n_states = traj.states.size();
  rep.tau_a.assign(n_states, 0.0);
  rep.tau_b.assign(n_states, 0.0);

  for (size_t i = 0; i + 1 < n_states; ++i) {
    const State mid = arithmetic_midpoint(traj.states[i], traj.states[i + 1]);
    // Both conventions are regular through turning points (g00 -> 0); only
    // the g00 -> 1 end needs the guard.
    const double g =
        std::clamp(metric.goo_raw(mid.x, mid.t), 0.0, 1.0 - metric.eps);
    const double dt = traj.states[i + 1].t - traj.states[i].t;
    const double root = std::sqrt(1.0 - g);
    const double dtau_a = dt / root;
    const double dtau_b = dt * root;
    rep.tau_a[i + 1] = rep.tau_a[i] + dtau_a;
    rep.tau_b[i + 1] = rep.tau_b[i] + dtau_b;

    // Implied p0 = m c dt/dtau against the closed form m c / sqrt(1 - g).
    const double p0_ref = particle.mass * traj.c / root;
    const double p0_a = particle.mass * traj.c * dt / dtau_a;
    const double p0_b = particle.mass * traj.c * dt / dtau_b;
    rep.mismatch_a = std::max(rep.mismatch_a, std::abs(p0_a - p0_ref) / p0_ref);
    rep.mismatch_b = std::max(rep.mismatch_b, std::abs(p0_b - p0_ref) / p0_ref);
  }

  const double tol = 1e-10;
  const bool a_ok = rep.mismatch_a <= tol;
  const bool b_ok = rep.mismatch_b <= tol;
  if (a_ok != b_ok) rep.consistent = a_ok ? 'a' : 'b';
  return rep;
}

}  // namespace kfield::dyn

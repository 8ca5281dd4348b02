#include "kfield/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace kfield::dyn {

std::string to_string(Scheme s) { return s == Scheme::Rk4 ? "rk4" : "leapfrog"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "rk4") return Scheme::Rk4;
  if (name == "leapfrog") return Scheme::Leapfrog;
  throw SchemaError("unknown integrator scheme '" + name + "'");
}

namespace {

void check_state(const State& s, double c, int step) {
  const bool finite = std::isfinite(s.t) && std::isfinite(s.x.x) && std::isfinite(s.x.y) &&
                      std::isfinite(s.x.z) && std::isfinite(s.v.x) && std::isfinite(s.v.y) &&
                      std::isfinite(s.v.z);
  if (!finite) {
    std::ostringstream msg;
    msg << "non-finite state at step " << step;
    throw StepError(msg.str());
  }
  if (norm(s.v) >= c) {
    std::ostringstream msg;
    msg << "|v| = " << norm(s.v) << " >= c = " << c << " at step " << step;
    throw SuperluminalError(msg.str());
  }
}

struct Deriv {
  Vec3 dx, dv;
};

}  // namespace

Trajectory integrate_newton(const Particle& particle, const Potential& potential,
                            const State& initial, double h, int n, Scheme scheme, double c) {
  if (h <= 0.0) throw Error("step size must be positive");
  if (n < 0) throw Error("step count must be non-negative");
  if (particle.mass <= 0.0) throw Error("particle mass must be positive");

  const double inv_m = 1.0 / particle.mass;
  auto accel = [&](const Vec3& x, double t) { return -inv_m * potential.gradient(x, t); };

  Trajectory traj;
  traj.scheme = scheme;
  traj.h = h;
  traj.c = c;
  traj.states.reserve(n + 1);
  traj.accels.reserve(n + 1);

  State s = initial;
  check_state(s, c, 0);
  traj.states.push_back(s);
  traj.accels.push_back(accel(s.x, s.t));

  for (int step = 0; step < n; ++step) {
    if (scheme == Scheme::Rk4) {
      auto f = [&](const State& q) -> Deriv { return {q.v, accel(q.x, q.t)}; };
      const Deriv k1 = f(s);
      const Deriv k2 = f({s.t + 0.5 * h, s.x + 0.5 * h * k1.dx, s.v + 0.5 * h * k1.dv});
      const Deriv k3 = f({s.t + 0.5 * h, s.x + 0.5 * h * k2.dx, s.v + 0.5 * h * k2.dv});
      const Deriv k4 = f({s.t + h, s.x + h * k3.dx, s.v + h * k3.dv});
      s.x += (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
      s.v += (h / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
      s.t += h;
    } else {
      // velocity Verlet (kick-drift-kick)
      const Vec3 a0 = traj.accels.back();
      const Vec3 vh = s.v + 0.5 * h * a0;
      s.x += h * vh;
      s.t += h;
      const Vec3 a1 = accel(s.x, s.t);
      s.v = vh + 0.5 * h * a1;
    }
    check_state(s, c, step + 1);
    traj.states.push_back(s);
    traj.accels.push_back(accel(s.x, s.t));
  }
  return traj;
}

double total_energy(const Particle& particle, const Potential& potential, const State& s) {
  return 0.5 * particle.mass * norm2(s.v) + potential.value(s.x, s.t);
}

}  // namespace kfield::dyn

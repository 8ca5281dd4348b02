#pragma once

#include <string>
#include <vector>

#include "kfield/errors.hpp"
#include "kfield/linalg.hpp"
#include "kfield/potential.hpp"

namespace kfield::dyn {

struct Particle {
  double mass = 1.0;
  double charge = 0.0;  // carried for bookkeeping; forces enter through V
};

struct State {
  double t = 0.0;
  Vec3 x{};
  Vec3 v{};
};

enum class Scheme { Rk4, Leapfrog };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

/// Time-ordered particle states with the per-state acceleration retained
/// so diagnostics can interpolate inside a step without re-evaluating the
/// force field.
struct Trajectory {
  std::vector<State> states;   // n+1 entries for n steps
  std::vector<Vec3> accels;    // same length as states
  Scheme scheme = Scheme::Rk4;
  double h = 0.0;
  double c = 1.0;

  size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
};

/// Integrate m dv/dt = -grad V from `initial` for n steps of size h.
/// rk4 has global error O(h^4); leapfrog (velocity Verlet) is O(h^2) and
/// bounds energy drift for conservative potentials. Every accepted state is
/// checked: |v| >= c raises SuperluminalError, non-finite components raise
/// StepError.
Trajectory integrate_newton(const Particle& particle, const Potential& potential,
                            const State& initial, double h, int n,
                            Scheme scheme = Scheme::Rk4, double c = 1.0);

double total_energy(const Particle& particle, const Potential& potential, const State& s);

}  // namespace kfield::dyn

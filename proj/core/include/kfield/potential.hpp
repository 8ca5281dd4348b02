#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kfield/linalg.hpp"

namespace kfield::dyn {

enum class PotentialKind { Free, Harmonic, Coulomb, UniformField, DoubleWell, UserTable };

std::string to_string(PotentialKind kind);
PotentialKind potential_kind_from_string(const std::string& name);

/// Scalar potential V(x, t) with analytic gradient and Hessian.
/// The force on a particle is -grad V; charge effects enter through the
/// potential parameters directly. Kinds:
///   free          V = 0
///   harmonic      V = k |x - x0|^2 / 2          (k < 0 gives the inverted well)
///   coulomb       V = -alpha / |x - x0|
///   uniform-field V = -F . x
///   double-well   V = a (x1^2 - b^2)^2           (depends on the x component only)
///   user-table    cubic-interpolated 1D samples V(x1)
struct Potential {
  PotentialKind kind = PotentialKind::Free;
  std::map<std::string, double> parameters;

  std::function<double(const Vec3&, double)> value;
  std::function<Vec3(const Vec3&, double)> gradient;
  std::function<Mat3(const Vec3&, double)> hessian;
};

Potential make_free_potential();
Potential make_harmonic_potential(double k, const Vec3& center = {});
Potential make_coulomb_potential(double alpha, const Vec3& center = {});
Potential make_uniform_field_potential(const Vec3& force);
Potential make_double_well_potential(double a, double b);
// Natural cubic spline through samples (x1_i, V_i); x1 strictly increasing.
Potential make_table_potential(const std::vector<double>& xs, const std::vector<double>& vs);

// Construct from a kind tag and named parameters (the scenario path).
// Throws SchemaError when a required parameter is missing.
Potential make_potential(PotentialKind kind, const std::map<std::string, double>& params);

}  // namespace kfield::dyn

#pragma once

#include <functional>

#include "kfield/errors.hpp"
#include "kfield/linalg.hpp"

namespace kfield::geom {

/// Scalar metric coefficient g00(x, t) with analytic derivatives, plus the
/// fixed Euclidean three-metric (identity in the Cartesian chart used here).
///
/// g00 encodes the squared particle speed in units of c^2, so valid values
/// lie strictly inside (0, 1). Accessors guard the band (eps, 1-eps) and
/// reject non-finite evaluations. Immutable after construction; evaluation
/// is pure and safe to call from concurrent workers.
struct KMetricField {
  using ScalarFn = std::function<double(const Vec3&, double)>;
  using GradFn = std::function<Vec3(const Vec3&, double)>;

  double c = 1.0;
  double eps = 1e-9;  // singular guard band on g00

  ScalarFn goo_fn;
  GradFn grad_fn;      // spatial gradient of g00
  ScalarFn dgoo_dt_fn; // time derivative of g00

  // Unguarded evaluation (used by finite-difference probes and guards).
  double goo_raw(const Vec3& x, double t) const;

  // Guarded: throws DomainError outside (eps, 1-eps), NonFiniteError on NaN/Inf.
  double goo(const Vec3& x, double t) const;
  Vec3 grad_goo(const Vec3& x, double t) const;
  double dgoo_dt(const Vec3& x, double t) const;

  // Derivative with respect to x^0 = c*t.
  double dgoo_dx0(const Vec3& x, double t) const { return dgoo_dt(x, t) / c; }

  bool in_domain(const Vec3& x, double t) const;
};

KMetricField make_constant_metric(double goo, double c = 1.0);

KMetricField make_analytic_metric(KMetricField::ScalarFn goo,
                                  KMetricField::GradFn grad,
                                  KMetricField::ScalarFn dgoo_dt,
                                  double c = 1.0);

}  // namespace kfield::geom

#include "kfield/metric.hpp"

#include <cmath>
#include <sstream>

namespace kfield::geom {

namespace {

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw NonFiniteError(std::string(what) + " evaluated to a non-finite value");
  }
}

}  // namespace

double KMetricField::goo_raw(const Vec3& x, double t) const { return goo_fn(x, t); }

double KMetricField::goo(const Vec3& x, double t) const {
  const double g = goo_fn(x, t);
  check_finite(g, "g00");
  if (g <= eps || g >= 1.0 - eps) {
    std::ostringstream msg;
    msg << "g00 = " << g << " outside (" << eps << ", " << 1.0 - eps << ") at x=("
        << x.x << ", " << x.y << ", " << x.z << "), t=" << t;
    throw DomainError(msg.str());
  }
  return g;
}

Vec3 KMetricField::grad_goo(const Vec3& x, double t) const {
  const Vec3 g = grad_fn(x, t);
  check_finite(g.x, "grad g00");
  check_finite(g.y, "grad g00");
  check_finite(g.z, "grad g00");
  return g;
}

double KMetricField::dgoo_dt(const Vec3& x, double t) const {
  const double d = dgoo_dt_fn(x, t);
  check_finite(d, "dg00/dt");
  return d;
}

bool KMetricField::in_domain(const Vec3& x, double t) const {
  const double g = goo_fn(x, t);
  return std::isfinite(g) && g > eps && g < 1.0 - eps;
}

KMetricField make_constant_metric(double goo, double c) {
  KMetricField m;
  m.c = c;
  m.goo_fn = [goo](const Vec3&, double) { return goo; };
  m.grad_fn = [](const Vec3&, double) { return Vec3{}; };
  m.dgoo_dt_fn = [](const Vec3&, double) { return 0.0; };
  return m;
}

KMetricField make_analytic_metric(KMetricField::ScalarFn goo,
                                  KMetricField::GradFn grad,
                                  KMetricField::ScalarFn dgoo_dt,
                                  double c) {
  KMetricField m;
  m.c = c;
  m.goo_fn = std::move(goo);
  m.grad_fn = std::move(grad);
  m.dgoo_dt_fn = std::move(dgoo_dt);
  return m;
}

}  // namespace kfield::geom

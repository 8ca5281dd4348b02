#include "kfield/potential.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "kfield/errors.hpp"

namespace kfield::dyn {

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Free: return "free";
    case PotentialKind::Harmonic: return "harmonic";
    case PotentialKind::Coulomb: return "coulomb";
    case PotentialKind::UniformField: return "uniform-field";
    case PotentialKind::DoubleWell: return "double-well";
    case PotentialKind::UserTable: return "user-table";
  }
  return "unknown";
}

PotentialKind potential_kind_from_string(const std::string& name) {
  if (name == "free") return PotentialKind::Free;
  if (name == "harmonic") return PotentialKind::Harmonic;
  if (name == "coulomb") return PotentialKind::Coulomb;
  if (name == "uniform-field") return PotentialKind::UniformField;
  if (name == "double-well") return PotentialKind::DoubleWell;
  if (name == "user-table") return PotentialKind::UserTable;
  throw SchemaError("unknown potential kind '" + name + "'");
}

Potential make_free_potential() {
  Potential p;
  p.kind = PotentialKind::Free;
  p.value = [](const Vec3&, double) { return 0.0; };
  p.gradient = [](const Vec3&, double) { return Vec3{}; };
  p.hessian = [](const Vec3&, double) { return Mat3{}; };
  return p;
}

Potential make_harmonic_potential(double k, const Vec3& center) {
  Potential p;
  p.kind = PotentialKind::Harmonic;
  p.parameters = {{"k", k}, {"x0", center.x}, {"y0", center.y}, {"z0", center.z}};
  p.value = [k, center](const Vec3& x, double) { return 0.5 * k * norm2(x - center); };
  p.gradient = [k, center](const Vec3& x, double) { return k * (x - center); };
  p.hessian = [k](const Vec3&, double) {
    Mat3 h{};
    h[0][0] = h[1][1] = h[2][2] = k;
    return h;
  };
  return p;
}

Potential make_coulomb_potential(double alpha, const Vec3& center) {
  Potential p;
  p.kind = PotentialKind::Coulomb;
  p.parameters = {{"alpha", alpha}, {"x0", center.x}, {"y0", center.y}, {"z0", center.z}};
  p.value = [alpha, center](const Vec3& x, double) { return -alpha / norm(x - center); };
  p.gradient = [alpha, center](const Vec3& x, double) {
    const Vec3 r = x - center;
    const double rn = norm(r);
    return (alpha / (rn * rn * rn)) * r;
  };
  p.hessian = [alpha, center](const Vec3& x, double) {
    const Vec3 r = x - center;
    const double rn = norm(r);
    const double r3 = rn * rn * rn;
    const double r5 = r3 * rn * rn;
    Mat3 h{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        h[i][j] = alpha * ((i == j ? 1.0 / r3 : 0.0) - 3.0 * r[i] * r[j] / r5);
    return h;
  };
  return p;
}

Potential make_uniform_field_potential(const Vec3& force) {
  Potential p;
  p.kind = PotentialKind::UniformField;
  p.parameters = {{"Fx", force.x}, {"Fy", force.y}, {"Fz", force.z}};
  p.value = [force](const Vec3& x, double) { return -dot(force, x); };
  p.gradient = [force](const Vec3&, double) { return -force; };
  p.hessian = [](const Vec3&, double) { return Mat3{}; };
  return p;
}

Potential make_double_well_potential(double a, double b) {
  Potential p;
  p.kind = PotentialKind::DoubleWell;
  p.parameters = {{"a", a}, {"b", b}};
  p.value = [a, b](const Vec3& x, double) {
    const double u = x.x * x.x - b * b;
    return a * u * u;
  };
  p.gradient = [a, b](const Vec3& x, double) {
    return Vec3{4.0 * a * x.x * (x.x * x.x - b * b), 0.0, 0.0};
  };
  p.hessian = [a, b](const Vec3& x, double) {
    Mat3 h{};
    h[0][0] = 4.0 * a * (3.0 * x.x * x.x - b * b);
    return h;
  };
  return p;
}

namespace {

// Natural cubic spline coefficients for samples (xs, vs).
struct Spline {
  std::vector<double> xs, a, b, c, d;  // piece i: a + b*dx + c*dx^2 + d*dx^3

  double eval(double x, int deriv) const {
    size_t i = 0;
    if (x <= xs.front()) {
      i = 0;
    } else if (x >= xs.back()) {
      i = xs.size() - 2;
    } else {
      size_t lo = 0, hi = xs.size() - 1;
      while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        (xs[mid] <= x ? lo : hi) = mid;
      }
      i = lo;
    }
    const double t = x - xs[i];
    switch (deriv) {
      case 0: return a[i] + t * (b[i] + t * (c[i] + t * d[i]));
      case 1: return b[i] + t * (2.0 * c[i] + 3.0 * t * d[i]);
      default: return 2.0 * c[i] + 6.0 * t * d[i];
    }
  }
};

Spline build_spline(const std::vector<double>& xs, const std::vector<double>& vs) {
  const size_t n = xs.size();
  if (n < 3) throw SchemaError("user-table potential needs at least 3 samples");
  for (size_t i = 1; i < n; ++i)
    if (xs[i] <= xs[i - 1]) throw SchemaError("user-table x samples must be strictly increasing");

  std::vector<double> h(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) h[i] = xs[i + 1] - xs[i];

  // Tridiagonal solve for second derivatives, natural boundary conditions.
  std::vector<double> alpha(n, 0.0), l(n, 1.0), mu(n, 0.0), z(n, 0.0), m(n, 0.0);
  for (size_t i = 1; i + 1 < n; ++i)
    alpha[i] = 3.0 * ((vs[i + 1] - vs[i]) / h[i] - (vs[i] - vs[i - 1]) / h[i - 1]);
  for (size_t i = 1; i + 1 < n; ++i) {
    l[i] = 2.0 * (xs[i + 1] - xs[i - 1]) - h[i - 1] * mu[i - 1];
    mu[i] = h[i] / l[i];
    z[i] = (alpha[i] - h[i - 1] * z[i - 1]) / l[i];
  }
  for (size_t j = n - 1; j-- > 0;) m[j] = z[j] - mu[j] * m[j + 1];

  Spline sp;
  sp.xs = xs;
  sp.a.resize(n - 1);
  sp.b.resize(n - 1);
  sp.c.resize(n - 1);
  sp.d.resize(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    sp.a[i] = vs[i];
    sp.b[i] = (vs[i + 1] - vs[i]) / h[i] - h[i] * (m[i + 1] + 2.0 * m[i]) / 3.0;
    sp.c[i] = m[i];
    sp.d[i] = (m[i + 1] - m[i]) / (3.0 * h[i]);
  }
  return sp;
}

}  // namespace

Potential make_table_potential(const std::vector<double>& xs, const std::vector<double>& vs) {
  if (xs.size() != vs.size()) throw SchemaError("user-table x and V sample counts differ");
  auto sp = std::make_shared<Spline>(build_spline(xs, vs));

  Potential p;
  p.kind = PotentialKind::UserTable;
  p.value = [sp](const Vec3& x, double) { return sp->eval(x.x, 0); };
  p.gradient = [sp](const Vec3& x, double) { return Vec3{sp->eval(x.x, 1), 0.0, 0.0}; };
  p.hessian = [sp](const Vec3& x, double) {
    Mat3 h{};
    h[0][0] = sp->eval(x.x, 2);
    return h;
  };
  return p;
}

Potential make_potential(PotentialKind kind, const std::map<std::string, double>& params) {
  auto need = [&params, kind](const std::string& name) {
    auto it = params.find(name);
    if (it == params.end())
      throw SchemaError("potential.parameters." + name + " missing for kind '" +
                        to_string(kind) + "'");
    return it->second;
  };
  auto opt = [&params](const std::string& name, double fallback) {
    auto it = params.find(name);
    return it == params.end() ? fallback : it->second;
  };

  switch (kind) {
    case PotentialKind::Free:
      return make_free_potential();
    case PotentialKind::Harmonic:
      return make_harmonic_potential(need("k"),
                                     {opt("x0", 0.0), opt("y0", 0.0), opt("z0", 0.0)});
    case PotentialKind::Coulomb:
      return make_coulomb_potential(need("alpha"),
                                    {opt("x0", 0.0), opt("y0", 0.0), opt("z0", 0.0)});
    case PotentialKind::UniformField:
      return make_uniform_field_potential({need("Fx"), opt("Fy", 0.0), opt("Fz", 0.0)});
    case PotentialKind::DoubleWell:
      return make_double_well_potential(need("a"), need("b"));
    case PotentialKind::UserTable:
      throw SchemaError("user-table potential requires sample arrays, not scalar parameters");
  }
  throw SchemaError("unhandled potential kind");
}

}  // namespace kfield::dyn

#include "kfield/connection.hpp"

#include <cmath>
#include <sstream>

#include "kfield/errors.hpp"

namespace kfield::geom {

namespace {

constexpr char kIndexNames[4] = {'o', 'x', 'y', 'z'};

// d_mu g00 in the x^0 = c*t chart: index 0 is (1/c) d/dt.
std::array<double, 4> metric_gradient4(const KMetricField& metric, const Vec3& x, double t) {
  const Vec3 gs = metric.grad_goo(x, t);
  return {metric.dgoo_dx0(x, t), gs.x, gs.y, gs.z};
}

}  // namespace

Table3 christoffel_at(const KMetricField& metric, const Vec3& x, double t) {
  const double g = metric.goo(x, t);
  const auto dg = metric_gradient4(metric, x, t);

  Table3 chr{};
  chr[0][0][0] = dg[0] / (2.0 * g);
  for (int i = 1; i < 4; ++i) {
    chr[0][i][0] = dg[i] / (2.0 * g);  // {^o_io}
    chr[0][0][i] = chr[0][i][0];       // {^o_oi}
    chr[i][0][0] = 0.5 * dg[i];        // {^i_oo}
  }
  // Purely spatial symbols vanish: the three-metric is the identity.
  return chr;
}

std::array<double, 4> torsion_time_components(const KMetricField& metric, const Vec3& x,
                                              double t) {
  const double g = metric.goo_raw(x, t);
  if (!std::isfinite(g)) throw NonFiniteError("g00 evaluated to a non-finite value");
  if (g <= metric.eps || g >= 1.0 - metric.eps) {
    std::ostringstream msg;
    msg << "log-ratio torsion singular at g00 = " << g;
    throw SingularTorsionError(msg.str());
  }
  const auto dg = metric_gradient4(metric, x, t);
  const double scale = -1.0 / (2.0 * g * (1.0 - g));
  return {scale * dg[0], scale * dg[1], scale * dg[2], scale * dg[3]};
}

Table3 nonmetricity_at(const KMetricField& metric, const Table3& torsion, const Vec3& x,
                       double t) {
  const double g = metric.goo(x, t);
  const Vec3 gs = metric.grad_goo(x, t);

  Table3 q{};
  q[0][0][0] = 2.0 * g * torsion[0][0][0];
  q[1][0][0] = -gs.x;
  q[2][0][0] = -gs.y;
  q[3][0][0] = -gs.z;
  return q;
}

double torsion_contraction_time(const KMetricField& metric, const Vec3& x, double t,
                                const Vec4& dx) {
  const auto chr = christoffel_at(metric, x, t);
  const auto s = torsion_time_components(metric, x, t);
  double out = -2.0 * s[0] * dx.o;
  for (int j = 1; j < 4; ++j) out -= chr[0][0][j] * dx[j];
  return out;
}

Vec3 torsion_contraction_space(const KMetricField& metric, const Vec3& x, double t,
                               const Vec4& dx) {
  const auto chr = christoffel_at(metric, x, t);
  // {^o_ij} = 0 here, so only the {^o_io} dx^o piece survives.
  Vec3 out;
  for (int i = 1; i < 4; ++i) out[i - 1] = chr[0][i][0] * dx.o;
  return out;
}

Vec3 torsion_contraction_mixed(const KMetricField& metric, const Vec3& x, double t,
                               const Vec4& dx) {
  const auto chr = christoffel_at(metric, x, t);
  // {^i_oj} = 0 here, so only the {^i_oo} dx^o piece survives.
  Vec3 out;
  for (int i = 1; i < 4; ++i) out[i - 1] = chr[i][0][0] * dx.o;
  return out;
}

ConnectionSet assemble_connection(const KMetricField& metric, const Vec3& x, double t) {
  ConnectionSet cs;
  cs.x = x;
  cs.t = t;
  cs.christoffel = christoffel_at(metric, x, t);

  const auto s = torsion_time_components(metric, x, t);
  for (int nu = 0; nu < 4; ++nu) cs.torsion[0][nu][0] = s[nu];

  for (int u = 0; u < 4; ++u)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) cs.gamma[u][a][b] = cs.christoffel[u][a][b] + cs.torsion[u][a][b];

  cs.q_lower = nonmetricity_at(metric, cs.torsion, x, t);
  return cs;
}

Vec4 gamma_contract(const KMetricField& metric, const Vec3& x, double t, const Vec4& dx) {
  const auto chr = christoffel_at(metric, x, t);
  const auto s = torsion_time_components(metric, x, t);

  double time_row = 0.0;
  for (int nu = 0; nu < 4; ++nu) time_row += (chr[0][nu][0] + s[nu]) * dx[nu];

  Vec4 out;
  out.o = time_row;
  const double ratio_base = dx.o;
  for (int i = 1; i < 4; ++i) {
    const double direction = (ratio_base != 0.0) ? dx[i] / ratio_base : 0.0;
    out[i] = -chr[i][0][0] * dx.o + direction * time_row;
  }
  return out;
}

double closure_residual(const KMetricField& metric, const Vec3& x, double t, const Vec4& dx,
                        const Vec3& dp_s, double p0) {
  const auto chr = christoffel_at(metric, x, t);
  const auto s = torsion_time_components(metric, x, t);

  // {^j_nu o} dx^nu dx_j; only the {^j_oo} components are nonzero.
  double chr_spatial = 0.0;
  for (int j = 1; j < 4; ++j) chr_spatial += chr[j][0][0] * dx.o * dx[j];

  double lhs = 0.0;  // S^j_{nu o} dx^nu dx_j recovered from the momentum step
  for (int j = 1; j < 4; ++j) lhs += (-dp_s[j - 1] / p0) * dx[j];
  lhs -= chr_spatial;

  double time_row = 0.0;
  for (int nu = 0; nu < 4; ++nu) time_row += (chr[0][nu][0] + s[nu]) * dx[nu];
  const double rhs = time_row * dx.o - chr_spatial;

  return lhs - rhs;
}

double EmbeddingResiduals::max_abs() const {
  double m = std::max(std::abs(family_a.x), std::max(std::abs(family_a.y), std::abs(family_a.z)));
  for (const auto& row : family_b)
    for (double v : row) m = std::max(m, std::abs(v));
  for (double v : family_c) m = std::max(m, std::abs(v));
  return m;
}

EmbeddingResiduals embedding_residuals(const KMetricField& metric, const Vec3& x, double t,
                                       const Vec4& dx) {
  const double g = metric.goo(x, t);
  const auto chr = christoffel_at(metric, x, t);
  const auto s = torsion_time_components(metric, x, t);
  const Vec3 gs = metric.grad_goo(x, t);

  EmbeddingResiduals r;

  // Raised nonmetricity entries that survive: Q^i_oo = -d^i g00,
  // Q^o_oo = 2 S^o_oo, Q^o_oj = Q^o_jo = -dj g00 / g00.
  const Vec3 s_mixed = torsion_contraction_mixed(metric, x, t, dx);
  for (int i = 1; i < 4; ++i) {
    r.family_a[i - 1] = 2.0 * s_mixed[i - 1] - gs[i - 1] * dx.o;
  }

  // Q^i_{j w} vanishes componentwise; the family is zero by construction.
  r.family_b = Mat3{};

  const Vec3 s_space = torsion_contraction_space(metric, x, t, dx);
  for (int j = 1; j < 4; ++j) {
    double v = 2.0 * s_space[j - 1];   // 2 ({^o_jk} + S^o_jk) dx^k with {^o_jk} = 0
    v += (-gs[j - 1] / g) * dx.o;      // Q^o_{jo} dx^o
    r.family_c[j] = v;
  }
  {
    double v = 2.0 * torsion_contraction_time(metric, x, t, dx);
    for (int j = 1; j < 4; ++j) v += 2.0 * chr[0][0][j] * dx[j];  // 2 {^o_oj} dx^j
    v += 2.0 * s[0] * dx.o;            // Q^o_oo dx^o
    for (int j = 1; j < 4; ++j) v += (-gs[j - 1] / g) * dx[j];    // Q^o_oj dx^j
    r.family_c[0] = v;
  }
  return r;
}

std::map<std::string, double> dump_components(const ConnectionSet& cs) {
  std::map<std::string, double> out;
  auto emit = [&out](const char* prefix, const Table3& tbl) {
    for (int u = 0; u < 4; ++u)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          std::string key = std::string(prefix) + "^" + kIndexNames[u] + "_" + kIndexNames[a] +
                            kIndexNames[b];
          out[key] = tbl[u][a][b];
        }
  };
  emit("Chr", cs.christoffel);
  emit("S", cs.torsion);
  emit("Gamma", cs.gamma);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      for (int w = 0; w < 4; ++w) {
        std::string key = std::string("Q_") + kIndexNames[m] + kIndexNames[n] + kIndexNames[w];
        out[key] = cs.q_lower[m][n][w];
      }
  return out;
}

}  // namespace kfield::geom

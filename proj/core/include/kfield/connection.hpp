#pragma once

#include <array>
#include <map>
#include <string>

#include "kfield/linalg.hpp"
#include "kfield/metric.hpp"

namespace kfield::geom {

// Rank-3 component table indexed [upper][first lower][second lower],
// index 0 = time (o), 1..3 = x,y,z. For the connection pieces the lower
// pair is ordered as it appears in the source expressions: the first
// lower slot is the one contracted with a displacement in the transport
// law, the second is the pinned time slot.
using Table3 = std::array<std::array<std::array<double, 4>, 4>, 4>;

inline Table3 zero_table() { return Table3{}; }

/// Christoffel symbols, torsion, nonmetricity and the assembled connection
/// of the metric diag(g00, -1, -1, -1) at one event.
struct ConnectionSet {
  Table3 christoffel{};   // {^mu_{ab}}, symmetric in (a, b)
  Table3 torsion{};       // S^mu_{ab}; only the S^o_{nu o} row is determined
  Table3 gamma{};         // christoffel + torsion, componentwise
  Table3 q_lower{};       // Q_{mu nu omega}; only Q_ooo and Q_ioo survive
  Vec3 x{};
  double t = 0.0;
};

// All Christoffel symbols of the metric. Only g00 varies, so the nonzero
// components are {^o_oo} = d0 g00/(2 g00), {^o_io} = {^o_oi} = di g00/(2 g00)
// and {^i_oo} = di g00 / 2.
Table3 christoffel_at(const KMetricField& metric, const Vec3& x, double t);

// The determined torsion row S^o_{nu o} = d_nu ln((1-g00)/g00) / 2
//                                       = -d_nu g00 / (2 g00 (1-g00)),
// for nu = o,x,y,z. Throws SingularTorsionError when g00 is within eps of
// 0 or 1 (v -> 0 or v -> c; the log ratio diverges at both ends).
std::array<double, 4> torsion_time_components(const KMetricField& metric, const Vec3& x,
                                              double t);

// Nonmetricity of the transport: Q_ooo = 2 g00 S^o_oo, Q_ioo = -di g00,
// every other component exactly zero. The torsion table supplies S^o_oo.
Table3 nonmetricity_at(const KMetricField& metric, const Table3& torsion, const Vec3& x,
                       double t);

// Contraction S^o_{oj} dx^j = -{^o_oj} dx^j - 2 S^o_oo dx^o along a
// 4-displacement. The S^o_{oj} components are only defined through this
// contracted identity, never as a standalone table.
double torsion_contraction_time(const KMetricField& metric, const Vec3& x, double t,
                                const Vec4& dx);

// Contraction S^o_{ij} dx^j = -{^o_ij} dx^j + {^o_io} dx^o, one value per i.
Vec3 torsion_contraction_space(const KMetricField& metric, const Vec3& x, double t,
                               const Vec4& dx);

// Contraction S^i_{oj} dx^j = -{^i_oj} dx^j + {^i_oo} dx^o, one value per i.
Vec3 torsion_contraction_mixed(const KMetricField& metric, const Vec3& x, double t,
                               const Vec4& dx);

// Full ConnectionSet; gamma = christoffel + torsion holds componentwise by
// construction and q_lower carries the nonmetricity of the same torsion row.
ConnectionSet assemble_connection(const KMetricField& metric, const Vec3& x, double t);

/// Contraction Gamma^mu_{nu o} dx^nu of the assembled connection along a step.
///
/// The time row is componentwise (Christoffel plus the determined torsion).
/// The spatial rows are fixed only up to contracted identities, so they are
/// assembled along the step direction from the closure constraints:
///   Gamma^i_{nu o} dx^nu = -{^i_oo} dx^o + (dx^i/dx^o) (Gamma^o_{nu o} dx^nu).
/// Contracting with dx_i reproduces the momentum-closure identity, and the
/// resulting transport law reduces to Newton's second law on classical
/// trajectories.
Vec4 gamma_contract(const KMetricField& metric, const Vec3& x, double t, const Vec4& dx);

// Signed residual of the momentum-closure identity
//   S^j_{nu o} dx^nu dx_j = ({^o_nu o} + S^o_{nu o}) dx^nu dx^o - {^j_nu o} dx^nu dx_j
// for one trajectory step. The left side's spatial torsion contraction is
// recovered from the step's momentum data via the transport law
// (S^j_{nu o} dx^nu = -dp^j/p^o - {^j_nu o} dx^nu); the right side uses the
// constructed Christoffels and the determined torsion row. dp_s is the
// spatial momentum increment over the step and p0 the time component at the
// evaluation point.
double closure_residual(const KMetricField& metric, const Vec3& x, double t, const Vec4& dx,
                        const Vec3& dp_s, double p0);

/// Residuals of the embedding constraints along a displacement, with the
/// contracted torsion identities substituted. Families a and c_space vanish
/// identically for any displacement; c_time vanishes along directions with
/// no g00 variation (isotropic directions orthogonal to the gradient).
struct EmbeddingResiduals {
  Vec3 family_a{};                    // 2 S^i_{oj} dx^j + Q^i_{o w} dx^w
  Mat3 family_b{};                    // Q^i_{j w} dx^w
  std::array<double, 4> family_c{};   // 2 Gamma^o_{mu j} dx^j + Q^o_{mu w} dx^w
  double max_abs() const;
};

EmbeddingResiduals embedding_residuals(const KMetricField& metric, const Vec3& x, double t,
                                       const Vec4& dx);

// Flat JSON-compatible dump of every component, keyed by index strings such
// as "Gamma^o_ox", "S^o_xo", "Q_xoo". Used by the golden-file tests.
std::map<std::string, double> dump_components(const ConnectionSet& cs);

}  // namespace kfield::geom

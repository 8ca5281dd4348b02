#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>

#include <json.hpp>

#include "kfield/connection.hpp"
#include "kfield/errors.hpp"
#include "support/oracle.hpp"

using namespace kfield;
using namespace kfield::geom;

namespace {

// Static 1D profile g00 = 1 - x^2, valid for |x| well inside (0, 1).
KMetricField parabolic_metric(double c = 1.0) {
  return make_analytic_metric(
      [](const Vec3& p, double) { return 1.0 - p.x * p.x; },
      [](const Vec3& p, double) { return Vec3{-2.0 * p.x, 0.0, 0.0}; },
      [](const Vec3&, double) { return 0.0; }, c);
}

// Time-dependent profile with both spatial and temporal variation.
KMetricField wavy_metric(double c = 1.0) {
  return make_analytic_metric(
      [](const Vec3& p, double t) { return 0.5 + 0.2 * std::sin(p.x + 0.3 * t); },
      [](const Vec3& p, double t) {
        return Vec3{0.2 * std::cos(p.x + 0.3 * t), 0.0, 0.0};
      },
      [](const Vec3& p, double t) { return 0.06 * std::cos(p.x + 0.3 * t); }, c);
}

void check_table_close(const Table3& got, const Table3& want, double abs_tol, double rel_tol) {
  for (int u = 0; u < 4; ++u)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double tol = std::max(abs_tol, rel_tol * std::abs(want[u][a][b]));
        CHECK(std::abs(got[u][a][b] - want[u][a][b]) <= tol);
      }
}

}  // namespace

TEST_CASE("christoffel: constant g00 gives the zero table") {
  const auto m = make_constant_metric(0.25);
  const auto chr = christoffel_at(m, {0.3, -1.0, 2.0}, 5.0);
  for (const auto& a : chr)
    for (const auto& b : a)
      for (double v : b) CHECK(v == 0.0);
}

TEST_CASE("christoffel: static parabolic profile") {
  const auto m = parabolic_metric();
  const Vec3 x{0.5, 0.0, 0.0};
  const auto chr = christoffel_at(m, x, 0.0);

  // g00 = 0.75, dx g00 = -1: {^o_ox} = -1/(2*0.75) = -2/3, {^x_oo} = -1/2.
  CHECK(chr[0][1][0] == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
  CHECK(chr[0][0][1] == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
  CHECK(chr[1][0][0] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(chr[0][0][0] == 0.0);

  const auto fd = oracle::fd_christoffel(m, x, 0.0);
  check_table_close(chr, fd, 1e-8, 1e-8);
}

TEST_CASE("christoffel: time-dependent profile matches the oracle") {
  const auto m = wavy_metric();
  const Vec3 x{0.2, 0.0, 0.0};
  const double t = 1.3;
  const auto chr = christoffel_at(m, x, t);
  CHECK(std::abs(chr[0][0][0]) > 1e-3);  // time-time symbol switched on

  const auto fd = oracle::fd_christoffel(m, x, t);
  for (int u = 0; u < 4; ++u)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double want = fd[u][a][b];
        const double tol = std::max(1e-10, 1e-8 * std::abs(want));
        CHECK(std::abs(chr[u][a][b] - want) <= tol);
      }
}

TEST_CASE("christoffel: x0 = c t bookkeeping survives c != 1") {
  const auto m = wavy_metric(2.0);
  const Vec3 x{-0.4, 0.0, 0.0};
  const auto chr = christoffel_at(m, x, 0.7);
  const auto fd = oracle::fd_christoffel(m, x, 0.7);
  check_table_close(chr, fd, 1e-9, 1e-7);
}

TEST_CASE("christoffel errors") {
  CHECK_THROWS_AS(christoffel_at(make_constant_metric(1.5), {}, 0.0), DomainError);
  auto m = make_constant_metric(0.5);
  m.grad_fn = [](const Vec3&, double) {
    return Vec3{std::numeric_limits<double>::infinity(), 0, 0};
  };
  CHECK_THROWS_AS(christoffel_at(m, {}, 0.0), NonFiniteError);
}

TEST_CASE("torsion row: constant profile vanishes") {
  const auto s = torsion_time_components(make_constant_metric(0.3), {1, 1, 1}, 2.0);
  for (double v : s) CHECK(v == 0.0);
}

TEST_CASE("torsion row: closed form and the log-ratio difference") {
  // g00 = 0.5 with dx g00 = 0.2 at the origin.
  const auto m = make_analytic_metric(
      [](const Vec3& p, double) { return 0.5 + 0.2 * p.x; },
      [](const Vec3&, double) { return Vec3{0.2, 0.0, 0.0}; },
      [](const Vec3&, double) { return 0.0; });
  const auto s = torsion_time_components(m, {0, 0, 0}, 0.0);
  CHECK(s[1] == doctest::Approx(-0.4).epsilon(1e-14));  // -0.2/(2*0.5*0.5)
  CHECK(s[0] == 0.0);

  const auto fd = oracle::fd_torsion_row(m, {0, 0, 0}, 0.0);
  CHECK(s[1] == doctest::Approx(fd[1]).epsilon(1e-8));
}

TEST_CASE("torsion row: second-order convergence of the log-ratio difference") {
  const auto m = wavy_metric();
  const Vec3 x{0.1, 0, 0};
  const auto analytic = torsion_time_components(m, x, 0.0);
  auto half_log_ratio = [&m](double xx) {
    const double g = m.goo_raw({xx, 0, 0}, 0.0);
    return 0.5 * std::log((1.0 - g) / g);
  };
  auto fd_err = [&](double h) {
    const double fd = (half_log_ratio(x.x + h) - half_log_ratio(x.x - h)) / (2.0 * h);
    return std::abs(fd - analytic[1]);
  };
  const double r = fd_err(1e-3) / fd_err(5e-4);
  CHECK(r == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("torsion row: singular guard") {
  CHECK_THROWS_AS(torsion_time_components(make_constant_metric(1.0 - 1e-14), {}, 0.0),
                  SingularTorsionError);
  CHECK_THROWS_AS(torsion_time_components(make_constant_metric(1e-14), {}, 0.0),
                  SingularTorsionError);
}

TEST_CASE("nonmetricity: only the two surviving components") {
  SUBCASE("constant profile: Q_ioo = 0") {
    const auto m = make_constant_metric(0.6);
    Table3 torsion{};
    const auto q = nonmetricity_at(m, torsion, {}, 0.0);
    for (int i = 1; i < 4; ++i) CHECK(q[i][0][0] == 0.0);
  }
  SUBCASE("dx g00 = 0.6 gives Q_xoo = -0.6") {
    const auto m = make_analytic_metric(
        [](const Vec3& p, double) { return 0.3 + 0.6 * p.x; },
        [](const Vec3&, double) { return Vec3{0.6, 0.0, 0.0}; },
        [](const Vec3&, double) { return 0.0; });
    const auto q = nonmetricity_at(m, Table3{}, {0, 0, 0}, 0.0);
    CHECK(q[1][0][0] == doctest::Approx(-0.6).epsilon(1e-14));
  }
  SUBCASE("S^o_oo = 0.2 at g00 = 0.5 gives Q_ooo = 0.2") {
    const auto m = make_constant_metric(0.5);
    Table3 torsion{};
    torsion[0][0][0] = 0.2;
    const auto q = nonmetricity_at(m, torsion, {}, 0.0);
    CHECK(q[0][0][0] == doctest::Approx(0.2).epsilon(1e-14));
  }
}

TEST_CASE("time-row torsion contraction along displacements") {
  SUBCASE("constant profile: zero for any direction") {
    const auto m = make_constant_metric(0.4);
    CHECK(torsion_contraction_time(m, {1, 2, 3}, 0.5, {0.7, {0.1, -0.2, 0.3}}) == 0.0);
  }
  SUBCASE("static profile, spatial displacement") {
    const auto m = parabolic_metric();
    // dx g00 = -1 at x = 0.5, so -{^o_ox} dx^x = (2/3) * 0.01.
    const double got = torsion_contraction_time(m, {0.5, 0, 0}, 0.0, {0.0, {0.01, 0, 0}});
    CHECK(got == doctest::Approx((2.0 / 3.0) * 0.01).epsilon(1e-12));
  }
  SUBCASE("time-dependent profile matches oracle assembly") {
    const auto m = wavy_metric();
    const Vec3 x{0.15, 0, 0};
    const double t = 0.9;
    const Vec4 dx{0.02, {0.01, 0.0, 0.0}};
    const auto fd_chr = oracle::fd_christoffel(m, x, t);
    const auto fd_s = oracle::fd_torsion_row(m, x, t);
    double want = -2.0 * fd_s[0] * dx.o;
    for (int j = 1; j < 4; ++j) want -= fd_chr[0][0][j] * dx[j];
    CHECK(torsion_contraction_time(m, x, t, dx) == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("assembled connection") {
  SUBCASE("constant profile: every component zero") {
    const auto cs = assemble_connection(make_constant_metric(0.25), {5, 5, 5}, 1.0);
    for (int u = 0; u < 4; ++u)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          CHECK(cs.gamma[u][a][b] == 0.0);
          CHECK(cs.q_lower[u][a][b] == 0.0);
        }
  }
  SUBCASE("static profile: components match the oracle") {
    const auto m = parabolic_metric();
    const Vec3 x{0.3, 0, 0};
    const auto cs = assemble_connection(m, x, 0.0);
    check_table_close(cs.christoffel, oracle::fd_christoffel(m, x, 0.0), 1e-8, 1e-6);
    const auto fd_s = oracle::fd_torsion_row(m, x, 0.0);
    for (int nu = 0; nu < 4; ++nu)
      CHECK(std::abs(cs.torsion[0][nu][0] - fd_s[nu]) <=
            std::max(1e-8, 1e-6 * std::abs(fd_s[nu])));
    check_table_close(cs.q_lower, oracle::fd_nonmetricity(m, x, 0.0), 1e-8, 1e-6);
  }
  SUBCASE("assembly identity holds to machine precision") {
    const auto cs = assemble_connection(wavy_metric(), {0.4, 0, 0}, 2.2);
    for (int u = 0; u < 4; ++u)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          CHECK(cs.gamma[u][a][b] - cs.christoffel[u][a][b] - cs.torsion[u][a][b] == 0.0);
  }
}

TEST_CASE("oracle equivalence over randomized smooth profiles") {
  std::mt19937_64 rng(20260810);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  int evaluated = 0;
  for (int profile = 0; profile < 100; ++profile) {
    const auto m = oracle::random_smooth_metric(rng);
    const Vec3 x{coord(rng), coord(rng), coord(rng)};
    const double t = coord(rng);

    const auto chr = christoffel_at(m, x, t);
    const auto fd_chr = oracle::fd_christoffel(m, x, t);
    for (int u = 0; u < 4; ++u)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const double tol = std::max(1e-8, 1e-6 * std::abs(fd_chr[u][a][b]));
          CHECK(std::abs(chr[u][a][b] - fd_chr[u][a][b]) <= tol);
        }

    const auto s = torsion_time_components(m, x, t);
    const auto fd_s = oracle::fd_torsion_row(m, x, t);
    for (int nu = 0; nu < 4; ++nu)
      CHECK(std::abs(s[nu] - fd_s[nu]) <= std::max(1e-8, 1e-6 * std::abs(fd_s[nu])));

    const auto cs = assemble_connection(m, x, t);
    const auto fd_q = oracle::fd_nonmetricity(m, x, t);
    for (int u = 0; u < 4; ++u)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const double tol = std::max(1e-8, 1e-6 * std::abs(fd_q[u][a][b]));
          CHECK(std::abs(cs.q_lower[u][a][b] - fd_q[u][a][b]) <= tol);
        }

    // Sparsity: declared-zero components are exactly zero, not merely small.
    for (int u = 0; u < 4; ++u)
      for (int a = 1; a < 4; ++a)
        for (int b = 1; b < 4; ++b) CHECK(cs.christoffel[u][a][b] == 0.0);
    for (int u = 1; u < 4; ++u)
      for (int b = 1; b < 4; ++b) {
        CHECK(cs.christoffel[u][0][b] == 0.0);
        CHECK(cs.christoffel[u][b][0] == 0.0);
      }
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu)
        for (int w = 0; w < 4; ++w) {
          const bool survives = (nu == 0 && w == 0);  // Q_ooo or Q_ioo
          if (!survives) CHECK(cs.q_lower[mu][nu][w] == 0.0);
        }
    ++evaluated;
  }
  CHECK(evaluated == 100);
}

TEST_CASE("component dump matches the golden file") {
  const auto m = wavy_metric();
  const auto cs = assemble_connection(m, {0.25, -0.5, 1.0}, 0.75);
  const auto dump = dump_components(cs);
  CHECK(dump.size() == 4 * 4 * 4 * 4);  // Chr, S, Gamma, Q tables
  CHECK(dump.count("Gamma^o_ox") == 1);
  CHECK(dump.count("S^o_xo") == 1);
  CHECK(dump.count("Q_xoo") == 1);

  const char* path = KFIELD_TEST_DATA "/connection_golden.json";
  if (std::getenv("KFIELD_UPDATE_GOLDEN")) {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : dump) j[k] = v;
    std::ofstream out(path);
    out << j.dump(2) << "\n";
  }
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "golden file missing; run with KFIELD_UPDATE_GOLDEN=1");
  nlohmann::json golden;
  in >> golden;
  REQUIRE(golden.size() == dump.size());
  for (const auto& [key, value] : dump) {
    REQUIRE_MESSAGE(golden.contains(key), key.c_str());
    CHECK(value == doctest::Approx(golden[key].get<double>()).epsilon(1e-14));
  }
}

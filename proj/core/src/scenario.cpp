#include "kfield/scenario.hpp"

#include <set>

#include <json.hpp>

#include "kfield/errors.hpp"

namespace kfield::cli {

using nlohmann::ordered_json;

namespace {

void reject_unknown(const ordered_json& obj, const std::set<std::string>& known,
                    const std::string& path, bool strict) {
  if (!strict) return;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key()))
      throw SchemaError("unknown key '" + path + it.key() + "'");
  }
}

double get_number(const ordered_json& obj, const std::string& key, const std::string& path,
                  std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw SchemaError("missing required field '" + path + key + "'");
  }
  if (!obj[key].is_number())
    throw SchemaError("field '" + path + key + "' must be a number");
  return obj[key].get<double>();
}

Vec3 get_vec3(const ordered_json& obj, const std::string& key, const std::string& path,
              std::optional<Vec3> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw SchemaError("missing required field '" + path + key + "'");
  }
  const auto& a = obj[key];
  if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() ||
      !a[2].is_number())
    throw SchemaError("field '" + path + key + "' must be a 3-element numeric array");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

std::vector<double> get_array(const ordered_json& obj, const std::string& key,
                              const std::string& path) {
  const auto& a = obj[key];
  if (!a.is_array()) throw SchemaError("field '" + path + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number()) throw SchemaError("field '" + path + key + "' must be numeric");
    out.push_back(v.get<double>());
  }
  return out;
}

CheckSpec parse_check(const ordered_json& obj, const std::string& name, bool strict) {
  const std::string path = "checks." + name + ".";
  reject_unknown(obj, {"tol", "goo_min"}, path, strict);
  CheckSpec spec = default_check(name);
  spec.tol = get_number(obj, "tol", path, spec.tol);
  spec.goo_min = get_number(obj, "goo_min", path, spec.goo_min);
  if (spec.tol <= 0.0) throw SchemaError("field '" + path + "tol' must be positive");
  return spec;
}

}  // namespace

CheckSpec default_check(const std::string& name) {
  if (name == "isotropy") return {1e-3, 0.0};
  if (name == "geodesic") return {1e-6, 0.0};
  if (name == "p0") return {1e-8, 0.0};
  if (name == "eq10") return {1e-9, 0.0};
  throw SchemaError("no default for check '" + name + "'");
}

Scenario parse_scenario(const std::string& text, bool strict) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("scenario document must be a JSON object");

  reject_unknown(doc,
                 {"schema_version", "name", "particle", "potential", "constants", "integrator",
                  "initial", "checks", "output_dir", "seed"},
                 "", strict);

  Scenario s;
  if (doc.contains("schema_version")) {
    if (!doc["schema_version"].is_number_integer())
      throw SchemaError("field 'schema_version' must be an integer");
    s.schema_version = doc["schema_version"].get<int>();
    if (s.schema_version != 1) throw SchemaError("unsupported schema_version");
  }

  if (!doc.contains("name") || !doc["name"].is_string())
    throw SchemaError("missing required field 'name'");
  s.name = doc["name"].get<std::string>();

  if (doc.contains("particle")) {
    const auto& p = doc["particle"];
    reject_unknown(p, {"m", "e"}, "particle.", strict);
    s.particle.mass = get_number(p, "m", "particle.", 1.0);
    s.particle.charge = get_number(p, "e", "particle.", 0.0);
    if (s.particle.mass <= 0.0) throw SchemaError("field 'particle.m' must be positive");
  }

  if (!doc.contains("potential") || !doc["potential"].is_object())
    throw SchemaError("missing required field 'potential'");
  {
    const auto& p = doc["potential"];
    reject_unknown(p, {"kind", "parameters", "samples"}, "potential.", strict);
    if (!p.contains("kind") || !p["kind"].is_string())
      throw SchemaError("missing required field 'potential.kind'");
    s.potential_kind = dyn::potential_kind_from_string(p["kind"].get<std::string>());
    if (p.contains("parameters")) {
      for (auto it = p["parameters"].begin(); it != p["parameters"].end(); ++it) {
        if (!it.value().is_number())
          throw SchemaError("field 'potential.parameters." + it.key() + "' must be a number");
        s.potential_params[it.key()] = it.value().get<double>();
      }
    }
    if (s.potential_kind == dyn::PotentialKind::UserTable) {
      if (!p.contains("samples") || !p["samples"].is_object())
        throw SchemaError("missing required field 'potential.samples'");
      reject_unknown(p["samples"], {"x", "V"}, "potential.samples.", strict);
      if (!p["samples"].contains("x") || !p["samples"].contains("V"))
        throw SchemaError("potential.samples needs 'x' and 'V' arrays");
      s.table_x = get_array(p["samples"], "x", "potential.samples.");
      s.table_v = get_array(p["samples"], "V", "potential.samples.");
    }
    // Validate parameter completeness now so errors carry the JSON path.
    try {
      build_potential(s);
    } catch (const SchemaError&) {
      throw;
    }
  }

  if (doc.contains("constants")) {
    const auto& k = doc["constants"];
    reject_unknown(k, {"c", "hbar"}, "constants.", strict);
    s.c = get_number(k, "c", "constants.", 1.0);
    s.hbar = get_number(k, "hbar", "constants.", 1.0);
    if (s.c <= 0.0) throw SchemaError("field 'constants.c' must be positive");
  }

  if (doc.contains("integrator")) {
    const auto& in = doc["integrator"];
    reject_unknown(in, {"scheme", "h", "n"}, "integrator.", strict);
    if (in.contains("scheme")) {
      if (!in["scheme"].is_string())
        throw SchemaError("field 'integrator.scheme' must be a string");
      s.scheme = dyn::scheme_from_string(in["scheme"].get<std::string>());
    }
    s.h = get_number(in, "h", "integrator.", 1e-3);
    if (in.contains("n")) {
      if (!in["n"].is_number_integer())
        throw SchemaError("field 'integrator.n' must be an integer");
      s.n = in["n"].get<int>();
    }
    if (s.h <= 0.0) throw SchemaError("field 'integrator.h' must be positive");
    if (s.n < 0) throw SchemaError("field 'integrator.n' must be non-negative");
  }

  if (doc.contains("initial")) {
    const auto& in = doc["initial"];
    reject_unknown(in, {"t", "x", "v"}, "initial.", strict);
    s.initial.t = get_number(in, "t", "initial.", 0.0);
    s.initial.x = get_vec3(in, "x", "initial.", Vec3{});
    s.initial.v = get_vec3(in, "v", "initial.", Vec3{0.5, 0.0, 0.0});
  }

  if (doc.contains("checks")) {
    const auto& c = doc["checks"];
    reject_unknown(c, {"isotropy", "geodesic", "p0", "eq10", "dispersion", "stability"},
                   "checks.", strict);
    if (c.contains("isotropy")) s.isotropy = parse_check(c["isotropy"], "isotropy", strict);
    if (c.contains("geodesic")) s.geodesic = parse_check(c["geodesic"], "geodesic", strict);
    if (c.contains("p0")) s.p0 = parse_check(c["p0"], "p0", strict);
    if (c.contains("eq10")) s.closure = parse_check(c["eq10"], "eq10", strict);
    if (c.contains("dispersion")) {
      const auto& d = c["dispersion"];
      reject_unknown(d, {"tol", "goo", "kx", "nx", "nt", "length", "cfl"},
                     "checks.dispersion.", strict);
      DispersionSpec spec;
      spec.tol = get_number(d, "tol", "checks.dispersion.", spec.tol);
      if (d.contains("goo")) spec.goo = get_array(d, "goo", "checks.dispersion.");
      if (d.contains("kx")) spec.kx = get_array(d, "kx", "checks.dispersion.");
      spec.nx = static_cast<int>(get_number(d, "nx", "checks.dispersion.", spec.nx));
      spec.nt = static_cast<int>(get_number(d, "nt", "checks.dispersion.", spec.nt));
      spec.length = get_number(d, "length", "checks.dispersion.", spec.length);
      spec.cfl = get_number(d, "cfl", "checks.dispersion.", spec.cfl);
      if (spec.tol <= 0.0) throw SchemaError("field 'checks.dispersion.tol' must be positive");
      for (double g : spec.goo)
        if (g <= 0.0 || g >= 1.0)
          throw SchemaError("field 'checks.dispersion.goo' entries must lie in (0, 1)");
      s.dispersion = spec;
    }
    if (c.contains("stability")) {
      const auto& st = c["stability"];
      reject_unknown(st,
                     {"tol", "energies", "horizon", "renorm", "samples", "expect", "lambda",
                      "rtol"},
                     "checks.stability.", strict);
      StabilitySpec spec;
      spec.tol = get_number(st, "tol", "checks.stability.", spec.tol);
      if (st.contains("energies")) spec.energies = get_array(st, "energies", "checks.stability.");
      spec.horizon = get_number(st, "horizon", "checks.stability.", spec.horizon);
      spec.renorm = get_number(st, "renorm", "checks.stability.", spec.renorm);
      spec.samples = static_cast<int>(get_number(st, "samples", "checks.stability.",
                                                 spec.samples));
      if (st.contains("expect")) {
        if (!st["expect"].is_string())
          throw SchemaError("field 'checks.stability.expect' must be a string");
        spec.expect = st["expect"].get<std::string>();
        if (spec.expect != "stable" && spec.expect != "unstable-band" && spec.expect != "lambda")
          throw SchemaError("field 'checks.stability.expect' must be one of "
                            "stable|unstable-band|lambda");
      }
      spec.lambda_expect = get_number(st, "lambda", "checks.stability.", spec.lambda_expect);
      spec.lambda_rtol = get_number(st, "rtol", "checks.stability.", spec.lambda_rtol);
      if (spec.tol <= 0.0) throw SchemaError("field 'checks.stability.tol' must be positive");
      s.stability = spec;
    }
  } else {
    s.isotropy = default_check("isotropy");
    s.geodesic = default_check("geodesic");
    s.p0 = default_check("p0");
    s.closure = default_check("eq10");
  }

  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string())
      throw SchemaError("field 'output_dir' must be a string");
    s.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
      throw SchemaError("field 'seed' must be an integer");
    s.seed = doc["seed"].get<std::uint64_t>();
  }
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  ordered_json doc;
  doc["schema_version"] = s.schema_version;
  doc["name"] = s.name;
  doc["particle"] = {{"m", s.particle.mass}, {"e", s.particle.charge}};
  doc["potential"]["kind"] = dyn::to_string(s.potential_kind);
  if (!s.potential_params.empty()) {
    for (const auto& [k, v] : s.potential_params) doc["potential"]["parameters"][k] = v;
  }
  if (s.potential_kind == dyn::PotentialKind::UserTable) {
    doc["potential"]["samples"]["x"] = s.table_x;
    doc["potential"]["samples"]["V"] = s.table_v;
  }
  doc["constants"] = {{"c", s.c}, {"hbar", s.hbar}};
  doc["integrator"] = {{"scheme", dyn::to_string(s.scheme)}, {"h", s.h}, {"n", s.n}};
  doc["initial"] = {{"t", s.initial.t},
                    {"x", {s.initial.x.x, s.initial.x.y, s.initial.x.z}},
                    {"v", {s.initial.v.x, s.initial.v.y, s.initial.v.z}}};
  ordered_json checks = ordered_json::object();
  auto put_check = [&checks](const char* name, const std::optional<CheckSpec>& spec) {
    if (spec) checks[name] = {{"tol", spec->tol}, {"goo_min", spec->goo_min}};
  };
  put_check("isotropy", s.isotropy);
  put_check("geodesic", s.geodesic);
  put_check("p0", s.p0);
  put_check("eq10", s.closure);
  if (s.dispersion) {
    const auto& d = *s.dispersion;
    checks["dispersion"] = {{"tol", d.tol}, {"goo", d.goo},       {"kx", d.kx},
                            {"nx", d.nx},   {"nt", d.nt},         {"length", d.length},
                            {"cfl", d.cfl}};
  }
  if (s.stability) {
    const auto& st = *s.stability;
    checks["stability"] = {{"tol", st.tol},       {"energies", st.energies},
                           {"horizon", st.horizon}, {"renorm", st.renorm},
                           {"samples", st.samples}, {"expect", st.expect},
                           {"lambda", st.lambda_expect}, {"rtol", st.lambda_rtol}};
  }
  doc["checks"] = checks;
  if (!s.output_dir.empty()) doc["output_dir"] = s.output_dir;
  doc["seed"] = s.seed;
  return doc.dump(2);
}

bool operator==(const Scenario& a, const Scenario& b) {
  auto eq_check = [](const std::optional<CheckSpec>& x, const std::optional<CheckSpec>& y) {
    if (x.has_value() != y.has_value()) return false;
    if (!x) return true;
    return x->tol == y->tol && x->goo_min == y->goo_min;
  };
  bool base = a.schema_version == b.schema_version && a.name == b.name &&
              a.particle.mass == b.particle.mass && a.particle.charge == b.particle.charge &&
              a.potential_kind == b.potential_kind && a.potential_params == b.potential_params &&
              a.table_x == b.table_x && a.table_v == b.table_v && a.c == b.c &&
              a.hbar == b.hbar && a.scheme == b.scheme && a.h == b.h && a.n == b.n &&
              a.initial.t == b.initial.t && a.initial.x.x == b.initial.x.x &&
              a.initial.x.y == b.initial.x.y && a.initial.x.z == b.initial.x.z &&
              a.initial.v.x == b.initial.v.x && a.initial.v.y == b.initial.v.y &&
              a.initial.v.z == b.initial.v.z && a.output_dir == b.output_dir && a.seed == b.seed;
  if (!base) return false;
  if (!eq_check(a.isotropy, b.isotropy) || !eq_check(a.geodesic, b.geodesic) ||
      !eq_check(a.p0, b.p0) || !eq_check(a.closure, b.closure))
    return false;
  if (a.dispersion.has_value() != b.dispersion.has_value()) return false;
  if (a.dispersion) {
    const auto &x = *a.dispersion, &y = *b.dispersion;
    if (!(x.tol == y.tol && x.goo == y.goo && x.kx == y.kx && x.nx == y.nx && x.nt == y.nt &&
          x.length == y.length && x.cfl == y.cfl))
      return false;
  }
  if (a.stability.has_value() != b.stability.has_value()) return false;
  if (a.stability) {
    const auto &x = *a.stability, &y = *b.stability;
    if (!(x.tol == y.tol && x.energies == y.energies && x.horizon == y.horizon &&
          x.renorm == y.renorm && x.samples == y.samples && x.expect == y.expect &&
          x.lambda_expect == y.lambda_expect && x.lambda_rtol == y.lambda_rtol))
      return false;
  }
  return true;
}

dyn::Potential build_potential(const Scenario& s) {
  if (s.potential_kind == dyn::PotentialKind::UserTable)
    return dyn::make_table_potential(s.table_x, s.table_v);
  return dyn::make_potential(s.potential_kind, s.potential_params);
}

}  // namespace kfield::cli

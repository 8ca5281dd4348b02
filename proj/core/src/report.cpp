#include "kfield/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "kfield/errors.hpp"

namespace kfield::cli {

using nlohmann::ordered_json;

bool RunReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string report_to_json(const RunReport& r) {
  ordered_json doc;
  doc["scenario"] = r.scenario;
  doc["schema_version"] = r.schema_version;
  doc["checks"] = ordered_json::array();
  for (const auto& c : r.checks) {
    ordered_json jc;
    jc["name"] = c.name;
    jc["max_residual"] = c.max_residual;
    jc["tolerance"] = c.tolerance;
    jc["pass"] = c.pass;
    jc["excluded_steps"] = c.excluded_steps;
    if (!c.detail.empty()) jc["detail"] = c.detail;
    doc["checks"].push_back(jc);
  }
  doc["environment"] = {{"version", r.version}, {"timestamp", r.timestamp},
                        {"seed", r.seed},       {"scheme", r.scheme},
                        {"h", r.h},             {"n", r.n}};
  return doc.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("report is not valid JSON: ") + e.what());
  }
  RunReport r;
  r.scenario = doc.at("scenario").get<std::string>();
  r.schema_version = doc.at("schema_version").get<int>();
  for (const auto& jc : doc.at("checks")) {
    CheckResult c;
    c.name = jc.at("name").get<std::string>();
    c.max_residual = jc.at("max_residual").get<double>();
    c.tolerance = jc.at("tolerance").get<double>();
    c.pass = jc.at("pass").get<bool>();
    if (jc.contains("excluded_steps"))
      c.excluded_steps = jc["excluded_steps"].get<std::vector<int>>();
    if (jc.contains("detail")) c.detail = jc["detail"].get<std::string>();
    r.checks.push_back(std::move(c));
  }
  const auto& env = doc.at("environment");
  r.version = env.at("version").get<std::string>();
  r.timestamp = env.at("timestamp").get<std::string>();
  r.seed = env.at("seed").get<std::uint64_t>();
  r.scheme = env.at("scheme").get<std::string>();
  r.h = env.at("h").get<double>();
  r.n = env.at("n").get<int>();
  return r;
}

void write_report(const RunReport& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << report_to_json(r);
}

RunReport load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

std::vector<DiffEntry> compare_runs(const RunReport& a, const RunReport& b) {
  if (a.scenario != b.scenario)
    throw MismatchError("reports describe different scenarios: '" + a.scenario + "' vs '" +
                        b.scenario + "'");
  std::vector<DiffEntry> out;
  for (const auto& ca : a.checks) {
    for (const auto& cb : b.checks) {
      if (ca.name != cb.name) continue;
      if (ca.max_residual == cb.max_residual) continue;
      DiffEntry d;
      d.check = ca.name;
      d.residual_a = ca.max_residual;
      d.residual_b = cb.max_residual;
      d.ratio = cb.max_residual != 0.0 ? ca.max_residual / cb.max_residual
                                       : std::numeric_limits<double>::infinity();
      d.regression = cb.max_residual > 2.0 * ca.max_residual && cb.max_residual > 1e-15;
      out.push_back(d);
    }
  }
  return out;
}

}  // namespace kfield::cli

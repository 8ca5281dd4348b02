// kfield: scenario-driven checks of the force-metrization geometry at desk
// scale. Subcommands: run, check, scan-dispersion, scan-stability, diff.
// Exit codes: 0 all checks passed, 2 some check failed, 1 error.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "kfield/csvio.hpp"
#include "kfield/errors.hpp"
#include "kfield/report.hpp"
#include "kfield/runner.hpp"
#include "kfield/scenario.hpp"
#include "kfield/version.hpp"

namespace {

using namespace kfield;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_report(const cli::RunReport& r) {
  std::cout << "scenario " << r.scenario << " (scheme=" << r.scheme << ", h=" << r.h
            << ", n=" << r.n << ", seed=" << r.seed << ")\n";
  for (const auto& c : r.checks) {
    std::cout << "  " << (c.pass ? "PASS" : "FAIL") << "  " << c.name
              << "  max=" << io::format_double(c.max_residual)
              << " tol=" << io::format_double(c.tolerance);
    if (!c.excluded_steps.empty()) std::cout << "  excluded=" << c.excluded_steps.size();
    if (!c.detail.empty()) std::cout << "  [" << c.detail << "]";
    std::cout << "\n";
  }
}

int run_files(const std::vector<std::string>& files, const cli::RunOptions& base, bool strict,
              int jobs) {
  std::vector<cli::Scenario> scenarios;
  for (const auto& f : files) scenarios.push_back(cli::parse_scenario(slurp(f), strict));

  std::vector<cli::RunReport> reports(scenarios.size());
  if (jobs > 1 && scenarios.size() > 1) {
    std::vector<std::future<cli::RunReport>> futures;
    futures.reserve(scenarios.size());
    for (const auto& s : scenarios)
      futures.push_back(std::async(std::launch::async,
                                   [&base, s]() { return cli::run_scenario(s, base); }));
    for (size_t i = 0; i < futures.size(); ++i) reports[i] = futures[i].get();
  } else {
    for (size_t i = 0; i < scenarios.size(); ++i)
      reports[i] = cli::run_scenario(scenarios[i], base);
  }

  int worst = 0;
  for (const auto& r : reports) {
    print_report(r);
    const int code = cli::exit_code_for(r);
    if (code == 1) return 1;
    worst = std::max(worst, code);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-field geometry checks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kfield::kVersion);

  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool strict = false;
  int jobs = 1;
  app.add_option("--out", out_dir, "output directory (overrides scenario and KFIELD_OUT)");
  auto* seed_opt = app.add_option("--seed", seed, "override scenario seed");
  app.add_flag("--strict", strict, "reject unknown scenario keys");
  app.add_option("--jobs", jobs, "run independent scenarios concurrently")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> run_files_arg, check_files_arg;
  std::string disp_file, stab_file, diff_a, diff_b;

  auto* cmd_run = app.add_subcommand("run", "run scenarios, write artifacts and reports");
  cmd_run->add_option("scenario", run_files_arg, "scenario JSON file(s)")
      ->required()
      ->check(CLI::ExistingFile);

  auto* cmd_check = app.add_subcommand("check", "run checks only, no artifact CSVs");
  cmd_check->add_option("scenario", check_files_arg, "scenario JSON file(s)")
      ->required()
      ->check(CLI::ExistingFile);

  auto* cmd_disp = app.add_subcommand("scan-dispersion", "dispersion scan only");
  cmd_disp->add_option("scenario", disp_file, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);

  auto* cmd_stab = app.add_subcommand("scan-stability", "stability scan only");
  cmd_stab->add_option("scenario", stab_file, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);

  auto* cmd_diff = app.add_subcommand("diff", "compare two report.json files");
  cmd_diff->add_option("a", diff_a, "baseline report")->required()->check(CLI::ExistingFile);
  cmd_diff->add_option("b", diff_b, "candidate report")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;

  cli::RunOptions opts;
  opts.output_dir = out_dir;
  if (seed_set) opts.seed_override = seed;

  try {
    if (*cmd_run) {
      return run_files(run_files_arg, opts, strict, jobs);
    }
    if (*cmd_check) {
      opts.write_artifacts = false;
      return run_files(check_files_arg, opts, strict, jobs);
    }
    if (*cmd_disp) {
      opts.dispersion_only = true;
      auto s = cli::parse_scenario(slurp(disp_file), strict);
      if (!s.dispersion) s.dispersion = cli::DispersionSpec{};
      const auto report = cli::run_scenario(s, opts);
      print_report(report);
      return cli::exit_code_for(report);
    }
    if (*cmd_stab) {
      opts.stability_only = true;
      auto s = cli::parse_scenario(slurp(stab_file), strict);
      if (!s.stability) s.stability = cli::StabilitySpec{};
      const auto report = cli::run_scenario(s, opts);
      print_report(report);
      return cli::exit_code_for(report);
    }
    if (*cmd_diff) {
      const auto a = cli::load_report(diff_a);
      const auto b = cli::load_report(diff_b);
      const auto diff = cli::compare_runs(a, b);
      if (diff.empty()) {
        std::cout << "no residual differences\n";
      } else {
        std::cout << "check ratio(a/b) residual_a residual_b\n";
        for (const auto& d : diff) {
          std::cout << d.check << " " << io::format_double(d.ratio) << " "
                    << io::format_double(d.residual_a) << " " << io::format_double(d.residual_b)
                    << (d.regression ? "  REGRESSION" : "") << "\n";
        }
      }
      return 0;
    }
  } catch (const kfield::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

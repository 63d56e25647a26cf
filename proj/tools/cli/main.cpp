#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "scenario/scenario.hpp"

namespace sc = nessresp::scenario;

int main(int argc, char** argv) {
  CLI::App app{"Linear response of open quantum systems around nonequilibrium steady states"};
  app.set_version_flag("--version", sc::kToolVersion);
  app.require_subcommand(1);

  bool strict = false;
  int threads = 1;
  double tolerance = 0.0;
  app.add_flag("--strict", strict, "exit 4 when the equivalence report fails; warnings fail validate");
  app.add_option("--threads", threads, "worker threads for the response forms")->check(CLI::Range(1, 256));
  auto* tol_opt = app.add_option("--tolerance", tolerance, "absolute tolerance between exact forms")
                      ->check(CLI::PositiveNumber);

  std::string config;
  auto* run = app.add_subcommand("run", "run a scenario and write its data files");
  run->add_option("config", config, "scenario file (YAML)")->required();

  std::string vconfig;
  auto* validate = app.add_subcommand("validate", "check a scenario without solving it");
  validate->add_option("config", vconfig, "scenario file (YAML)")->required();

  std::string which, out;
  auto* figure = app.add_subcommand("figure", "closed-form data behind the step-response figures");
  figure->add_option("name", which, "fig2 or fig3")->required()->check(CLI::IsMember({"fig2", "fig3"}));
  figure->add_option("--out", out, "output directory")->required();

  // Global flags are also accepted after the subcommand.
  for (CLI::App* sub : {run, validate, figure}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sc::kExitConfig;
  }

  if (*run) {
    sc::RunOptions opt;
    opt.strict = strict;
    opt.threads = threads;
    if (*tol_opt) opt.tolerance = tolerance;
    const sc::RunResult r = sc::run_scenario(config, opt);
    if (!r.message.empty()) std::cerr << r.message;
    if (r.report) {
      std::cout << r.report->format();
      std::cout << "wrote " << r.output_dir.string() << "\n";
    }
    return r.exit_code;
  }

  if (*validate) {
    const auto diags = sc::validate_config(vconfig);
    bool fail = false;
    for (const auto& d : diags) {
      std::cout << d.format() << "\n";
      fail |= d.severity == sc::Diagnostic::Severity::Error || strict;
    }
    if (diags.empty()) std::cout << "ok\n";
    return fail ? sc::kExitConfig : sc::kExitOk;
  }

  try {
    const auto file = sc::figure_data(which == "fig2" ? sc::Figure::Fig2 : sc::Figure::Fig3, out);
    std::cout << "wrote " << file.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sc::kExitSolver;
  }
  return sc::kExitOk;
}

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scenario/config.hpp"

namespace nessresp::scenario {

inline constexpr const char* kToolVersion = "0.1.0";
/// Sign and layout conventions the numbers depend on.
inline constexpr const char* kConventionId = "gkls-minus-half/column-stacking/heisenberg-dual";

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitTolerance = 4,
};

struct PairDeviation {
  ResponseForm a;
  ResponseForm b;
  double max_abs = 0.0;
  double max_rel = 0.0;  // max |a − b| / max(max|a|, max|b|)
  bool checked = false;  // false: different dynamics, reported only
  double tolerance = 0.0;
  bool relative = false;  // tolerance applies to max_rel
  bool pass = true;
};

struct EquivalenceReport {
  std::vector<PairDeviation> pairs;  // every computed pair once, declaration order
  std::vector<std::pair<std::string, double>> leakage;
  bool pass() const;
  std::string format() const;
};

/// Pairwise comparison of computed curves. R-type forms and the analytic curve
/// share the open dynamics; K1/K2 share the closed one. Cross pairs are listed
/// but not checked.
EquivalenceReport compare_forms(const std::vector<ResponseCurve>& curves, const Tolerances& tol);

struct RunOptions {
  bool strict = false;
  int threads = 1;
  std::optional<double> tolerance;  // overrides tolerances.exact
};

struct RunResult {
  int exit_code = kExitOk;
  std::string message;  // diagnostics or error text
  std::optional<EquivalenceReport> report;
  fs::path output_dir;
};

/// Computes the requested curves and writes response.csv, trajectory.csv
/// (when a protocol is configured), report.txt and meta.txt.
RunResult run_scenario(const fs::path& config_path, const RunOptions& options = {});
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

enum class Figure { Fig2, Fig3 };

/// Closed-form curves behind the two step-response figures; writes <name>.csv
/// into `out` and returns its path.
fs::path figure_data(Figure which, const fs::path& out);

/// Canonical figure parameters.
TwoOscillatorParams figure_params(Figure which);

/// %.17g
std::string format_number(double x);

}  // namespace nessresp::scenario

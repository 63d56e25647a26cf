#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nessresp/lindblad.hpp"
#include "nessresp/oracle.hpp"
#include "nessresp/response.hpp"

namespace nessresp::scenario {

namespace fs = std::filesystem;

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string key;  // dotted path, e.g. model.two_oscillator.beta1
  int line = 0;     // 1-based, 0 when unknown
  std::string message;

  std::string format() const;
};

struct TwoOscillatorModel {
  TwoOscillatorParams params;
  std::optional<oracle::Truncation> truncation;  // unset: suggested_truncation(params, 1e-9)
};

struct GenericModel {
  fs::path hamiltonian;
  struct Jump {
    fs::path op;
    double rate = 0.0;
  };
  std::vector<Jump> jumps;
  double hbar = 1.0;
};

struct ProtocolSpec {
  std::optional<double> step;  // set for ε(t) = εΘ(t)
  std::vector<double> t;       // sampled otherwise
  std::vector<double> eps;

  PerturbationProtocol build() const;
  double amplitude() const;
};

struct Tolerances {
  double exact = 1e-8;              // absolute, between R1/R2/R3 and K1/K2
  double finite_difference = 1e-5;  // absolute, any pair involving R2alt
  double analytic = 1e-3;           // relative to max |analytic|
};

struct ScenarioConfig {
  fs::path source;  // the config file; relative paths resolve against its directory
  std::variant<TwoOscillatorModel, GenericModel> model;
  std::optional<double> kubo_beta;       // inverse temperature of K1/K2
  std::optional<fs::path> observable;    // unset: energy1
  std::optional<fs::path> perturbation;  // unset: coupling
  std::optional<ProtocolSpec> protocol;  // set: trajectory.csv is written
  double t_max = 0.0;
  int points = 0;
  std::vector<ResponseForm> forms;  // declaration order, unique
  Tolerances tolerances;
  fs::path outputs;

  bool is_two_oscillator() const { return std::holds_alternative<TwoOscillatorModel>(model); }
  std::vector<double> grid() const;
};

/// Leakage bound flagged by validation and recorded in reports.
inline constexpr double kLeakageWarning = 1e-8;
/// Default leakage target for two-oscillator truncations.
inline constexpr double kDefaultLeakage = 1e-9;
/// Largest Hilbert dimension the Fock engine is asked to handle.
inline constexpr int kMaxHilbertDimension = 2000;

struct ParseResult {
  std::optional<ScenarioConfig> config;
  std::vector<Diagnostic> diagnostics;

  bool ok() const;
};

/// Schema check only: unknown keys, types, missing keys. Never throws.
ParseResult parse_config(const fs::path& path);
ParseResult parse_config_string(std::string_view text, const fs::path& source);

/// Schema plus physics checks (file contents, dimensions, rates, truncation
/// adequacy) without running any solver. Never throws.
std::vector<Diagnostic> validate_config(const fs::path& path);
std::vector<Diagnostic> validate_config(const ScenarioConfig& config);

/// Truncation in force for a two-oscillator scenario.
oracle::Truncation resolved_truncation(const TwoOscillatorModel& model);

fs::path resolve(const ScenarioConfig& config, const fs::path& p);

}  // namespace nessresp::scenario

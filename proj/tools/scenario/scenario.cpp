#include "scenario/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "nessresp/error.hpp"
#include "scenario/matrix_io.hpp"

namespace nessresp::scenario {

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

namespace {

bool open_dynamics(ResponseForm f) { return f != ResponseForm::K1 && f != ResponseForm::K2; }

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

bool EquivalenceReport::pass() const {
  return std::all_of(pairs.begin(), pairs.end(), [](const PairDeviation& p) { return p.pass; });
}

std::string EquivalenceReport::format() const {
  std::ostringstream os;
  os << fmt::format("{:<16} {:<24} {:<24} {}\n", "pair", "max_abs", "max_rel", "check");
  for (const PairDeviation& p : pairs) {
    std::string check = "n/a (different dynamics)";
    if (p.checked)
      check = fmt::format("{} {} <= {:g}", p.pass ? "PASS" : "FAIL", p.relative ? "max_rel" : "max_abs",
                          p.tolerance);
    os << fmt::format("{:<16} {:<24} {:<24} {}\n", fmt::format("{}-{}", to_string(p.a), to_string(p.b)),
                      format_number(p.max_abs), format_number(p.max_rel), check);
  }
  for (const auto& [name, value] : leakage) {
    os << fmt::format("leakage {} = {}{}\n", name, format_number(value),
                      value > kLeakageWarning ? "  (above " + fmt::format("{:g}", kLeakageWarning) + ")" : "");
  }
  os << "overall: " << (pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

EquivalenceReport compare_forms(const std::vector<ResponseCurve>& curves, const Tolerances& tol) {
  EquivalenceReport report;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = i + 1; j < curves.size(); ++j) {
      const ResponseCurve& x = curves[i];
      const ResponseCurve& y = curves[j];
      PairDeviation d{x.form, y.form};
      for (std::size_t k = 0; k < x.values.size(); ++k)
        d.max_abs = std::max(d.max_abs, std::abs(x.values[k] - y.values[k]));
      const double scale = max_abs(y.values);
      d.max_rel = scale > 0.0 ? d.max_abs / scale : (d.max_abs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      d.checked = open_dynamics(x.form) == open_dynamics(y.form);
      if (x.form == ResponseForm::Analytic || y.form == ResponseForm::Analytic) {
        d.relative = true;
        d.tolerance = tol.analytic;
      } else if (x.form == ResponseForm::R2alt || y.form == ResponseForm::R2alt) {
        d.tolerance = tol.finite_difference;
      } else {
        d.tolerance = tol.exact;
      }
      if (d.checked) d.pass = (d.relative ? d.max_rel : d.max_abs) <= d.tolerance;
      report.pairs.push_back(d);
    }
  }
  return report;
}

namespace {

struct Problem {
  LindbladModel model;
  Operator a;
  Operator h_i;
  std::optional<TwoOscillatorParams> params;
  std::optional<oracle::Truncation> truncation;
};

Problem build_problem(const ScenarioConfig& cfg) {
  if (const auto* two = std::get_if<TwoOscillatorModel>(&cfg.model)) {
    TwoOscillatorParams p = two->params;
    if (cfg.protocol) p.eps = cfg.protocol->amplitude();
    const oracle::Truncation tr = resolved_truncation(*two);
    TwoOscillatorSystem sys = build_two_oscillator_model(p, tr.n1, tr.n2);
    return {std::move(sys.model), std::move(sys.energy1), std::move(sys.coupling), p, tr};
  }
  const auto& g = std::get<GenericModel>(cfg.model);
  const Matrix h = read_matrix_file(resolve(cfg, g.hamiltonian));
  const HilbertSpace space = HilbertSpace::single(static_cast<int>(h.rows()));
  std::vector<JumpOperator> jumps;
  for (const auto& j : g.jumps) jumps.push_back({Operator(space, read_matrix_file(resolve(cfg, j.op))), j.rate});
  return {LindbladModel(Operator(space, h), std::move(jumps), g.hbar),
          Operator(space, read_matrix_file(resolve(cfg, *cfg.observable))),
          Operator(space, read_matrix_file(resolve(cfg, *cfg.perturbation))), std::nullopt, std::nullopt};
}

// Runs tasks on up to `threads` workers; results keep task order, the first
// failure in task order is rethrown.
std::vector<ResponseCurve> run_tasks(const std::vector<std::function<ResponseCurve()>>& tasks, int threads) {
  std::vector<std::optional<ResponseCurve>> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < tasks.size();) {
      try {
        results[k] = tasks[k]();
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<ResponseCurve> out;
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

void write_response_csv(const fs::path& file, const std::vector<double>& grid, const std::vector<ResponseCurve>& curves) {
  std::ofstream os(file);
  os << "tau";
  for (const auto& c : curves) os << ',' << to_string(c.form);
  os << '\n';
  for (std::size_t k = 0; k < grid.size(); ++k) {
    os << format_number(grid[k]);
    for (const auto& c : curves) os << ',' << format_number(c.values[k]);
    os << '\n';
  }
  if (!os) throw std::runtime_error("failed writing " + file.string());
}

std::string describe(const ProtocolSpec& p) {
  if (p.step) return "step " + format_number(*p.step);
  std::string s = "sampled";
  for (std::size_t k = 0; k < p.t.size(); ++k) s += " (" + format_number(p.t[k]) + ", " + format_number(p.eps[k]) + ")";
  return s;
}

}  // namespace

RunResult run_scenario(const fs::path& config_path, const RunOptions& options) {
  ParseResult parsed = parse_config(config_path);
  if (!parsed.ok()) {
    RunResult r;
    r.exit_code = kExitConfig;
    for (const auto& d : parsed.diagnostics) r.message += d.format() + "\n";
    return r;
  }
  return run_scenario(*parsed.config, options);
}

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  RunResult result;
  ScenarioConfig cfg = config;
  if (options.tolerance) cfg.tolerances.exact = *options.tolerance;

  std::vector<Diagnostic> diags;
  try {
    diags = validate_config(cfg);
  } catch (const std::exception& e) {
    diags.push_back({Diagnostic::Severity::Error, "", 0, e.what()});
  }
  bool config_error = false;
  for (const auto& d : diags) {
    result.message += d.format() + "\n";
    config_error |= d.severity == Diagnostic::Severity::Error;
  }
  if (config_error) {
    result.exit_code = kExitConfig;
    return result;
  }

  try {
    const Problem prob = build_problem(cfg);
    const std::vector<double> grid = cfg.grid();
    const double hbar = prob.model.hbar();
    const Superoperator l0 = build_lindblad_generator(prob.model);
    const Superoperator l1 = build_commutator_generator(prob.h_i, hbar);

    auto wants = [&](ResponseForm f) { return std::find(cfg.forms.begin(), cfg.forms.end(), f) != cfg.forms.end(); };
    const bool r_forms = wants(ResponseForm::R1) || wants(ResponseForm::R2) || wants(ResponseForm::R2alt) ||
                         wants(ResponseForm::R3);
    std::optional<SteadyStateSolution> ss;
    if (r_forms || cfg.protocol || prob.params) ss = steady_state(l0);
    std::optional<HeisenbergTrajectory> traj;
    if (r_forms) traj.emplace(l0, prob.a, grid, response_sector(l0, l1));

    std::vector<std::function<ResponseCurve()>> tasks;
    for (ResponseForm f : kAllForms) {
      switch (f) {
        case ResponseForm::R1:
          if (wants(f)) tasks.push_back([&] { return response_agarwal(*traj, l1, ss->pi0); });
          break;
        case ResponseForm::R2:
          if (wants(f))
            tasks.push_back([&] { return response_entropy(*traj, l0, first_order_correction(l0, l1, ss->pi0)); });
          break;
        case ResponseForm::R2alt:
          if (wants(f)) tasks.push_back([&] { return response_susceptibility(*traj, prob.model, prob.h_i); });
          break;
        case ResponseForm::R3:
          if (wants(f)) tasks.push_back([&] { return response_commutator(*traj, prob.h_i, ss->pi0, hbar); });
          break;
        case ResponseForm::K1:
          if (wants(f))
            tasks.push_back([&] {
              return response_kubo_k1(prob.a, prob.model.hamiltonian(), prob.h_i, *cfg.kubo_beta, grid, hbar);
            });
          break;
        case ResponseForm::K2:
          if (wants(f))
            tasks.push_back([&] {
              return response_kubo_k2(prob.a, prob.model.hamiltonian(), prob.h_i, *cfg.kubo_beta, grid, hbar);
            });
          break;
        case ResponseForm::Analytic:
          // always present for the two-oscillator model
          if (prob.params) tasks.push_back([&] { return oracle::analytic_curve(*prob.params, grid); });
          break;
      }
    }
    const std::vector<ResponseCurve> curves = run_tasks(tasks, options.threads);

    EquivalenceReport report = compare_forms(curves, cfg.tolerances);
    if (prob.truncation && ss) {
      report.leakage.emplace_back("oscillator1", truncation_leakage(ss->pi0, 0));
      report.leakage.emplace_back("oscillator2", truncation_leakage(ss->pi0, 1));
    }

    const fs::path out = resolve(cfg, cfg.outputs);
    fs::create_directories(out);
    result.output_dir = out;
    write_response_csv(out / "response.csv", grid, curves);

    std::string linear_form = "none";
    if (cfg.protocol) {
      const ResponseCurve* source = nullptr;
      for (ResponseForm pref : {ResponseForm::R3, ResponseForm::R2, ResponseForm::R1, ResponseForm::R2alt,
                                ResponseForm::Analytic, ResponseForm::K2, ResponseForm::K1}) {
        auto it = std::find_if(curves.begin(), curves.end(), [&](const ResponseCurve& c) { return c.form == pref; });
        if (it != curves.end()) {
          source = &*it;
          break;
        }
      }
      const PerturbationProtocol protocol = cfg.protocol->build();
      const TimeSeries lin = convolve(*source, protocol);
      const TimeSeries non = nonlinear_reference(l0, l1, ss->pi0, protocol, prob.a, grid);
      linear_form = std::string(to_string(source->form));
      std::ofstream os(out / "trajectory.csv");
      os << "t,linear_prediction,nonlinear_reference\n";
      for (std::size_t k = 0; k < grid.size(); ++k)
        os << format_number(grid[k]) << ',' << format_number(lin.values[k]) << ',' << format_number(non.values[k])
           << '\n';
    }

    {
      std::ofstream os(out / "report.txt");
      os << report.format();
    }
    {
      std::ofstream os(out / "meta.txt");
      os << "tool_version = " << kToolVersion << "\n";
      os << "convention = " << kConventionId << "\n";
      os << "config = " << cfg.source.filename().string() << "\n";
      if (prob.params) {
        const TwoOscillatorParams& p = *prob.params;
        os << "model = two_oscillator\n";
        os << "omega1 = " << format_number(p.omega1) << "\n";
        os << "omega2 = " << format_number(p.omega2()) << "\n";
        os << "delta = " << format_number(p.delta) << "\n";
        os << "gamma = " << format_number(p.gamma) << "\n";
        os << "lambda = " << format_number(p.lambda) << "\n";
        os << "beta1 = " << format_number(p.beta1) << "\n";
        os << "beta2 = " << format_number(p.beta2) << "\n";
        const oracle::Occupations n = oracle::occupations(p);
        os << "bath_n1 = " << format_number(n.n1) << "\n";
        os << "bath_n2 = " << format_number(n.n2) << "\n";
        os << "truncation = " << prob.truncation->n1 << " " << prob.truncation->n2 << "\n";
        os << "observable = energy1\nperturbation = coupling\n";
      } else {
        const auto& g = std::get<GenericModel>(cfg.model);
        os << "model = generic\n";
        os << "dimension = " << prob.model.space().dim() << "\n";
        os << "hamiltonian = " << g.hamiltonian.string() << "\n";
        for (const auto& j : g.jumps) os << "jump = " << j.op.string() << " rate " << format_number(j.rate) << "\n";
        os << "observable = " << cfg.observable->string() << "\n";
        os << "perturbation = " << cfg.perturbation->string() << "\n";
      }
      os << "hbar = " << format_number(hbar) << "\n";
      if (cfg.kubo_beta) os << "kubo_beta = " << format_number(*cfg.kubo_beta) << "\n";
      os << "grid = 0.." << format_number(cfg.t_max) << " (" << cfg.points << " points)\n";
      os << "forms =";
      for (const auto& c : curves) os << ' ' << to_string(c.form);
      os << "\n";
      os << "protocol = " << (cfg.protocol ? describe(*cfg.protocol) : "none") << "\n";
      os << "linear_prediction_form = " << linear_form << "\n";
      os << "tolerance_exact = " << format_number(cfg.tolerances.exact) << "\n";
      os << "tolerance_finite_difference = " << format_number(cfg.tolerances.finite_difference) << "\n";
      os << "tolerance_analytic = " << format_number(cfg.tolerances.analytic) << "\n";
      if (ss) {
        os << "steady_state_residual = " << format_number(ss->residual_norm) << "\n";
        os << "spectral_gap = " << format_number(ss->spectral_gap) << (ss->gap_is_estimate ? " (estimate)" : "")
           << "\n";
        os << "pi0_min_eigenvalue = " << format_number(ss->pi0.min_eigenvalue()) << "\n";
      }
    }

    result.report = std::move(report);
    if (options.strict && !result.report->pass()) {
      result.exit_code = kExitTolerance;
      result.message += "equivalence report failed its tolerances\n";
    }
  } catch (const nessresp::Error& e) {
    result.exit_code = kExitSolver;
    result.message += std::string("solver error: ") + e.what() + "\n";
  } catch (const std::exception& e) {
    result.exit_code = kExitSolver;
    result.message += std::string("error: ") + e.what() + "\n";
  }
  return result;
}

}  // namespace nessresp::scenario

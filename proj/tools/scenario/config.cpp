#include "scenario/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <sstream>

#include "nessresp/error.hpp"
#include "scenario/matrix_io.hpp"

namespace nessresp::scenario {

std::string Diagnostic::format() const {
  std::ostringstream os;
  os << (severity == Severity::Error ? "error" : "warning");
  if (line > 0) os << " (line " << line << ")";
  if (!key.empty()) os << " [" << key << "]";
  os << ": " << message;
  return os.str();
}

bool ParseResult::ok() const {
  return config.has_value() &&
         std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::Error; });
}

PerturbationProtocol ProtocolSpec::build() const {
  if (step) return PerturbationProtocol::step(*step);
  return PerturbationProtocol::sampled(t, eps);
}

double ProtocolSpec::amplitude() const {
  if (step) return *step;
  double m = 0.0;
  for (double e : eps) m = std::max(m, std::abs(e));
  return m;
}

std::vector<double> ScenarioConfig::grid() const {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g[k] = t_max * k / (points - 1);
  g.back() = t_max;
  return g;
}

oracle::Truncation resolved_truncation(const TwoOscillatorModel& model) {
  if (model.truncation) return *model.truncation;
  return oracle::suggested_truncation(model.params, kDefaultLeakage);
}

fs::path resolve(const ScenarioConfig& config, const fs::path& p) {
  if (p.is_absolute()) return p;
  return config.source.parent_path() / p;
}

namespace {

using Severity = Diagnostic::Severity;

int line_of(const YAML::Node& n) {
  if (!n.IsDefined()) return 0;
  return n.Mark().is_null() ? 0 : n.Mark().line + 1;
}

std::string join(const std::string& parent, std::string_view key) {
  return parent.empty() ? std::string(key) : parent + "." + std::string(key);
}

class Reader {
 public:
  std::vector<Diagnostic> diags;

  void error(const YAML::Node& at, const std::string& key, std::string msg) {
    diags.push_back({Severity::Error, key, line_of(at), std::move(msg)});
  }

  // Requires a map whose keys all appear in `allowed`.
  bool map(const YAML::Node& n, const std::string& key, std::initializer_list<std::string_view> allowed) {
    if (!n.IsMap()) {
      error(n, key, "expected a mapping");
      return false;
    }
    for (const auto& kv : n) {
      const std::string name = kv.first.Scalar();
      if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
        std::string list;
        for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
        diags.push_back({Severity::Error, join(key, name), line_of(kv.first),
                         "unknown key '" + name + "' (allowed: " + list + ")"});
      }
    }
    return true;
  }

  std::optional<double> number(const YAML::Node& parent, const std::string& key, const char* name, bool required) {
    const YAML::Node n = parent[name];
    const std::string path = join(key, name);
    if (!n.IsDefined() || n.IsNull()) {
      if (required) error(parent, path, std::string("missing required key '") + name + "'");
      return std::nullopt;
    }
    try {
      if (!n.IsScalar()) throw YAML::BadConversion(n.Mark());
      const double v = n.as<double>();
      if (!std::isfinite(v)) {
        error(n, path, "value must be finite");
        return std::nullopt;
      }
      return v;
    } catch (const YAML::Exception&) {
      error(n, path, "expected a number");
      return std::nullopt;
    }
  }

  std::optional<int> integer(const YAML::Node& n, const std::string& path) {
    try {
      if (!n.IsScalar()) throw YAML::BadConversion(n.Mark());
      return n.as<int>();
    } catch (const YAML::Exception&) {
      error(n, path, "expected an integer");
      return std::nullopt;
    }
  }

  std::optional<std::string> string(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) {
      error(n, path, "expected a string");
      return std::nullopt;
    }
    return n.Scalar();
  }

  std::vector<double> numbers(const YAML::Node& n, const std::string& path) {
    std::vector<double> out;
    if (!n.IsSequence()) {
      error(n, path, "expected a list of numbers");
      return out;
    }
    for (std::size_t i = 0; i < n.size(); ++i) {
      try {
        out.push_back(n[i].as<double>());
      } catch (const YAML::Exception&) {
        error(n[i], path + "[" + std::to_string(i) + "]", "expected a number");
      }
    }
    return out;
  }

  // `name` (a scalar label) or {matrix: path}; returns nullopt for the label.
  std::optional<fs::path> operator_ref(const YAML::Node& n, const std::string& path, std::string_view label,
                                       bool& ok) {
    ok = true;
    if (n.IsScalar()) {
      if (n.Scalar() != label) {
        error(n, path, "expected '" + std::string(label) + "' or {matrix: <file>}, got '" + n.Scalar() + "'");
        ok = false;
      }
      return std::nullopt;
    }
    if (!map(n, path, {"matrix"}) || !n["matrix"].IsDefined()) {
      if (n.IsMap()) error(n, path, "missing required key 'matrix'");
      ok = false;
      return std::nullopt;
    }
    const auto s = string(n["matrix"], join(path, "matrix"));
    if (!s) {
      ok = false;
      return std::nullopt;
    }
    return fs::path(*s);
  }
};

void read_two_oscillator(Reader& r, const YAML::Node& n, const std::string& key, TwoOscillatorModel& out) {
  if (!r.map(n, key, {"omega1", "delta", "gamma", "lambda", "beta1", "beta2", "hbar", "truncation"})) return;
  TwoOscillatorParams& p = out.params;
  p.omega1 = r.number(n, key, "omega1", true).value_or(p.omega1);
  p.delta = r.number(n, key, "delta", true).value_or(p.delta);
  p.gamma = r.number(n, key, "gamma", true).value_or(p.gamma);
  p.lambda = r.number(n, key, "lambda", true).value_or(p.lambda);
  p.beta1 = r.number(n, key, "beta1", true).value_or(p.beta1);
  p.beta2 = r.number(n, key, "beta2", true).value_or(p.beta2);
  p.hbar = r.number(n, key, "hbar", false).value_or(1.0);
  if (const YAML::Node t = n["truncation"]; t.IsDefined()) {
    const std::string path = join(key, "truncation");
    if (!t.IsSequence() || t.size() != 2) {
      r.error(t, path, "expected [levels1, levels2]");
    } else {
      const auto a = r.integer(t[0], path + "[0]");
      const auto b = r.integer(t[1], path + "[1]");
      if (a && b) out.truncation = oracle::Truncation{*a, *b};
    }
  }
}

void read_generic(Reader& r, const YAML::Node& n, const std::string& key, GenericModel& out) {
  if (!r.map(n, key, {"hamiltonian", "jumps", "hbar"})) return;
  if (const YAML::Node h = n["hamiltonian"]; h.IsDefined()) {
    if (auto s = r.string(h, join(key, "hamiltonian"))) out.hamiltonian = *s;
  } else {
    r.error(n, join(key, "hamiltonian"), "missing required key 'hamiltonian'");
  }
  out.hbar = r.number(n, key, "hbar", false).value_or(1.0);
  const YAML::Node jumps = n["jumps"];
  const std::string jkey = join(key, "jumps");
  if (!jumps.IsDefined()) {
    r.error(n, jkey, "missing required key 'jumps'");
    return;
  }
  if (!jumps.IsSequence()) {
    r.error(jumps, jkey, "expected a list of {operator, rate}");
    return;
  }
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    const std::string ik = jkey + "[" + std::to_string(i) + "]";
    const YAML::Node j = jumps[i];
    if (!r.map(j, ik, {"operator", "rate"})) continue;
    GenericModel::Jump jump;
    if (const YAML::Node o = j["operator"]; o.IsDefined()) {
      if (auto s = r.string(o, join(ik, "operator"))) jump.op = *s;
    } else {
      r.error(j, join(ik, "operator"), "missing required key 'operator'");
    }
    jump.rate = r.number(j, ik, "rate", true).value_or(0.0);
    out.jumps.push_back(std::move(jump));
  }
}

void read_protocol(Reader& r, const YAML::Node& n, const std::string& key, ProtocolSpec& out) {
  if (!r.map(n, key, {"step", "sampled"})) return;
  const bool has_step = n["step"].IsDefined(), has_sampled = n["sampled"].IsDefined();
  if (has_step == has_sampled) {
    r.error(n, key, "exactly one of 'step' or 'sampled' is required");
    return;
  }
  if (has_step) {
    out.step = r.number(n, key, "step", true);
    if (!out.step) out.step = 0.0;
    return;
  }
  const YAML::Node s = n["sampled"];
  const std::string skey = join(key, "sampled");
  if (!r.map(s, skey, {"t", "eps"})) return;
  if (!s["t"].IsDefined() || !s["eps"].IsDefined()) {
    r.error(s, skey, "both 't' and 'eps' are required");
    return;
  }
  out.t = r.numbers(s["t"], join(skey, "t"));
  out.eps = r.numbers(s["eps"], join(skey, "eps"));
  if (out.t.size() != out.eps.size() || out.t.empty()) {
    r.error(s, skey, "'t' and 'eps' must be nonempty and of equal length");
  } else if (std::adjacent_find(out.t.begin(), out.t.end(), std::greater_equal<>()) != out.t.end()) {
    r.error(s["t"], join(skey, "t"), "sample times must be strictly increasing");
  }
}

ParseResult parse_document(const YAML::Node& root, const fs::path& source) {
  Reader r;
  ScenarioConfig cfg;
  cfg.source = source;
  ParseResult result;
  if (!root.IsDefined() || root.IsNull()) {
    r.error(root, "", "empty configuration");
    result.diagnostics = std::move(r.diags);
    return result;
  }
  if (!r.map(root, "", {"model", "observable", "perturbation", "grid", "forms", "tolerances", "outputs"})) {
    result.diagnostics = std::move(r.diags);
    return result;
  }

  // model
  if (const YAML::Node m = root["model"]; !m.IsDefined()) {
    r.error(root, "model", "missing required key 'model'");
  } else if (r.map(m, "model", {"two_oscillator", "generic", "kubo_beta"})) {
    const bool two = m["two_oscillator"].IsDefined(), gen = m["generic"].IsDefined();
    if (two == gen) {
      r.error(m, "model", "exactly one of 'two_oscillator' or 'generic' is required");
    } else if (two) {
      TwoOscillatorModel t;
      read_two_oscillator(r, m["two_oscillator"], "model.two_oscillator", t);
      cfg.model = t;
    } else {
      GenericModel g;
      read_generic(r, m["generic"], "model.generic", g);
      cfg.model = g;
    }
    cfg.kubo_beta = r.number(m, "model", "kubo_beta", false);
  }

  // observable
  if (const YAML::Node o = root["observable"]; o.IsDefined()) {
    bool ok = true;
    cfg.observable = r.operator_ref(o, "observable", "energy1", ok);
  }

  // perturbation
  if (const YAML::Node p = root["perturbation"]; p.IsDefined()) {
    if (r.map(p, "perturbation", {"hamiltonian", "protocol"})) {
      if (const YAML::Node h = p["hamiltonian"]; h.IsDefined()) {
        bool ok = true;
        cfg.perturbation = r.operator_ref(h, "perturbation.hamiltonian", "coupling", ok);
      }
      if (const YAML::Node pr = p["protocol"]; pr.IsDefined()) {
        ProtocolSpec spec;
        read_protocol(r, pr, "perturbation.protocol", spec);
        cfg.protocol = spec;
      }
    }
  }

  // grid
  if (const YAML::Node g = root["grid"]; !g.IsDefined()) {
    r.error(root, "grid", "missing required key 'grid'");
  } else if (r.map(g, "grid", {"t_max", "points"})) {
    cfg.t_max = r.number(g, "grid", "t_max", true).value_or(0.0);
    if (const YAML::Node pts = g["points"]; pts.IsDefined()) {
      cfg.points = r.integer(pts, "grid.points").value_or(0);
      if (cfg.points < 2) r.error(pts, "grid.points", "grid needs at least 2 points");
    } else {
      r.error(g, "grid.points", "missing required key 'points'");
    }
    if (g["t_max"].IsDefined() && !(cfg.t_max > 0.0)) r.error(g["t_max"], "grid.t_max", "t_max must be positive");
  }

  // forms
  if (const YAML::Node f = root["forms"]; !f.IsDefined()) {
    r.error(root, "forms", "missing required key 'forms'");
  } else if (!f.IsSequence() || f.size() == 0) {
    r.error(f, "forms", "expected a nonempty list drawn from R1, R2, R2alt, R3, K1, K2, analytic");
  } else {
    std::vector<ResponseForm> requested;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::string k = "forms[" + std::to_string(i) + "]";
      const auto s = r.string(f[i], k);
      if (!s) continue;
      try {
        requested.push_back(parse_response_form(*s));
      } catch (const DomainError&) {
        r.error(f[i], k, "unknown form '" + *s + "' (allowed: R1, R2, R2alt, R3, K1, K2, analytic)");
      }
    }
    for (ResponseForm form : kAllForms)
      if (std::find(requested.begin(), requested.end(), form) != requested.end()) cfg.forms.push_back(form);
  }

  // tolerances
  if (const YAML::Node t = root["tolerances"]; t.IsDefined()) {
    if (r.map(t, "tolerances", {"exact", "finite_difference", "analytic"})) {
      cfg.tolerances.exact = r.number(t, "tolerances", "exact", false).value_or(cfg.tolerances.exact);
      cfg.tolerances.finite_difference =
          r.number(t, "tolerances", "finite_difference", false).value_or(cfg.tolerances.finite_difference);
      cfg.tolerances.analytic = r.number(t, "tolerances", "analytic", false).value_or(cfg.tolerances.analytic);
    }
  }

  // outputs
  if (const YAML::Node o = root["outputs"]; !o.IsDefined()) {
    r.error(root, "outputs", "missing required key 'outputs'");
  } else if (auto s = r.string(o, "outputs")) {
    cfg.outputs = *s;
  }

  result.diagnostics = std::move(r.diags);
  result.config = std::move(cfg);
  return result;
}

}  // namespace

ParseResult parse_config_string(std::string_view text, const fs::path& source) {
  try {
    return parse_document(YAML::Load(std::string(text)), source);
  } catch (const YAML::Exception& e) {
    ParseResult r;
    r.diagnostics.push_back({Severity::Error, "", e.mark.is_null() ? 0 : e.mark.line + 1, e.msg});
    return r;
  }
}

ParseResult parse_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.diagnostics.push_back({Severity::Error, "", 0, "cannot read config file " + path.string()});
    return r;
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_string(text.str(), path);
}

namespace {

// Loads a referenced matrix; reports instead of throwing.
std::optional<Matrix> load_matrix(const ScenarioConfig& cfg, const fs::path& file, const std::string& key,
                                  std::vector<Diagnostic>& out) {
  const fs::path p = resolve(cfg, file);
  if (!fs::exists(p)) {
    out.push_back({Severity::Error, key, 0, "file not found: " + p.string()});
    return std::nullopt;
  }
  try {
    return read_matrix_file(p);
  } catch (const std::exception& e) {
    out.push_back({Severity::Error, key, 0, e.what()});
    return std::nullopt;
  }
}

bool hermitian(const Matrix& m) { return (m - m.adjoint()).norm() <= 1e-10 * std::max(1.0, m.norm()); }

}  // namespace

std::vector<Diagnostic> validate_config(const ScenarioConfig& cfg) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string key, std::string msg) { out.push_back({Severity::Error, std::move(key), 0, std::move(msg)}); };
  auto warn = [&](std::string key, std::string msg) { out.push_back({Severity::Warning, std::move(key), 0, std::move(msg)}); };
  const bool wants_kubo = std::any_of(cfg.forms.begin(), cfg.forms.end(), [](ResponseForm f) {
    return f == ResponseForm::K1 || f == ResponseForm::K2;
  });
  if (wants_kubo && !cfg.kubo_beta) error("model.kubo_beta", "K1/K2 need model.kubo_beta");
  if (cfg.kubo_beta && !(*cfg.kubo_beta > 0.0)) error("model.kubo_beta", "kubo_beta must be positive");

  int dim = 0;
  if (const auto* two = std::get_if<TwoOscillatorModel>(&cfg.model)) {
    const TwoOscillatorParams& p = two->params;
    const std::string k = "model.two_oscillator.";
    if (!(p.omega1 > 0.0)) error(k + "omega1", "omega1 must be positive");
    if (!(p.omega2() > 0.0)) error(k + "delta", "omega1 + delta must be positive");
    if (!(p.gamma > 0.0)) error(k + "gamma", "damping rate gamma must be positive");
    if (!(p.beta1 > 0.0)) error(k + "beta1", "beta1 must be positive");
    if (!(p.beta2 > 0.0)) error(k + "beta2", "beta2 must be positive");
    if (!(p.hbar > 0.0)) error(k + "hbar", "hbar must be positive");
    if (cfg.observable) error("observable", "two_oscillator models take the named observable 'energy1'");
    if (cfg.perturbation)
      error("perturbation.hamiltonian", "two_oscillator models take the named perturbation 'coupling'");
    const bool physical = std::none_of(out.begin(), out.end(), [](const Diagnostic& d) {
      return d.severity == Severity::Error && d.key.rfind("model.two_oscillator", 0) == 0;
    });
    if (physical) {
      try {
        const oracle::CovarianceSolution c = oracle::steady_covariance(p);
        const oracle::Truncation tr = resolved_truncation(*two);
        if (tr.n1 < 2 || tr.n2 < 2) {
          error(k + "truncation", "each oscillator needs at least 2 levels");
        } else {
          dim = tr.n1 * tr.n2;
          const double l1 = oracle::geometric_leakage(c.mean_n1, tr.n1);
          const double l2 = oracle::geometric_leakage(c.mean_n2, tr.n2);
          const oracle::Occupations bath = oracle::occupations(p);
          char buf[256];
          if (l1 > kLeakageWarning || l2 > kLeakageWarning) {
            std::snprintf(buf, sizeof buf,
                          "truncation (%d, %d) is inadequate: bath occupations %.4g and %.4g, coupled means "
                          "%.4g and %.4g, estimated top-level populations %.2e and %.2e (limit %.0e)",
                          tr.n1, tr.n2, bath.n1, bath.n2, c.mean_n1, c.mean_n2, l1, l2, kLeakageWarning);
            warn(k + "truncation", buf);
          }
          if (dim > kMaxHilbertDimension) {
            std::snprintf(buf, sizeof buf,
                          "truncation (%d, %d) gives Hilbert dimension %d above the Fock engine limit %d; "
                          "use `figure` for the closed-form curves",
                          tr.n1, tr.n2, dim, kMaxHilbertDimension);
            error(k + "truncation", buf);
          }
        }
      } catch (const std::exception& e) {
        error("model.two_oscillator", e.what());
      }
    }
  } else {
    const auto& g = std::get<GenericModel>(cfg.model);
    if (std::find(cfg.forms.begin(), cfg.forms.end(), ResponseForm::Analytic) != cfg.forms.end())
      error("forms", "the analytic form exists only for two_oscillator models");
    if (!(g.hbar > 0.0)) error("model.generic.hbar", "hbar must be positive");
    std::optional<Matrix> h;
    if (!g.hamiltonian.empty()) h = load_matrix(cfg, g.hamiltonian, "model.generic.hamiltonian", out);
    if (h) {
      dim = static_cast<int>(h->rows());
      if (!hermitian(*h)) error("model.generic.hamiltonian", "Hamiltonian is not Hermitian");
    }
    for (std::size_t i = 0; i < g.jumps.size(); ++i) {
      const std::string k = "model.generic.jumps[" + std::to_string(i) + "]";
      if (!(g.jumps[i].rate > 0.0)) error(k + ".rate", "jump rate must be positive");
      if (g.jumps[i].op.empty()) continue;
      if (auto l = load_matrix(cfg, g.jumps[i].op, k + ".operator", out); l && dim && l->rows() != dim)
        error(k + ".operator", "dimension " + std::to_string(l->rows()) + " does not match the Hamiltonian (" +
                                   std::to_string(dim) + ")");
    }
    if (!cfg.observable) {
      error("observable", "generic models need {matrix: <file>}; 'energy1' belongs to two_oscillator");
    } else if (auto a = load_matrix(cfg, *cfg.observable, "observable", out)) {
      if (dim && a->rows() != dim) error("observable", "dimension does not match the Hamiltonian");
      else if (!hermitian(*a)) error("observable", "observable is not Hermitian");
    }
    if (!cfg.perturbation) {
      error("perturbation.hamiltonian", "generic models need {matrix: <file>}; 'coupling' belongs to two_oscillator");
    } else if (auto hi = load_matrix(cfg, *cfg.perturbation, "perturbation.hamiltonian", out)) {
      if (dim && hi->rows() != dim) error("perturbation.hamiltonian", "dimension does not match the Hamiltonian");
      else if (!hermitian(*hi)) error("perturbation.hamiltonian", "perturbation is not Hermitian");
    }
    if (dim > kMaxHilbertDimension)
      error("model.generic.hamiltonian", "Hilbert dimension " + std::to_string(dim) + " exceeds " +
                                             std::to_string(kMaxHilbertDimension));
  }
  return out;
}

std::vector<Diagnostic> validate_config(const fs::path& path) {
  ParseResult parsed = parse_config(path);
  if (!parsed.ok()) return std::move(parsed.diagnostics);
  std::vector<Diagnostic> out = std::move(parsed.diagnostics);
  try {
    for (Diagnostic& d : validate_config(*parsed.config)) out.push_back(std::move(d));
  } catch (const std::exception& e) {
    out.push_back({Severity::Error, "", 0, e.what()});
  }
  return out;
}

}  // namespace nessresp::scenario

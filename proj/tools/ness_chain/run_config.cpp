#include "ness_chain/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "ness/kernel_table.hpp"
#include "ness/propagators.hpp"

namespace ness::cli {

namespace {

const std::set<std::string> kKnownKeys = {
    "n_sites",   "omega_r",       "lambda2",     "gamma",       "T_H",          "T_C",
    "temperatures", "cutoff",     "cutoff_factor", "cutoff_kind", "nonlinearity", "strength",
    "rel_tol",   "abs_tol",       "max_subdivisions", "output",   "format",       "sweep",
    "dump_table", "frequency_matrix_override", "spectrum"};

const std::set<std::string> kSweepVars = {"lambda2", "strength", "gamma", "T_C", "T_H", "omega_r"};

double number(const nlohmann::json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(std::string("'") + key + "' must be finite");
  return x;
}

std::string text(const nlohmann::json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_string()) throw ConfigError(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

void check(const RunConfig& c) {
  try {
    c.model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (double t : c.site_temperatures())
    if (!(t >= 0.0)) throw ConfigError("temperatures must be nonnegative");
  if (static_cast<int>(c.site_temperatures().size()) != c.model.n_sites)
    throw ConfigError("temperature list length must equal n_sites");
  if (c.cutoff && !(*c.cutoff > 0.0)) throw ConfigError("cutoff must be positive");
  if (!(c.cutoff_factor > 1.0)) throw ConfigError("cutoff_factor must exceed 1");
  if (!(c.nonlinearity.strength >= 0.0)) throw ConfigError("strength must be nonnegative");
  if (!(c.rel_tol > 0.0) || !(c.abs_tol >= 0.0) || c.max_subdivisions < 1)
    throw ConfigError("quadrature tolerances must be positive");
  if (c.sweep.size() > 2) throw ConfigError("at most two swept variables");
  for (const auto& ax : c.sweep) {
    validate_sweep_variable(ax.var);
    if (ax.steps < 1 || !(ax.to > ax.from)) throw ConfigError("sweep range for '" + ax.var + "' is empty");
  }
  if (c.sweep.size() == 2 && c.sweep[0].var == c.sweep[1].var)
    throw ConfigError("swept variables must differ");
  if (c.frequency_matrix_override) {
    const auto& m = *c.frequency_matrix_override;
    if (m.rows() != c.model.n_sites || m.cols() != c.model.n_sites)
      throw ConfigError("frequency_matrix_override must be n_sites x n_sites");
  }
  const double highest = resonance_frequencies(c.model).back();
  if (!(c.resolved_cutoff() > highest)) throw ConfigError("cutoff must exceed the highest resonance");
}

}  // namespace

std::vector<double> SweepAxis::values() const {
  std::vector<double> v;
  for (int i = 0; i <= steps; ++i) v.push_back(i == steps ? to : from + (to - from) * i / steps);
  return v;
}

std::vector<double> RunConfig::site_temperatures() const {
  if (!temperatures.empty()) return temperatures;
  const int n = model.n_sites;
  if (n == 1) return {t_hot};
  std::vector<double> t(n);
  // weighted form keeps both endpoints exact
  for (int i = 0; i < n; ++i) t[i] = (t_hot * (n - 1 - i) + t_cold * i) / (n - 1);
  return t;
}

double RunConfig::resolved_cutoff() const {
  if (cutoff) return *cutoff;
  return cutoff_factor * resonance_frequencies(model).back();
}

BathSet RunConfig::baths() const {
  BathSet b = BathSet::from_temperatures(site_temperatures(), resolved_cutoff(), cutoff_kind);
  b.spectrum = spectrum;
  return b;
}

QuadratureSpec RunConfig::quadrature() const {
  QuadratureSpec q = default_quadrature(model, baths());
  q.rel_tol = rel_tol;
  q.abs_tol = abs_tol;
  q.max_subdivisions = max_subdivisions;
  return q;
}

RunConfig RunConfig::with(const std::string& var, double value) const {
  RunConfig c = *this;
  if (var == "lambda2") c.model.lambda2 = value;
  else if (var == "gamma") c.model.gamma = value;
  else if (var == "omega_r") c.model.omega_r = value;
  else if (var == "strength") c.nonlinearity.strength = value;
  else if (var == "T_C") {
    c.t_cold = value;
    c.temperatures.clear();
  } else if (var == "T_H") {
    c.t_hot = value;
    c.temperatures.clear();
  } else
    throw ConfigError("cannot sweep '" + var + "'");
  return c;
}

void validate_config(const RunConfig& c) { check(c); }

void validate_sweep_variable(const std::string& var) {
  if (!kSweepVars.count(var)) throw ConfigError("cannot sweep '" + var + "'");
}

OutputFormat parse_format(const std::string& name) {
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  throw ConfigError("unknown output format '" + name + "'");
}

RunConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& item : doc.items())
    if (!kKnownKeys.count(item.key())) throw ConfigError("unknown config key '" + item.key() + "'");

  RunConfig c;
  c.source = doc;
  try {
    if (doc.contains("n_sites")) {
      if (!doc["n_sites"].is_number_integer()) throw ConfigError("'n_sites' must be an integer");
      c.model.n_sites = doc["n_sites"].get<int>();
    }
    if (doc.contains("omega_r")) c.model.omega_r = number(doc, "omega_r");
    if (doc.contains("lambda2")) c.model.lambda2 = number(doc, "lambda2");
    if (doc.contains("gamma")) c.model.gamma = number(doc, "gamma");
    if (doc.contains("T_H")) c.t_hot = number(doc, "T_H");
    if (doc.contains("T_C")) c.t_cold = number(doc, "T_C");
    if (doc.contains("temperatures")) {
      if (!doc["temperatures"].is_array()) throw ConfigError("'temperatures' must be an array");
      for (const auto& t : doc["temperatures"]) {
        if (!t.is_number()) throw ConfigError("'temperatures' must hold numbers");
        c.temperatures.push_back(t.get<double>());
      }
    }
    if (doc.contains("cutoff") && !doc["cutoff"].is_null()) c.cutoff = number(doc, "cutoff");
    if (doc.contains("cutoff_factor")) c.cutoff_factor = number(doc, "cutoff_factor");
    if (doc.contains("cutoff_kind")) {
      const std::string k = text(doc, "cutoff_kind");
      if (k == "hard") c.cutoff_kind = CutoffKind::Hard;
      else if (k == "exponential") c.cutoff_kind = CutoffKind::Exponential;
      else throw ConfigError("unknown cutoff_kind '" + k + "'");
    }
    if (doc.contains("spectrum")) {
      const std::string k = text(doc, "spectrum");
      if (k == "quantum") c.spectrum = NoiseSpectrum::Quantum;
      else if (k == "classical") c.spectrum = NoiseSpectrum::Classical;
      else throw ConfigError("unknown spectrum '" + k + "'");
    }
    if (doc.contains("nonlinearity")) {
      try {
        c.nonlinearity.kind = nonlinearity_from_string(text(doc, "nonlinearity"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    if (doc.contains("strength")) c.nonlinearity.strength = number(doc, "strength");
    if (doc.contains("rel_tol")) c.rel_tol = number(doc, "rel_tol");
    if (doc.contains("abs_tol")) c.abs_tol = number(doc, "abs_tol");
    if (doc.contains("max_subdivisions")) {
      if (!doc["max_subdivisions"].is_number_integer())
        throw ConfigError("'max_subdivisions' must be an integer");
      c.max_subdivisions = doc["max_subdivisions"].get<int>();
    }
    if (doc.contains("output")) c.output = text(doc, "output");
    if (doc.contains("format")) c.format = parse_format(text(doc, "format"));
    if (doc.contains("dump_table")) {
      if (!doc["dump_table"].is_boolean()) throw ConfigError("'dump_table' must be a boolean");
      c.dump_table = doc["dump_table"].get<bool>();
    }
    if (doc.contains("sweep")) {
      if (!doc["sweep"].is_array()) throw ConfigError("'sweep' must be an array");
      for (const auto& ax : doc["sweep"]) {
        if (!ax.is_object()) throw ConfigError("sweep entries must be objects");
        SweepAxis a;
        a.var = text(ax, "var");
        a.from = number(ax, "from");
        a.to = number(ax, "to");
        if (!ax.at("steps").is_number_integer()) throw ConfigError("'steps' must be an integer");
        a.steps = ax.at("steps").get<int>();
        c.sweep.push_back(a);
      }
    }
    if (doc.contains("frequency_matrix_override")) {
      const auto& rows = doc["frequency_matrix_override"];
      if (!rows.is_array() || rows.empty()) throw ConfigError("'frequency_matrix_override' must be a matrix");
      const int n = static_cast<int>(rows.size());
      Eigen::MatrixXd m(n, n);
      for (int i = 0; i < n; ++i) {
        if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != n)
          throw ConfigError("'frequency_matrix_override' must be square");
        for (int j = 0; j < n; ++j) {
          if (!rows[i][j].is_number()) throw ConfigError("'frequency_matrix_override' must hold numbers");
          m(i, j) = rows[i][j].get<double>();
        }
      }
      c.frequency_matrix_override = m;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  check(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

}  // namespace ness::cli

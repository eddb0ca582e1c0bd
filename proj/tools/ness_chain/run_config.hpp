#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ness/bath_kernels.hpp"
#include "ness/chain_model.hpp"
#include "ness/quadrature.hpp"

namespace ness::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Json, Csv };

struct SweepAxis {
  std::string var;
  double from = 0.0;
  double to = 0.0;
  int steps = 1;  // intervals; steps + 1 grid points including both ends

  std::vector<double> values() const;
};

/// Flat JSON run description. Units: hbar = k_B = mass = 1.
struct RunConfig {
  ChainModel model;
  double t_hot = 100.0;
  double t_cold = 0.002;
  std::vector<double> temperatures;  // explicit per-site list; overrides t_hot/t_cold when set

  std::optional<double> cutoff;  // absolute cutoff; otherwise cutoff_factor * top resonance
  double cutoff_factor = 50.0;
  CutoffKind cutoff_kind = CutoffKind::Hard;
  NoiseSpectrum spectrum = NoiseSpectrum::Quantum;

  NonlinearitySpec nonlinearity{NonlinearityKind::KleinGordon, 0.01};

  double rel_tol = 1e-8;
  double abs_tol = 1e-14;
  int max_subdivisions = 20000;

  std::string output;
  OutputFormat format = OutputFormat::Json;
  std::vector<SweepAxis> sweep;
  bool dump_table = false;

  std::optional<Eigen::MatrixXd> frequency_matrix_override;  // only used by the identity suite

  nlohmann::json source;  // the parsed document, echoed into reports

  /// Site temperatures: the explicit list, or T_H at the first site, T_C at the last and a
  /// linear profile in between.
  std::vector<double> site_temperatures() const;
  double resolved_cutoff() const;
  BathSet baths() const;
  QuadratureSpec quadrature() const;

  /// Copy with one named parameter replaced; throws ConfigError for unknown names.
  RunConfig with(const std::string& var, double value) const;
};

RunConfig parse_config(const nlohmann::json& doc);
/// Throws ConfigError when the config violates any invariant.
void validate_config(const RunConfig& c);
RunConfig load_config(const std::string& path);

OutputFormat parse_format(const std::string& name);
void validate_sweep_variable(const std::string& var);

}  // namespace ness::cli

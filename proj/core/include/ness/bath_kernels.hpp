#pragma once

#include <vector>

#include <Eigen/Dense>

namespace ness {

enum class CutoffKind { Hard, Exponential };

/// Quantum: omega coth(beta omega / 2). Classical: its high-temperature limit 2 / beta.
enum class NoiseSpectrum { Quantum, Classical };

/// Private thermal baths, one per site, sharing a UV cutoff.
///
/// A beta of +infinity is a zero-temperature bath.
struct BathSet {
  std::vector<double> betas;
  double cutoff = 0.0;
  CutoffKind cutoff_kind = CutoffKind::Hard;
  NoiseSpectrum spectrum = NoiseSpectrum::Quantum;

  static BathSet from_temperatures(const std::vector<double>& temps, double cutoff,
                                   CutoffKind kind = CutoffKind::Hard);

  int size() const { return static_cast<int>(betas.size()); }
  void validate() const;
};

double cutoff_window(double omega, const BathSet& baths);

/// Half-width of the frequency domain on which the regularized kernel is nonzero
/// (or negligible, for the exponential window).
double integration_limit(const BathSet& baths);

/// omega * coth(beta omega / 2) without the cutoff window.
double thermal_spectrum(double omega, double beta);

double noise_kernel(double omega, double beta, const BathSet& baths);

/// Diagonal of the per-site kernel matrix.
Eigen::VectorXd noise_kernel_diagonal(double omega, const BathSet& baths);
Eigen::MatrixXd noise_kernel_matrix(double omega, const BathSet& baths);

}  // namespace ness

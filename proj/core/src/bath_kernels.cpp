#include "ness/bath_kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ness {

namespace {
constexpr double kSeriesThreshold = 1e-4;
constexpr double kCothSaturation = 50.0;
constexpr double kExponentialReach = 40.0;  // exp(-40) ~ 4e-18
}  // namespace

BathSet BathSet::from_temperatures(const std::vector<double>& temps, double cutoff,
                                   CutoffKind kind) {
  BathSet b;
  b.cutoff = cutoff;
  b.cutoff_kind = kind;
  for (double t : temps) {
    if (!(t >= 0.0) || !std::isfinite(t))
      throw std::invalid_argument("temperatures must be nonnegative and finite");
    b.betas.push_back(t == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / t);
  }
  return b;
}

void BathSet::validate() const {
  if (betas.empty()) throw std::invalid_argument("bath set is empty");
  for (double b : betas)
    if (!(b > 0.0)) throw std::invalid_argument("inverse temperatures must be positive");
  if (!(cutoff > 0.0) || !std::isfinite(cutoff))
    throw std::invalid_argument("cutoff must be positive and finite");
}

double cutoff_window(double omega, const BathSet& baths) {
  const double a = std::abs(omega);
  switch (baths.cutoff_kind) {
    case CutoffKind::Hard: return a <= baths.cutoff ? 1.0 : 0.0;
    case CutoffKind::Exponential: return std::exp(-a / baths.cutoff);
  }
  return 0.0;
}

double integration_limit(const BathSet& baths) {
  return baths.cutoff_kind == CutoffKind::Hard ? baths.cutoff
                                               : kExponentialReach * baths.cutoff;
}

double thermal_spectrum(double omega, double beta) {
  const double a = std::abs(omega);
  if (std::isinf(beta)) return a;
  const double x = beta * a;
  if (x > kCothSaturation) return a;
  if (x < kSeriesThreshold) {
    const double w2 = omega * omega;
    return 2.0 / beta + beta * w2 / 6.0 - beta * beta * beta * w2 * w2 / 360.0;
  }
  return a / std::tanh(0.5 * x);
}

namespace {
double spectrum_value(double omega, double beta, NoiseSpectrum kind) {
  if (kind == NoiseSpectrum::Classical) return std::isinf(beta) ? 0.0 : 2.0 / beta;
  return thermal_spectrum(omega, beta);
}
}  // namespace

double noise_kernel(double omega, double beta, const BathSet& baths) {
  const double w = cutoff_window(omega, baths);
  return w == 0.0 ? 0.0 : w * spectrum_value(omega, beta, baths.spectrum);
}

Eigen::VectorXd noise_kernel_diagonal(double omega, const BathSet& baths) {
  Eigen::VectorXd g(baths.size());
  const double w = cutoff_window(omega, baths);
  for (int k = 0; k < baths.size(); ++k)
    g[k] = w == 0.0 ? 0.0 : w * spectrum_value(omega, baths.betas[k], baths.spectrum);
  return g;
}

Eigen::MatrixXd noise_kernel_matrix(double omega, const BathSet& baths) {
  return noise_kernel_diagonal(omega, baths).asDiagonal();
}

}  // namespace ness

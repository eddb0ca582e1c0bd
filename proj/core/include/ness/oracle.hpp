#pragma once

#include <string>
#include <vector>

#include "ness/bath_kernels.hpp"
#include "ness/chain_model.hpp"
#include "ness/currents.hpp"

namespace ness {

/// Brute-force time-domain evaluation of the linear-chain fluxes.
struct TimeDomainConfig {
  double t_max_gamma = 25.0;  // horizon in units of the slowest decay time
  int oversample = 8;         // time step = pi / (oversample * frequency reach); power of two
  double period_gamma = 200.0;  // Fourier period of the sampled kernel, same units as t_max_gamma
  int n_fourier = 0;            // frequency steps up to the reach; 0 derives it from the period

  void validate() const;
};

/// Noise kernels G_k(s) = int dw/2pi G_k(w) e^{iws} sampled at s_j = j * ds.
struct NoiseKernelGrid {
  double ds = 0.0;
  std::vector<std::vector<double>> values;      // [site][j]
  std::vector<std::vector<double>> derivative;  // [site][j], dG/ds
  double ringing = 0.0;                         // largest late-time |G| relative to G(0)
  std::vector<std::string> warnings;
};

/// Samples by a discrete cosine (and sine, for the derivative) transform. The frequency grid
/// puts `reach_index` steps between 0 and the integration limit and extends `oversample` times
/// further with zeros, so ds = pi / (oversample * limit). Returns the first `count` samples.
NoiseKernelGrid noise_kernel_time_grid(const BathSet& baths, int reach_index, int oversample,
                                       int count);

/// Per-site G_k(s) from adaptive quadrature of the inverse transform; used as a spot check.
std::vector<double> noise_kernel_time(double s, const BathSet& baths, const TimeDomainConfig& cfg);

struct TimeDomainCurrents {
  ZerothOrderCurrents currents;
  double t_max = 0.0;
  double dt = 0.0;
  double decay_rate = 0.0;
  double tail_bound = 0.0;  // truncation estimate from the slowest pole
  std::vector<std::string> warnings;
};

TimeDomainCurrents zeroth_order_time_domain(const ChainModel& model, const BathSet& baths,
                                            const TimeDomainConfig& cfg = {});

}  // namespace ness

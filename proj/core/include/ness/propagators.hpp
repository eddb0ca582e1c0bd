#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ness/chain_model.hpp"

namespace ness {

using cdouble = std::complex<double>;

/// Fourier-domain causal propagator [-w^2 + 2i gamma w + W2]^-1 by dense LU.
/// Throws std::domain_error when the matrix is singular (only possible for gamma = 0).
Eigen::MatrixXcd fourier_propagator(double omega, const Eigen::MatrixXd& freq_matrix, double gamma);
Eigen::MatrixXcd fourier_propagator(double omega, const ChainModel& model);

struct PropagatorSample {
  double omega = 0.0;
  Eigen::MatrixXcd matrix;
  double identity_residual = 0.0;  // relative residual of (Z D - I)
};

PropagatorSample sample_propagator(double omega, const Eigen::MatrixXd& freq_matrix, double gamma);

/// Eigen-decomposition of the frequency matrix. Columns of `vectors` are orthonormal modes.
struct NormalModes {
  Eigen::VectorXd omega2;
  Eigen::MatrixXd vectors;
};

NormalModes normal_modes(const ChainModel& model);

/// Resonance frequencies sqrt(omega2) in ascending order.
std::vector<double> resonance_frequencies(const ChainModel& model);

/// Propagator evaluated through the normal modes. Damping is proportional to the identity,
/// so D(w) = V diag(1 / (W_k^2 - w^2 + 2i gamma w)) V^T. Used in the quadrature hot loops.
class ModalPropagator {
 public:
  explicit ModalPropagator(const ChainModel& model);

  int sites() const { return static_cast<int>(modes_.omega2.size()); }
  double gamma() const { return gamma_; }
  const NormalModes& modes() const { return modes_; }

  void evaluate(double omega, Eigen::MatrixXcd& out) const;
  Eigen::MatrixXcd operator()(double omega) const;

 private:
  NormalModes modes_;
  double gamma_;
};

struct TimeDomainSolutions {
  Eigen::MatrixXd d1, d2;          // D1(0) = I, D2(0) = 0
  Eigen::MatrixXd d1_dot, d2_dot;  // D1'(0) = 0, D2'(0) = I
};

TimeDomainSolutions time_domain_solutions(double t, const ChainModel& model);
TimeDomainSolutions time_domain_solutions(double t, const NormalModes& modes, double gamma);

/// Scalar damped mode functions for one normal mode of squared frequency w2.
struct ModeFunctions {
  double d1, d2, d1_dot, d2_dot;
};
ModeFunctions mode_functions(double t, double w2, double gamma);

/// Laplace poles, two per normal mode: s = -gamma +/- sqrt(gamma^2 - W_k^2).
struct PoleSet {
  std::vector<cdouble> poles;  // pairs (+, -) per mode, mode order as in `modes`
  NormalModes modes;           // projectors v v^T are the residue matrices
};

PoleSet poles(const ChainModel& model);

/// D2(t) rebuilt from the partial-fraction expansion over the poles.
Eigen::MatrixXd d2_from_poles(double t, const PoleSet& ps);

struct PropagatorIdentityResiduals {
  double symmetry = 0.0;     // D_ij - D_ji
  double mirror = 0.0;       // D_ij - D_{N-1-i, N-1-j}
  double resolvent = 0.0;    // Z D - I
  double conjugation = 0.0;  // D(-w) - conj D(w)

  double max() const;
};

PropagatorIdentityResiduals propagator_identity_residuals(const Eigen::MatrixXd& freq_matrix,
                                                          double gamma,
                                                          const std::vector<double>& omega_grid);
PropagatorIdentityResiduals propagator_identity_residuals(const ChainModel& model,
                                                          const std::vector<double>& omega_grid);

}  // namespace ness

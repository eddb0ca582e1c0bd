#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace ness {

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-14;
  int max_subdivisions = 20000;
  std::vector<double> split_points;  // sorted; points outside the domain are ignored

  void validate() const;
};

struct QuadratureResult {
  std::complex<double> value;
  double error = 0.0;
  bool converged = false;
  int evaluations = 0;
  int intervals = 0;
};

struct VectorQuadratureResult {
  Eigen::VectorXcd value;
  Eigen::VectorXd error;  // per component, summed over panels
  bool converged = false;
  int evaluations = 0;
  int intervals = 0;
};

/// Writes f(omega) into `out` (already sized to the integrand dimension).
using VectorIntegrand = std::function<void(double omega, Eigen::Ref<Eigen::VectorXcd> out)>;

/// Globally adaptive Gauss-Kronrod (7, 15) quadrature of a vector-valued integrand.
///
/// All components share the panel refinement. Convergence requires
/// max_c err_c <= max(abs_tol, rel_tol * max_c |I_c|, 100 eps * max_c int |f_c|).
/// On failure the partial result is returned with converged = false.
VectorQuadratureResult integrate_vector(const VectorIntegrand& f, int dim, const QuadratureSpec& spec,
                                        double a, double b);

QuadratureResult integrate(const std::function<std::complex<double>(double)>& f,
                           const QuadratureSpec& spec, double a, double b);

}  // namespace ness

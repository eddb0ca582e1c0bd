#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ness/bath_kernels.hpp"
#include "ness/chain_model.hpp"
#include "ness/kernel_table.hpp"
#include "ness/quadrature.hpp"

namespace ness {

/// Steady-state energy flows of the linear chain. Matrices indexed (n, nu) hold the flow
/// from site nu into site n and are zero for non-neighbours.
struct ZerothOrderCurrents {
  int n = 0;
  double cutoff = 0.0;
  std::vector<double> p_xi;     // bath injection, cutoff dependent
  std::vector<double> p_gamma;  // dissipation, cutoff dependent
  Eigen::MatrixXd p_inter;      // cutoff insensitive
  std::vector<double> balance_residual;
  double table_consistency = 0.0;  // max relative gap between p_inter and lambda2 * L[n,nu]
  std::vector<std::string> failures;
};

ZerothOrderCurrents zeroth_order(const ChainModel& model, const BathSet& baths,
                                 const KernelTable& table, const QuadratureSpec& spec);

/// Coefficient of G_k(w) in the site-n balance integrand; every entry vanishes identically.
struct BalanceIntegrandResidual {
  Eigen::MatrixXd coefficient;  // (n, k)
  Eigen::MatrixXd scale;        // largest single term in each coefficient
  double max_relative() const;
};

BalanceIntegrandResidual balance_integrand_residual(const ChainModel& model, const BathSet& baths,
                                                    double omega);

/// Three-term symmetrization f(k) C_lm + f(l) C_km + f(m) C_kl shared by every tensor.
template <typename F>
auto symmetrize3(const F& f, const Eigen::MatrixXd& c, int k, int l, int m) {
  return f(k) * c(l, m) + f(l) * c(k, m) + f(m) * c(k, l);
}

struct FirstOrderTensors {
  int n = 0;
  SiteTensor<5> gamma;           // [n, r, k, l, m]
  SiteTensor<5> gamma_tilde;     // [n, r, k, l, m]
  SiteTensor<6> upsilon;         // [nu, n, r, k, l, m]
  SiteTensor<6> upsilon_tilde;   // [nu, n, r, k, l, m]
  SiteTensor<4> lambda;          // [n, k, l, m]
  double max_relative_imag = 0.0;
};

FirstOrderTensors first_order_tensors(const KernelTable& table);

struct FirstOrderCurrents {
  std::vector<double> p_xi;
  std::vector<double> p_gamma;
  Eigen::MatrixXd p_inter2;  // quadratic-spring flow correction
  Eigen::MatrixXd p_inter4;  // quartic-bond flow
  bool analytic_zero = false;
};

FirstOrderCurrents first_order_currents(const ChainModel& model, const BathSet& baths,
                                        const NonlinearitySpec& nl, const FirstOrderTensors& tensors);

struct CurrentReport {
  ChainModel model;
  NonlinearitySpec nonlinearity;
  double cutoff = 0.0;
  CutoffKind cutoff_kind = CutoffKind::Hard;

  ZerothOrderCurrents zeroth;
  FirstOrderCurrents first;
  std::vector<double> balance_residual_first;

  int ratio_site = 0;    // ratio is measured on the flow into this site ...
  int ratio_source = 0;  // ... from this neighbour
  double ratio = 0.0;
  bool perturbative_validity = true;

  double max_relative_imag = 0.0;
  int evaluations = 0;
  std::vector<std::string> failures;

  bool converged() const { return failures.empty(); }
};

CurrentReport ness_report(const ChainModel& model, const BathSet& baths, const NonlinearitySpec& nl,
                          const QuadratureSpec& spec, std::size_t threads = 0);

/// Assembles the report from an existing table; used when several nonlinearities share one.
CurrentReport ness_report(const ChainModel& model, const BathSet& baths, const NonlinearitySpec& nl,
                          const QuadratureSpec& spec, const KernelTable& table,
                          const FirstOrderTensors& tensors);

/// Pointwise identities behind the first-order cancellation, two-site chains only.
/// K^{nr}_{nu k}(w) and L^{nr}_{nu k}(w) vanish for r = nu; for r = n they reduce to
/// w Im(conj(D_nn) D_nk) and w Im(conj(D_n nu) D_nu k).
struct CrossResponseResiduals {
  double k_offdiag = 0.0;
  double l_offdiag = 0.0;
  double k_diag = 0.0;
  double l_diag = 0.0;
  double max() const;
};

CrossResponseResiduals cross_response_residuals(const ChainModel& model, const BathSet& baths,
                                                 double omega);

}  // namespace ness

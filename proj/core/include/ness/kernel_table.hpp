#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ness/bath_kernels.hpp"
#include "ness/chain_model.hpp"
#include "ness/quadrature.hpp"

namespace ness {

/// Single-frequency integral families, all taken as int dw/2pi over the cutoff window.
/// With M(w) = D(w) G(w) D(-w):
///   C[l,m]     = M_lm
///   A[n,r,k]   = i w D_nr(w) G_n(w) D_nk(w)
///   B[n,r,k]   = w^2 D_nr(w) M(-w)_nk
///   U[a,r,b,k] = i w D_ar(w) M(-w)_bk
///   L[n,k]     = i w M_nk
/// Every family is real up to quadrature error; the complex values are kept so that the
/// imaginary parts can be audited.
struct KernelTable {
  int n = 0;
  double cutoff = 0.0;
  CutoffKind cutoff_kind = CutoffKind::Hard;

  std::vector<std::complex<double>> c, a, b, u, l;
  std::vector<double> c_err, a_err, b_err, u_err, l_err;

  int evaluations = 0;
  std::vector<std::string> failures;  // one line per block that missed tolerance

  std::complex<double> C(int i, int j) const { return c[i * n + j]; }
  std::complex<double> A(int i, int r, int k) const { return a[(i * n + r) * n + k]; }
  std::complex<double> B(int i, int r, int k) const { return b[(i * n + r) * n + k]; }
  std::complex<double> U(int i, int r, int j, int k) const { return u[((i * n + r) * n + j) * n + k]; }
  std::complex<double> L(int i, int k) const { return l[i * n + k]; }

  Eigen::MatrixXd correlation() const;
  bool converged() const { return failures.empty(); }
  /// Largest |Im| over the whole table divided by the largest |Re| of the same family.
  double max_relative_imag() const;
};

/// Origin, the resonances, the resonances widened by 5 gamma, and the cutoff edges.
std::vector<double> default_split_points(const ChainModel& model, const BathSet& baths);

/// Default tolerances with the chain's split points filled in.
QuadratureSpec default_quadrature(const ChainModel& model, const BathSet& baths);

/// Shared cutoff default: 50 times the highest chain resonance.
double default_cutoff(const ChainModel& model);

/// Builds every family; blocks are independent 1-D integrals distributed over `threads`.
KernelTable build_kernel_table(const ChainModel& model, const BathSet& baths,
                               const QuadratureSpec& spec, std::size_t threads = 0);

}  // namespace ness

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ness {

/// Uniform nearest-neighbour chain of unit-mass oscillators, each damped at rate gamma.
struct ChainModel {
  int n_sites = 2;
  double omega_r = 10.0;  // renormalized on-site frequency
  double lambda2 = 10.0;  // bilinear spring between neighbours
  double gamma = 1.0;

  void validate() const;
};

enum class NonlinearityKind { KleinGordon, BetaFput, AlphaFput };

std::string to_string(NonlinearityKind kind);
NonlinearityKind nonlinearity_from_string(const std::string& name);

struct NonlinearitySpec {
  NonlinearityKind kind = NonlinearityKind::KleinGordon;
  double strength = 0.0;
};

/// Dense tensor over site indices, all dimensions equal to the site count.
template <std::size_t Rank>
class SiteTensor {
 public:
  SiteTensor() = default;
  explicit SiteTensor(int n) : n_(n), data_(extent(n), 0.0) {}

  int sites() const { return n_; }
  std::size_t size() const { return data_.size(); }

  template <typename... I>
  double& operator()(I... idx) {
    static_assert(sizeof...(I) == Rank);
    return data_[flat(idx...)];
  }
  template <typename... I>
  double operator()(I... idx) const {
    static_assert(sizeof...(I) == Rank);
    return data_[flat(idx...)];
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  static std::size_t extent(int n) {
    std::size_t e = 1;
    for (std::size_t i = 0; i < Rank; ++i) e *= static_cast<std::size_t>(n);
    return e;
  }
  template <typename... I>
  std::size_t flat(I... idx) const {
    std::size_t f = 0;
    ((f = f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx)), ...);
    return f;
  }

  int n_ = 0;
  std::vector<double> data_;
};

using Tensor3 = SiteTensor<3>;
using Tensor4 = SiteTensor<4>;

/// Nonlinear couplings in the form consumed by the first-order formulas.
///
/// mu contracts as sum mu_klmr r_k r_l r_m q_r, sigma as sum sigma_klmr r_k q_l q_m q_r,
/// where r is the mean and q the difference coordinate of the two histories.
struct CouplingTensors {
  Tensor4 mu;
  Tensor4 sigma;
  Tensor3 mu3;     // cubic: sum mu3_klm r_k r_l q_m
  Tensor3 sigma3;  // cubic: sum sigma3_klm r_k q_l q_m
};

Eigen::MatrixXd build_frequency_matrix(const ChainModel& model);

/// Nearest-neighbour bonds (i, i+1).
std::vector<std::array<int, 2>> chain_bonds(int n_sites);

CouplingTensors build_coupling_tensors(const ChainModel& model, const NonlinearitySpec& nl);

double contract_mu(const Tensor4& mu, const Eigen::VectorXd& r, const Eigen::VectorXd& q);
double contract_sigma(const Tensor4& sigma, const Eigen::VectorXd& r, const Eigen::VectorXd& q);

}  // namespace ness

#include "ness/chain_model.hpp"

#include <cmath>
#include <stdexcept>

namespace ness {

void ChainModel::validate() const {
  if (n_sites < 1) throw std::invalid_argument("n_sites must be at least 1");
  if (!(omega_r > 0.0) || !std::isfinite(omega_r))
    throw std::invalid_argument("omega_r must be positive and finite");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("gamma must be positive and finite");
  if (!(lambda2 >= 0.0) || !std::isfinite(lambda2))
    throw std::invalid_argument("lambda2 must be nonnegative and finite");
}

std::string to_string(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::KleinGordon: return "kg";
    case NonlinearityKind::BetaFput: return "beta";
    case NonlinearityKind::AlphaFput: return "alpha";
  }
  return "unknown";
}

NonlinearityKind nonlinearity_from_string(const std::string& name) {
  if (name == "kg" || name == "KG" || name == "klein-gordon") return NonlinearityKind::KleinGordon;
  if (name == "beta" || name == "beta-fput" || name == "BetaFPUT") return NonlinearityKind::BetaFput;
  if (name == "alpha" || name == "alpha-fput" || name == "AlphaFPUT") return NonlinearityKind::AlphaFput;
  throw std::invalid_argument("unknown nonlinearity kind '" + name + "'");
}

std::vector<std::array<int, 2>> chain_bonds(int n_sites) {
  std::vector<std::array<int, 2>> bonds;
  for (int i = 0; i + 1 < n_sites; ++i) bonds.push_back({i, i + 1});
  return bonds;
}

Eigen::MatrixXd build_frequency_matrix(const ChainModel& model) {
  model.validate();
  const int n = model.n_sites;
  Eigen::MatrixXd w2 = Eigen::MatrixXd::Identity(n, n) * (model.omega_r * model.omega_r);
  for (auto [a, b] : chain_bonds(n)) {
    w2(a, a) += model.lambda2;
    w2(b, b) += model.lambda2;
    w2(a, b) -= model.lambda2;
    w2(b, a) -= model.lambda2;
  }
  return w2;
}

namespace {

// Adds c * s_k s_l s_m s_r with s = e_a - e_b.
void add_bond_quartic(Tensor4& t, int a, int b, double c) {
  const int idx[2] = {a, b};
  const double sign[2] = {1.0, -1.0};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          t(idx[i], idx[j], idx[k], idx[l]) += c * sign[i] * sign[j] * sign[k] * sign[l];
}

void add_bond_cubic(Tensor3& t, int a, int b, double c) {
  const int idx[2] = {a, b};
  const double sign[2] = {1.0, -1.0};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) t(idx[i], idx[j], idx[k]) += c * sign[i] * sign[j] * sign[k];
}

}  // namespace

CouplingTensors build_coupling_tensors(const ChainModel& model, const NonlinearitySpec& nl) {
  model.validate();
  if (!(nl.strength >= 0.0) || !std::isfinite(nl.strength))
    throw std::invalid_argument("nonlinearity strength must be nonnegative and finite");

  const int n = model.n_sites;
  CouplingTensors t{Tensor4(n), Tensor4(n), Tensor3(n), Tensor3(n)};
  const double lam = nl.strength;

  switch (nl.kind) {
    case NonlinearityKind::KleinGordon:
      // V = (lam/4) x^4 per site: V(r+q/2) - V(r-q/2) = lam (r^3 q + r q^3 / 4)
      for (int k = 0; k < n; ++k) {
        t.mu(k, k, k, k) = -lam;
        t.sigma(k, k, k, k) = -lam / 4.0;
      }
      break;
    case NonlinearityKind::BetaFput:
      // same quartic form in the bond stretch x_a - x_b
      for (auto [a, b] : chain_bonds(n)) {
        add_bond_quartic(t.mu, a, b, -lam);
        add_bond_quartic(t.sigma, a, b, -lam / 4.0);
      }
      break;
    case NonlinearityKind::AlphaFput:
      // V = (lam/3) d^3: the difference has a d_r^2 d_q term and a pure d_q^3 term,
      // no d_r d_q^2 term, so sigma3 stays zero
      for (auto [a, b] : chain_bonds(n)) add_bond_cubic(t.mu3, a, b, -lam);
      break;
  }
  return t;
}

double contract_mu(const Tensor4& mu, const Eigen::VectorXd& r, const Eigen::VectorXd& q) {
  const int n = mu.sites();
  double s = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m)
        for (int p = 0; p < n; ++p) s += mu(k, l, m, p) * r[k] * r[l] * r[m] * q[p];
  return s;
}

double contract_sigma(const Tensor4& sigma, const Eigen::VectorXd& r, const Eigen::VectorXd& q) {
  const int n = sigma.sites();
  double s = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m)
        for (int p = 0; p < n; ++p) s += sigma(k, l, m, p) * r[k] * q[l] * q[m] * q[p];
  return s;
}

}  // namespace ness

#include "ness/currents.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

#include "ness/propagators.hpp"

namespace ness {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kValidityBound = 0.1;

std::vector<std::array<int, 2>> directed_bonds(int n) {
  std::vector<std::array<int, 2>> out;
  for (auto [a, b] : chain_bonds(n)) {
    out.push_back({a, b});
    out.push_back({b, a});
  }
  return out;
}

std::vector<int> neighbours(int n_sites, int site) {
  std::vector<int> nb;
  if (site > 0) nb.push_back(site - 1);
  if (site + 1 < n_sites) nb.push_back(site + 1);
  return nb;
}

}  // namespace

ZerothOrderCurrents zeroth_order(const ChainModel& model, const BathSet& baths,
                                 const KernelTable& table, const QuadratureSpec& spec) {
  model.validate();
  baths.validate();
  const int n = model.n_sites;
  if (baths.size() != n) throw std::invalid_argument("bath count does not match the number of sites");

  const auto bonds = directed_bonds(n);
  const int dim = 2 * n + static_cast<int>(bonds.size());
  const ModalPropagator prop(model);
  const double g2 = 2.0 * model.gamma;
  const double l2 = model.lambda2;

  Eigen::MatrixXcd d;
  const VectorIntegrand f = [&](double w, Eigen::Ref<Eigen::VectorXcd> out) {
    prop.evaluate(w, d);
    const Eigen::VectorXd g = noise_kernel_diagonal(w, baths);
    for (int i = 0; i < n; ++i) {
      out[i] = -w * d(i, i).imag() * g[i] / kTwoPi;
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += std::norm(d(i, k)) * g[k];
      out[n + i] = -g2 * w * w * s / kTwoPi;
    }
    for (std::size_t b = 0; b < bonds.size(); ++b) {
      const auto [i, j] = bonds[b];
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += (d(i, k) * std::conj(d(j, k))).imag() * g[k];
      out[2 * n + static_cast<int>(b)] = -l2 * w * s / kTwoPi;
    }
  };
  const double lim = integration_limit(baths);
  const VectorQuadratureResult r = integrate_vector(f, dim, spec, -lim, lim);

  ZerothOrderCurrents z;
  z.n = n;
  z.cutoff = baths.cutoff;
  z.p_xi.resize(n);
  z.p_gamma.resize(n);
  z.p_inter = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    z.p_xi[i] = r.value[i].real();
    z.p_gamma[i] = r.value[n + i].real();
  }
  for (std::size_t b = 0; b < bonds.size(); ++b)
    z.p_inter(bonds[b][0], bonds[b][1]) = r.value[2 * n + static_cast<int>(b)].real();

  z.balance_residual.resize(n);
  for (int i = 0; i < n; ++i)
    z.balance_residual[i] = std::abs(z.p_xi[i] + z.p_gamma[i] + z.p_inter.row(i).sum());

  const double scale = std::max(z.p_inter.cwiseAbs().maxCoeff(), 1e-300);
  for (auto [i, j] : bonds) {
    if (table.n != n) break;
    const double gap = std::abs(z.p_inter(i, j) - l2 * table.L(i, j).real());
    z.table_consistency = std::max(z.table_consistency, gap / scale);
  }

  if (!r.converged) {
    char line[160];
    std::snprintf(line, sizeof line, "zeroth-order fluxes did not converge: error %.3e after %d panels",
                  r.error.maxCoeff(), r.intervals);
    z.failures.emplace_back(line);
  }
  return z;
}

double BalanceIntegrandResidual::max_relative() const {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < coefficient.size(); ++i) {
    const double s = scale.data()[i];
    if (s > 0.0) worst = std::max(worst, std::abs(coefficient.data()[i]) / s);
  }
  return worst;
}

BalanceIntegrandResidual balance_integrand_residual(const ChainModel& model, const BathSet& baths,
                                                    double omega) {
  (void)baths;  // the identity holds coefficient by coefficient, for any bath
  const int n = model.n_sites;
  const Eigen::MatrixXcd d = fourier_propagator(omega, model);
  const double w = omega;
  BalanceIntegrandResidual res;
  res.coefficient = Eigen::MatrixXd::Zero(n, n);
  res.scale = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const std::vector<int> nb = neighbours(n, i);
    for (int k = 0; k < n; ++k) {
      double terms[4] = {0.0, 0.0, 0.0, 0.0};
      if (i == k) terms[0] = w * d(i, i).imag();
      terms[1] = 2.0 * model.gamma * w * w * std::norm(d(i, k));
      for (std::size_t q = 0; q < nb.size(); ++q)
        terms[2 + q] = model.lambda2 * w * (d(i, k) * std::conj(d(nb[q], k))).imag();
      double sum = 0.0, big = 0.0;
      for (double t : terms) {
        sum += t;
        big = std::max(big, std::abs(t));
      }
      res.coefficient(i, k) = sum;
      res.scale(i, k) = big;
    }
  }
  return res;
}

FirstOrderTensors first_order_tensors(const KernelTable& table) {
  const int n = table.n;
  const Eigen::MatrixXd c = table.correlation();
  FirstOrderTensors t;
  t.n = n;
  t.gamma = SiteTensor<5>(n);
  t.gamma_tilde = SiteTensor<5>(n);
  t.upsilon = SiteTensor<6>(n);
  t.upsilon_tilde = SiteTensor<6>(n);
  t.lambda = SiteTensor<4>(n);

  using C = std::complex<double>;
  double re_max = 0.0, im_max = 0.0;
  auto keep = [&](C z) {
    re_max = std::max(re_max, std::abs(z.real()));
    im_max = std::max(im_max, std::abs(z.imag()));
    return z.real();
  };

  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
          t.lambda(i, k, l, m) =
              keep(symmetrize3([&](int p) { return table.L(i, p); }, c, k, l, m));

  for (int i = 0; i < n; ++i)
    for (int r = 0; r < n; ++r)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m) {
            t.gamma(i, r, k, l, m) =
                keep(symmetrize3([&](int p) { return table.A(i, r, p); }, c, k, l, m));
            t.gamma_tilde(i, r, k, l, m) =
                keep(2.0 * symmetrize3([&](int p) { return table.B(i, r, p); }, c, k, l, m));
            for (int v = 0; v < n; ++v) {
              t.upsilon(v, i, r, k, l, m) =
                  keep(symmetrize3([&](int p) { return table.U(i, r, v, p); }, c, k, l, m));
              t.upsilon_tilde(v, i, r, k, l, m) =
                  keep(symmetrize3([&](int p) { return -table.U(v, r, i, p); }, c, k, l, m));
            }
          }
  t.max_relative_imag = re_max > 0.0 ? im_max / re_max : 0.0;
  return t;
}

FirstOrderCurrents first_order_currents(const ChainModel& model, const BathSet& baths,
                                        const NonlinearitySpec& nl, const FirstOrderTensors& tensors) {
  (void)baths;
  const int n = model.n_sites;
  if (tensors.n != n) throw std::invalid_argument("tensor size does not match the chain");
  FirstOrderCurrents out;
  out.p_xi.assign(n, 0.0);
  out.p_gamma.assign(n, 0.0);
  out.p_inter2 = Eigen::MatrixXd::Zero(n, n);
  out.p_inter4 = Eigen::MatrixXd::Zero(n, n);

  if (nl.kind == NonlinearityKind::AlphaFput) {
    // cubic couplings pair an odd number of Gaussian noises: every contraction vanishes
    out.analytic_zero = true;
    return out;
  }

  const CouplingTensors ct = build_coupling_tensors(model, nl);
  const Tensor4& mu = ct.mu;
  for (int i = 0; i < n; ++i) {
    double xi = 0.0, ga = 0.0;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
          for (int r = 0; r < n; ++r) {
            const double c = mu(k, l, m, r);
            if (c == 0.0) continue;
            xi += c * tensors.gamma(i, r, k, l, m);
            ga += c * tensors.gamma_tilde(i, r, k, l, m);
          }
    out.p_xi[i] = xi;
    out.p_gamma[i] = -2.0 * model.gamma * ga;

    for (int v : neighbours(n, i)) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m)
            for (int r = 0; r < n; ++r) {
              const double c = mu(k, l, m, r);
              if (c == 0.0) continue;
              s += c * (tensors.upsilon(v, i, r, k, l, m) + tensors.upsilon_tilde(v, i, r, k, l, m));
            }
      out.p_inter2(i, v) = model.lambda2 * s;

      if (nl.kind == NonlinearityKind::BetaFput) {
        const auto& lam = tensors.lambda;
        out.p_inter4(i, v) =
            nl.strength * (3.0 * lam(i, i, i, v) - 3.0 * lam(i, i, v, v) + lam(i, v, v, v));
      }
      // an on-site quartic carries no bond force, so the quartic flow stays zero for KG
    }
  }
  return out;
}

CurrentReport ness_report(const ChainModel& model, const BathSet& baths, const NonlinearitySpec& nl,
                          const QuadratureSpec& spec, const KernelTable& table,
                          const FirstOrderTensors& tensors) {
  CurrentReport rep;
  rep.model = model;
  rep.nonlinearity = nl;
  rep.cutoff = baths.cutoff;
  rep.cutoff_kind = baths.cutoff_kind;
  rep.failures = table.failures;
  rep.evaluations = table.evaluations;

  rep.zeroth = zeroth_order(model, baths, table, spec);
  rep.failures.insert(rep.failures.end(), rep.zeroth.failures.begin(), rep.zeroth.failures.end());
  rep.first = first_order_currents(model, baths, nl, tensors);
  rep.max_relative_imag = std::max(table.max_relative_imag(), tensors.max_relative_imag);

  const int n = model.n_sites;
  rep.balance_residual_first.resize(n);
  for (int i = 0; i < n; ++i)
    rep.balance_residual_first[i] = std::abs(rep.first.p_xi[i] + rep.first.p_gamma[i] +
                                             rep.first.p_inter2.row(i).sum() +
                                             rep.first.p_inter4.row(i).sum());

  if (n >= 2) {
    rep.ratio_site = n - 1;
    rep.ratio_source = n - 2;
    const double p0 = rep.zeroth.p_inter(rep.ratio_site, rep.ratio_source);
    const double p1 = rep.first.p_inter2(rep.ratio_site, rep.ratio_source) +
                      rep.first.p_inter4(rep.ratio_site, rep.ratio_source);
    if (p1 == 0.0)
      rep.ratio = 0.0;
    else if (p0 == 0.0)
      rep.ratio = std::nan("");
    else
      rep.ratio = p1 / p0;
  }
  rep.perturbative_validity = std::abs(rep.ratio) < kValidityBound;
  return rep;
}

CurrentReport ness_report(const ChainModel& model, const BathSet& baths, const NonlinearitySpec& nl,
                          const QuadratureSpec& spec, std::size_t threads) {
  const KernelTable table = build_kernel_table(model, baths, spec, threads);
  const FirstOrderTensors tensors = first_order_tensors(table);
  return ness_report(model, baths, nl, spec, table, tensors);
}

double CrossResponseResiduals::max() const { return std::max({k_offdiag, l_offdiag, k_diag, l_diag}); }

CrossResponseResiduals cross_response_residuals(const ChainModel& model, const BathSet& baths,
                                                 double omega) {
  (void)baths;
  if (model.n_sites != 2) throw std::invalid_argument("K/L identities are stated for two sites");
  const Eigen::MatrixXcd d = fourier_propagator(omega, model);
  const double w = omega, g = model.gamma, l2 = model.lambda2;
  auto conj = [](std::complex<double> z) { return std::conj(z); };

  auto k_terms = [&](int i, int v, int r, int k, double* t) {
    t[0] = w * (d(i, r) * d(i, k)).imag();
    t[1] = 4.0 * g * w * w * (d(i, r) * conj(d(i, i)) * d(i, k)).real();
    t[2] = l2 * w * (d(i, r) * conj(d(v, i)) * d(i, k)).imag();
    t[3] = -l2 * w * (d(v, r) * conj(d(i, i)) * d(i, k)).imag();
  };
  auto l_terms = [&](int i, int v, int r, int k, double* t) {
    t[0] = 4.0 * g * w * w * (d(i, r) * conj(d(i, v)) * d(v, k)).real();
    t[1] = l2 * w * (d(i, r) * conj(d(v, v)) * d(v, k)).imag();
    t[2] = -l2 * w * (d(v, r) * conj(d(i, v)) * d(v, k)).imag();
    t[3] = 0.0;
  };
  auto relative = [](const double* t, double target) {
    double sum = -target, big = std::abs(target);
    for (int q = 0; q < 4; ++q) {
      sum += t[q];
      big = std::max(big, std::abs(t[q]));
    }
    return big > 0.0 ? std::abs(sum) / big : 0.0;
  };

  CrossResponseResiduals res;
  for (int i = 0; i < 2; ++i) {
    const int v = 1 - i;
    for (int k = 0; k < 2; ++k) {
      double t[4];
      k_terms(i, v, v, k, t);
      res.k_offdiag = std::max(res.k_offdiag, relative(t, 0.0));
      l_terms(i, v, v, k, t);
      res.l_offdiag = std::max(res.l_offdiag, relative(t, 0.0));
      k_terms(i, v, i, k, t);
      res.k_diag = std::max(res.k_diag, relative(t, w * (conj(d(i, i)) * d(i, k)).imag()));
      l_terms(i, v, i, k, t);
      res.l_diag = std::max(res.l_diag, relative(t, w * (conj(d(i, v)) * d(v, k)).imag()));
    }
  }
  return res;
}

}  // namespace ness

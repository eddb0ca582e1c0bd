#include "ness_chain/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "ness/currents.hpp"
#include "ness/kernel_table.hpp"
#include "ness/propagators.hpp"
#include "ness/thread_pool.hpp"
#include "ness_chain/report_io.hpp"

namespace ness::cli {

namespace {

void emit(const RunConfig& cfg, const std::string& body, std::ostream& out) {
  if (cfg.output.empty()) {
    out << body;
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!f) throw ConfigError("cannot write output '" + cfg.output + "'");
  f << body;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

int cmd_currents(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const BathSet baths = cfg.baths();
  const QuadratureSpec q = cfg.quadrature();
  const KernelTable table = build_kernel_table(cfg.model, baths, q);
  const FirstOrderTensors tensors = first_order_tensors(table);
  const CurrentReport rep = ness_report(cfg.model, baths, cfg.nonlinearity, q, table, tensors);

  std::string body;
  if (cfg.format == OutputFormat::Json) {
    nlohmann::json j = report_to_json(rep, cfg);
    if (cfg.dump_table) j["kernel_table"] = table_to_json(table);
    body = j.dump(2) + "\n";
  } else {
    body = report_to_csv(rep);
  }
  emit(cfg, body, out);

  for (const auto& f : rep.failures) err << "quadrature: " << f << "\n";
  return rep.converged() ? kExitOk : kExitQuadrature;
}

std::string sweep_csv(const RunConfig& cfg, std::size_t threads, int* failed_points) {
  if (cfg.sweep.empty() || cfg.sweep.size() > 2) throw ConfigError("sweep needs one or two variables");
  std::vector<std::vector<double>> points;
  for (double a : cfg.sweep[0].values()) {
    if (cfg.sweep.size() == 1) {
      points.push_back({a});
    } else {
      for (double b : cfg.sweep[1].values()) points.push_back({a, b});
    }
  }

  std::vector<std::string> rows(points.size());
  std::vector<char> failed(points.size(), 0);
  parallel_for(
      points.size(),
      [&](std::size_t i) {
        std::ostringstream row;
        for (double v : points[i]) row << format_number(v) << ',';
        std::string error;
        double fields[11];
        std::fill(std::begin(fields), std::end(fields), std::nan(""));
        bool valid = false;
        try {
          RunConfig p = cfg;
          for (std::size_t a = 0; a < points[i].size(); ++a) p = p.with(cfg.sweep[a].var, points[i][a]);
          validate_config(p);
          const CurrentReport rep =
              ness_report(p.model, p.baths(), p.nonlinearity, p.quadrature(), 1);
          const int s = rep.ratio_site, src = rep.ratio_source;
          const double p0 = rep.zeroth.p_inter(s, src);
          const double denom = std::abs(p0);
          fields[0] = rep.cutoff;
          fields[1] = p0;
          fields[2] = rep.first.p_xi[s];
          fields[3] = rep.first.p_gamma[s];
          fields[4] = rep.first.p_inter2(s, src);
          fields[5] = rep.first.p_inter4(s, src);
          fields[6] = fields[4] + fields[5];
          fields[7] = rep.ratio;
          fields[8] = denom > 0.0 ? max_abs(rep.zeroth.balance_residual) / denom : std::nan("");
          fields[9] = denom > 0.0 ? max_abs(rep.balance_residual_first) / denom : std::nan("");
          valid = rep.perturbative_validity;
          for (const auto& f : rep.failures) error += (error.empty() ? "" : "; ") + f;
        } catch (const std::exception& e) {
          error = e.what();
        }
        failed[i] = error.empty() ? 0 : 1;
        for (int f = 0; f < 8; ++f) row << format_number(fields[f]) << ',';
        row << (valid ? "true" : "false") << ',' << format_number(fields[8]) << ','
            << format_number(fields[9]) << ',' << csv_field(error) << '\n';
        rows[i] = row.str();
      },
      threads);

  std::string out;
  for (const auto& ax : cfg.sweep) out += ax.var + ",";
  out += "cutoff,p_inter0,p1_xi,p1_gamma,p1_inter2,p1_inter4,p1_inter,ratio,perturbative_validity,"
         "balance0_rel,balance1_rel,error\n";
  for (const auto& r : rows) out += r;
  if (failed_points) *failed_points = static_cast<int>(std::count(failed.begin(), failed.end(), 1));
  return out;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  int failed = 0;
  const std::string body = sweep_csv(cfg, 0, &failed);
  emit(cfg, body, out);
  if (failed > 0) {
    err << failed << " sweep point(s) reported errors; see the error column\n";
    return kExitQuadrature;
  }
  return kExitOk;
}

std::vector<IdentityCheck> run_identity_suite(const RunConfig& cfg) {
  std::vector<IdentityCheck> checks;
  auto add = [&](std::string name, double value, double tol, bool quad = false) {
    checks.push_back({std::move(name), value, tol, value < tol, quad});
  };

  const ChainModel& m = cfg.model;
  const BathSet baths = cfg.baths();
  const double wc = baths.cutoff;

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> wide(-3.0 * wc, 3.0 * wc);
  std::uniform_real_distribution<double> band(-3.0 * resonance_frequencies(m).back(),
                                              3.0 * resonance_frequencies(m).back());
  std::vector<double> grid;
  for (int i = 0; i < 500; ++i) grid.push_back(wide(rng));
  for (int i = 0; i < 500; ++i) grid.push_back(band(rng));

  const Eigen::MatrixXd w2 = cfg.frequency_matrix_override ? *cfg.frequency_matrix_override
                                                           : build_frequency_matrix(m);
  const PropagatorIdentityResiduals pr = propagator_identity_residuals(w2, m.gamma, grid);
  add("propagator.symmetry", pr.symmetry, 1e-12);
  add("propagator.mirror", pr.mirror, 1e-12);
  add("propagator.resolvent", pr.resolvent, 1e-12);
  add("propagator.conjugation", pr.conjugation, 1e-12);

  double bal = 0.0;
  for (double w : grid) bal = std::max(bal, balance_integrand_residual(m, baths, w).max_relative());
  add("balance.pointwise", bal, 1e-12);

  if (m.n_sites == 2) {
    CrossResponseResiduals e;
    for (double w : grid) {
      const CrossResponseResiduals r = cross_response_residuals(m, baths, w);
      e.k_offdiag = std::max(e.k_offdiag, r.k_offdiag);
      e.l_offdiag = std::max(e.l_offdiag, r.l_offdiag);
      e.k_diag = std::max(e.k_diag, r.k_diag);
      e.l_diag = std::max(e.l_diag, r.l_diag);
    }
    add("cross_response.K_offdiag", e.k_offdiag, 1e-12);
    add("cross_response.L_offdiag", e.l_offdiag, 1e-12);
    add("cross_response.K_diag", e.k_diag, 1e-12);
    add("cross_response.L_diag", e.l_diag, 1e-12);
  }

  const QuadratureSpec q = cfg.quadrature();
  const KernelTable table = build_kernel_table(m, baths, q);
  const FirstOrderTensors tensors = first_order_tensors(table);
  add("quadrature.converged", table.converged() ? 0.0 : 1.0, 0.5, true);

  double l_norm = 0.0, l_diag = 0.0;
  for (int i = 0; i < m.n_sites; ++i)
    for (int k = 0; k < m.n_sites; ++k) {
      l_norm = std::max(l_norm, std::abs(table.L(i, k)));
      if (i == k) l_diag = std::max(l_diag, std::abs(table.L(i, i)));
    }
  add("table.L_diagonal", l_norm > 0.0 ? l_diag / l_norm : 0.0, 1e-8, true);
  add("table.realness", std::max(table.max_relative_imag(), tensors.max_relative_imag), 1e-10, true);

  double lam_norm = 0.0, lam_diag = 0.0, ups_norm = 0.0, ups_sum = 0.0;
  for (double x : tensors.lambda.data()) lam_norm = std::max(lam_norm, std::abs(x));
  for (double x : tensors.upsilon.data()) ups_norm = std::max(ups_norm, std::abs(x));
  const int n = m.n_sites;
  for (int i = 0; i < n; ++i) {
    lam_diag = std::max(lam_diag, std::abs(tensors.lambda(i, i, i, i)));
    for (int r = 0; r < n; ++r)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int mm = 0; mm < n; ++mm)
            ups_sum = std::max(ups_sum, std::abs(tensors.upsilon(i, i, r, k, l, mm) +
                                                 tensors.upsilon_tilde(i, i, r, k, l, mm)));
  }
  add("tensors.Lambda_diagonal", lam_norm > 0.0 ? lam_diag / lam_norm : 0.0, 1e-8, true);
  add("tensors.Upsilon_cancellation", ups_norm > 0.0 ? ups_sum / ups_norm : 0.0, 1e-8, true);

  const double strength = cfg.nonlinearity.strength > 0.0 ? cfg.nonlinearity.strength : 1.0;
  for (NonlinearityKind kind : {NonlinearityKind::KleinGordon, NonlinearityKind::BetaFput,
                                NonlinearityKind::AlphaFput}) {
    const CurrentReport rep = ness_report(m, baths, {kind, strength}, q, table, tensors);
    double p0 = rep.zeroth.p_inter.cwiseAbs().maxCoeff();
    if (kind == NonlinearityKind::KleinGordon) {
      const double ref = p0 > 0.0 ? p0 : std::max(1.0, max_abs(rep.zeroth.p_xi));
      add("balance.zeroth_integrated", max_abs(rep.zeroth.balance_residual) / ref, 1e-6, true);
    }
    if (kind == NonlinearityKind::AlphaFput) {
      double worst = max_abs(rep.first.p_xi) + max_abs(rep.first.p_gamma) +
                     rep.first.p_inter2.cwiseAbs().maxCoeff() + rep.first.p_inter4.cwiseAbs().maxCoeff();
      add("first_order.alpha_zero", rep.first.analytic_zero ? worst : 1.0, 1e-300);
      continue;
    }
    if (p0 == 0.0) p0 = 1.0;
    add(std::string("balance.first_") + to_string(kind), max_abs(rep.balance_residual_first) / p0, 1e-5,
        true);
  }
  return checks;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::vector<IdentityCheck> checks = run_identity_suite(cfg);
  bool identity_failed = false, quadrature_failed = false;
  for (const auto& c : checks) {
    char line[200];
    std::snprintf(line, sizeof line, "%s  %-32s max=%.3e  tol=%.1e\n", c.pass ? "PASS" : "FAIL",
                  c.name.c_str(), c.value, c.tolerance);
    out << line;
    if (!c.pass) (c.quadrature ? quadrature_failed : identity_failed) = true;
  }
  if (identity_failed) {
    err << "identity suite failed\n";
    return kExitIdentity;
  }
  if (quadrature_failed) {
    err << "identity suite failed on quadrature accuracy\n";
    return kExitQuadrature;
  }
  return kExitOk;
}

}  // namespace ness::cli

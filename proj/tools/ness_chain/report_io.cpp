#include "ness_chain/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ness/version.hpp"

namespace ness::cli {

namespace {

nlohmann::json number_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

nlohmann::json flows(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  const int n = static_cast<int>(m.rows());
  for (auto [a, b] : chain_bonds(n)) {
    out.push_back({{"into", a + 1}, {"from", b + 1}, {"value", m(a, b)}});
    out.push_back({{"into", b + 1}, {"from", a + 1}, {"value", m(b, a)}});
  }
  return out;
}

const char* cutoff_name(CutoffKind k) { return k == CutoffKind::Hard ? "hard" : "exponential"; }

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

nlohmann::json report_to_json(const CurrentReport& rep, const RunConfig& cfg) {
  const QuadratureSpec q = cfg.quadrature();
  nlohmann::json j;
  j["provenance"] = {
      {"library", "ness-chain"},
      {"version", version_string},
      {"units", "hbar = k_B = mass = 1"},
      {"config", cfg.source},
      {"cutoff", rep.cutoff},
      {"cutoff_kind", cutoff_name(rep.cutoff_kind)},
      {"site_temperatures", cfg.site_temperatures()},
      {"quadrature",
       {{"rel_tol", q.rel_tol},
        {"abs_tol", q.abs_tol},
        {"max_subdivisions", q.max_subdivisions},
        {"split_points", q.split_points}}},
      {"integrand_evaluations", rep.evaluations}};

  const auto& z = rep.zeroth;
  j["zeroth_order"] = {
      {"p_xi", {{"values", z.p_xi}, {"cutoff_dependent", true}, {"cutoff", rep.cutoff}}},
      {"p_gamma", {{"values", z.p_gamma}, {"cutoff_dependent", true}, {"cutoff", rep.cutoff}}},
      {"p_inter", {{"flows", flows(z.p_inter)}, {"cutoff_dependent", false}}},
      {"balance_residual", z.balance_residual}};

  const auto& f = rep.first;
  j["first_order"] = {
      {"nonlinearity", to_string(rep.nonlinearity.kind)},
      {"strength", rep.nonlinearity.strength},
      {"analytic_zero", f.analytic_zero},
      {"p_xi", f.p_xi},
      {"p_gamma", f.p_gamma},
      {"p_inter2", flows(f.p_inter2)},
      {"p_inter4", flows(f.p_inter4)},
      {"balance_residual", rep.balance_residual_first}};

  j["ratio"] = {{"value", number_or_null(rep.ratio)},
                {"into", rep.ratio_site + 1},
                {"from", rep.ratio_source + 1}};
  j["perturbative_validity"] = rep.perturbative_validity;
  j["max_relative_imag"] = rep.max_relative_imag;
  j["quadrature_failures"] = rep.failures;
  return j;
}

nlohmann::json table_to_json(const KernelTable& t) {
  nlohmann::json j;
  auto put = [&](const char* name, const std::vector<std::complex<double>>& v,
                 const std::vector<double>& err, int rank) {
    nlohmann::json fam = nlohmann::json::object();
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::string key;
      std::size_t rem = i;
      std::vector<int> idx(rank);
      for (int r = rank - 1; r >= 0; --r) {
        idx[r] = static_cast<int>(rem % t.n);
        rem /= t.n;
      }
      for (int r = 0; r < rank; ++r) key += (r ? "," : "") + std::to_string(idx[r] + 1);
      fam[key] = {v[i].real(), v[i].imag(), err[i]};
    }
    j[name] = fam;
  };
  put("C", t.c, t.c_err, 2);
  put("A", t.a, t.a_err, 3);
  put("B", t.b, t.b_err, 3);
  put("U", t.u, t.u_err, 4);
  put("L", t.l, t.l_err, 2);
  j["layout"] = "index tuple -> [re, im, error estimate]";
  return j;
}

std::string report_to_csv(const CurrentReport& rep) {
  std::ostringstream out;
  out << "quantity,order,site,source,value,cutoff_dependent\n";
  const int n = rep.model.n_sites;
  auto row = [&](const char* q, int order, int site, int source, double v, bool dep) {
    out << q << ',' << order << ',' << site << ',' << (source ? std::to_string(source) : "") << ','
        << format_number(v) << ',' << (dep ? "true" : "false") << '\n';
  };
  for (int i = 0; i < n; ++i) {
    row("p_xi", 0, i + 1, 0, rep.zeroth.p_xi[i], true);
    row("p_gamma", 0, i + 1, 0, rep.zeroth.p_gamma[i], true);
  }
  for (auto [a, b] : chain_bonds(n)) {
    row("p_inter", 0, a + 1, b + 1, rep.zeroth.p_inter(a, b), false);
    row("p_inter", 0, b + 1, a + 1, rep.zeroth.p_inter(b, a), false);
  }
  for (int i = 0; i < n; ++i) row("balance_residual", 0, i + 1, 0, rep.zeroth.balance_residual[i], false);
  for (int i = 0; i < n; ++i) {
    row("p_xi", 1, i + 1, 0, rep.first.p_xi[i], false);
    row("p_gamma", 1, i + 1, 0, rep.first.p_gamma[i], false);
  }
  for (auto [a, b] : chain_bonds(n)) {
    row("p_inter2", 1, a + 1, b + 1, rep.first.p_inter2(a, b), false);
    row("p_inter2", 1, b + 1, a + 1, rep.first.p_inter2(b, a), false);
    row("p_inter4", 1, a + 1, b + 1, rep.first.p_inter4(a, b), false);
    row("p_inter4", 1, b + 1, a + 1, rep.first.p_inter4(b, a), false);
  }
  for (int i = 0; i < n; ++i) row("balance_residual", 1, i + 1, 0, rep.balance_residual_first[i], false);
  row("ratio", 1, rep.ratio_site + 1, rep.ratio_source + 1, rep.ratio, false);
  return out.str();
}

}  // namespace ness::cli

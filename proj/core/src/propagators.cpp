#include "ness/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ness {

namespace {

Eigen::MatrixXcd dynamic_matrix(double omega, const Eigen::MatrixXd& w2, double gamma) {
  const int n = static_cast<int>(w2.rows());
  Eigen::MatrixXcd z = w2.cast<cdouble>();
  const cdouble diag(-omega * omega, 2.0 * gamma * omega);
  for (int i = 0; i < n; ++i) z(i, i) += diag;
  return z;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

Eigen::MatrixXcd fourier_propagator(double omega, const Eigen::MatrixXd& freq_matrix, double gamma) {
  if (freq_matrix.rows() != freq_matrix.cols() || freq_matrix.rows() == 0)
    throw std::invalid_argument("frequency matrix must be square and nonempty");
  const Eigen::MatrixXcd z = dynamic_matrix(omega, freq_matrix, gamma);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(z);
  if (!lu.isInvertible())
    throw std::domain_error("propagator is singular at omega = " + std::to_string(omega));
  return lu.inverse();
}

Eigen::MatrixXcd fourier_propagator(double omega, const ChainModel& model) {
  return fourier_propagator(omega, build_frequency_matrix(model), model.gamma);
}

PropagatorSample sample_propagator(double omega, const Eigen::MatrixXd& freq_matrix, double gamma) {
  PropagatorSample s;
  s.omega = omega;
  s.matrix = fourier_propagator(omega, freq_matrix, gamma);
  const Eigen::MatrixXcd z = dynamic_matrix(omega, freq_matrix, gamma);
  const Eigen::MatrixXcd res =
      z * s.matrix - Eigen::MatrixXcd::Identity(z.rows(), z.cols());
  const Eigen::MatrixXd scale = z.cwiseAbs() * s.matrix.cwiseAbs();
  s.identity_residual = res.cwiseAbs().maxCoeff() / std::max(scale.maxCoeff(), 1e-300);
  return s;
}

NormalModes normal_modes(const ChainModel& model) {
  model.validate();
  NormalModes m;
  if (model.n_sites == 2) {
    const double w2 = model.omega_r * model.omega_r;
    const double h = std::sqrt(0.5);
    m.omega2.resize(2);
    m.omega2 << w2, w2 + 2.0 * model.lambda2;
    m.vectors.resize(2, 2);
    m.vectors << h, h, h, -h;
    return m;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_frequency_matrix(model));
  m.omega2 = es.eigenvalues();
  m.vectors = es.eigenvectors();
  return m;
}

std::vector<double> resonance_frequencies(const ChainModel& model) {
  const NormalModes m = normal_modes(model);
  std::vector<double> w;
  for (int i = 0; i < m.omega2.size(); ++i) w.push_back(std::sqrt(std::max(m.omega2[i], 0.0)));
  std::sort(w.begin(), w.end());
  return w;
}

ModalPropagator::ModalPropagator(const ChainModel& model)
    : modes_(normal_modes(model)), gamma_(model.gamma) {}

void ModalPropagator::evaluate(double omega, Eigen::MatrixXcd& out) const {
  const int n = sites();
  const cdouble shift(-omega * omega, 2.0 * gamma_ * omega);
  // one propagator is shared by the quadrature workers, so the buffer is per thread
  thread_local Eigen::VectorXcd inverse;
  inverse.resize(n);
  for (int k = 0; k < n; ++k) inverse[k] = 1.0 / (modes_.omega2[k] + shift);
  out.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      cdouble s = 0.0;
      for (int k = 0; k < n; ++k) s += modes_.vectors(i, k) * modes_.vectors(j, k) * inverse[k];
      out(i, j) = s;
      out(j, i) = s;
    }
  }
}

Eigen::MatrixXcd ModalPropagator::operator()(double omega) const {
  Eigen::MatrixXcd out;
  evaluate(omega, out);
  return out;
}

ModeFunctions mode_functions(double t, double w2, double gamma) {
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  const double a = w2 - gamma * gamma;
  const double env = std::exp(-gamma * t);
  double s_over, c;  // sin(wt)/w and cos(wt) with w = sqrt(a), analytic in a
  if (std::abs(a) * t * t < 1e-3) {
    const double x = a * t * t;
    s_over = t * (1.0 - x / 6.0 + x * x / 120.0 - x * x * x / 5040.0);
    c = 1.0 - x / 2.0 + x * x / 24.0 - x * x * x / 720.0;
    s_over *= env;
    c *= env;
  } else {
    // e^{s+ t}, e^{s- t} with s = -gamma +/- i sqrt(a); avoids overflow of sinh when a < 0
    const cdouble iw = cdouble(0.0, 1.0) * std::sqrt(cdouble(a, 0.0));
    const cdouble ep = std::exp((-gamma + iw) * t);
    const cdouble em = std::exp((-gamma - iw) * t);
    s_over = ((ep - em) / (2.0 * iw)).real();
    c = (0.5 * (ep + em)).real();
  }
  ModeFunctions f;
  f.d2 = s_over;
  f.d2_dot = c - gamma * s_over;
  f.d1 = c + gamma * s_over;
  f.d1_dot = -w2 * s_over;
  return f;
}

TimeDomainSolutions time_domain_solutions(double t, const NormalModes& modes, double gamma) {
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  const int n = static_cast<int>(modes.omega2.size());
  Eigen::VectorXd f1(n), f2(n), f1d(n), f2d(n);
  for (int k = 0; k < n; ++k) {
    const ModeFunctions m = mode_functions(t, modes.omega2[k], gamma);
    f1[k] = m.d1;
    f2[k] = m.d2;
    f1d[k] = m.d1_dot;
    f2d[k] = m.d2_dot;
  }
  const Eigen::MatrixXd& v = modes.vectors;
  TimeDomainSolutions s;
  s.d1 = v * f1.asDiagonal() * v.transpose();
  s.d2 = v * f2.asDiagonal() * v.transpose();
  s.d1_dot = v * f1d.asDiagonal() * v.transpose();
  s.d2_dot = v * f2d.asDiagonal() * v.transpose();
  return s;
}

TimeDomainSolutions time_domain_solutions(double t, const ChainModel& model) {
  return time_domain_solutions(t, normal_modes(model), model.gamma);
}

PoleSet poles(const ChainModel& model) {
  PoleSet ps;
  ps.modes = normal_modes(model);
  const double g = model.gamma;
  for (int k = 0; k < ps.modes.omega2.size(); ++k) {
    const cdouble root = std::sqrt(cdouble(g * g - ps.modes.omega2[k], 0.0));
    ps.poles.push_back(-g + root);
    ps.poles.push_back(-g - root);
  }
  return ps;
}

Eigen::MatrixXd d2_from_poles(double t, const PoleSet& ps) {
  const int n = static_cast<int>(ps.modes.omega2.size());
  Eigen::VectorXd f(n);
  for (int k = 0; k < n; ++k) {
    const cdouble sp = ps.poles[2 * k];
    const cdouble sm = ps.poles[2 * k + 1];
    const cdouble gap = sp - sm;
    // residues of 1/((s - sp)(s - sm)); coalescing poles give t e^{s t}
    const cdouble v = std::abs(gap * t) < 1e-8 ? t * std::exp(sp * t)
                                               : (std::exp(sp * t) - std::exp(sm * t)) / gap;
    f[k] = v.real();
  }
  return ps.modes.vectors * f.asDiagonal() * ps.modes.vectors.transpose();
}

double PropagatorIdentityResiduals::max() const {
  return std::max({symmetry, mirror, resolvent, conjugation});
}

PropagatorIdentityResiduals propagator_identity_residuals(const Eigen::MatrixXd& freq_matrix,
                                                          double gamma,
                                                          const std::vector<double>& omega_grid) {
  if (omega_grid.empty()) throw std::invalid_argument("omega grid is empty");
  const int n = static_cast<int>(freq_matrix.rows());
  PropagatorIdentityResiduals r;
  for (double w : omega_grid) {
    const PropagatorSample s = sample_propagator(w, freq_matrix, gamma);
    const Eigen::MatrixXcd& d = s.matrix;
    const Eigen::MatrixXcd dm = fourier_propagator(-w, freq_matrix, gamma);
    const double scale = std::max(max_abs(d), 1e-300);
    double sym = 0.0, mir = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        sym = std::max(sym, std::abs(d(i, j) - d(j, i)));
        mir = std::max(mir, std::abs(d(i, j) - d(n - 1 - i, n - 1 - j)));
      }
    r.symmetry = std::max(r.symmetry, sym / scale);
    r.mirror = std::max(r.mirror, mir / scale);
    r.resolvent = std::max(r.resolvent, s.identity_residual);
    r.conjugation = std::max(r.conjugation, max_abs(dm - d.conjugate()) / scale);
  }
  return r;
}

PropagatorIdentityResiduals propagator_identity_residuals(const ChainModel& model,
                                                          const std::vector<double>& omega_grid) {
  return propagator_identity_residuals(build_frequency_matrix(model), model.gamma, omega_grid);
}

}  // namespace ness

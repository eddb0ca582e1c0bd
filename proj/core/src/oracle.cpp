#include "ness/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <mutex>
#include <stdexcept>

#include <memory>

#include <fftw3.h>

#include "ness/propagators.hpp"
#include "ness/quadrature.hpp"

namespace ness {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int next_pow2(double x) {
  int p = 1;
  while (p < x) p *= 2;
  return p;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : ptr(fftw_alloc_real(n)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* ptr;
};

struct FftwComplexBuffer {
  explicit FftwComplexBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwComplexBuffer() { fftw_free(ptr); }
  FftwComplexBuffer(const FftwComplexBuffer&) = delete;
  FftwComplexBuffer& operator=(const FftwComplexBuffer&) = delete;
  fftw_complex* ptr;
};

class Plan {
 public:
  explicit Plan(fftw_plan p) : p_(p) {
    if (!p_) throw std::runtime_error("FFTW planning failed");
  }
  ~Plan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(p_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  fftw_plan get() const { return p_; }

 private:
  fftw_plan p_;
};

// Slowest decay rate among the chain's poles.
double slowest_decay(const ChainModel& model) {
  double rate = model.gamma;
  for (const auto& s : poles(model).poles) rate = std::min(rate, -s.real());
  return rate;
}

// Linear convolution H_i = sum_j x_j g(i - j), i in [0, m), with g even or odd.
class Convolver {
 public:
  Convolver(int m) : m_(m), len_(next_pow2(2.0 * m)), real_(len_), spec_(len_ / 2 + 1),
                     kernel_(len_ / 2 + 1) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(len_, real_.ptr, spec_.ptr, FFTW_ESTIMATE));
    bwd_ = std::make_unique<Plan>(fftw_plan_dft_c2r_1d(len_, spec_.ptr, real_.ptr, FFTW_ESTIMATE));
  }

  // g[d] for d in [0, m); negative lags use g(-d) = parity * g(d)
  void set_kernel(const std::vector<double>& g, double parity) {
    std::fill(real_.ptr, real_.ptr + len_, 0.0);
    for (int d = 0; d < m_; ++d) real_.ptr[d] = g[d];
    for (int d = 1; d < m_; ++d) real_.ptr[len_ - d] = parity * g[d];
    fftw_execute(fwd_->get());
    for (int i = 0; i < len_ / 2 + 1; ++i)
      kernel_[i] = {spec_.ptr[i][0] / len_, spec_.ptr[i][1] / len_};
  }

  void apply(const std::vector<double>& x, std::vector<double>& out) {
    std::fill(real_.ptr, real_.ptr + len_, 0.0);
    std::copy(x.begin(), x.end(), real_.ptr);
    fftw_execute(fwd_->get());
    for (int i = 0; i < len_ / 2 + 1; ++i) {
      const std::complex<double> z(spec_.ptr[i][0], spec_.ptr[i][1]);
      const std::complex<double> p = z * kernel_[i];
      spec_.ptr[i][0] = p.real();
      spec_.ptr[i][1] = p.imag();
    }
    fftw_execute(bwd_->get());
    out.assign(real_.ptr, real_.ptr + m_);
  }

 private:
  int m_, len_;
  FftwBuffer real_;
  FftwComplexBuffer spec_;
  std::vector<std::complex<double>> kernel_;
  std::unique_ptr<Plan> fwd_, bwd_;
};

}  // namespace

void TimeDomainConfig::validate() const {
  if (!(t_max_gamma >= 15.0)) throw std::invalid_argument("t_max must be at least 15 decay times");
  if (oversample < 1 || (oversample & (oversample - 1)) != 0)
    throw std::invalid_argument("oversample must be a power of two");
  if (!(period_gamma >= 2.0 * t_max_gamma))
    throw std::invalid_argument("kernel period must cover twice the horizon");
  if (n_fourier < 0) throw std::invalid_argument("n_fourier must be nonnegative");
}

NoiseKernelGrid noise_kernel_time_grid(const BathSet& baths, int reach_index, int oversample,
                                       int count) {
  baths.validate();
  if (reach_index < 2 || oversample < 1) throw std::invalid_argument("bad frequency grid");
  const int steps = reach_index * oversample;  // K - 1
  const int k = steps + 1;
  if (count < 1 || count > k) throw std::invalid_argument("sample count out of range");
  const double reach = integration_limit(baths);
  const double dw = reach / reach_index;

  NoiseKernelGrid grid;
  grid.ds = kPi / (steps * dw);

  FftwBuffer in(k), out(k), sin_in(std::max(k - 2, 1)), sin_out(std::max(k - 2, 1));
  std::unique_ptr<Plan> cos_plan, sin_plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    cos_plan = std::make_unique<Plan>(fftw_plan_r2r_1d(k, in.ptr, out.ptr, FFTW_REDFT00, FFTW_ESTIMATE));
    sin_plan = std::make_unique<Plan>(
        fftw_plan_r2r_1d(k - 2, sin_in.ptr, sin_out.ptr, FFTW_RODFT00, FFTW_ESTIMATE));
  }

  for (double beta : baths.betas) {
    std::fill(in.ptr, in.ptr + k, 0.0);
    for (int i = 0; i <= reach_index; ++i) in.ptr[i] = noise_kernel(i * dw, beta, baths);
    // trapezoid half weight where the hard window drops to zero
    if (baths.cutoff_kind == CutoffKind::Hard) in.ptr[reach_index] *= 0.5;
    for (int i = 1; i < k - 1; ++i) sin_in.ptr[i - 1] = i * dw * in.ptr[i];

    fftw_execute(cos_plan->get());
    fftw_execute(sin_plan->get());

    std::vector<double> g(count), gd(count, 0.0);
    for (int j = 0; j < count; ++j) g[j] = dw / kPi * 0.5 * out.ptr[j];
    for (int j = 1; j < count; ++j) gd[j] = -dw / kPi * 0.5 * sin_out.ptr[j - 1];
    grid.values.push_back(std::move(g));
    grid.derivative.push_back(std::move(gd));
  }

  const double settle = 20.0 * kPi / baths.cutoff;
  for (const auto& g : grid.values) {
    double late = 0.0;
    for (int j = 0; j < count; ++j)
      if (j * grid.ds >= settle) late = std::max(late, std::abs(g[j]));
    if (g[0] != 0.0) grid.ringing = std::max(grid.ringing, late / std::abs(g[0]));
  }
  if (grid.ringing > 0.01) {
    char line[160];
    std::snprintf(line, sizeof line, "cutoff ringing in the noise kernel reaches %.2f%% of its peak",
                  100.0 * grid.ringing);
    grid.warnings.emplace_back(line);
  }
  return grid;
}

std::vector<double> noise_kernel_time(double s, const BathSet& baths, const TimeDomainConfig& cfg) {
  (void)cfg;
  baths.validate();
  const double reach = integration_limit(baths);
  QuadratureSpec q;
  q.rel_tol = 1e-10;
  q.abs_tol = 1e-13;
  q.max_subdivisions = 200000;
  if (baths.cutoff < reach) q.split_points = {baths.cutoff};
  std::vector<double> out;
  for (double beta : baths.betas) {
    const auto r = integrate(
        [&](double w) { return std::complex<double>(noise_kernel(w, beta, baths) * std::cos(w * s) / kPi); },
        q, 0.0, reach);
    out.push_back(r.value.real());
  }
  return out;
}

TimeDomainCurrents zeroth_order_time_domain(const ChainModel& model, const BathSet& baths,
                                            const TimeDomainConfig& cfg) {
  model.validate();
  baths.validate();
  cfg.validate();
  const int n = model.n_sites;
  if (baths.size() != n) throw std::invalid_argument("bath count does not match the number of sites");

  TimeDomainCurrents res;
  res.decay_rate = slowest_decay(model);
  res.t_max = cfg.t_max_gamma / res.decay_rate;

  const double reach = integration_limit(baths);
  const double period = cfg.period_gamma / res.decay_rate;
  const int reach_index =
      cfg.n_fourier > 0 ? cfg.n_fourier : next_pow2(reach * period / (2.0 * kPi));
  const double ds = kPi / (cfg.oversample * reach);
  const int m = static_cast<int>(std::floor(res.t_max / ds)) + 1;
  res.dt = ds;

  const NoiseKernelGrid grid = noise_kernel_time_grid(baths, reach_index, cfg.oversample, m);
  res.warnings = grid.warnings;

  // propagator samples, [a][b][j]
  const NormalModes modes = normal_modes(model);
  std::vector<std::vector<std::vector<double>>> d(n, std::vector<std::vector<double>>(n, std::vector<double>(m)));
  auto dd = d;
  for (int j = 0; j < m; ++j) {
    const TimeDomainSolutions sol = time_domain_solutions(j * ds, modes, model.gamma);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        d[a][b][j] = sol.d2(a, b);
        dd[a][b][j] = sol.d2_dot(a, b);
      }
  }

  std::vector<double> w(m, ds);
  w[0] = w[m - 1] = 0.5 * ds;
  const double em = ds * ds / 12.0;  // leading endpoint correction weight
  const double g2 = 2.0 * model.gamma;

  // int_0^T int_0^T y(s) G(s - s') x(s') ds ds' with endpoint corrections at s = 0 and s' = 0
  Convolver conv(m);
  std::vector<double> wx(m), h(m);
  auto double_integral = [&](int k, const std::vector<double>& y, double y0, double y0_dot,
                             const std::vector<double>& x, double x0, double x0_dot) {
    const auto& g = grid.values[k];
    const auto& gd = grid.derivative[k];
    for (int j = 0; j < m; ++j) wx[j] = w[j] * x[j];
    conv.apply(wx, h);
    double h0_dot = 0.0;
    for (int j = 0; j < m; ++j) h0_dot -= wx[j] * gd[j];
    for (int i = 0; i < m; ++i) h[i] += em * (-gd[i] * x0 + g[i] * x0_dot);
    double total = 0.0;
    for (int i = 0; i < m; ++i) total += w[i] * y[i] * h[i];
    return total + em * (y0_dot * h[0] + y0 * h0_dot);
  };

  ZerothOrderCurrents& z = res.currents;
  z.n = n;
  z.cutoff = baths.cutoff;
  z.p_xi.assign(n, 0.0);
  z.p_gamma.assign(n, 0.0);
  z.p_inter = Eigen::MatrixXd::Zero(n, n);

  for (int i = 0; i < n; ++i) {
    const auto& g = grid.values[i];
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += w[j] * dd[i][i][j] * g[j];
    z.p_xi[i] = s + em * (-g2 * g[0]);
  }

  std::vector<double> diff(m);
  for (int k = 0; k < n; ++k) {
    conv.set_kernel(grid.values[k], 1.0);
    for (int i = 0; i < n; ++i) {
      const double y0 = i == k ? 1.0 : 0.0;
      z.p_gamma[i] += -g2 * double_integral(k, dd[i][k], y0, -g2 * y0, dd[i][k], y0, -g2 * y0);
      for (auto [a, b] : chain_bonds(n)) {
        for (auto [p, q] : {std::array<int, 2>{a, b}, std::array<int, 2>{b, a}}) {
          if (p != i) continue;
          for (int j = 0; j < m; ++j) diff[j] = d[p][k][j] - d[q][k][j];
          const double x0_dot = (p == k ? 1.0 : 0.0) - (q == k ? 1.0 : 0.0);
          z.p_inter(p, q) += -model.lambda2 * double_integral(k, dd[i][k], y0, -g2 * y0, diff, 0.0, x0_dot);
        }
      }
    }
  }

  z.balance_residual.resize(n);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    z.balance_residual[i] = std::abs(z.p_xi[i] + z.p_gamma[i] + z.p_inter.row(i).sum());
    scale = std::max({scale, std::abs(z.p_xi[i]), std::abs(z.p_gamma[i])});
  }
  const double x = res.decay_rate * res.t_max;
  res.tail_bound = 10.0 * std::exp(-x) * (1.0 + x) * scale;
  return res;
}

}  // namespace ness

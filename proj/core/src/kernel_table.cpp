#include "ness/kernel_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "ness/propagators.hpp"
#include "ness/thread_pool.hpp"

namespace ness {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Frame {
  Eigen::MatrixXcd d;     // D(w)
  Eigen::VectorXd g;      // G(w) diagonal
  Eigen::MatrixXcd m;     // D(w) G D(-w)
  Eigen::MatrixXcd mbar;  // D(-w) G D(w) = conj(m)
};

void fill_frame(const ModalPropagator& prop, const BathSet& baths, double w, Frame& f) {
  prop.evaluate(w, f.d);
  f.g = noise_kernel_diagonal(w, baths);
  f.m = f.d * f.g.asDiagonal() * f.d.conjugate();
  f.mbar = f.m.conjugate();
}

enum class Family { C, L, A, B, U };

struct Block {
  Family family;
  int index;  // leading site index for A, B, U
};

}  // namespace

Eigen::MatrixXd KernelTable::correlation() const {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = C(i, j).real();
  return m;
}

double KernelTable::max_relative_imag() const {
  double worst = 0.0;
  for (const auto* fam : {&c, &a, &b, &u, &l}) {
    double re = 0.0, im = 0.0;
    for (const auto& z : *fam) {
      re = std::max(re, std::abs(z.real()));
      im = std::max(im, std::abs(z.imag()));
    }
    if (re > 0.0) worst = std::max(worst, im / re);
  }
  return worst;
}

double default_cutoff(const ChainModel& model) {
  const std::vector<double> w = resonance_frequencies(model);
  return 50.0 * w.back();
}

std::vector<double> default_split_points(const ChainModel& model, const BathSet& baths) {
  const double lim = integration_limit(baths);
  std::vector<double> pts{0.0};
  for (double w : resonance_frequencies(model)) {
    for (double p : {w, w - 5.0 * model.gamma, w + 5.0 * model.gamma}) {
      if (p > 0.0 && p < lim) {
        pts.push_back(p);
        pts.push_back(-p);
      }
    }
  }
  if (baths.cutoff < lim) {
    pts.push_back(baths.cutoff);
    pts.push_back(-baths.cutoff);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

QuadratureSpec default_quadrature(const ChainModel& model, const BathSet& baths) {
  QuadratureSpec q;
  q.split_points = default_split_points(model, baths);
  return q;
}

KernelTable build_kernel_table(const ChainModel& model, const BathSet& baths,
                               const QuadratureSpec& spec, std::size_t threads) {
  model.validate();
  baths.validate();
  if (baths.size() != model.n_sites)
    throw std::invalid_argument("bath count does not match the number of sites");

  const int n = model.n_sites;
  const std::size_t n2 = static_cast<std::size_t>(n) * n;
  const std::size_t n3 = n2 * n;

  KernelTable t;
  t.n = n;
  t.cutoff = baths.cutoff;
  t.cutoff_kind = baths.cutoff_kind;
  t.c.assign(n2, 0.0);
  t.l.assign(n2, 0.0);
  t.a.assign(n3, 0.0);
  t.b.assign(n3, 0.0);
  t.u.assign(n3 * n, 0.0);
  t.c_err.assign(n2, 0.0);
  t.l_err.assign(n2, 0.0);
  t.a_err.assign(n3, 0.0);
  t.b_err.assign(n3, 0.0);
  t.u_err.assign(n3 * n, 0.0);

  std::vector<Block> blocks{{Family::C, 0}, {Family::L, 0}};
  for (int i = 0; i < n; ++i) {
    blocks.push_back({Family::A, i});
    blocks.push_back({Family::B, i});
    blocks.push_back({Family::U, i});
  }

  const ModalPropagator prop(model);
  const double lim = integration_limit(baths);
  const cdouble I(0.0, 1.0);
  std::vector<VectorQuadratureResult> results(blocks.size());

  parallel_for(
      blocks.size(),
      [&](std::size_t bi) {
        const Block blk = blocks[bi];
        const int r0 = blk.index;
        Frame fr;
        VectorIntegrand f;
        int dim = 0;
        switch (blk.family) {
          case Family::C:
            dim = static_cast<int>(n2);
            f = [&](double w, Eigen::Ref<Eigen::VectorXcd> out) {
              fill_frame(prop, baths, w, fr);
              for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) out[i * n + j] = fr.m(i, j) / kTwoPi;
            };
            break;
          case Family::L:
            dim = static_cast<int>(n2);
            f = [&](double w, Eigen::Ref<Eigen::VectorXcd> out) {
              fill_frame(prop, baths, w, fr);
              const cdouble iw = I * w / kTwoPi;
              for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) out[i * n + k] = iw * fr.m(i, k);
            };
            break;
          case Family::A:
            dim = static_cast<int>(n2);
            f = [&, r0](double w, Eigen::Ref<Eigen::VectorXcd> out) {
              fill_frame(prop, baths, w, fr);
              const cdouble iw = I * w / kTwoPi;
              for (int r = 0; r < n; ++r)
                for (int k = 0; k < n; ++k)
                  out[r * n + k] = iw * fr.d(r0, r) * fr.g[r0] * fr.d(r0, k);
            };
            break;
          case Family::B:
            dim = static_cast<int>(n2);
            f = [&, r0](double w, Eigen::Ref<Eigen::VectorXcd> out) {
              fill_frame(prop, baths, w, fr);
              const double w2 = w * w / kTwoPi;
              for (int r = 0; r < n; ++r)
                for (int k = 0; k < n; ++k) out[r * n + k] = w2 * fr.d(r0, r) * fr.mbar(r0, k);
            };
            break;
          case Family::U:
            dim = static_cast<int>(n3);
            f = [&, r0](double w, Eigen::Ref<Eigen::VectorXcd> out) {
              fill_frame(prop, baths, w, fr);
              const cdouble iw = I * w / kTwoPi;
              for (int r = 0; r < n; ++r)
                for (int j = 0; j < n; ++j)
                  for (int k = 0; k < n; ++k)
                    out[(r * n + j) * n + k] = iw * fr.d(r0, r) * fr.mbar(j, k);
            };
            break;
        }
        results[bi] = integrate_vector(f, dim, spec, -lim, lim);
      },
      threads);

  static const char* names[] = {"C", "L", "A", "B", "U"};
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    const Block blk = blocks[bi];
    const VectorQuadratureResult& r = results[bi];
    t.evaluations += r.evaluations;
    std::vector<std::complex<double>>* vals = nullptr;
    std::vector<double>* errs = nullptr;
    std::size_t offset = 0;
    switch (blk.family) {
      case Family::C: vals = &t.c; errs = &t.c_err; break;
      case Family::L: vals = &t.l; errs = &t.l_err; break;
      case Family::A: vals = &t.a; errs = &t.a_err; offset = blk.index * n2; break;
      case Family::B: vals = &t.b; errs = &t.b_err; offset = blk.index * n2; break;
      case Family::U: vals = &t.u; errs = &t.u_err; offset = blk.index * n3; break;
    }
    for (Eigen::Index i = 0; i < r.value.size(); ++i) {
      (*vals)[offset + i] = r.value[i];
      (*errs)[offset + i] = r.error[i];
    }
    if (!r.converged) {
      char line[160];
      std::snprintf(line, sizeof line, "%s[%d,...] did not converge: error %.3e after %d panels",
                    names[static_cast<int>(blk.family)], blk.index, r.error.maxCoeff(), r.intervals);
      t.failures.emplace_back(line);
    }
  }
  return t;
}

}  // namespace ness

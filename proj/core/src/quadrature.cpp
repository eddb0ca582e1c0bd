#include "ness/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace ness {

namespace {

// Kronrod abscissae (descending, last is the centre) and weights; Gauss weights for the
// odd-indexed abscissae.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  Eigen::VectorXcd value;
  Eigen::VectorXd error;
  Eigen::VectorXd absval;
  double worst;
};

struct PanelOrder {
  bool operator()(const Panel* x, const Panel* y) const { return x->worst < y->worst; }
};

class Rule {
 public:
  Rule(const VectorIntegrand& f, int dim) : f_(f), dim_(dim), buf_(dim), kron_(dim), gauss_(dim) {}

  void apply(Panel& p) {
    const double c = 0.5 * (p.a + p.b);
    const double h = 0.5 * (p.b - p.a);
    kron_.setZero();
    gauss_.setZero();
    p.absval.setZero(dim_);

    f_(c, buf_);
    kron_ += kWgk[7] * buf_;
    gauss_ += kWg[3] * buf_;
    p.absval += kWgk[7] * buf_.cwiseAbs();
    for (int j = 0; j < 7; ++j) {
      const double dx = h * kXgk[j];
      for (double x : {c - dx, c + dx}) {
        f_(x, buf_);
        kron_ += kWgk[j] * buf_;
        p.absval += kWgk[j] * buf_.cwiseAbs();
        if (j % 2 == 1) gauss_ += kWg[j / 2] * buf_;
      }
    }
    evaluations += 15;
    p.value = h * kron_;
    p.error = (h * (kron_ - gauss_)).cwiseAbs();
    p.absval *= std::abs(h);
    p.worst = p.error.maxCoeff();
  }

  int evaluations = 0;

 private:
  const VectorIntegrand& f_;
  int dim_;
  Eigen::VectorXcd buf_, kron_, gauss_;
};

}  // namespace

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
  if (!(abs_tol >= 0.0)) throw std::invalid_argument("abs_tol must be nonnegative");
  if (max_subdivisions < 1) throw std::invalid_argument("max_subdivisions must be positive");
  if (!std::is_sorted(split_points.begin(), split_points.end()))
    throw std::invalid_argument("split points must be sorted");
}

VectorQuadratureResult integrate_vector(const VectorIntegrand& f, int dim, const QuadratureSpec& spec,
                                        double a, double b) {
  spec.validate();
  if (dim < 1) throw std::invalid_argument("integrand dimension must be positive");
  VectorQuadratureResult out;
  out.value = Eigen::VectorXcd::Zero(dim);
  out.error = Eigen::VectorXd::Zero(dim);
  if (!(b > a)) {
    out.converged = (a == b);
    return out;
  }

  std::vector<double> edges{a};
  for (double s : spec.split_points)
    if (s > a && s < b && s > edges.back()) edges.push_back(s);
  edges.push_back(b);

  Rule rule(f, dim);
  std::vector<Panel> storage;
  storage.reserve(edges.size() - 1 + 2 * static_cast<std::size_t>(spec.max_subdivisions));
  std::priority_queue<Panel*, std::vector<Panel*>, PanelOrder> queue;

  Eigen::VectorXcd total = Eigen::VectorXcd::Zero(dim);
  Eigen::VectorXd err = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd absval = Eigen::VectorXd::Zero(dim);

  auto push = [&](double lo, double hi) {
    storage.push_back(Panel{lo, hi, {}, {}, {}, 0.0});
    Panel& p = storage.back();
    rule.apply(p);
    total += p.value;
    err += p.error;
    absval += p.absval;
    queue.push(&p);
  };
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) push(edges[i], edges[i + 1]);

  const double eps = std::numeric_limits<double>::epsilon();
  auto tolerance = [&] {
    return std::max({spec.abs_tol, spec.rel_tol * total.cwiseAbs().maxCoeff(),
                     100.0 * eps * absval.maxCoeff()});
  };

  int splits = 0;
  bool converged = err.maxCoeff() <= tolerance();
  while (!converged && splits < spec.max_subdivisions) {
    Panel* worst = queue.top();
    const double mid = 0.5 * (worst->a + worst->b);
    if (!(mid > worst->a && mid < worst->b)) break;  // panel at floating-point resolution
    queue.pop();
    total -= worst->value;
    err -= worst->error;
    absval -= worst->absval;
    const double lo = worst->a, hi = worst->b;
    push(lo, mid);
    push(mid, hi);
    ++splits;
    if (splits % 64 == 0) {
      // resum to shed drift from the running updates
      total.setZero();
      err.setZero();
      absval.setZero();
      auto copy = queue;
      while (!copy.empty()) {
        total += copy.top()->value;
        err += copy.top()->error;
        absval += copy.top()->absval;
        copy.pop();
      }
    }
    converged = err.maxCoeff() <= tolerance();
  }

  out.value.setZero();
  out.error.setZero();
  absval.setZero();
  out.intervals = 0;
  while (!queue.empty()) {
    out.value += queue.top()->value;
    out.error += queue.top()->error;
    absval += queue.top()->absval;
    ++out.intervals;
    queue.pop();
  }
  total = out.value;
  out.converged = out.error.maxCoeff() <= tolerance();
  out.evaluations = rule.evaluations;
  return out;
}

QuadratureResult integrate(const std::function<std::complex<double>(double)>& f,
                           const QuadratureSpec& spec, double a, double b) {
  const VectorIntegrand vf = [&f](double x, Eigen::Ref<Eigen::VectorXcd> out) { out[0] = f(x); };
  const VectorQuadratureResult v = integrate_vector(vf, 1, spec, a, b);
  QuadratureResult r;
  r.value = v.value[0];
  r.error = v.error[0];
  r.converged = v.converged;
  r.evaluations = v.evaluations;
  r.intervals = v.intervals;
  return r;
}

}  // namespace ness

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ness/currents.hpp"
#include "ness/kernel_table.hpp"
#include "support/oracles.hpp"

namespace ness {
namespace {

BathSet baths_for(const ChainModel& m, std::vector<double> temps, double factor = 50.0,
                  CutoffKind kind = CutoffKind::Hard) {
  const double top = std::sqrt(build_frequency_matrix(m).eigenvalues().real().maxCoeff());
  return BathSet::from_temperatures(temps, factor * top, kind);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

TEST(Currents, ZerothOrderBalanceAndAntisymmetry) {
  const ChainModel m{2, 10.0, 10.0, 1.0};
  const BathSet b = baths_for(m, {100.0, 0.002});
  const QuadratureSpec spec = default_quadrature(m, b);
  const KernelTable t = build_kernel_table(m, b, spec);
  const ZerothOrderCurrents z = zeroth_order(m, b, t, spec);
  EXPECT_TRUE(z.failures.empty());
  EXPECT_NEAR(z.p_inter(0, 1), -z.p_inter(1, 0), 1e-12 * std::abs(z.p_inter(0, 1)));
  EXPECT_GT(z.p_inter(1, 0), 0.0);  // heat flows into the cold site
  for (double r : z.balance_residual) EXPECT_LT(r, 1e-6 * std::abs(z.p_inter(1, 0)));
  EXPECT_LT(z.table_consistency, 1e-8);
  EXPECT_NEAR(z.p_inter(1, 0), 8.784510776, 1e-8);
}

TEST(Currents, EqualTemperaturesCarryNoFlow) {
  const ChainModel m{3, 1.0, 2.0, 0.5};
  const BathSet b = baths_for(m, {3.0, 3.0, 3.0});
  const QuadratureSpec spec = default_quadrature(m, b);
  const ZerothOrderCurrents z = zeroth_order(m, b, build_kernel_table(m, b, spec), spec);
  EXPECT_LT(z.p_inter.cwiseAbs().maxCoeff(), 1e-10 * std::abs(z.p_xi[0]));
}

TEST(Currents, PointwiseBalanceHoldsForLongChains) {
  for (int n : {2, 3, 6}) {
    const ChainModel m{n, 1.5, 2.5, 0.3};
    const BathSet b = baths_for(m, std::vector<double>(n, 1.0));
    for (double w : {-20.0, -1.2, 0.01, 1.6, 2.4, 90.0})
      EXPECT_LT(balance_integrand_residual(m, b, w).max_relative(), 1e-12) << "n=" << n;
  }
}

TEST(Currents, CrossResponseIdentities) {
  const ChainModel m{2, 10.0, 10.0, 1.0};
  const BathSet b = baths_for(m, {100.0, 0.002});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0 * b.cutoff, 3.0 * b.cutoff);
  for (int i = 0; i < 100; ++i) EXPECT_LT(cross_response_residuals(m, b, u(rng)).max(), 1e-12);
  EXPECT_THROW(cross_response_residuals({3, 1.0, 1.0, 1.0}, b, 1.0), std::invalid_argument);
}

TEST(Currents, Symmetrize3) {
  Eigen::MatrixXd c(2, 2);
  c << 1.0, 2.0, 2.0, 5.0;
  auto f = [](int k) { return k + 1.0; };
  // f(0) c(1,1) + f(1) c(0,1) + f(1) c(0,1)
  EXPECT_DOUBLE_EQ(symmetrize3(f, c, 0, 1, 1), 1.0 * 5.0 + 2.0 * 2.0 + 2.0 * 2.0);
}

class FirstOrder : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    baths_ = baths_for(model_, {100.0, 0.002});
    spec_ = default_quadrature(model_, baths_);
    table_ = new KernelTable(build_kernel_table(model_, baths_, spec_));
    tensors_ = new FirstOrderTensors(first_order_tensors(*table_));
  }
  static void TearDownTestSuite() {
    delete table_;
    delete tensors_;
  }
  static inline ChainModel model_{2, 10.0, 10.0, 1.0};
  static inline BathSet baths_;
  static inline QuadratureSpec spec_;
  static inline KernelTable* table_ = nullptr;
  static inline FirstOrderTensors* tensors_ = nullptr;
};

TEST_F(FirstOrder, BalanceHoldsForQuarticCouplings) {
  for (auto kind : {NonlinearityKind::KleinGordon, NonlinearityKind::BetaFput}) {
    const CurrentReport rep = ness_report(model_, baths_, {kind, 0.01}, spec_, *table_, *tensors_);
    ASSERT_TRUE(rep.converged());
    const double p0 = std::abs(rep.zeroth.p_inter(1, 0));
    for (double r : rep.balance_residual_first) EXPECT_LT(r, 1e-5 * p0) << to_string(kind);
  }
}

TEST_F(FirstOrder, AlphaReturnsTheAnalyticZero) {
  const CurrentReport rep =
      ness_report(model_, baths_, {NonlinearityKind::AlphaFput, 0.3}, spec_, *table_, *tensors_);
  EXPECT_TRUE(rep.first.analytic_zero);
  for (double x : rep.first.p_xi) EXPECT_EQ(x, 0.0);
  for (double x : rep.first.p_gamma) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(rep.first.p_inter2.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(rep.first.p_inter4.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(rep.ratio, 0.0);
}

TEST_F(FirstOrder, KleinGordonHasNoQuarticBondFlow) {
  const CurrentReport rep =
      ness_report(model_, baths_, {NonlinearityKind::KleinGordon, 0.01}, spec_, *table_, *tensors_);
  EXPECT_EQ(rep.first.p_inter4.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(rep.ratio_site, 1);
  EXPECT_EQ(rep.ratio_source, 0);
  const double p1 = rep.first.p_inter2(1, 0);
  EXPECT_NEAR(rep.ratio, p1 / rep.zeroth.p_inter(1, 0), 1e-15);
}

TEST_F(FirstOrder, CurrentsAreLinearInStrength) {
  const CurrentReport a =
      ness_report(model_, baths_, {NonlinearityKind::BetaFput, 0.01}, spec_, *table_, *tensors_);
  const CurrentReport b =
      ness_report(model_, baths_, {NonlinearityKind::BetaFput, 0.03}, spec_, *table_, *tensors_);
  EXPECT_NEAR(b.first.p_xi[0], 3.0 * a.first.p_xi[0], 1e-12 * std::abs(b.first.p_xi[0]));
  EXPECT_NEAR(b.ratio, 3.0 * a.ratio, 1e-12 * std::abs(b.ratio));
}

TEST_F(FirstOrder, TensorsCancelAndVanishWhereExpected) {
  double lam_norm = 0.0, lam_diag = 0.0;
  for (double x : tensors_->lambda.data()) lam_norm = std::max(lam_norm, std::abs(x));
  for (int n = 0; n < 2; ++n) lam_diag = std::max(lam_diag, std::abs(tensors_->lambda(n, n, n, n)));
  EXPECT_LT(lam_diag, 1e-8 * lam_norm);
  EXPECT_LT(tensors_->max_relative_imag, 1e-10);
}

TEST_F(FirstOrder, GammaTensorMatchesDirectQuadrature) {
  const int n = 1, r = 0, k = 1, l = 0, m = 1;
  const double direct = testing::gamma_tensor_direct(model_, baths_, n, r, k, l, m, 1e-10);
  EXPECT_LT(rel(tensors_->gamma(n, r, k, l, m), direct), 1e-6);
}

TEST(Currents, ThreeSiteFirstOrderBalance) {
  const ChainModel m{3, 2.0, 3.0, 0.5};
  const BathSet b = baths_for(m, {4.0, 2.0, 0.5});
  const QuadratureSpec spec = default_quadrature(m, b);
  for (auto kind : {NonlinearityKind::KleinGordon, NonlinearityKind::BetaFput}) {
    const CurrentReport rep = ness_report(m, b, {kind, 0.02}, spec);
    ASSERT_TRUE(rep.converged());
    EXPECT_EQ(rep.ratio_site, 2);
    EXPECT_EQ(rep.ratio_source, 1);
    const double p0 = rep.zeroth.p_inter.cwiseAbs().maxCoeff();
    for (double r : rep.balance_residual_first) EXPECT_LT(r, 1e-5 * p0) << to_string(kind);
    for (double r : rep.zeroth.balance_residual) EXPECT_LT(r, 1e-6 * p0);
  }
}

// White noise 2T with a wide cutoff reproduces the classical Lyapunov moments.
class ClassicalLimit : public ::testing::TestWithParam<int> {};

TEST_P(ClassicalLimit, MatchesMomentClosure) {
  const int n = GetParam();
  const ChainModel m{n, 1.0, 1.2, 0.4};
  std::vector<double> temps;
  for (int i = 0; i < n; ++i) temps.push_back(5.0 - 4.0 * i / (n - 1));
  BathSet b = baths_for(m, temps, 4000.0);
  b.spectrum = NoiseSpectrum::Classical;
  QuadratureSpec spec = default_quadrature(m, b);
  spec.rel_tol = 1e-10;

  for (auto kind : {NonlinearityKind::KleinGordon, NonlinearityKind::BetaFput}) {
    const NonlinearitySpec nl{kind, 0.05};
    const CurrentReport rep = ness_report(m, b, nl, spec);
    ASSERT_TRUE(rep.converged());
    const testing::MomentClosure mc = testing::classical_moment_closure(m, temps, nl);
    for (auto [i, v] : chain_bonds(n)) {
      EXPECT_LT(rel(rep.zeroth.p_inter(v, i), mc.p_inter0(v, i)), 1e-7);
      EXPECT_LT(rel(rep.first.p_inter2(v, i), mc.p_inter2(v, i)), 1e-5) << to_string(kind);
      if (kind == NonlinearityKind::BetaFput)
        EXPECT_LT(rel(rep.first.p_inter4(v, i), mc.p_inter4(v, i)), 1e-5);
    }
    for (int i = 0; i < n; ++i) {
      // dissipation carries the cutoff tail, of order T / (cutoff * <v^2>)
      EXPECT_LT(rel(rep.zeroth.p_gamma[i], mc.p_gamma0[i]), 2e-3);
      EXPECT_LT(std::abs(rep.first.p_gamma[i] - mc.p_gamma1[i]),
                1e-3 * std::abs(mc.p_gamma0[i]) * nl.strength);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Sites, ClassicalLimit, ::testing::Values(2, 3));

}  // namespace
}  // namespace ness

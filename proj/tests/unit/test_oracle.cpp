#include <cmath>

#include <gtest/gtest.h>

#include "ness/currents.hpp"
#include "ness/kernel_table.hpp"
#include "ness/oracle.hpp"

namespace ness {
namespace {

TEST(Oracle, ConfigValidation) {
  TimeDomainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.oversample = 3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.t_max_gamma = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Oracle, NoiseKernelGridMatchesQuadrature) {
  for (CutoffKind kind : {CutoffKind::Hard, CutoffKind::Exponential}) {
    const BathSet b = BathSet::from_temperatures({2.0, 0.0}, 30.0, kind);
    const int reach = 4096;
    const NoiseKernelGrid g = noise_kernel_time_grid(b, reach, 4, 64);
    ASSERT_EQ(g.values.size(), 2u);
    ASSERT_EQ(g.values[0].size(), 64u);
    TimeDomainConfig cfg;
    for (int j : {0, 5, 33}) {
      const std::vector<double> ref = noise_kernel_time(j * g.ds, b, cfg);
      for (int k = 0; k < 2; ++k)
        EXPECT_NEAR(g.values[k][j], ref[k], 2e-3 * std::abs(g.values[k][0])) << "j=" << j;
    }
    EXPECT_DOUBLE_EQ(g.derivative[0][0], 0.0);
  }
}

TEST(Oracle, NoiseKernelDerivativeIsConsistent) {
  const BathSet b = BathSet::from_temperatures({1.0}, 20.0, CutoffKind::Exponential);
  const NoiseKernelGrid g = noise_kernel_time_grid(b, 8192, 8, 200);
  for (int j = 10; j < 190; j += 37) {
    const double fd = (g.values[0][j + 1] - g.values[0][j - 1]) / (2.0 * g.ds);
    EXPECT_NEAR(g.derivative[0][j], fd, 1e-3 * std::abs(g.derivative[0][0] + g.values[0][0] / g.ds));
  }
}

struct OracleCase {
  ChainModel model;
  double t_hot, t_cold;
};

class OracleAgreement : public ::testing::TestWithParam<OracleCase> {};

TEST_P(OracleAgreement, TimeDomainMatchesFrequencyDomain) {
  const OracleCase c = GetParam();
  const BathSet b = BathSet::from_temperatures({c.t_hot, c.t_cold}, default_cutoff(c.model));
  const QuadratureSpec spec = default_quadrature(c.model, b);
  const ZerothOrderCurrents fd = zeroth_order(c.model, b, build_kernel_table(c.model, b, spec), spec);
  const TimeDomainCurrents td = zeroth_order_time_domain(c.model, b, {});
  const double p = fd.p_inter(1, 0);
  EXPECT_LT(std::abs(td.currents.p_inter(1, 0) - p), 1e-3 * std::abs(p));
  EXPECT_LT(td.tail_bound, 1e-3 * std::abs(p));
  for (int i = 0; i < 2; ++i) {
    EXPECT_LT(std::abs(td.currents.p_xi[i] - fd.p_xi[i]), 1e-3 * std::abs(fd.p_xi[i]));
    EXPECT_LT(std::abs(td.currents.p_gamma[i] - fd.p_gamma[i]), 1e-3 * std::abs(fd.p_gamma[i]));
  }
}

INSTANTIATE_TEST_SUITE_P(Regimes, OracleAgreement,
                         ::testing::Values(OracleCase{{2, 10.0, 10.0, 1.0}, 100.0, 0.002},
                                           OracleCase{{2, 2.0, 1.0, 1.5}, 10.0, 5.0},
                                           OracleCase{{2, 1.0, 0.5, 3.0}, 4.0, 0.0}));

}  // namespace
}  // namespace ness

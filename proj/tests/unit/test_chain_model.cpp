#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ness/chain_model.hpp"

namespace ness {
namespace {

// Quartic potentials evaluated directly, for comparison with the tensor contractions.
double kg_potential(const Eigen::VectorXd& x, double lam) {
  return 0.25 * lam * x.array().pow(4).sum();
}

double beta_potential(const Eigen::VectorXd& x, double lam) {
  double v = 0.0;
  for (int i = 0; i + 1 < x.size(); ++i) v += 0.25 * lam * std::pow(x[i] - x[i + 1], 4);
  return v;
}

TEST(ChainModel, FrequencyMatrixTwoSites) {
  ChainModel m{2, 10.0, 3.0, 1.0};
  const Eigen::MatrixXd w2 = build_frequency_matrix(m);
  EXPECT_DOUBLE_EQ(w2(0, 0), 103.0);
  EXPECT_DOUBLE_EQ(w2(1, 1), 103.0);
  EXPECT_DOUBLE_EQ(w2(0, 1), -3.0);
  EXPECT_DOUBLE_EQ(w2(1, 0), -3.0);
}

TEST(ChainModel, FrequencyMatrixFreeEndsKeepRowSums) {
  ChainModel m{5, 2.0, 0.7, 0.3};
  const Eigen::MatrixXd w2 = build_frequency_matrix(m);
  EXPECT_TRUE(w2.isApprox(w2.transpose()));
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(w2.row(i).sum(), 4.0, 1e-14);
  EXPECT_DOUBLE_EQ(w2(2, 2), 4.0 + 1.4);
  EXPECT_DOUBLE_EQ(w2(0, 2), 0.0);
}

TEST(ChainModel, BondsAreNearestNeighbour) {
  const auto bonds = chain_bonds(4);
  ASSERT_EQ(bonds.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(bonds[i][0], i);
    EXPECT_EQ(bonds[i][1], i + 1);
  }
  EXPECT_TRUE(chain_bonds(1).empty());
}

TEST(ChainModel, ValidateRejectsBadParameters) {
  EXPECT_THROW((ChainModel{0, 1.0, 1.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((ChainModel{2, -1.0, 1.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((ChainModel{2, 1.0, -1.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((ChainModel{2, 1.0, 1.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((ChainModel{2, 1.0, 1.0, NAN}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((ChainModel{2, 1.0, 0.0, 1.0}.validate()));
}

TEST(ChainModel, NonlinearityNamesRoundTrip) {
  for (auto k : {NonlinearityKind::KleinGordon, NonlinearityKind::BetaFput, NonlinearityKind::AlphaFput})
    EXPECT_EQ(nonlinearity_from_string(to_string(k)), k);
  EXPECT_THROW(nonlinearity_from_string("gamma"), std::invalid_argument);
}

TEST(ChainModel, SiteTensorIsRowMajor) {
  Tensor3 t(3);
  t(1, 2, 0) = 5.0;
  EXPECT_EQ(t.size(), 27u);
  EXPECT_EQ(t.data()[1 * 9 + 2 * 3 + 0], 5.0);
}

// The contractions must reproduce -(V(r + q/2) - V(r - q/2)) exactly for a quartic V.
class QuarticContraction : public ::testing::TestWithParam<NonlinearityKind> {};

TEST_P(QuarticContraction, MatchesPotentialDifference) {
  const NonlinearityKind kind = GetParam();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int n : {1, 2, 3, 5}) {
    if (kind == NonlinearityKind::BetaFput && n == 1) continue;
    ChainModel m{n, 1.0, 1.0, 1.0};
    const double lam = 0.37;
    const CouplingTensors ct = build_coupling_tensors(m, {kind, lam});
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd r(n), q(n);
      for (int i = 0; i < n; ++i) {
        r[i] = u(rng);
        q[i] = u(rng);
      }
      auto v = [&](const Eigen::VectorXd& x) {
        return kind == NonlinearityKind::KleinGordon ? kg_potential(x, lam) : beta_potential(x, lam);
      };
      const double direct = -(v(r + 0.5 * q) - v(r - 0.5 * q));
      const double via_tensors = contract_mu(ct.mu, r, q) + contract_sigma(ct.sigma, r, q);
      EXPECT_NEAR(via_tensors, direct, 1e-13 * (1.0 + std::abs(direct)));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Kinds, QuarticContraction,
                         ::testing::Values(NonlinearityKind::KleinGordon, NonlinearityKind::BetaFput));

TEST(ChainModel, KleinGordonTensorsAreDiagonal) {
  ChainModel m{3, 1.0, 1.0, 1.0};
  const CouplingTensors ct = build_coupling_tensors(m, {NonlinearityKind::KleinGordon, 0.2});
  double off = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
      for (int p = 0; p < 3; ++p)
        for (int r = 0; r < 3; ++r) {
          const bool diag = k == l && l == p && p == r;
          if (diag) {
            EXPECT_DOUBLE_EQ(ct.mu(k, l, p, r), -0.2);
            EXPECT_DOUBLE_EQ(ct.sigma(k, l, p, r), -0.05);
          } else {
            off = std::max({off, std::abs(ct.mu(k, l, p, r)), std::abs(ct.sigma(k, l, p, r))});
          }
        }
  EXPECT_EQ(off, 0.0);
}

TEST(ChainModel, AlphaCubicTensorContractsBondDifferences) {
  ChainModel m{3, 1.0, 1.0, 1.0};
  const double lam = 0.4;
  const CouplingTensors ct = build_coupling_tensors(m, {NonlinearityKind::AlphaFput, lam});
  const Eigen::Vector3d r(0.3, -0.8, 1.1), q(0.5, 0.2, -0.4);
  double contracted = 0.0, expected = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
      for (int p = 0; p < 3; ++p) {
        contracted += ct.mu3(k, l, p) * r[k] * r[l] * q[p];
        EXPECT_EQ(ct.sigma3(k, l, p), 0.0);
      }
  for (auto [a, b] : chain_bonds(3)) expected -= lam * std::pow(r[a] - r[b], 2) * (q[a] - q[b]);
  EXPECT_NEAR(contracted, expected, 1e-14);
}

}  // namespace
}  // namespace ness

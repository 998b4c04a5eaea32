#include <cmath>
#include <cstdint>
#include <vector>

#include "gtest/gtest.h"
#include "mscan/baselines.hpp"
#include "mscan/generators.hpp"
#include "mscan/scanners.hpp"
#include "mscan/thresholds.hpp"

namespace mscan {
namespace {

TEST(Spectral, RecoversRankOneTwoLevelBlock) {
  DataMatrix X(20, 25);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 8; ++j) X(i, j) = 3.0;
  const auto s = spectral_localize(X);
  EXPECT_EQ(s, (Selection{first_indices(6), first_indices(8)}));
}

TEST(Spectral, LeadingPairOfKnownMatrix) {
  const auto X = DataMatrix::from_rows({{3, 0}, {0, 1}});
  const auto p = leading_singular_pair(X);
  EXPECT_TRUE(p.converged);
  EXPECT_NEAR(p.sigma, 3.0, 1e-9);
  EXPECT_NEAR(std::abs(p.right[0]), 1.0, 1e-8);
  EXPECT_NEAR(std::abs(p.left[0]), 1.0, 1e-8);
}

TEST(Spectral, ConstantMatrixIsDegenerateButValid) {
  const DataMatrix X(6, 7, 2.0);
  const auto p = leading_singular_pair(X);
  EXPECT_TRUE(p.degenerate);
  EXPECT_TRUE(is_valid(spectral_localize(X), 6, 7));
  EXPECT_TRUE(is_valid(spectral_localize(DataMatrix(4, 4, 0.0)), 4, 4));
}

TEST(Spectral, IterationCapRaisesWithLastIterate) {
  const auto X = generate({Family::gaussian, 30, 30, 5, 5, 0.5, 1}).first;
  try {
    leading_singular_pair(X, {.power_iter_max = 1});
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.last_iterate().size(), 30u);
  }
  const auto p = leading_singular_pair(X, {.power_iter_max = 1, .accept_unconverged = true});
  EXPECT_FALSE(p.converged);
}

TEST(Spectral, ScaleInvariant) {
  const auto X = generate({Family::gaussian, 40, 50, 8, 9, 1.5, 2}).first;
  EXPECT_EQ(spectral_localize(X), spectral_localize(X.scaled(4.0)));
}

TEST(TwoMeans, SplitsAtTheObviousGap) {
  const auto t = two_means_1d({0.1, 5.0, 0.0, 5.2, -0.1, 4.9});
  EXPECT_EQ(t.low, (IndexSet{0, 2, 4}));
  EXPECT_EQ(t.high, (IndexSet{1, 3, 5}));
  EXPECT_THROW(two_means_1d({1.0}), std::domain_error);
}

TEST(Gmg, HandExamples) {
  const auto X = DataMatrix::from_rows({{5, 5, 0}, {5, 5, 0}, {0, 0, 0}, {0, 0, 1}});
  EXPECT_EQ(gmg_localize(X), (Selection{{0, 1}, {0, 1}}));
  // Equal gaps resolve to the lowest split position, so the upper side is largest.
  const auto Y = DataMatrix::from_rows({{0, 0}, {1, 1}, {2, 2}});
  EXPECT_EQ(gmg_localize(Y).rows, (IndexSet{1, 2}));
}

TEST(Gmg, ShiftInvariantOnDyadicData) {
  Xoshiro256 rng(5);
  for (int t = 0; t < 20; ++t) {
    DataMatrix X(12, 9);
    for (Index i = 0; i < 12; ++i)
      for (Index j = 0; j < 9; ++j) X(i, j) = static_cast<double>(rng.below(64)) / 8.0;
    EXPECT_EQ(gmg_localize(X), gmg_localize(X.shifted(0.25)));
  }
}

TEST(Baselines, SmallMatricesAreDomainErrors) {
  EXPECT_THROW(gmg_localize(DataMatrix(1, 5)), std::domain_error);
  EXPECT_THROW(spectral_localize(DataMatrix(5, 1)), std::domain_error);
}

TEST(Baselines, SpectralRecoversStrongBlockAndGmgTrailsAdaptive) {
  const Index M = 200, N = 240, m = 34, n = 28;
  const double theta = 4.0 * theta_crit(M, N, m, n);
  int spectral_exact = 0;
  double gmg_err = 0.0, adaptive_err = 0.0;
  for (std::uint64_t rep = 0; rep < 30; ++rep) {
    const auto [X, truth] = generate({Family::gaussian, M, N, m, n, theta, 500 + rep});
    if (err_measure(spectral_localize(X, {.accept_unconverged = true}), truth) == 0.0)
      ++spectral_exact;
    gmg_err += err_measure(gmg_localize(X), truth);
    adaptive_err += err_measure(
        adaptive_las(X, {.m0 = 5, .n0 = 5, .restarts = 10}, rep).selection, truth);
  }
  EXPECT_GT(spectral_exact, 15);
  EXPECT_GT(gmg_err, adaptive_err);
}

}  // namespace
}  // namespace mscan

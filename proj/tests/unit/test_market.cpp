#include <gtest/gtest.h>

#include <cmath>

#include "gpricing/errors.hpp"
#include "gpricing/market/bsm.hpp"
#include "gpricing/market/bsm_sweep.hpp"
#include "gpricing/market/gbm.hpp"
#include "gpricing/market/realized_vol.hpp"
#include "gpricing/market/rng.hpp"
#include "gpricing/market/vol_trajectory.hpp"
#include "gpricing/special.hpp"

using namespace gpricing;
using namespace gpricing::market;

TEST(MarketRng, PhiloxKnownAnswers) {
  // Random123 known-answer vectors for Philox4x32-10.
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}),
            (std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(MarketRng, StreamsAreReproducibleAndBounded) {
  CounterRng a(7, 3), b(7, 3), c(7, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
    differs |= u != c.uniform();
  }
  EXPECT_TRUE(differs);
  CounterRng d(1, 0);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_LT(d.below(7), 7u);
  }
}

TEST(MarketRng, InverseNormalCdfRoundTrips) {
  for (const double p : {1e-10, 0.01, 0.3, 0.5, 0.77, 0.999}) {
    EXPECT_NEAR(special::normal_cdf(inverse_normal_cdf(p)), p, 1e-13 + 1e-12 * p);
  }
}

TEST(MarketRealizedVol, WorkedExamples) {
  const std::vector<double> r{0.01, -0.02};
  const auto rv = realized_vol(r);
  EXPECT_NEAR(rv.variance, 0.0005, 1e-18);
  EXPECT_NEAR(rv.sigma_annual, 0.354965, 1e-6);
  const std::vector<double> zeros(10, 0.0);
  EXPECT_EQ(realized_vol(zeros).variance, 0.0);
  EXPECT_EQ(realized_vol(zeros).sigma_annual, 0.0);
  EXPECT_THROW(realized_vol({}), ValidationError);
}

TEST(MarketRealizedVol, AnnualisationIdentity) {
  // A day whose realized variance is 0.2^2 / 252 annualises to 0.2.
  const std::vector<double> r{0.2 / std::sqrt(252.0)};
  EXPECT_NEAR(realized_vol(r).sigma_annual, 0.2, 1e-15);
}

TEST(MarketAlign, StepToDayMap) {
  EXPECT_EQ(aligned_day_index(16, 10, 32), 5u);
  EXPECT_EQ(aligned_day_index(31, 10, 32), 9u);
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_EQ(aligned_day_index(i, 1, 40), 0u);
  }
  VolTrajectory traj{{0.1, 0.2, 0.3}};
  const auto s = align_sigma(traj, 6);
  EXPECT_EQ(s, (std::vector<double>{0.1, 0.1, 0.2, 0.2, 0.3, 0.3}));
}

TEST(MarketGbm, ZeroVolatilityIsConstant) {
  const std::vector<double> sig(8, 0.0);
  const auto b = simulate_paths(4000.0, 0.0, sig, 1.0 / 252, 50, 3);
  for (const double x : b.spot) {
    EXPECT_EQ(x, 4000.0);
  }
}

TEST(MarketGbm, DriftOnlyStep) {
  const std::vector<double> sig{0.2};
  const std::vector<double> xi{0.0};
  const auto b = paths_from_normals(4000.0, 0.0, sig, 1.0 / 252, 1, xi);
  EXPECT_NEAR(b.x(0, 1) / 4000.0, std::exp(-7.936508e-5), 1e-12);
}

TEST(MarketGbm, LognormalMomentsAndPositivity) {
  const std::size_t M = 200000, N = 32;
  const double tau = 0.25, sigma = 0.2, x0 = 4000.0;
  const std::vector<double> sig(N, sigma);
  const auto b = simulate_paths(x0, 0.0, sig, tau / N, M, 11);
  double mean = 0.0, mean_l = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    mean += b.terminal(j);
    mean_l += std::log(b.terminal(j) / x0);
  }
  mean /= M;
  mean_l /= M;
  double var = 0.0, var_l = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    var += (b.terminal(j) - mean) * (b.terminal(j) - mean);
    const double l = std::log(b.terminal(j) / x0) - mean_l;
    var_l += l * l;
  }
  var /= M - 1;
  var_l /= M - 1;
  EXPECT_LE(std::abs(mean - x0), 3.0 * std::sqrt(var / M));
  EXPECT_NEAR(var_l, sigma * sigma * tau, 0.01 * sigma * sigma * tau);
  for (const double x : b.spot) {
    ASSERT_GT(x, 0.0);
  }
}

TEST(MarketGbm, ThreadCountDoesNotChangePaths) {
  const std::vector<double> sig{0.1, 0.3, 0.2, 0.25};
  const auto a = simulate_paths(100.0, 0.01, sig, 0.01, 257, 9, 1);
  const auto b = simulate_paths(100.0, 0.01, sig, 0.01, 257, 9, 4);
  EXPECT_EQ(a.spot, b.spot);
  EXPECT_EQ(a.dW, b.dW);
}

TEST(MarketBsm, AtTheMoneyExample) {
  const double c = bsm_price(4000, 4000, 0.25, 0.2, 0.0, OptionType::call);
  EXPECT_NEAR(c, 4000.0 * (2.0 * special::normal_cdf(0.05) - 1.0), 1e-9);
  EXPECT_NEAR(c, 159.5104467, 1e-6);
}

TEST(MarketBsm, IntrinsicLimits) {
  EXPECT_EQ(bsm_price(4100, 4000, 0.0, 0.2, 0.0, OptionType::call), 100.0);
  EXPECT_EQ(bsm_price(4100, 4000, 0.25, 0.0, 0.0, OptionType::call), 100.0);
  EXPECT_EQ(bsm_price(3900, 4000, 0.0, 0.2, 0.0, OptionType::call), 0.0);
  EXPECT_EQ(bsm_price(3900, 4000, 0.25, 0.0, 0.0, OptionType::put), 100.0);
}

TEST(MarketBsm, PutCallParityAtZeroRate) {
  for (const double X : {3500.0, 4000.0, 4400.0}) {
    for (const double tau : {0.02, 0.25, 1.0}) {
      const double c = bsm_price(X, 4000, tau, 0.23, 0.0, OptionType::call);
      const double p = bsm_price(X, 4000, tau, 0.23, 0.0, OptionType::put);
      EXPECT_NEAR(c - p, X - 4000.0, 1e-9);
    }
  }
}

TEST(MarketBsm, MonotoneInSigmaAndSpot) {
  for (const auto type : kOptionTypes) {
    double prev = -1.0;
    for (double s = 0.05; s <= 0.8; s += 0.05) {
      const double v = bsm_price(4000, 4100, 0.3, s, 0.0, type);
      EXPECT_GE(v, prev);
      prev = v;
    }
    prev = type == OptionType::call ? -1.0 : 1e9;
    for (double X = 3000; X <= 5000; X += 50) {
      const double v = bsm_price(X, 4000, 0.3, 0.2, 0.0, type);
      if (type == OptionType::call) {
        EXPECT_GE(v, prev);
      } else {
        EXPECT_LE(v, prev);
      }
      prev = v;
    }
  }
}

TEST(MarketBsmSweep, SelfConsistentArgminAndShape) {
  std::vector<OptionContract> q;
  for (int m = 1; m <= 3; ++m) {
    for (int k = 0; k < 10; ++k) {
      OptionContract c;
      c.date = Date(2023, static_cast<unsigned>(m), static_cast<unsigned>(3 + k));
      c.type = k % 2 ? OptionType::call : OptionType::put;
      c.underlying = 4000;
      c.strike = 3800 + 40 * k;
      c.tau_days = 10 + 5 * k;
      c.settlement = bsm_price(c.underlying, c.strike, tau_years(c.tau_days), 0.2, 0.0, c.type);
      q.push_back(c);
    }
  }
  const auto grid = default_sigma_grid();
  ASSERT_EQ(grid.size(), 5u);
  const auto t = bsm_sweep(q, grid);
  ASSERT_EQ(t.months.size(), 3u);
  for (const auto& m : t.months) {
    EXPECT_EQ(m.mae.size(), 5u);
    EXPECT_EQ(grid[m.argmin], 0.20);
    EXPECT_EQ(m.mae[m.argmin], 0.0);
  }
}

TEST(MarketBsmSweep, EmptyMonthIsReported) {
  OptionContract a;
  a.date = Date(2023, 1, 10);
  a.underlying = a.strike = 4000;
  a.tau_days = 20;
  a.settlement = bsm_price(4000, 4000, tau_years(20), 0.2, 0.0, OptionType::call);
  OptionContract b = a;
  b.date = Date(2023, 3, 10);
  const std::vector<OptionContract> q{a, b};
  const auto t = bsm_sweep(q, default_sigma_grid());
  EXPECT_EQ(t.months.size(), 2u);
  EXPECT_EQ(t.warnings.size(), 1u);
}

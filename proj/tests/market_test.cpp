#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gmerton/driver.hpp"
#include "gmerton/market.hpp"
#include "gmerton/scenario.hpp"
#include "gmerton/strategy.hpp"

namespace gmerton {
namespace {

DriverPath one_step(double gamma, double dW) {
  const VolControl control{make_grid(1.0, 1), {gamma}};
  return driver_from_increments(control, std::vector<double>{dW});
}

MarketParams baseline() { return MarketParams{}; }

DriverPath random_path(std::uint64_t seed, std::size_t n = 50, double lo = 0.5,
                       double hi = 1.5) {
  const VolatilityBand band(lo, hi);
  const TimeGrid grid = make_grid(1.0, n);
  return simulate_driver(grid, gen_control(ControlSpec::uniform_iid(), band, grid, seed), seed);
}

TEST(StockPath, HalfQuadraticVariationDecay) {
  MarketParams p;
  p.mu = 0.0;
  p.c = 0.0;
  p.sigma = 1.0;
  const auto S = stock_path(p, one_step(1.0, 0.0));
  EXPECT_DOUBLE_EQ(S[1], std::exp(-0.5));
}

TEST(StockPath, ZeroCoefficientsConstant) {
  MarketParams p;
  p.mu = 0.0;
  p.c = 0.0;
  p.sigma = 0.0;
  for (double s : stock_path(p, random_path(3), 2.5)) EXPECT_EQ(s, 2.5);
}

TEST(StockPath, HandArithmetic) {
  const auto S = stock_path(baseline(), one_step(1.0, 0.5));
  EXPECT_NEAR(std::log(S[1]), 0.17, 1e-15);
}

TEST(WealthPath, ZeroStrategyKeepsWealth) {
  const auto w = wealth_path(baseline(), zero_strategy(), random_path(4), 3.0);
  for (double x : w.X) EXPECT_EQ(x, 3.0);
}

TEST(WealthPath, UnitStrategyHandArithmetic) {
  const auto w = wealth_path(baseline(), constant_strategy(1.0), one_step(1.0, 0.5), 1.0);
  EXPECT_NEAR(w.logX[1], 0.15, 1e-15);
  EXPECT_NEAR(std::log(w.X[1]), 0.15, 1e-15);
}

TEST(WealthPath, LinearInInitialWealth) {
  const DriverPath d = random_path(5);
  const auto pi = optimal_log_strategy(baseline());
  const auto a = wealth_path(baseline(), pi, d, 1.0);
  const auto b = wealth_path(baseline(), pi, d, 2.0);
  for (std::size_t k = 0; k < a.X.size(); ++k) EXPECT_EQ(b.X[k], 2.0 * a.X[k]);
}

TEST(WealthPath, PositiveUnderLeverage) {
  const DriverPath d = random_path(6);
  for (double p : {-20.0, -1.0, 3.0, 40.0}) {
    for (double x : wealth_path(baseline(), constant_strategy(p), d, 1.0).X) {
      EXPECT_GT(x, 0.0);
    }
  }
}

TEST(WealthPath, RejectsNonPositiveWealth) {
  EXPECT_THROW(wealth_path(baseline(), zero_strategy(), random_path(1), 0.0),
               std::invalid_argument);
}

TEST(WealthPath, ZeroDividendsBitwiseIdentical) {
  MarketParams with = baseline();
  with.dividends = {{0.3, 0.0}, {0.7, 0.0}};
  const DriverPath d = random_path(7);
  const auto a = wealth_path(baseline(), constant_strategy(1.3), d, 1.0);
  const auto b = wealth_path(with, constant_strategy(1.3), d, 1.0);
  EXPECT_EQ(a.X, b.X);
  EXPECT_EQ(stock_path(baseline(), d), stock_path(with, d));
}

TEST(WealthPath, DividendIsLogJumpAtNearestStep) {
  MarketParams with = baseline();
  with.dividends = {{0.5, 0.03}};
  const DriverPath d = random_path(8, 10);
  const auto plain = stock_path(baseline(), d);
  const auto paid = stock_path(with, d);
  for (std::size_t k = 0; k <= 5; ++k) EXPECT_EQ(plain[k], paid[k]);
  EXPECT_NEAR(std::log(paid[6] / plain[6]), 0.03, 1e-13);
  EXPECT_NEAR(std::log(paid[10] / plain[10]), 0.03, 1e-13);
}

TEST(DividendStep, ClampedToLastStep) {
  const TimeGrid grid = make_grid(1.0, 4);
  EXPECT_EQ(dividend_step(grid, 1.0), 3u);
  EXPECT_EQ(dividend_step(grid, 0.0), 0u);
  EXPECT_EQ(dividend_step(grid, 0.3), 1u);
}

TEST(WealthPathDothan, ZeroRateVolatilityIsDiscountingIdentity) {
  MarketParams p = baseline();
  p.sigma_r = 0.0;
  const DriverPath d = random_path(9);
  const auto pi = optimal_log_strategy(baseline());
  const auto bar = wealth_path(baseline(), pi, d, 1.5);
  const auto tilde = wealth_path_dothan(p, pi, d, 1.5);
  for (std::size_t k = 0; k < bar.X.size(); ++k) {
    EXPECT_EQ(tilde.X[k], std::exp(p.r * d.grid.t(k)) * bar.X[k]);
  }
}

TEST(WealthPathDothan, ZeroStrategyHoldsBond) {
  MarketParams p = baseline();
  p.sigma_r = 0.15;
  const DriverPath d = random_path(10);
  const auto w = wealth_path_dothan(p, zero_strategy(), d, 2.0);
  for (std::size_t k = 0; k < w.X.size(); ++k) {
    const double D = std::exp(p.r * d.grid.t(k) + 0.15 * d.B[k] - 0.5 * 0.0225 * d.QV[k]);
    EXPECT_NEAR(w.X[k], 2.0 * D, 1e-14 * w.X[k]);
  }
}

TEST(WealthPathDothan, UnitStrategyHandArithmetic) {
  MarketParams p = baseline();
  p.sigma = 0.3;
  p.sigma_r = 0.1;
  const auto w = wealth_path_dothan(p, constant_strategy(1.0), one_step(1.0, 0.5), 1.0);
  EXPECT_NEAR(w.logX[1], 0.195, 1e-15);
}

TEST(WealthPathDothan, EqualVolatilitiesAllowed) {
  MarketParams p = baseline();
  p.sigma_r = p.sigma;
  const auto w = wealth_path_dothan(p, constant_strategy(2.0), random_path(11), 1.0);
  for (double x : w.X) EXPECT_TRUE(std::isfinite(x) && x > 0.0);
}

TEST(WealthPathDothan, RequiresRateVolatility) {
  EXPECT_THROW(wealth_path_dothan(baseline(), zero_strategy(), random_path(1), 1.0),
               std::invalid_argument);
}

TEST(WealthPath, DegenerateBandMatchesClassicalLogMean) {
  // Independent oracle: E[log X_T] = log x0 + p(mu + c - r)T - p^2 sigma^2 T / 2.
  const MarketParams p = baseline();
  const TimeGrid grid = make_grid(1.0, 20);
  const VolControl control{grid, std::vector<double>(20, 1.0)};
  const double frac = 1.2;
  const int n = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double v =
        wealth_path(p, constant_strategy(frac), simulate_driver(grid, control, path_seed(1, j)), 1.0)
            .logX.back();
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  const double expected = frac * (p.mu + p.c - p.r) - 0.5 * frac * frac * p.sigma * p.sigma;
  EXPECT_LE(std::abs(mean - expected), 3.0 * se);
}

TEST(StepSchedule, RightContinuous) {
  const StepSchedule s({0.0, 0.5}, {1.0, 2.0});
  EXPECT_EQ(s.at(0.0), 1.0);
  EXPECT_EQ(s.at(0.4999), 1.0);
  EXPECT_EQ(s.at(0.5), 2.0);
  EXPECT_EQ(s.at(10.0), 2.0);
  EXPECT_THROW(StepSchedule({0.1}, {1.0}), std::invalid_argument);
  EXPECT_THROW(StepSchedule({0.0, 0.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST(MarketParams, Validation) {
  MarketParams p;
  EXPECT_NO_THROW(p.validate(1.0));
  p.sigma = 0.0;
  EXPECT_THROW(p.validate(1.0), std::invalid_argument);
  p = MarketParams{};
  p.dividends = {{1.5, 0.01}};
  EXPECT_THROW(p.validate(1.0), std::invalid_argument);
  p = MarketParams{};
  p.sigma_schedule = StepSchedule({0.0, 0.5}, {0.2, 1e-10});
  EXPECT_THROW(p.validate(1.0), std::invalid_argument);
}

}  // namespace
}  // namespace gmerton

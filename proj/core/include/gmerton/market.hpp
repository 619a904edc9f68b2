#pragma once

#include <string>
#include <vector>

#include "gmerton/driver.hpp"
#include "gmerton/market_params.hpp"
#include "gmerton/strategy.hpp"

namespace gmerton {

/// Wealth trajectory; X[k] = x0 * exp(logX[k] - log x0) > 0.
struct WealthPath {
  TimeGrid grid;
  std::vector<double> X;
  std::vector<double> logX;
  std::string strategy_label;
};

// Exact per-step log increments for piecewise-constant integrands. `dB` and
// `dQV` are the step's increments of B and <B>; `dividend` is the Dirac
// loading assigned to the step. These are shared by the path simulator and
// the lattice so both evaluate identical arithmetic.

/// log S increment: mu dt + sigma dB + (c - sigma^2/2) dQV + dividend.
double stock_log_increment(const MarketParams& params, double t, double dt, double dB,
                           double dQV, double dividend);

/// Discounted constant-rate wealth:
/// pi (mu - r) dt + pi sigma dB + (pi c - pi^2 sigma^2 / 2) dQV + pi dividend.
double wealth_log_increment(const MarketParams& params, double t, double dt, double pi,
                            double dB, double dQV, double dividend);

/// Stochastic-rate wealth without the bond factor D:
/// pi (mu - r) dt + pi s dB - (pi^2 s^2 / 2 + pi sigma_r s - c pi) dQV with
/// s = sigma - sigma_r.
double dothan_strategy_log_increment(const MarketParams& params, double t, double dt,
                                     double pi, double dB, double dQV, double dividend);

/// log D_t = r t + sigma_r B_t - sigma_r^2 <B>_t / 2.
double dothan_log_discount(const MarketParams& params, double t, double B, double QV);

/// Stock path with S_0 = s0; dividends enter as log-jumps at their steps.
std::vector<double> stock_path(const MarketParams& params, const DriverPath& driver,
                               double s0 = 1.0);

/// Discounted wealth X-bar under a feedback strategy. Throws
/// std::invalid_argument for x0 <= 0.
WealthPath wealth_path(const MarketParams& params, const Strategy& strategy,
                       const DriverPath& driver, double x0);

/// Stochastic-rate wealth X-tilde = D_t * x0 * exp(strategy part).
/// sigma == sigma_r is allowed here. Throws std::invalid_argument for
/// x0 <= 0 or if params has no sigma_r.
WealthPath wealth_path_dothan(const MarketParams& params, const Strategy& strategy,
                              const DriverPath& driver, double x0);

/// Step context seen by a strategy on step k of a driver path.
StepContext step_context(const DriverPath& driver, std::size_t k, double dividend);

}  // namespace gmerton

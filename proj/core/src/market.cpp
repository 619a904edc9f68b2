#include "gmerton/market.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gmerton {

StepSchedule::StepSchedule(std::vector<double> starts, std::vector<double> values)
    : starts_(std::move(starts)), values_(std::move(values)) {
  if (starts_.empty() || starts_.size() != values_.size()) {
    throw std::invalid_argument("step schedule needs matching, non-empty starts and values");
  }
  if (starts_.front() != 0.0) {
    throw std::invalid_argument("step schedule must start at t = 0");
  }
  for (std::size_t i = 1; i < starts_.size(); ++i) {
    if (!(starts_[i] > starts_[i - 1])) {
      throw std::invalid_argument("step schedule start times must increase");
    }
  }
}

double StepSchedule::at(double t) const {
  auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  const auto idx = it == starts_.begin() ? 0 : static_cast<std::size_t>(it - starts_.begin()) - 1;
  return values_[idx];
}

void MarketParams::validate(double horizon) const {
  if (!(sigma > 0.0)) throw std::invalid_argument("market.sigma must be positive");
  if (!std::isfinite(r) || !std::isfinite(mu) || !std::isfinite(c)) {
    throw std::invalid_argument("market coefficients must be finite");
  }
  if (sigma_schedule) {
    if (!(sigma_floor > 0.0)) throw std::invalid_argument("market.sigma_floor must be positive");
    for (double s : sigma_schedule->values()) {
      if (!(s >= sigma_floor)) {
        throw std::invalid_argument("market.sigma_schedule falls below sigma_floor");
      }
    }
  }
  for (const auto& d : dividends) {
    if (!(d.time >= 0.0 && d.time <= horizon)) {
      throw std::invalid_argument("market.dividends: time outside [0, T]");
    }
  }
}

std::size_t dividend_step(const TimeGrid& grid, double time) {
  return std::min(grid.nearest_point(time), grid.n_steps() - 1);
}

std::vector<double> dividend_loadings(const MarketParams& params, const TimeGrid& grid) {
  std::vector<double> loadings(grid.n_steps(), 0.0);
  for (const auto& d : params.dividends) {
    loadings[dividend_step(grid, d.time)] += d.loading;
  }
  return loadings;
}

double stock_log_increment(const MarketParams& params, double t, double dt, double dB,
                           double dQV, double dividend) {
  const double sigma = params.sigma_at(t);
  return params.mu_at(t) * dt + sigma * dB + (params.c_at(t) - 0.5 * sigma * sigma) * dQV +
         dividend;
}

double wealth_log_increment(const MarketParams& params, double t, double dt, double pi,
                            double dB, double dQV, double dividend) {
  const double sigma = params.sigma_at(t);
  return pi * (params.mu_at(t) - params.r) * dt + pi * sigma * dB +
         (pi * params.c_at(t) - 0.5 * pi * pi * sigma * sigma) * dQV + pi * dividend;
}

double dothan_strategy_log_increment(const MarketParams& params, double t, double dt,
                                     double pi, double dB, double dQV, double dividend) {
  const double sigma_r = params.sigma_r.value_or(0.0);
  const double s = params.sigma_at(t) - sigma_r;
  return pi * (params.mu_at(t) - params.r) * dt + pi * s * dB -
         (0.5 * pi * pi * s * s + pi * sigma_r * s - params.c_at(t) * pi) * dQV +
         pi * dividend;
}

double dothan_log_discount(const MarketParams& params, double t, double B, double QV) {
  const double sigma_r = params.sigma_r.value_or(0.0);
  return params.r * t + sigma_r * B - 0.5 * sigma_r * sigma_r * QV;
}

StepContext step_context(const DriverPath& driver, std::size_t k, double dividend) {
  return StepContext{k, driver.grid.t(k), driver.grid.dt(k), driver.rho[k], dividend};
}

std::vector<double> stock_path(const MarketParams& params, const DriverPath& driver,
                               double s0) {
  const std::size_t n = driver.n_steps();
  const std::vector<double> div = dividend_loadings(params, driver.grid);
  std::vector<double> S(n + 1);
  double log_s = 0.0;
  S[0] = s0;
  for (std::size_t k = 0; k < n; ++k) {
    log_s += stock_log_increment(params, driver.grid.t(k), driver.grid.dt(k),
                                 driver.B[k + 1] - driver.B[k],
                                 driver.QV[k + 1] - driver.QV[k], div[k]);
    S[k + 1] = s0 * std::exp(log_s);
  }
  return S;
}

namespace {

// Cumulative strategy exponent, independent of x0.
template <class Increment>
std::vector<double> cumulative_exponent(const MarketParams& params, const Strategy& strategy,
                                        const DriverPath& driver, Increment&& increment) {
  const std::size_t n = driver.n_steps();
  const std::vector<double> div = dividend_loadings(params, driver.grid);
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const StepContext ctx = step_context(driver, k, div[k]);
    const double pi = strategy(ctx);
    cum[k + 1] = cum[k] + increment(ctx, pi, driver.B[k + 1] - driver.B[k],
                                    driver.QV[k + 1] - driver.QV[k]);
  }
  return cum;
}

}  // namespace

WealthPath wealth_path(const MarketParams& params, const Strategy& strategy,
                       const DriverPath& driver, double x0) {
  if (!(x0 > 0.0)) throw std::invalid_argument("initial wealth must be positive");
  const auto cum = cumulative_exponent(
      params, strategy, driver, [&](const StepContext& ctx, double pi, double dB, double dQV) {
        return wealth_log_increment(params, ctx.t, ctx.dt, pi, dB, dQV, ctx.dividend);
      });
  WealthPath out{driver.grid, std::vector<double>(cum.size()), std::vector<double>(cum.size()),
                 strategy.label()};
  const double log_x0 = std::log(x0);
  for (std::size_t k = 0; k < cum.size(); ++k) {
    out.X[k] = x0 * std::exp(cum[k]);
    out.logX[k] = log_x0 + cum[k];
  }
  return out;
}

WealthPath wealth_path_dothan(const MarketParams& params, const Strategy& strategy,
                              const DriverPath& driver, double x0) {
  if (!(x0 > 0.0)) throw std::invalid_argument("initial wealth must be positive");
  if (!params.dothan()) throw std::invalid_argument("market.sigma_r is required for the Dothan model");
  const auto cum = cumulative_exponent(
      params, strategy, driver, [&](const StepContext& ctx, double pi, double dB, double dQV) {
        return dothan_strategy_log_increment(params, ctx.t, ctx.dt, pi, dB, dQV, ctx.dividend);
      });
  WealthPath out{driver.grid, std::vector<double>(cum.size()), std::vector<double>(cum.size()),
                 strategy.label()};
  const double log_x0 = std::log(x0);
  for (std::size_t k = 0; k < cum.size(); ++k) {
    const double log_d = dothan_log_discount(params, driver.grid.t(k), driver.B[k], driver.QV[k]);
    out.X[k] = std::exp(log_d) * (x0 * std::exp(cum[k]));
    out.logX[k] = log_x0 + log_d + cum[k];
  }
  return out;
}

}  // namespace gmerton

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gmerton/scenario.hpp"

namespace gmerton {

/// Right-continuous step function: value[i] holds on [start[i], start[i+1]).
/// start[0] must be 0.
class StepSchedule {
 public:
  StepSchedule() = default;
  StepSchedule(std::vector<double> starts, std::vector<double> values);

  static StepSchedule constant(double value) { return StepSchedule({0.0}, {value}); }

  double at(double t) const;
  std::span<const double> starts() const { return starts_; }
  std::span<const double> values() const { return values_; }
  bool empty() const { return values_.empty(); }

 private:
  std::vector<double> starts_;
  std::vector<double> values_;
};

/// Discrete dividend: a unit-mass loading d at time t in the stock drift.
struct Dividend {
  double time = 0.0;
  double loading = 0.0;
};

/// Market coefficients for dS = S(mu dt + sigma dB + c d<B>) with a
/// constant-rate bond, or a Dothan bond dR = R(r dt + sigma_r dB) when
/// sigma_r is set. mu, sigma and c may be overridden by step schedules.
struct MarketParams {
  double r = 0.02;
  double mu = 0.08;
  double sigma = 0.2;
  double c = 0.01;
  std::optional<double> sigma_r;
  std::vector<Dividend> dividends;
  std::optional<StepSchedule> mu_schedule;
  std::optional<StepSchedule> sigma_schedule;
  std::optional<StepSchedule> c_schedule;
  /// Lower bound epsilon required of sigma_t in the time-varying model.
  double sigma_floor = 1e-8;

  bool dothan() const { return sigma_r.has_value(); }
  bool time_varying() const {
    return mu_schedule || sigma_schedule || c_schedule;
  }
  double mu_at(double t) const { return mu_schedule ? mu_schedule->at(t) : mu; }
  double sigma_at(double t) const {
    return sigma_schedule ? sigma_schedule->at(t) : sigma;
  }
  double c_at(double t) const { return c_schedule ? c_schedule->at(t) : c; }

  /// Checks sigma > 0, sigma_t >= sigma_floor and dividend times in [0, T].
  /// Throws std::invalid_argument naming the offending field.
  void validate(double horizon) const;
};

/// Step receiving the Dirac dividend at `time`: the grid point nearest to
/// the dividend time, clamped to the last step.
std::size_t dividend_step(const TimeGrid& grid, double time);

/// Per-step sum of dividend loadings (zero where no dividend falls).
std::vector<double> dividend_loadings(const MarketParams& params, const TimeGrid& grid);

}  // namespace gmerton

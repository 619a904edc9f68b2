#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "gmerton/market_params.hpp"

namespace gmerton {

/// What a feedback strategy observes on step k, i.e. on [t, t + dt).
struct StepContext {
  std::size_t step = 0;
  double t = 0.0;
  double dt = 0.0;
  double rho = 1.0;        // 1 / gamma^2 of the current step
  double dividend = 0.0;   // dividend loading assigned to this step
};

/// Fraction of wealth held in the stock as a function of (t, rho). Values are
/// unbounded: leverage and short positions are allowed.
class Strategy {
 public:
  using Evaluator = std::function<double(const StepContext&)>;

  Strategy(std::string label, Evaluator eval)
      : label_(std::move(label)), eval_(std::move(eval)) {}

  double operator()(const StepContext& ctx) const { return eval_(ctx); }
  const std::string& label() const { return label_; }

 private:
  std::string label_;
  Evaluator eval_;
};

/// ((mu - r) rho + c) / sigma^2.
double optimal_log(const MarketParams& params, double rho);

/// ((mu_t - r) rho + c_t) / sigma_t^2 with the schedules evaluated at t.
/// Throws std::invalid_argument when sigma_t < params.sigma_floor.
double optimal_log_tv(const MarketParams& params, double t, double rho);

/// optimal_log with mu raised by dividend / dt on a dividend step.
double optimal_log_dividend(const MarketParams& params, double rho, double dividend,
                            double dt);

/// (((mu - r) rho + c) / (sigma - sigma_r) - sigma_r) / (sigma - sigma_r).
/// Throws SingularParameters when sigma == sigma_r; a missing sigma_r is
/// treated as 0.
double optimal_log_dothan(const MarketParams& params, double rho);

enum class Position { Long, Short, Zero };

struct PositionReport {
  Position sign = Position::Zero;
  /// "short: sigma>sigma_r, inner<sigma_r", "long: sigma<sigma_r, inner<sigma_r", ...
  std::string case_label;
  double inner = 0.0;  // ((mu - r) rho + c) / (sigma - sigma_r)
  double value = 0.0;  // optimal_log_dothan at the same inputs
};

/// Classifies the sign of the stochastic-rate optimum from the relation of
/// the inner ratio to sigma_r.
PositionReport position_sign(const MarketParams& params, double rho);

const char* to_string(Position p);

Strategy zero_strategy();
Strategy constant_strategy(double fraction);
Strategy optimal_log_strategy(const MarketParams& params);
Strategy optimal_log_tv_strategy(const MarketParams& params);
Strategy optimal_log_dividend_strategy(const MarketParams& params);
Strategy optimal_log_dothan_strategy(const MarketParams& params);
/// factor * base + shift, labelled accordingly.
Strategy affine_strategy(const Strategy& base, double factor, double shift);

/// Resolves a label: zero, constant(p), optimal_log, optimal_log_tv,
/// optimal_log_dividend, optimal_log_dothan, multiple(k) (k times `optimum`)
/// and shifted(s) (optimum plus s). Throws std::invalid_argument otherwise.
Strategy strategy_from_label(const std::string& label, const MarketParams& params,
                             const Strategy& optimum);

/// The closed-form optimum for the model described by params: Dothan when
/// sigma_r is set, otherwise the time-varying/dividend/constant formula.
Strategy model_optimal_strategy(const MarketParams& params);

}  // namespace gmerton

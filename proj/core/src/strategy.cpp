#include "gmerton/strategy.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "gmerton/errors.hpp"

namespace gmerton {

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

bool call_argument(const std::string& text, const std::string& name, double& value) {
  if (text.size() < name.size() + 2 || text.compare(0, name.size(), name) != 0 ||
      text[name.size()] != '(' || text.back() != ')') {
    return false;
  }
  const char* first = text.data() + name.size() + 1;
  const char* last = text.data() + text.size() - 1;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument("bad numeric argument in strategy '" + text + "'");
  }
  return true;
}

double dothan_spread(const MarketParams& params) {
  const double sigma_r = params.sigma_r.value_or(0.0);
  const double spread = params.sigma - sigma_r;
  if (spread == 0.0) {
    throw SingularParameters("sigma_r equals sigma: the stochastic-rate optimum is undefined");
  }
  return spread;
}

double dothan_inner(const MarketParams& params, double rho, double spread) {
  return ((params.mu - params.r) * rho + params.c) / spread;
}

}  // namespace

double optimal_log(const MarketParams& params, double rho) {
  if (!(params.sigma > 0.0)) {
    throw std::invalid_argument("sigma must be positive");
  }
  return ((params.mu - params.r) * rho + params.c) / (params.sigma * params.sigma);
}

double optimal_log_tv(const MarketParams& params, double t, double rho) {
  const double sigma_t = params.sigma_at(t);
  if (!(sigma_t >= params.sigma_floor) || !(params.sigma_floor > 0.0)) {
    throw std::invalid_argument("sigma_t fell below the floor epsilon");
  }
  return ((params.mu_at(t) - params.r) * rho + params.c_at(t)) / (sigma_t * sigma_t);
}

double optimal_log_dividend(const MarketParams& params, double rho, double dividend,
                            double dt) {
  if (!(params.sigma > 0.0)) {
    throw std::invalid_argument("sigma must be positive");
  }
  if (dividend == 0.0) return optimal_log(params, rho);
  const double drift = params.mu + dividend / dt;
  return ((drift - params.r) * rho + params.c) / (params.sigma * params.sigma);
}

double optimal_log_dothan(const MarketParams& params, double rho) {
  const double spread = dothan_spread(params);
  const double sigma_r = params.sigma_r.value_or(0.0);
  // Constant rate: take the closed form directly so the reduction is bitwise exact.
  if (sigma_r == 0.0) return optimal_log(params, rho);
  return (dothan_inner(params, rho, spread) - sigma_r) / spread;
}

PositionReport position_sign(const MarketParams& params, double rho) {
  const double spread = dothan_spread(params);
  const double sigma_r = params.sigma_r.value_or(0.0);
  PositionReport report;
  report.inner = dothan_inner(params, rho, spread);
  report.value = optimal_log_dothan(params, rho);
  const bool stock_more_volatile = spread > 0.0;
  const std::string vol_case = stock_more_volatile ? "sigma>sigma_r" : "sigma<sigma_r";
  if (report.inner == sigma_r) {
    report.sign = Position::Zero;
    report.case_label = "zero: " + vol_case + ", inner=sigma_r";
  } else if ((stock_more_volatile && report.inner < sigma_r) ||
             (!stock_more_volatile && report.inner > sigma_r)) {
    report.sign = Position::Short;
    report.case_label = "short: " + vol_case +
                        (report.inner < sigma_r ? ", inner<sigma_r" : ", inner>sigma_r");
  } else {
    report.sign = Position::Long;
    report.case_label = "long: " + vol_case +
                        (report.inner < sigma_r ? ", inner<sigma_r" : ", inner>sigma_r");
  }
  return report;
}

const char* to_string(Position p) {
  switch (p) {
    case Position::Long:
      return "long";
    case Position::Short:
      return "short";
    case Position::Zero:
      return "zero";
  }
  return "";
}

Strategy zero_strategy() {
  return Strategy("zero", [](const StepContext&) { return 0.0; });
}

Strategy constant_strategy(double fraction) {
  return Strategy("constant(" + format_number(fraction) + ")",
                  [fraction](const StepContext&) { return fraction; });
}

Strategy optimal_log_strategy(const MarketParams& params) {
  optimal_log(params, 1.0);
  return Strategy("optimal_log",
                  [params](const StepContext& ctx) { return optimal_log(params, ctx.rho); });
}

Strategy optimal_log_tv_strategy(const MarketParams& params) {
  return Strategy("optimal_log_tv", [params](const StepContext& ctx) {
    return optimal_log_tv(params, ctx.t, ctx.rho);
  });
}

Strategy optimal_log_dividend_strategy(const MarketParams& params) {
  optimal_log(params, 1.0);
  return Strategy("optimal_log_dividend", [params](const StepContext& ctx) {
    return optimal_log_dividend(params, ctx.rho, ctx.dividend, ctx.dt);
  });
}

Strategy optimal_log_dothan_strategy(const MarketParams& params) {
  dothan_spread(params);
  return Strategy("optimal_log_dothan", [params](const StepContext& ctx) {
    return optimal_log_dothan(params, ctx.rho);
  });
}

Strategy affine_strategy(const Strategy& base, double factor, double shift) {
  std::string label = base.label();
  if (factor != 1.0) label = format_number(factor) + "*" + label;
  if (shift != 0.0) label += (shift > 0 ? "+" : "") + format_number(shift);
  return Strategy(label, [base, factor, shift](const StepContext& ctx) {
    return factor * base(ctx) + shift;
  });
}

Strategy strategy_from_label(const std::string& label, const MarketParams& params,
                             const Strategy& optimum) {
  double arg = 0.0;
  if (label == "zero") return zero_strategy();
  if (label == "optimal_log") return optimal_log_strategy(params);
  if (label == "optimal_log_tv") return optimal_log_tv_strategy(params);
  if (label == "optimal_log_dividend") return optimal_log_dividend_strategy(params);
  if (label == "optimal_log_dothan") return optimal_log_dothan_strategy(params);
  if (call_argument(label, "constant", arg)) return constant_strategy(arg);
  if (call_argument(label, "multiple", arg)) return affine_strategy(optimum, arg, 0.0);
  if (call_argument(label, "shifted", arg)) return affine_strategy(optimum, 1.0, arg);
  throw std::invalid_argument("unknown strategy '" + label + "'");
}

Strategy model_optimal_strategy(const MarketParams& params) {
  if (params.dothan()) return optimal_log_dothan_strategy(params);
  if (params.time_varying()) {
    return Strategy("optimal_log_tv", [params](const StepContext& ctx) {
      const double base = optimal_log_tv(params, ctx.t, ctx.rho);
      if (ctx.dividend == 0.0) return base;
      const double s = params.sigma_at(ctx.t);
      return base + (ctx.dividend / ctx.dt) * ctx.rho / (s * s);
    });
  }
  if (!params.dividends.empty()) return optimal_log_dividend_strategy(params);
  return optimal_log_strategy(params);
}

}  // namespace gmerton

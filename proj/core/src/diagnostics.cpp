#include "gmerton/diagnostics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gmerton/errors.hpp"
#include "gmerton/market.hpp"

namespace gmerton {

DensityLoadings density_loadings(const MarketParams& params) {
  if (!(params.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!params.dothan()) {
    return {params.c / params.sigma, (params.mu - params.r) / params.sigma};
  }
  const double sigma_r = *params.sigma_r;
  const double spread = params.sigma - sigma_r;
  if (spread == 0.0) {
    throw SingularParameters("sigma_r equals sigma: density loadings are undefined");
  }
  return {(params.c + sigma_r * (sigma_r - params.sigma)) / spread,
          (params.mu - params.r) / spread};
}

DensityPath simulate_density(const MarketParams& params, const DriverPath& driver) {
  const DensityLoadings l = density_loadings(params);
  const std::size_t n = driver.n_steps();
  DensityPath out;
  out.grid = driver.grid;
  out.model = params.dothan() ? DensityPath::Model::Dothan : DensityPath::Model::ConstantRate;
  out.logZ.assign(n + 1, 0.0);
  out.Z.assign(n + 1, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double dB = driver.B[k + 1] - driver.B[k];
    const double dBt = driver.Btilde[k + 1] - driver.Btilde[k];
    const double dQV = driver.QV[k + 1] - driver.QV[k];
    const double dQVt = driver.QVtilde[k + 1] - driver.QVtilde[k];
    const double dXV = driver.XV[k + 1] - driver.XV[k];
    out.logZ[k + 1] = out.logZ[k] - l.alpha * dB - l.beta * dBt -
                      0.5 * l.alpha * l.alpha * dQV - 0.5 * l.beta * l.beta * dQVt -
                      l.alpha * l.beta * dXV;
    out.Z[k + 1] = std::exp(out.logZ[k + 1]);
  }
  return out;
}

namespace {

struct AuxCoefficients {
  double a;
  double b;
};

AuxCoefficients aux_coefficients(const MarketParams& params, double t, double pi) {
  const double excess = params.mu_at(t) - params.r;
  const double sigma = params.sigma_at(t);
  const double c = params.c_at(t);
  if (!params.dothan()) {
    return {pi * excess, -pi * (pi * sigma * sigma - c)};
  }
  const double sigma_r = *params.sigma_r;
  const double s = sigma - sigma_r;
  return {pi * excess, -pi * ((sigma_r + pi * s) * s - c)};
}

// Log of the wealth part whose reciprocal the auxiliary identity prices:
// discounted wealth, or x0 times the strategy factor for the Dothan model.
double strategy_log_step(const MarketParams& params, const StepContext& ctx, double pi,
                         double dB, double dQV) {
  return params.dothan()
             ? dothan_strategy_log_increment(params, ctx.t, ctx.dt, pi, dB, dQV, ctx.dividend)
             : wealth_log_increment(params, ctx.t, ctx.dt, pi, dB, dQV, ctx.dividend);
}

MartingaleReport to_report(std::string label, const MartingaleCheck& check, std::size_t n) {
  MartingaleReport r;
  r.label = std::move(label);
  r.max_residual_upper = check.max_residual_upper;
  r.max_residual_lower = check.max_residual_lower;
  r.max_residual = check.max_residual();
  r.tolerance = check.tolerance;
  r.pass = check.pass;
  r.worst_depth = check.worst_depth;
  r.worst_index = check.worst_index;
  r.n_steps = n;
  return r;
}

}  // namespace

AuxiliaryPath auxiliary_M(const MarketParams& params, const Strategy& pi_star,
                          const DriverPath& driver) {
  const std::size_t n = driver.n_steps();
  const std::vector<double> div = dividend_loadings(params, driver.grid);
  AuxiliaryPath out{driver.grid, std::vector<double>(n + 1, 1.0), std::vector<double>(n),
                    std::vector<double>(n)};
  std::vector<double> exponent(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const StepContext ctx = step_context(driver, k, div[k]);
    const AuxCoefficients coef = aux_coefficients(params, ctx.t, pi_star(ctx));
    out.a[k] = coef.a;
    out.b[k] = coef.b;
  }
  for (std::size_t k = n; k-- > 0;) {
    exponent[k] = exponent[k + 1] + out.a[k] * driver.grid.dt(k) +
                  out.b[k] * (driver.QV[k + 1] - driver.QV[k]);
    out.M[k] = std::exp(-exponent[k]);
  }
  return out;
}

MartingaleReport ratio_symmetric_martingale_check(const MarketParams& params,
                                                  const Strategy& pi, const Strategy& pi_star,
                                                  const LatticeSpec& lattice, double tol) {
  const LatticeTree tree = make_wealth_tree(lattice, params, {pi, pi_star});
  const auto ratio = [](const LatticeNode& node) { return std::exp(node.user[0] - node.user[1]); };
  const MartingaleCheck check =
      is_symmetric_g_martingale(tree, ratio, tol, ResidualKind::Relative);
  return to_report(pi.label() + "/" + pi_star.label(), check, lattice.n_steps);
}

SufficientConditionResult sufficient_condition_check(const MarketParams& params,
                                                     const Strategy& pi_star,
                                                     const std::vector<Strategy>& alternatives,
                                                     const LatticeSpec& lattice, double tol) {
  SufficientConditionResult result;
  result.pass = true;
  for (const Strategy& alt : alternatives) {
    result.reports.push_back(ratio_symmetric_martingale_check(params, alt, pi_star, lattice, tol));
    result.pass = result.pass && result.reports.back().pass;
  }
  return result;
}

OptimalityTable optimality_gap(const MarketParams& params, const Strategy& pi_star,
                               const std::vector<Strategy>& alternatives,
                               const LatticeSpec& lattice, double tol, double x0) {
  std::vector<Strategy> all{pi_star};
  all.insert(all.end(), alternatives.begin(), alternatives.end());
  OptimalityTable table;
  table.pass = true;
  std::vector<double> values;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const LatticeTree tree = make_wealth_tree(lattice, params, {all[i]}, x0);
    values.push_back(g_expectation(
        tree, [](const LatticeNode& node) { return node.user[0]; }, ValuationMode::Lower));
  }
  table.optimal_value = values.front();
  for (std::size_t i = 1; i < all.size(); ++i) {
    GapRow row{all[i].label(), values[i], values.front() - values[i], false};
    row.pass = row.gap >= -tol;
    table.pass = table.pass && row.pass;
    table.rows.push_back(std::move(row));
  }
  return table;
}

MartingaleReport mx_identity_check(const MarketParams& params, const Strategy& pi_star,
                                   const LatticeSpec& lattice, double tol) {
  const TimeGrid grid = TimeGrid::uniform(lattice.horizon, lattice.n_steps);
  const std::vector<double> div = dividend_loadings(params, grid);
  StateUpdater updater = [&](const LatticeTransition& tr, std::span<const double> parent,
                             std::span<double> child) {
    const StepContext ctx{tr.step, tr.t, tr.dt, 1.0 / (tr.gamma * tr.gamma), div[tr.step]};
    child[0] = parent[0] + strategy_log_step(params, ctx, pi_star(ctx), tr.dB, tr.dQV);
  };
  const LatticeTree tree(lattice.band, lattice.horizon, lattice.n_steps, updater, {0.0},
                         lattice.cap);

  struct Value {
    double valuation;  // lower valuation of 1 / X_T
    double M;
  };
  MartingaleCheck check;
  check.tolerance = tol;
  double worst = -1.0;
  tree.reduce<Value>(
      [](const LatticeNode& node) { return Value{std::exp(-node.user[0]), 1.0}; },
      [&](const LatticeNode& node, std::span<const Value> children) {
        std::size_t g_star = 0;
        double v_star = 0.5 * (children[0].valuation + children[1].valuation);
        for (std::size_t g = 1; 2 * g < children.size(); ++g) {
          const double v = 0.5 * (children[2 * g].valuation + children[2 * g + 1].valuation);
          if (v <= v_star) {
            v_star = v;
            g_star = g;
          }
        }
        const LatticeTransition tr = tree.transition(node.depth, 2 * g_star);
        const StepContext ctx{node.depth, node.t, tr.dt, 1.0 / (tr.gamma * tr.gamma),
                              div[node.depth]};
        const AuxCoefficients coef = aux_coefficients(params, ctx.t, pi_star(ctx));
        const double m = std::exp(-(coef.a * tr.dt + coef.b * tr.dQV)) * 0.5 *
                         (children[2 * g_star].M + children[2 * g_star + 1].M);
        const double lhs = m * std::exp(-node.user[0]);
        const double residual = std::abs(v_star / lhs - 1.0);
        check.max_residual_lower = std::max(check.max_residual_lower, residual);
        if (residual > worst) {
          worst = residual;
          check.worst_depth = node.depth;
          check.worst_index = node.index;
        }
        return Value{v_star, m};
      });
  check.pass = std::isfinite(check.max_residual()) && check.max_residual() <= tol;
  MartingaleReport report = to_report("mx_identity/" + pi_star.label(), check, lattice.n_steps);
  return report;
}

double lattice_tolerance(double k, const LatticeSpec& lattice) { return k * lattice.dt(); }

std::vector<ReportRecord> to_records(const MartingaleReport& report) {
  const std::string node = std::to_string(report.worst_depth) + ":" +
                           std::to_string(report.worst_index);
  const std::string verdict = report.pass ? "pass" : "fail";
  return {
      {report.label, "upper", report.max_residual_upper, node, verdict},
      {report.label, "lower", report.max_residual_lower, node, verdict},
  };
}

}  // namespace gmerton

#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gmerton/diagnostics.hpp"
#include "gmerton/driver.hpp"
#include "gmerton/errors.hpp"
#include "gmerton/lattice.hpp"
#include "gmerton/market.hpp"
#include "gmerton/rng.hpp"
#include "gmerton/scenario.hpp"

namespace gmerton::cli {
namespace {

std::string num(double v) { return format_double(v); }

std::string indexed(const std::string& name, const std::string& key, const std::string& value) {
  return name + "[" + key + "=" + value + "]";
}

LatticeSpec lattice_spec(const ExperimentConfig& cfg, std::size_t n_steps) {
  return LatticeSpec{cfg.band, cfg.horizon_years, n_steps, cfg.lattice.cap};
}

void write_outputs(const ExperimentConfig& cfg, const std::string& command,
                   std::vector<std::pair<std::string, std::string>> files,
                   CommandResult& result) {
  std::vector<std::pair<std::string, std::string>> manifest{
      {"command", command},
      {"version", kVersion},
      {"config_hash", cfg.config_hash},
      {"seed", std::to_string(cfg.master_seed)},
      {"rows", std::to_string(result.table.rows().size())},
      {"failures", std::to_string(result.table.failures())},
      {"verdict", result.table.all_pass() ? "pass" : "fail"},
  };
  for (const auto& [name, contents] : files) {
    write_text_file(cfg.output_dir, name, contents);
    result.files.push_back(name);
    manifest.emplace_back("file", name);
  }
  const std::string manifest_name = command + "_manifest.txt";
  write_text_file(cfg.output_dir, manifest_name, manifest_text(manifest));
  result.files.push_back(manifest_name);
}

WealthPath wealth_for(const MarketParams& market, const Strategy& pi, const DriverPath& d,
                      double x0) {
  return market.dothan() ? wealth_path_dothan(market, pi, d, x0) : wealth_path(market, pi, d, x0);
}

DriverFunctional make_functional(const std::string& name, const ExperimentConfig& cfg,
                                 const Strategy& optimum) {
  if (name == "B_T") return [](const DriverPath& d) { return d.B.back(); };
  if (name == "Btilde_T") return [](const DriverPath& d) { return d.Btilde.back(); };
  if (name == "qv_T") return [](const DriverPath& d) { return d.QV.back(); };
  if (name == "qvtilde_T") return [](const DriverPath& d) { return d.QVtilde.back(); };
  const MarketParams market = cfg.market;
  if (name == "Z_T") {
    return [market](const DriverPath& d) { return simulate_density(market, d).Z.back(); };
  }
  if (name == "M_0") {
    return [market, optimum](const DriverPath& d) {
      return auxiliary_M(market, optimum, d).M.front();
    };
  }
  const std::string prefix = "log_wealth_T:";
  if (name.rfind(prefix, 0) == 0) {
    const Strategy pi = strategy_from_label(name.substr(prefix.size()), market, optimum);
    const double x0 = cfg.x0;
    return [market, pi, x0](const DriverPath& d) {
      return wealth_for(market, pi, d, x0).logX.back();
    };
  }
  throw ConfigError("simulate.functionals", "unknown functional '" + name + "'");
}

bool means_near(const IntervalEstimate& est, double target, double n_se) {
  for (std::size_t s = 0; s < est.per_scenario_means.size(); ++s) {
    const double slack = n_se * est.per_scenario_se[s] + 1e-12 * std::max(1.0, std::abs(target));
    if (std::abs(est.per_scenario_means[s] - target) > slack) return false;
  }
  return true;
}

void add_report(ResultTable& table, const std::string& experiment, const std::string& quantity,
                const MartingaleReport& report) {
  table.add_check(experiment, quantity, report.max_residual, report.tolerance, report.pass);
}

}  // namespace

Strategy resolve_optimum(const ExperimentConfig& cfg) {
  const Strategy closed = model_optimal_strategy(cfg.market);
  Strategy base = cfg.strategies.optimal == "model"
                      ? closed
                      : strategy_from_label(cfg.strategies.optimal, cfg.market, closed);
  if (cfg.strategies.perturbation != 0.0) {
    return affine_strategy(base, 1.0, cfg.strategies.perturbation);
  }
  return base;
}

std::vector<Strategy> resolve_alternatives(const ExperimentConfig& cfg,
                                           const Strategy& optimum) {
  std::vector<Strategy> out;
  for (const auto& label : cfg.strategies.alternatives) {
    out.push_back(strategy_from_label(label, cfg.market, optimum));
  }
  return out;
}

CommandResult run_simulate(const ExperimentConfig& cfg) {
  CommandResult result{ResultTable(cfg.config_hash, cfg.master_seed), {}};
  ResultTable& table = result.table;
  const TimeGrid grid = make_grid(cfg.horizon_years, cfg.n_steps);
  const ScenarioFamily family(cfg.band, cfg.scenarios);
  if (family.empty()) throw ConfigError("scenarios.family", "empty scenario family");
  const Strategy optimum = resolve_optimum(cfg);
  const auto labels = family.labels();
  const QvBounds bounds = qv_bounds(grid, cfg.band);

  for (const auto& name : cfg.simulate.functionals) {
    const IntervalEstimate est = estimate_sublinear(make_functional(name, cfg, optimum), family,
                                                    grid, cfg.simulate.n_paths, cfg.master_seed);
    table.add("simulate", name + ".upper", est.upper, est.se_upper, Verdict::Info);
    table.add("simulate", name + ".lower", est.lower, est.se_lower, Verdict::Info);
    for (std::size_t s = 0; s < family.size(); ++s) {
      table.add("simulate", indexed(name + ".mean", "scenario", labels[s]),
                est.per_scenario_means[s], est.per_scenario_se[s], Verdict::Info);
    }
    if (name == "qv_T") {
      table.add_check("simulate", "qv_T.upper_equals_band", est.upper,
                      est.upper - bounds.upper.back(), est.upper == bounds.upper.back());
      table.add_check("simulate", "qv_T.lower_equals_band", est.lower,
                      est.lower - bounds.lower.back(), est.lower == bounds.lower.back());
    } else if (name == "B_T" || name == "Btilde_T") {
      table.add_check("simulate", name + ".centred", est.upper, est.se_upper,
                      means_near(est, 0.0, 4.0));
    } else if (name == "Z_T") {
      table.add_check("simulate", "Z_T.unit_mean", est.upper, est.se_upper,
                      means_near(est, 1.0, 4.0));
    }
  }

  std::vector<Strategy> wealth_strategies{optimum};
  for (const auto& label : cfg.simulate.wealth_strategies) {
    wealth_strategies.push_back(strategy_from_label(label, cfg.market, optimum));
  }

  std::string drivers =
      "scenario,path,step,t,gamma,rho,dW,B,Btilde,QV,QVtilde,XV,qv_lower,qv_upper\n";
  std::string wealth = "scenario,path,strategy,step,t,X,logX,Z\n";
  bool bounds_ok = true;
  std::size_t n_sample = 0;
  for (std::size_t s = 0; s < family.size(); ++s) {
    for (std::size_t j = 0; j < cfg.simulate.sample_paths; ++j) {
      const VolControl control = gen_control(family.members()[s], cfg.band, grid,
                                             control_seed(cfg.master_seed, s, j));
      const DriverPath d = simulate_driver(grid, control, path_seed(cfg.master_seed, j));
      bounds_ok = bounds_ok && check_qv_bounds(d, cfg.band);
      ++n_sample;
      const std::string head = csv_field(labels[s]) + ',' + std::to_string(j) + ',';
      for (std::size_t k = 0; k <= grid.n_steps(); ++k) {
        const bool step = k < grid.n_steps();
        drivers += head + std::to_string(k) + ',' + num(grid.t(k)) + ',' +
                   (step ? num(d.control.gamma[k]) : "") + ',' + (step ? num(d.rho[k]) : "") +
                   ',' + (step ? num(d.dW[k]) : "") + ',' + num(d.B[k]) + ',' +
                   num(d.Btilde[k]) + ',' + num(d.QV[k]) + ',' + num(d.QVtilde[k]) + ',' +
                   num(d.XV[k]) + ',' + num(bounds.lower[k]) + ',' + num(bounds.upper[k]) +
                   '\n';
      }
      const DensityPath z = simulate_density(cfg.market, d);
      for (const auto& pi : wealth_strategies) {
        const WealthPath w = wealth_for(cfg.market, pi, d, cfg.x0);
        for (std::size_t k = 0; k <= grid.n_steps(); ++k) {
          wealth += head + csv_field(pi.label()) + ',' + std::to_string(k) + ',' +
                    num(grid.t(k)) + ',' + num(w.X[k]) + ',' + num(w.logX[k]) + ',' +
                    num(z.Z[k]) + '\n';
        }
      }
    }
  }
  table.add_check("simulate", "qv_bounds.sample_paths", static_cast<double>(n_sample), 0.0,
                  bounds_ok);

  write_outputs(cfg, "simulate",
                {{"simulate_summary.csv", table.to_csv()},
                 {"driver_paths.csv", drivers},
                 {"wealth_paths.csv", wealth}},
                result);
  return result;
}

CommandResult run_verify_optimal(const ExperimentConfig& cfg) {
  CommandResult result{ResultTable(cfg.config_hash, cfg.master_seed), {}};
  ResultTable& table = result.table;
  const LatticeSpec spec = lattice_spec(cfg, cfg.lattice.n_steps);
  const double tol = lattice_tolerance(cfg.lattice.tolerance_k, spec);
  const Strategy optimum = resolve_optimum(cfg);

  // Exhaustive feedback search against the candidate optimum.
  const LatticeTree tree(spec.band, spec.horizon, spec.n_steps, {}, {}, spec.cap);
  const std::vector<double> pi_grid =
      fraction_grid(cfg.lattice.pi_grid_lo, cfg.lattice.pi_grid_hi, cfg.lattice.pi_grid_step);
  const BruteForceResult brute = brute_force_optimal(tree, cfg.market, pi_grid, cfg.x0);
  table.add("brute_force", "value", brute.value, 0.0, Verdict::Info);
  table.add_check("brute_force", "table_consistent", brute.table_consistent ? 1.0 : 0.0, 0.0,
                  brute.table_consistent);
  const std::vector<double> div = dividend_loadings(cfg.market, tree.grid());
  const double grid_slack = cfg.lattice.pi_grid_step * (1.0 + 1e-9);
  for (std::size_t k = 0; k < spec.n_steps; ++k) {
    for (std::size_t g = 0; g < tree.gammas().size(); ++g) {
      const double gamma = tree.gammas()[g];
      const StepContext ctx{k, tree.grid().t(k), tree.dt(), 1.0 / (gamma * gamma), div[k]};
      const double target = optimum(ctx);
      const double found = brute.table[k][g];
      table.add_check("brute_force",
                      "pi[step=" + std::to_string(k) + ",gamma=" + num(gamma) + "]", found,
                      std::abs(found - target), std::abs(found - target) <= grid_slack);
    }
  }

  // Lower-mode utility gap against alternatives and a constant-fraction sweep.
  std::vector<Strategy> alternatives = resolve_alternatives(cfg, optimum);
  for (double p : fraction_grid(cfg.lattice.pi_grid_lo, cfg.lattice.pi_grid_hi,
                                cfg.lattice.gap_constant_step)) {
    alternatives.push_back(constant_strategy(p));
  }
  const OptimalityTable gaps = optimality_gap(cfg.market, optimum, alternatives, spec, tol, cfg.x0);
  table.add("optimality_gap", "value[" + optimum.label() + "]", gaps.optimal_value, 0.0,
            Verdict::Info);
  for (const auto& row : gaps.rows) {
    table.add_check("optimality_gap", "gap[" + row.label + "]", row.value, row.gap, row.pass);
  }

  // Ratio martingale test for the configured alternatives.
  const SufficientConditionResult sc = sufficient_condition_check(
      cfg.market, optimum, resolve_alternatives(cfg, optimum), spec, tol);
  for (const auto& report : sc.reports) {
    add_report(table, "sufficient_condition", "ratio[" + report.label + "]", report);
  }

  add_report(table, "mx_identity", "M_over_X[" + optimum.label() + "]",
             mx_identity_check(cfg.market, optimum, spec, tol));

  write_outputs(cfg, "verify_optimal", {{"verify_optimal.csv", table.to_csv()}}, result);
  return result;
}

CommandResult run_statics(const ExperimentConfig& cfg) {
  CommandResult result{ResultTable(cfg.config_hash, cfg.master_seed), {}};
  ResultTable& table = result.table;
  const MarketParams base = cfg.market;
  const double rho = 1.0;

  auto sweep = [&](const std::string& name, const std::vector<double>& grid,
                   const std::function<double(double)>& pi_of, int expected_direction) {
    std::vector<double> values;
    for (double x : grid) {
      values.push_back(pi_of(x));
      table.add("statics", indexed("pi_star", name, num(x)), values.back(), 0.0, Verdict::Info);
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
      const double diff = values[i] - values[i - 1];
      const bool ok = expected_direction > 0 ? diff > 0.0 : diff < 0.0;
      table.add_check("statics",
                      "monotone[" + name + "=" + num(grid[i - 1]) + "->" + num(grid[i]) + "]",
                      diff, 0.0, ok);
    }
  };

  sweep("c", cfg.statics.c_grid, [&](double c) {
    MarketParams p = base;
    p.c = c;
    return optimal_log(p, rho);
  }, +1);
  if (base.mu > base.r) {
    sweep("rho", cfg.statics.rho_grid, [&](double r) { return optimal_log(base, r); }, +1);
  } else {
    table.add("statics", "rho_sweep_skipped", base.mu - base.r, 0.0, Verdict::Info);
  }
  if ((base.mu - base.r) * rho + base.c > 0.0) {
    sweep("sigma", cfg.statics.sigma_grid, [&](double s) {
      MarketParams p = base;
      p.sigma = s;
      return optimal_log(p, rho);
    }, -1);
  } else {
    table.add("statics", "sigma_sweep_skipped", (base.mu - base.r) * rho + base.c, 0.0,
              Verdict::Info);
  }

  // Stochastic-rate sign regimes.
  for (double sr : cfg.statics.sigma_r_grid) {
    MarketParams p = base;
    p.sigma_r = sr;
    if (sr == p.sigma) {
      table.add("statics_dothan", indexed("singular", "sigma_r", num(sr)), sr, 0.0,
                Verdict::Info);
      continue;
    }
    const PositionReport pos = position_sign(p, rho);
    const bool consistent = (pos.sign == Position::Long && pos.value > 0.0) ||
                            (pos.sign == Position::Short && pos.value < 0.0) ||
                            (pos.sign == Position::Zero && pos.value == 0.0);
    table.add_check("statics_dothan",
                    "pi_star[sigma_r=" + num(sr) + "," + pos.case_label + "]", pos.value,
                    pos.inner - sr, consistent);
  }

  write_outputs(cfg, "statics", {{"statics.csv", table.to_csv()}}, result);
  return result;
}

CommandResult run_lattice_check(const ExperimentConfig& cfg) {
  CommandResult result{ResultTable(cfg.config_hash, cfg.master_seed), {}};
  ResultTable& table = result.table;
  const std::string exp = "lattice_check";
  const std::size_t n = cfg.lattice.n_steps;
  const double T = cfg.horizon_years;
  const LatticeTree tree(cfg.band, T, n, {}, {}, cfg.lattice.cap);
  const double lo2T = cfg.band.lo() * cfg.band.lo() * T;
  const double hi2T = cfg.band.hi() * cfg.band.hi() * T;
  const double exact = 1e-12;

  auto upper = [&](const NodeFunction& f) { return g_expectation(tree, f, ValuationMode::Upper); };
  auto lower = [&](const NodeFunction& f) { return g_expectation(tree, f, ValuationMode::Lower); };
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };

  const NodeFunction B = [](const LatticeNode& x) { return x.B; };
  const NodeFunction QV = [](const LatticeNode& x) { return x.QV; };
  const NodeFunction B2 = [](const LatticeNode& x) { return x.B * x.B; };
  table.add_check(exp, "B_T.upper", upper(B), std::abs(upper(B)), std::abs(upper(B)) <= exact);
  table.add_check(exp, "B_T.lower", lower(B), std::abs(lower(B)), std::abs(lower(B)) <= exact);
  table.add_check(exp, "qv_T.upper", upper(QV), rel(upper(QV), hi2T), rel(upper(QV), hi2T) <= exact);
  table.add_check(exp, "qv_T.lower", lower(QV), rel(lower(QV), lo2T), rel(lower(QV), lo2T) <= exact);
  table.add_check(exp, "B_T_squared.upper", upper(B2), rel(upper(B2), hi2T),
                  rel(upper(B2), hi2T) <= exact);
  table.add_check(exp, "B_T_squared.lower", lower(B2), rel(lower(B2), lo2T),
                  rel(lower(B2), lo2T) <= exact);

  // Axioms on random terminal functionals of (B_T, QV_T).
  SplitMix64 rng(derive_seed(cfg.master_seed, 7, 0, 0));
  auto coef = [&](double scale) { return scale * (2.0 * rng.uniform() - 1.0); };
  auto random_functional = [&]() -> NodeFunction {
    const double a0 = coef(1.0), a1 = coef(1.0), a2 = coef(0.5), a3 = coef(1.0),
                 a4 = coef(3.0), a5 = coef(1.0), a6 = coef(1.0), k = coef(0.5);
    return [=](const LatticeNode& x) {
      return a0 + a1 * x.B + a2 * x.B * x.B + a3 * std::sin(a4 * x.B) + a5 * x.QV +
             a6 * std::max(x.B - k, 0.0);
    };
  };
  double worst_sub = 0.0, worst_hom = 0.0, worst_mono = 0.0, worst_const = 0.0,
         worst_conj = 0.0, worst_order = 0.0;
  for (std::size_t i = 0; i < cfg.lattice.random_functionals; ++i) {
    const NodeFunction X = random_functional();
    const NodeFunction Y = random_functional();
    const double lambda = 3.0 * rng.uniform();
    const double shift = coef(2.0);
    const double ux = upper(X), uy = upper(Y);
    const double scale = std::max({1.0, std::abs(ux), std::abs(uy)});
    const double uxy = upper([&](const LatticeNode& x) { return X(x) + Y(x); });
    worst_sub = std::max(worst_sub, (uxy - (ux + uy)) / scale);
    const double ul = upper([&](const LatticeNode& x) { return lambda * X(x); });
    worst_hom = std::max(worst_hom, std::abs(ul - lambda * ux) / scale);
    const double um = upper([&](const LatticeNode& x) { return X(x) + std::abs(Y(x)); });
    worst_mono = std::max(worst_mono, (ux - um) / scale);
    const double uc = upper([&](const LatticeNode& x) { return X(x) + shift; });
    worst_const = std::max(worst_const, std::abs(uc - (ux + shift)) / scale);
    const double lx = lower(X);
    const double neg = upper([&](const LatticeNode& x) { return -X(x); });
    worst_conj = std::max(worst_conj, std::abs(lx + neg));
    worst_order = std::max(worst_order, (lx - ux) / scale);
  }
  const double axiom_tol = 1e-12;
  const double count = static_cast<double>(cfg.lattice.random_functionals);
  table.add_check(exp, "axiom.subadditivity", count, worst_sub, worst_sub <= axiom_tol);
  table.add_check(exp, "axiom.positive_homogeneity", count, worst_hom, worst_hom <= axiom_tol);
  table.add_check(exp, "axiom.monotonicity", count, worst_mono, worst_mono <= axiom_tol);
  table.add_check(exp, "axiom.constant_preservation", count, worst_const,
                  worst_const <= axiom_tol);
  table.add_check(exp, "axiom.conjugacy", count, worst_conj, worst_conj == 0.0);
  table.add_check(exp, "axiom.lower_le_upper", count, worst_order, worst_order <= axiom_tol);

  // Degenerate band collapses the interval.
  {
    const VolatilityBand flat(cfg.band.lo(), cfg.band.lo());
    const LatticeTree classical(flat, T, n, {}, {}, cfg.lattice.cap);
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min<std::size_t>(cfg.lattice.random_functionals, 5); ++i) {
      const NodeFunction X = random_functional();
      worst = std::max(worst, std::abs(g_expectation(classical, X, ValuationMode::Upper) -
                                       g_expectation(classical, X, ValuationMode::Lower)));
    }
    table.add_check(exp, "degenerate_band.upper_equals_lower", 0.0, worst, worst == 0.0);
  }

  // B is a symmetric G-martingale; <B> - sigma_hi^2 t is not unless the band is degenerate.
  const MartingaleCheck bm = is_symmetric_g_martingale(tree, B, exact);
  table.add_check(exp, "symmetric_martingale[B]", bm.max_residual(), bm.tolerance, bm.pass);
  const double hi2 = cfg.band.hi() * cfg.band.hi();
  const MartingaleCheck qm = is_symmetric_g_martingale(
      tree, [hi2](const LatticeNode& x) { return x.QV - hi2 * x.t; }, exact);
  table.add_check(exp, "symmetric_martingale[QV-sigma_hi^2 t]", qm.max_residual(), qm.tolerance,
                  cfg.band.degenerate() ? qm.pass : !qm.pass);

  // Classical Merton limit on the degenerate unit band with c = 0.
  {
    MarketParams merton = cfg.market;
    merton.c = 0.0;
    merton.sigma_r.reset();
    merton.dividends.clear();
    merton.mu_schedule.reset();
    merton.sigma_schedule.reset();
    merton.c_schedule.reset();
    const LatticeTree unit(VolatilityBand(1.0, 1.0), T, n, {}, {}, cfg.lattice.cap);
    const std::vector<double> pi_grid = fraction_grid(
        cfg.lattice.pi_grid_lo, cfg.lattice.pi_grid_hi, cfg.lattice.pi_grid_step);
    const BruteForceResult bf = brute_force_optimal(unit, merton, pi_grid, cfg.x0);
    const double classical = (merton.mu - merton.r) / (merton.sigma * merton.sigma);
    double worst = 0.0;
    for (const auto& row : bf.table) worst = std::max(worst, std::abs(row[0] - classical));
    table.add_check(exp, "merton_limit.argmax", classical, worst,
                    worst <= cfg.lattice.pi_grid_step * (1.0 + 1e-9));
  }

  write_outputs(cfg, "lattice_check", {{"lattice_check.csv", table.to_csv()}}, result);
  return result;
}

CommandResult run_sufficient_condition(const ExperimentConfig& cfg) {
  CommandResult result{ResultTable(cfg.config_hash, cfg.master_seed), {}};
  ResultTable& table = result.table;
  const Strategy optimum = resolve_optimum(cfg);
  const std::vector<Strategy> alternatives = resolve_alternatives(cfg, optimum);

  std::vector<std::vector<double>> residuals(alternatives.size());
  std::vector<double> mx;
  for (std::size_t n : cfg.lattice.sweep) {
    const LatticeSpec spec = lattice_spec(cfg, n);
    const double tol = lattice_tolerance(cfg.lattice.tolerance_k, spec);
    const std::string at = ",n=" + std::to_string(n) + "]";
    const SufficientConditionResult sc =
        sufficient_condition_check(cfg.market, optimum, alternatives, spec, tol);
    for (std::size_t i = 0; i < sc.reports.size(); ++i) {
      add_report(table, "sufficient_condition", "ratio[" + sc.reports[i].label + at,
                 sc.reports[i]);
      residuals[i].push_back(sc.reports[i].max_residual);
    }
    const MartingaleReport m = mx_identity_check(cfg.market, optimum, spec, tol);
    add_report(table, "mx_identity", "M_over_X[" + optimum.label() + at, m);
    mx.push_back(m.max_residual);
  }

  // Discretisation residuals must shrink as the lattice is refined.
  auto trend = [&](const std::string& quantity, const std::vector<double>& r) {
    if (r.size() < 2) return;
    bool decreasing = true;
    for (std::size_t i = 1; i < r.size(); ++i) {
      decreasing = decreasing && (r[i] < r[i - 1] || r[i] <= 1e-14);
    }
    table.add_check("residual_trend", quantity, r.back(), r.front(), decreasing);
  };
  for (std::size_t i = 0; i < alternatives.size(); ++i) {
    trend("ratio[" + alternatives[i].label() + "]", residuals[i]);
  }
  trend("M_over_X[" + optimum.label() + "]", mx);

  write_outputs(cfg, "sufficient_condition",
                {{"sufficient_condition.csv", table.to_csv()}}, result);
  return result;
}

}  // namespace gmerton::cli

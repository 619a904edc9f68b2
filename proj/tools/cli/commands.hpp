#pragma once

#include <string>
#include <vector>

#include "cli/config.hpp"
#include "cli/result_table.hpp"
#include "gmerton/strategy.hpp"

namespace gmerton::cli {

inline constexpr const char* kVersion = "0.1.0";

struct CommandResult {
  ResultTable table;
  std::vector<std::string> files;  // names written under cfg.output_dir
};

/// Monte Carlo interval estimates for the configured functionals, sample
/// driver paths and wealth paths. Files: simulate_summary.csv,
/// driver_paths.csv, wealth_paths.csv, simulate_manifest.txt.
CommandResult run_simulate(const ExperimentConfig& cfg);

/// Lattice brute-force search, optimality gaps, sufficient-condition and
/// auxiliary-identity checks at lattice.n_steps. Files: verify_optimal.csv,
/// verify_optimal_manifest.txt.
CommandResult run_verify_optimal(const ExperimentConfig& cfg);

/// Closed-form optimum over the statics grids with monotonicity verdicts and
/// stochastic-rate sign regimes. Files: statics.csv, statics_manifest.txt.
CommandResult run_statics(const ExperimentConfig& cfg);

/// Sublinear-expectation property suite on the lattice. Files:
/// lattice_check.csv, lattice_check_manifest.txt.
CommandResult run_lattice_check(const ExperimentConfig& cfg);

/// Ratio martingale checks over lattice.sweep with residual-trend verdicts.
/// Files: sufficient_condition.csv, sufficient_condition_manifest.txt.
CommandResult run_sufficient_condition(const ExperimentConfig& cfg);

/// The configured optimum (closed form or label) plus the perturbation.
Strategy resolve_optimum(const ExperimentConfig& cfg);

/// Configured alternatives; multiple(k)/shifted(s) refer to `optimum`.
std::vector<Strategy> resolve_alternatives(const ExperimentConfig& cfg, const Strategy& optimum);

}  // namespace gmerton::cli

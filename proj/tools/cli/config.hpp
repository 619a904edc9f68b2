#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmerton/lattice.hpp"
#include "gmerton/market_params.hpp"
#include "gmerton/scenario.hpp"

namespace gmerton::cli {

/// Invalid configuration; `field` is the section.key path at fault.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Unreadable input or unwritable output.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimulateConfig {
  std::size_t n_paths = 1000;
  std::vector<std::string> functionals{"B_T", "qv_T"};
  std::vector<std::string> wealth_strategies;  // written to wealth_paths.csv
  std::size_t sample_paths = 3;
};

struct LatticeConfig {
  std::size_t n_steps = 8;
  std::vector<std::size_t> sweep{4, 8, 12};
  std::size_t cap = kDefaultLatticeCap;
  double tolerance_k = 0.05;
  double pi_grid_lo = -1.0;
  double pi_grid_hi = 8.0;
  double pi_grid_step = 0.05;
  /// Spacing of the constant strategies compared in the optimality gap.
  double gap_constant_step = 0.25;
  std::size_t random_functionals = 20;
};

struct StrategiesConfig {
  std::string optimal = "model";  // "model" resolves to the model's closed form
  double perturbation = 0.0;      // added to the optimum before verification
  std::vector<std::string> alternatives{"zero", "constant(1)", "multiple(2)"};
};

struct StaticsConfig {
  std::vector<double> c_grid{0.0, 0.01, 0.02};
  std::vector<double> rho_grid{0.5, 1.0, 2.0, 4.0};
  std::vector<double> sigma_grid{0.2, 0.3, 0.4};
  std::vector<double> sigma_r_grid{0.1, 0.2, 0.3, 0.35, 0.4};
};

struct ExperimentConfig {
  MarketParams market;
  double x0 = 1.0;
  VolatilityBand band{0.5, 1.5};
  double horizon_years = 1.0;
  std::size_t n_steps = 50;
  std::vector<ControlSpec> scenarios;
  std::uint64_t master_seed = 20240101;
  SimulateConfig simulate;
  LatticeConfig lattice;
  StrategiesConfig strategies;
  StaticsConfig statics;
  std::filesystem::path output_dir = "out";
  /// FNV-1a 64 of the config text plus applied overrides, as 16 hex digits.
  std::string config_hash;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> lattice_steps;
  std::optional<std::filesystem::path> output_dir;
};

/// Parses sectioned key=value text. Unknown keys, malformed values and
/// constraint violations raise ConfigError before anything runs.
ExperimentConfig parse_config(const std::string& text, const Overrides& overrides = {});

/// Reads and parses a file; IoError if it cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const Overrides& overrides = {});

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace gmerton::cli

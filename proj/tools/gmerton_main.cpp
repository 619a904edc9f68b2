#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "gmerton/errors.hpp"

namespace {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kConfigError = 2, kIoError = 3 };

using Command = std::function<gmerton::cli::CommandResult(const gmerton::cli::ExperimentConfig&)>;

}  // namespace

int main(int argc, char** argv) {
  using namespace gmerton::cli;

  CLI::App app{"Log-utility portfolio experiments under volatility uncertainty"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;

  const std::map<std::string, std::pair<std::string, Command>> commands{
      {"simulate", {"Monte Carlo interval estimates and sample paths", run_simulate}},
      {"verify-optimal", {"Lattice search and optimality checks", run_verify_optimal}},
      {"statics", {"Comparative statics of the closed-form optimum", run_statics}},
      {"lattice-check", {"Sublinear expectation property suite", run_lattice_check}},
      {"sufficient-condition",
       {"Ratio martingale residuals over the lattice sweep", run_sufficient_condition}},
  };
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "Experiment configuration file")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides run.output_dir)");
    sub->add_option("--seed", seed, "Master seed (overrides run.master_seed)");
    sub->add_option("--steps", steps, "Lattice depth (overrides lattice.n_steps)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const Command& run = commands.at(chosen->get_name()).second;
  try {
    Overrides overrides;
    overrides.seed = seed;
    overrides.lattice_steps = steps;
    if (out_dir) overrides.output_dir = std::filesystem::path(*out_dir);
    const ExperimentConfig cfg = load_config(config_path, overrides);
    const CommandResult result = run(cfg);
    for (const auto& file : result.files) {
      std::cout << (cfg.output_dir / file).string() << '\n';
    }
    const std::size_t failures = result.table.failures();
    std::cout << chosen->get_name() << ": " << result.table.rows().size() << " rows, "
              << failures << " failed\n";
    return failures == 0 ? kOk : kVerificationFailed;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIoError;
  } catch (const gmerton::ResourceLimit& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kIoError;
  } catch (const gmerton::SingularParameters& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
}

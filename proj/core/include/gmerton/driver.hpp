#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gmerton/scenario.hpp"

namespace gmerton {

/// One sampled trajectory of the coupled driver on a grid.
///
/// B = int gamma dW and Btilde = int gamma^{-1} dW share the Gaussian
/// increments dW. Quadratic and cross variations are the analytic integrals
/// int gamma^2 ds, int gamma^{-2} ds and t, accumulated step by step.
struct DriverPath {
  TimeGrid grid;
  VolControl control;
  std::vector<double> dW;      // n_steps
  std::vector<double> B;       // n_steps + 1
  std::vector<double> Btilde;  // n_steps + 1
  std::vector<double> QV;      // <B>
  std::vector<double> QVtilde; // <Btilde>
  std::vector<double> XV;      // <B, Btilde>
  std::vector<double> rho;     // n_steps, 1 / gamma^2

  std::size_t n_steps() const { return dW.size(); }
  double terminal_B() const { return B.back(); }
  double terminal_QV() const { return QV.back(); }
};

/// Builds the path from explicit Gaussian increments (dW.size() must equal
/// the number of steps of control.grid).
DriverPath driver_from_increments(const VolControl& control, std::span<const double> dW);

/// Samples dW[k] ~ N(0, dt[k]) from NormalStream(seed) and builds the path.
/// Throws std::invalid_argument if grid differs from control.grid.
DriverPath simulate_driver(const TimeGrid& grid, const VolControl& control,
                           std::uint64_t seed);

/// Band-implied bounds on <B>: lower[k] = sum_{j<k} sigma_lo^2 dt[j] and the
/// same for sigma_hi, accumulated in the same order as DriverPath::QV so the
/// comparison needs no tolerance.
struct QvBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};
QvBounds qv_bounds(const TimeGrid& grid, const VolatilityBand& band);

/// True iff sigma_lo^2 t[k] <= QV[k] <= sigma_hi^2 t[k] at every grid point.
bool check_qv_bounds(const DriverPath& path, const VolatilityBand& band);

/// Upper (sublinear) and lower (conjugate) expectation estimates over a
/// scenario family. `upper` is the max of the per-scenario Monte Carlo means
/// and is biased upward as an estimate of that max; it is also a lower bound
/// on the true sublinear expectation since the family is finite.
struct IntervalEstimate {
  double upper = 0.0;
  double lower = 0.0;
  double se_upper = 0.0;  // standard error of the arg-max scenario mean
  double se_lower = 0.0;  // standard error of the arg-min scenario mean
  std::size_t argmax = 0;
  std::size_t argmin = 0;
  std::vector<double> per_scenario_means;
  std::vector<double> per_scenario_se;
};

using DriverFunctional = std::function<double(const DriverPath&)>;

/// Monte Carlo over `n_paths` paths per scenario with common random numbers:
/// path j uses the dW stream derive_seed(master, 0, j) in every scenario, and
/// scenario s draws its control from derive_seed(master, 1, s, j). Means use
/// Welford updates in path order, so identical samples give an exact mean
/// and zero standard error.
IntervalEstimate estimate_sublinear(const DriverFunctional& functional,
                                    const ScenarioFamily& family, const TimeGrid& grid,
                                    std::size_t n_paths, std::uint64_t master_seed);

/// Seed of the Gaussian stream used for path `path_index`.
std::uint64_t path_seed(std::uint64_t master_seed, std::size_t path_index);
/// Seed of the control draw for (scenario, path).
std::uint64_t control_seed(std::uint64_t master_seed, std::size_t scenario_index,
                           std::size_t path_index);

}  // namespace gmerton

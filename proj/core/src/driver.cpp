#include "gmerton/driver.hpp"

#include <cmath>
#include <stdexcept>

#include "gmerton/rng.hpp"

namespace gmerton {

DriverPath driver_from_increments(const VolControl& control, std::span<const double> dW) {
  const TimeGrid& grid = control.grid;
  const std::size_t n = grid.n_steps();
  if (dW.size() != n || control.gamma.size() != n) {
    throw std::invalid_argument("increment count does not match the grid");
  }
  DriverPath path;
  path.grid = grid;
  path.control = control;
  path.dW.assign(dW.begin(), dW.end());
  path.B.assign(n + 1, 0.0);
  path.Btilde.assign(n + 1, 0.0);
  path.QV.assign(n + 1, 0.0);
  path.QVtilde.assign(n + 1, 0.0);
  path.XV.assign(n + 1, 0.0);
  path.rho.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double g = control.gamma[k];
    const double g2 = g * g;
    const double dt = grid.dt(k);
    path.B[k + 1] = path.B[k] + g * dW[k];
    path.Btilde[k + 1] = path.Btilde[k] + dW[k] / g;
    path.QV[k + 1] = path.QV[k] + g2 * dt;
    path.QVtilde[k + 1] = path.QVtilde[k] + dt / g2;
    path.XV[k + 1] = path.XV[k] + dt;
    path.rho[k] = 1.0 / g2;
  }
  return path;
}

DriverPath simulate_driver(const TimeGrid& grid, const VolControl& control,
                           std::uint64_t seed) {
  if (!(grid == control.grid)) {
    throw std::invalid_argument("control was generated on a different grid");
  }
  NormalStream normals(seed);
  std::vector<double> dW(grid.n_steps());
  for (std::size_t k = 0; k < dW.size(); ++k) {
    dW[k] = std::sqrt(grid.dt(k)) * normals.next();
  }
  return driver_from_increments(control, dW);
}

QvBounds qv_bounds(const TimeGrid& grid, const VolatilityBand& band) {
  const std::size_t n = grid.n_steps();
  QvBounds bounds{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0)};
  const double lo2 = band.lo() * band.lo();
  const double hi2 = band.hi() * band.hi();
  for (std::size_t k = 0; k < n; ++k) {
    bounds.lower[k + 1] = bounds.lower[k] + lo2 * grid.dt(k);
    bounds.upper[k + 1] = bounds.upper[k] + hi2 * grid.dt(k);
  }
  return bounds;
}

bool check_qv_bounds(const DriverPath& path, const VolatilityBand& band) {
  const QvBounds bounds = qv_bounds(path.grid, band);
  if (path.QV.size() != bounds.lower.size()) return false;
  for (std::size_t k = 0; k < path.QV.size(); ++k) {
    if (path.QV[k] < bounds.lower[k] || path.QV[k] > bounds.upper[k]) return false;
  }
  return true;
}

std::uint64_t path_seed(std::uint64_t master_seed, std::size_t path_index) {
  return derive_seed(master_seed, 0, path_index);
}

std::uint64_t control_seed(std::uint64_t master_seed, std::size_t scenario_index,
                           std::size_t path_index) {
  return derive_seed(master_seed, 1, scenario_index, path_index);
}

IntervalEstimate estimate_sublinear(const DriverFunctional& functional,
                                    const ScenarioFamily& family, const TimeGrid& grid,
                                    std::size_t n_paths, std::uint64_t master_seed) {
  if (family.empty()) {
    throw std::invalid_argument("scenario family is empty");
  }
  if (n_paths < 2) {
    throw std::invalid_argument("estimate_sublinear needs at least two paths");
  }
  IntervalEstimate est;
  const std::size_t n_scen = family.size();
  est.per_scenario_means.resize(n_scen);
  est.per_scenario_se.resize(n_scen);

  for (std::size_t s = 0; s < n_scen; ++s) {
    const ControlSpec& spec = family.members()[s];
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t j = 0; j < n_paths; ++j) {
      const VolControl control =
          gen_control(spec, family.band(), grid, control_seed(master_seed, s, j));
      const DriverPath path = simulate_driver(grid, control, path_seed(master_seed, j));
      const double x = functional(path);
      const double delta = x - mean;
      mean += delta / static_cast<double>(j + 1);
      m2 += delta * (x - mean);
    }
    const double var = m2 / static_cast<double>(n_paths - 1);
    est.per_scenario_means[s] = mean;
    est.per_scenario_se[s] = std::sqrt(var / static_cast<double>(n_paths));
  }

  for (std::size_t s = 1; s < n_scen; ++s) {
    if (est.per_scenario_means[s] > est.per_scenario_means[est.argmax]) est.argmax = s;
    if (est.per_scenario_means[s] < est.per_scenario_means[est.argmin]) est.argmin = s;
  }
  est.upper = est.per_scenario_means[est.argmax];
  est.lower = est.per_scenario_means[est.argmin];
  est.se_upper = est.per_scenario_se[est.argmax];
  est.se_lower = est.per_scenario_se[est.argmin];
  return est;
}

}  // namespace gmerton

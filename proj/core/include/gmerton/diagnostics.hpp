#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmerton/driver.hpp"
#include "gmerton/lattice.hpp"
#include "gmerton/market_params.hpp"
#include "gmerton/strategy.hpp"

namespace gmerton {

/// Density process with Z[0] = 1.
struct DensityPath {
  enum class Model { ConstantRate, Dothan };

  TimeGrid grid;
  std::vector<double> Z;
  std::vector<double> logZ;
  Model model = Model::ConstantRate;
};

/// Loadings (alpha, beta) of dZ = -alpha Z dB - beta Z dBtilde.
/// Constant rate: (c / sigma, (mu - r) / sigma). Dothan:
/// ((c + sigma_r (sigma_r - sigma)) / (sigma - sigma_r), (mu - r) / (sigma - sigma_r)).
struct DensityLoadings {
  double alpha = 0.0;
  double beta = 0.0;
};
DensityLoadings density_loadings(const MarketParams& params);

/// Exact log scheme:
/// dlog Z = -alpha dB - beta dBtilde - alpha^2 d<B>/2 - beta^2 d<Btilde>/2
///          - alpha beta d<B, Btilde>.
/// Throws SingularParameters for Dothan with sigma == sigma_r.
DensityPath simulate_density(const MarketParams& params, const DriverPath& driver);

/// Solution of dM = a M dt + b M d<B>, M_T = 1 along a driver path, with
/// a = pi (mu - r) and b = -pi (pi sigma^2 - c) (constant rate) or
/// b = -pi ((sigma_r + pi (sigma - sigma_r)) (sigma - sigma_r) - c) (Dothan).
struct AuxiliaryPath {
  TimeGrid grid;
  std::vector<double> M;  // n + 1, M.back() == 1
  std::vector<double> a;  // n, per step
  std::vector<double> b;  // n, per step
};
AuxiliaryPath auxiliary_M(const MarketParams& params, const Strategy& pi_star,
                          const DriverPath& driver);

/// Outcome of one lattice martingale test.
struct MartingaleReport {
  std::string label;
  double max_residual_upper = 0.0;
  double max_residual_lower = 0.0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::size_t worst_depth = 0;
  std::uint64_t worst_index = 0;
  std::size_t n_steps = 0;
};

/// Tests whether X^pi / X^pi_star is a symmetric G-martingale on the
/// lattice. Residuals are relative, |V / R - 1|, where R is the ratio at the
/// node and V its upper or lower conditional valuation.
MartingaleReport ratio_symmetric_martingale_check(const MarketParams& params,
                                                  const Strategy& pi, const Strategy& pi_star,
                                                  const LatticeSpec& lattice, double tol);

/// Ratio check for each alternative against pi_star. The process tested is
/// U'(X_T^{pi*}) X_T^{pi} for log utility, i.e. the wealth ratio normalised
/// to 1 at the root.
struct SufficientConditionResult {
  std::vector<MartingaleReport> reports;
  bool pass = false;
};
SufficientConditionResult sufficient_condition_check(const MarketParams& params,
                                                     const Strategy& pi_star,
                                                     const std::vector<Strategy>& alternatives,
                                                     const LatticeSpec& lattice, double tol);

struct GapRow {
  std::string label;
  double value = 0.0;  // lower-mode lattice value of log X_T
  double gap = 0.0;    // value(pi_star) - value
  bool pass = false;   // gap >= -tol
};

struct OptimalityTable {
  double optimal_value = 0.0;
  std::vector<GapRow> rows;
  bool pass = false;
};

/// Lower-mode lattice values of log X_T for pi_star and every alternative.
OptimalityTable optimality_gap(const MarketParams& params, const Strategy& pi_star,
                               const std::vector<Strategy>& alternatives,
                               const LatticeSpec& lattice, double tol, double x0 = 1.0);

/// Compares M_t / X_t^{pi*} with the lower conditional valuation of
/// 1 / X_T^{pi*} at every node (relative residual). On the lattice M follows
/// the minimising volatility branch of that valuation; sign branches are
/// averaged.
MartingaleReport mx_identity_check(const MarketParams& params, const Strategy& pi_star,
                                   const LatticeSpec& lattice, double tol);

/// Lattice tolerance K * dt.
double lattice_tolerance(double k, const LatticeSpec& lattice);

/// One row per check: label, mode, max residual, worst node, verdict.
struct ReportRecord {
  std::string label;
  std::string mode;
  double max_residual = 0.0;
  std::string node_id;  // "depth:index"
  std::string verdict;  // "pass" | "fail"
};
std::vector<ReportRecord> to_records(const MartingaleReport& report);

}  // namespace gmerton

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gmerton/errors.hpp"
#include "gmerton/market_params.hpp"
#include "gmerton/scenario.hpp"
#include "gmerton/strategy.hpp"

namespace gmerton {

inline constexpr std::size_t kDefaultLatticeCap = 12;

/// One branch of the adversarial tree: the volatility choice gamma and the
/// sign of the two-point increment dB = +-gamma sqrt(dt), dQV = gamma^2 dt.
struct LatticeTransition {
  std::size_t step = 0;
  double t = 0.0;
  double dt = 0.0;
  double gamma = 0.0;
  int sign = 1;
  double dB = 0.0;
  double dQV = 0.0;
};

/// View of one node during a traversal. `index` enumerates the nodes of a
/// depth in child order (gamma_lo+, gamma_lo-, gamma_hi+, gamma_hi-).
struct LatticeNode {
  std::size_t depth = 0;
  std::uint64_t index = 0;
  double t = 0.0;
  double B = 0.0;
  double QV = 0.0;
  std::span<const double> user;
};

/// Propagates the caller's state along a branch.
using StateUpdater = std::function<void(const LatticeTransition&, std::span<const double> parent,
                                        std::span<double> child)>;

/// Non-recombining adversarial binomial tree on a uniform grid. Each node has
/// two volatility choices {sigma_lo, sigma_hi} (one when the band is
/// degenerate) and two signs, so depth k holds branching()^k nodes.
///
/// Nodes are generated on the fly by depth-first traversal; memory use is
/// O(n_steps * state size) regardless of the node count. Only
/// conditional_valuation stores a per-node table.
class LatticeTree {
 public:
  /// Throws ResourceLimit when n_steps > cap and std::invalid_argument when
  /// n_steps < 1 or horizon <= 0.
  LatticeTree(VolatilityBand band, double horizon, std::size_t n_steps,
              StateUpdater updater = {}, std::vector<double> initial_state = {},
              std::size_t cap = kDefaultLatticeCap);

  const VolatilityBand& band() const { return band_; }
  const TimeGrid& grid() const { return grid_; }
  std::size_t n_steps() const { return grid_.n_steps(); }
  double horizon() const { return grid_.horizon(); }
  double dt() const { return grid_.dt(0); }
  std::size_t state_size() const { return initial_state_.size(); }
  std::span<const double> gammas() const { return {gammas_.data(), n_gammas_}; }
  std::size_t branching() const { return 2 * n_gammas_; }
  std::uint64_t node_count(std::size_t depth) const;
  std::uint64_t total_nodes() const;

  /// Transition to child `child` (0 <= child < branching()) from a node at `depth`.
  LatticeTransition transition(std::size_t depth, std::size_t child) const;

  /// Bottom-up reduction. `leaf(node)` values the leaves; `combine(node,
  /// children)` values an internal node from its children's values in child
  /// order. Returns the root value.
  template <class Value, class LeafFn, class CombineFn>
  Value reduce(LeafFn&& leaf, CombineFn&& combine) const {
    std::vector<double> scratch((n_steps() + 1) * state_size());
    std::copy(initial_state_.begin(), initial_state_.end(), scratch.begin());
    return reduce_at<Value>(0, 0, 0.0, 0.0, scratch, leaf, combine);
  }

  /// Pre-order visit of every node.
  void for_each_node(const std::function<void(const LatticeNode&)>& visit) const;

 private:
  template <class Value, class LeafFn, class CombineFn>
  Value reduce_at(std::size_t depth, std::uint64_t index, double B, double QV,
                  std::vector<double>& scratch, LeafFn& leaf, CombineFn& combine) const {
    const std::size_t dim = state_size();
    const LatticeNode node{depth, index, grid_.t(depth), B, QV,
                           std::span<const double>(scratch.data() + depth * dim, dim)};
    if (depth == n_steps()) return leaf(node);
    std::array<Value, 4> children{};
    const std::size_t b = branching();
    for (std::size_t child = 0; child < b; ++child) {
      const LatticeTransition tr = transition(depth, child);
      if (dim > 0) {
        updater_(tr, std::span<const double>(scratch.data() + depth * dim, dim),
                 std::span<double>(scratch.data() + (depth + 1) * dim, dim));
      }
      children[child] = reduce_at<Value>(depth + 1, index * b + child, B + tr.dB,
                                         QV + tr.dQV, scratch, leaf, combine);
    }
    return combine(node, std::span<const Value>(children.data(), b));
  }

  void visit_at(std::size_t depth, std::uint64_t index, double B, double QV,
                std::vector<double>& scratch,
                const std::function<void(const LatticeNode&)>& visit) const;

  VolatilityBand band_;
  TimeGrid grid_;
  StateUpdater updater_;
  std::vector<double> initial_state_;
  std::array<double, 2> gammas_{};
  std::size_t n_gammas_ = 0;
  double sqrt_dt_ = 0.0;
};

enum class ValuationMode { Upper, Lower };

const char* to_string(ValuationMode mode);

using NodeFunction = std::function<double(const LatticeNode&)>;

/// Root value of the backward induction
/// V(node) = max_gamma (Upper) or min_gamma (Lower) of (V(gamma,+) + V(gamma,-)) / 2.
/// Equal gamma values resolve to sigma_hi.
double g_expectation(const LatticeTree& tree, const NodeFunction& terminal,
                     ValuationMode mode);

/// Per-node values of the same backward induction, indexed [depth][index].
struct NodeValuation {
  ValuationMode mode = ValuationMode::Upper;
  std::vector<std::vector<double>> values;
  /// Minimising/maximising gamma choice per internal node (index into
  /// tree.gammas()).
  std::vector<std::vector<std::uint8_t>> choice;

  double root() const { return values.front().front(); }
  double at(std::size_t depth, std::uint64_t index) const { return values[depth][index]; }
};

/// Throws ResourceLimit if the table would exceed `max_nodes` entries.
NodeValuation conditional_valuation(const LatticeTree& tree, const NodeFunction& terminal,
                                    ValuationMode mode,
                                    std::uint64_t max_nodes = 1ULL << 25);

enum class ResidualKind {
  Absolute,  // |V - M|
  Relative   // |V / M - 1|, for strictly positive processes
};

struct MartingaleCheck {
  bool pass = false;
  double tolerance = 0.0;
  double max_residual_upper = 0.0;
  double max_residual_lower = 0.0;
  std::size_t worst_depth = 0;
  std::uint64_t worst_index = 0;

  double max_residual() const { return std::max(max_residual_upper, max_residual_lower); }
};

/// Compares the upper and lower conditional valuations of M_T with M at
/// every node. Passes iff both residuals are within `tol` everywhere.
MartingaleCheck is_symmetric_g_martingale(const LatticeTree& tree, const NodeFunction& process,
                                          double tol,
                                          ResidualKind kind = ResidualKind::Absolute);

enum class Utility { Log };

/// Result of the exhaustive feedback search. table[step][g] is the chosen
/// fraction on branch gammas()[g] of that step.
struct BruteForceResult {
  double value = 0.0;  // lower-mode value of log X_T including log x0
  std::vector<std::array<double, 2>> table;
  /// False if two nodes of the same depth chose different fractions for the
  /// same gamma; the table then holds the first node's choice.
  bool table_consistent = true;
};

/// Backward search of max over feedback fractions pi(step, gamma) drawn from
/// `pi_grid` of the lower valuation of log wealth (discounted wealth, or the
/// Dothan wealth when params.sigma_r is set). Log utility is cash-additive,
/// so each node maximises the expected one-step log increment per gamma and
/// then minimises over gamma. Ties in pi go to the smaller |pi|.
/// Throws std::invalid_argument for an empty grid.
BruteForceResult brute_force_optimal(const LatticeTree& tree, const MarketParams& params,
                                     std::span<const double> pi_grid, double x0 = 1.0,
                                     Utility utility = Utility::Log);

/// Uniform grid lo, lo + step, ..., up to hi (inclusive within step/2).
std::vector<double> fraction_grid(double lo, double hi, double step);

/// Lattice geometry shared by the diagnostics.
struct LatticeSpec {
  VolatilityBand band{1.0, 1.0};
  double horizon = 1.0;
  std::size_t n_steps = 8;
  std::size_t cap = kDefaultLatticeCap;

  double dt() const { return horizon / static_cast<double>(n_steps); }
};

/// Tree whose user state is log wealth (log x0 at the root) for each
/// strategy in order, using the constant-rate or Dothan increments per
/// params.
LatticeTree make_wealth_tree(const LatticeSpec& spec, const MarketParams& params,
                             std::vector<Strategy> strategies, double x0 = 1.0);

}  // namespace gmerton

#include "gmerton/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gmerton/market.hpp"

namespace gmerton {

LatticeTree::LatticeTree(VolatilityBand band, double horizon, std::size_t n_steps,
                         StateUpdater updater, std::vector<double> initial_state,
                         std::size_t cap)
    : band_(band), updater_(std::move(updater)), initial_state_(std::move(initial_state)) {
  if (n_steps > cap) {
    throw ResourceLimit("lattice depth " + std::to_string(n_steps) + " exceeds the cap of " +
                        std::to_string(cap));
  }
  grid_ = TimeGrid::uniform(horizon, n_steps);
  if (!initial_state_.empty() && !updater_) {
    throw std::invalid_argument("lattice user state needs a state updater");
  }
  gammas_[0] = band.lo();
  gammas_[1] = band.hi();
  n_gammas_ = band.degenerate() ? 1 : 2;
  sqrt_dt_ = std::sqrt(grid_.dt(0));
}

std::uint64_t LatticeTree::node_count(std::size_t depth) const {
  std::uint64_t count = 1;
  for (std::size_t k = 0; k < depth; ++k) count *= branching();
  return count;
}

std::uint64_t LatticeTree::total_nodes() const {
  std::uint64_t total = 0;
  for (std::size_t k = 0; k <= n_steps(); ++k) total += node_count(k);
  return total;
}

LatticeTransition LatticeTree::transition(std::size_t depth, std::size_t child) const {
  const double gamma = gammas_[child / 2];
  const int sign = (child % 2 == 0) ? 1 : -1;
  const double dt = grid_.dt(depth);
  return LatticeTransition{depth, grid_.t(depth), dt, gamma, sign,
                           sign * gamma * sqrt_dt_, gamma * gamma * dt};
}

void LatticeTree::for_each_node(const std::function<void(const LatticeNode&)>& visit) const {
  std::vector<double> scratch((n_steps() + 1) * state_size());
  std::copy(initial_state_.begin(), initial_state_.end(), scratch.begin());
  visit_at(0, 0, 0.0, 0.0, scratch, visit);
}

void LatticeTree::visit_at(std::size_t depth, std::uint64_t index, double B, double QV,
                           std::vector<double>& scratch,
                           const std::function<void(const LatticeNode&)>& visit) const {
  const std::size_t dim = state_size();
  visit(LatticeNode{depth, index, grid_.t(depth), B, QV,
                    std::span<const double>(scratch.data() + depth * dim, dim)});
  if (depth == n_steps()) return;
  for (std::size_t child = 0; child < branching(); ++child) {
    const LatticeTransition tr = transition(depth, child);
    if (dim > 0) {
      updater_(tr, std::span<const double>(scratch.data() + depth * dim, dim),
               std::span<double>(scratch.data() + (depth + 1) * dim, dim));
    }
    visit_at(depth + 1, index * branching() + child, B + tr.dB, QV + tr.dQV, scratch, visit);
  }
}

const char* to_string(ValuationMode mode) {
  return mode == ValuationMode::Upper ? "upper" : "lower";
}

namespace {

// Picks the extreme of the per-gamma averages; ties go to the higher gamma.
struct Pick {
  double value;
  std::uint8_t choice;
};

Pick pick_gamma(std::span<const double> children, ValuationMode mode) {
  Pick best{0.5 * (children[0] + children[1]), 0};
  for (std::size_t g = 1; g * 2 < children.size(); ++g) {
    const double v = 0.5 * (children[2 * g] + children[2 * g + 1]);
    const bool better = mode == ValuationMode::Upper ? v >= best.value : v <= best.value;
    if (better) best = {v, static_cast<std::uint8_t>(g)};
  }
  return best;
}

}  // namespace

double g_expectation(const LatticeTree& tree, const NodeFunction& terminal,
                     ValuationMode mode) {
  return tree.reduce<double>(
      [&](const LatticeNode& node) { return terminal(node); },
      [&](const LatticeNode&, std::span<const double> children) {
        return pick_gamma(children, mode).value;
      });
}

NodeValuation conditional_valuation(const LatticeTree& tree, const NodeFunction& terminal,
                                    ValuationMode mode, std::uint64_t max_nodes) {
  if (tree.total_nodes() > max_nodes) {
    throw ResourceLimit("valuation table of " + std::to_string(tree.total_nodes()) +
                        " nodes exceeds the limit");
  }
  NodeValuation out;
  out.mode = mode;
  out.values.resize(tree.n_steps() + 1);
  out.choice.resize(tree.n_steps());
  for (std::size_t k = 0; k <= tree.n_steps(); ++k) {
    out.values[k].resize(tree.node_count(k));
    if (k < tree.n_steps()) out.choice[k].resize(tree.node_count(k));
  }
  tree.reduce<double>(
      [&](const LatticeNode& node) {
        const double v = terminal(node);
        out.values[node.depth][node.index] = v;
        return v;
      },
      [&](const LatticeNode& node, std::span<const double> children) {
        const Pick p = pick_gamma(children, mode);
        out.values[node.depth][node.index] = p.value;
        out.choice[node.depth][node.index] = p.choice;
        return p.value;
      });
  return out;
}

MartingaleCheck is_symmetric_g_martingale(const LatticeTree& tree, const NodeFunction& process,
                                          double tol, ResidualKind kind) {
  struct Pair {
    double upper;
    double lower;
  };
  MartingaleCheck check;
  check.tolerance = tol;
  double worst = -1.0;
  auto residual = [kind](double value, double m) {
    return kind == ResidualKind::Absolute ? std::abs(value - m) : std::abs(value / m - 1.0);
  };
  auto record = [&](const LatticeNode& node, const Pair& v) {
    const double m = process(node);
    const double ru = residual(v.upper, m);
    const double rl = residual(v.lower, m);
    check.max_residual_upper = std::max(check.max_residual_upper, ru);
    check.max_residual_lower = std::max(check.max_residual_lower, rl);
    if (std::max(ru, rl) > worst) {
      worst = std::max(ru, rl);
      check.worst_depth = node.depth;
      check.worst_index = node.index;
    }
  };
  tree.reduce<Pair>(
      [&](const LatticeNode& node) {
        const double m = process(node);
        return Pair{m, m};
      },
      [&](const LatticeNode& node, std::span<const Pair> children) {
        std::array<double, 4> up{};
        std::array<double, 4> lo{};
        for (std::size_t i = 0; i < children.size(); ++i) {
          up[i] = children[i].upper;
          lo[i] = children[i].lower;
        }
        const Pair v{pick_gamma({up.data(), children.size()}, ValuationMode::Upper).value,
                     pick_gamma({lo.data(), children.size()}, ValuationMode::Lower).value};
        record(node, v);
        return v;
      });
  check.pass = std::isfinite(check.max_residual()) && check.max_residual() <= tol;
  return check;
}

std::vector<double> fraction_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) {
    throw std::invalid_argument("fraction grid needs step > 0 and hi >= lo");
  }
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5));
  grid.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) grid.push_back(lo + step * static_cast<double>(i));
  return grid;
}

namespace {

// One-step change of log wealth; the Dothan case includes the increment of
// log D, r dt + sigma_r dB - sigma_r^2 dQV / 2.
double log_wealth_step(const MarketParams& params, const StepContext& ctx, double pi,
                       double dB, double dQV) {
  if (!params.dothan()) {
    return wealth_log_increment(params, ctx.t, ctx.dt, pi, dB, dQV, ctx.dividend);
  }
  const double sigma_r = *params.sigma_r;
  const double d_part = params.r * ctx.dt + sigma_r * dB - 0.5 * sigma_r * sigma_r * dQV;
  return d_part + dothan_strategy_log_increment(params, ctx.t, ctx.dt, pi, dB, dQV,
                                                ctx.dividend);
}

}  // namespace

BruteForceResult brute_force_optimal(const LatticeTree& tree, const MarketParams& params,
                                     std::span<const double> pi_grid, double x0,
                                     Utility utility) {
  if (pi_grid.empty()) throw std::invalid_argument("strategy grid is empty");
  if (!(x0 > 0.0)) throw std::invalid_argument("initial wealth must be positive");
  if (utility != Utility::Log) throw std::invalid_argument("only log utility is supported");

  // Search order: increasing |pi|, negative first on equal magnitude, so a
  // strict improvement test implements the tie rule.
  std::vector<double> order(pi_grid.begin(), pi_grid.end());
  std::stable_sort(order.begin(), order.end(), [](double a, double b) {
    return std::abs(a) < std::abs(b) || (std::abs(a) == std::abs(b) && a < b);
  });

  const std::vector<double> div = dividend_loadings(params, tree.grid());
  BruteForceResult result;
  result.table.assign(tree.n_steps(), {0.0, 0.0});
  std::vector<bool> seen(tree.n_steps(), false);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto& row : result.table) row = {nan, nan};

  const double root = tree.reduce<double>(
      [](const LatticeNode&) { return 0.0; },
      [&](const LatticeNode& node, std::span<const double> children) {
        const std::size_t k = node.depth;
        std::array<double, 2> chosen{nan, nan};
        double best_over_gamma = 0.0;
        for (std::size_t g = 0; g < tree.gammas().size(); ++g) {
          const LatticeTransition up = tree.transition(k, 2 * g);
          const LatticeTransition down = tree.transition(k, 2 * g + 1);
          const StepContext ctx{k, node.t, up.dt, 1.0 / (up.gamma * up.gamma), div[k]};
          double best = -std::numeric_limits<double>::infinity();
          double best_pi = order.front();
          for (double pi : order) {
            const double v =
                0.5 * (log_wealth_step(params, ctx, pi, up.dB, up.dQV) +
                       log_wealth_step(params, ctx, pi, down.dB, down.dQV));
            if (v > best) {
              best = v;
              best_pi = pi;
            }
          }
          chosen[g] = best_pi;
          const double value = best + 0.5 * (children[2 * g] + children[2 * g + 1]);
          if (g == 0 || value <= best_over_gamma) best_over_gamma = value;
        }
        if (!seen[k]) {
          result.table[k] = chosen;
          seen[k] = true;
        } else if (result.table[k][0] != chosen[0] ||
                   (tree.gammas().size() > 1 && result.table[k][1] != chosen[1])) {
          result.table_consistent = false;
        }
        return best_over_gamma;
      });
  result.value = std::log(x0) + root;
  return result;
}

LatticeTree make_wealth_tree(const LatticeSpec& spec, const MarketParams& params,
                             std::vector<Strategy> strategies, double x0) {
  if (!(x0 > 0.0)) throw std::invalid_argument("initial wealth must be positive");
  const TimeGrid grid = TimeGrid::uniform(spec.horizon, spec.n_steps);
  std::vector<double> div = dividend_loadings(params, grid);
  std::vector<double> initial(strategies.size(), std::log(x0));
  StateUpdater updater = [params, strategies = std::move(strategies), div](
                             const LatticeTransition& tr, std::span<const double> parent,
                             std::span<double> child) {
    const StepContext ctx{tr.step, tr.t, tr.dt, 1.0 / (tr.gamma * tr.gamma), div[tr.step]};
    for (std::size_t i = 0; i < strategies.size(); ++i) {
      child[i] = parent[i] + log_wealth_step(params, ctx, strategies[i](ctx), tr.dB, tr.dQV);
    }
  };
  return LatticeTree(spec.band, spec.horizon, spec.n_steps, std::move(updater),
                     std::move(initial), spec.cap);
}

}  // namespace gmerton

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "gmerton/errors.hpp"
#include "gmerton/lattice.hpp"
#include "gmerton/strategy.hpp"

namespace gmerton {
namespace {

std::vector<LatticeNode> leaves(const LatticeTree& tree) {
  std::vector<LatticeNode> out;
  tree.for_each_node([&](const LatticeNode& node) {
    if (node.depth == tree.n_steps()) out.push_back(node);
  });
  return out;
}

const NodeFunction kB = [](const LatticeNode& x) { return x.B; };
const NodeFunction kQV = [](const LatticeNode& x) { return x.QV; };

TEST(LatticeTree, DegenerateTwoSteps) {
  const LatticeTree tree(VolatilityBand(1.0, 1.0), 1.0, 2);
  const double s = std::sqrt(0.5);
  auto l = leaves(tree);
  ASSERT_EQ(l.size(), 4u);
  std::vector<double> b;
  for (const auto& x : l) b.push_back(x.B);
  std::sort(b.begin(), b.end());
  EXPECT_NEAR(b[0], -2 * s, 1e-15);
  EXPECT_EQ(b[1], 0.0);
  EXPECT_EQ(b[2], 0.0);
  EXPECT_NEAR(b[3], 2 * s, 1e-15);
}

TEST(LatticeTree, OneStepTwoVolatilities) {
  const double dt = 0.5;
  const LatticeTree tree(VolatilityBand(0.5, 2.0), dt, 1);
  std::map<double, int> qv;
  for (const auto& x : leaves(tree)) ++qv[x.QV];
  ASSERT_EQ(qv.size(), 2u);
  EXPECT_EQ(qv[0.25 * dt], 2);
  EXPECT_EQ(qv[4.0 * dt], 2);
}

TEST(LatticeTree, NodeCounts) {
  const LatticeTree tree(VolatilityBand(0.5, 1.5), 1.0, 5);
  EXPECT_EQ(tree.branching(), 4u);
  EXPECT_EQ(tree.node_count(5), 1024u);
  EXPECT_EQ(tree.total_nodes(), 1365u);
  EXPECT_EQ(leaves(tree).size(), 1024u);
}

TEST(LatticeTree, CapEnforced) {
  EXPECT_THROW(LatticeTree(VolatilityBand(0.5, 1.5), 1.0, 13), ResourceLimit);
  EXPECT_NO_THROW(LatticeTree(VolatilityBand(0.5, 1.5), 1.0, 12));
  EXPECT_THROW(LatticeTree(VolatilityBand(0.5, 1.5), 1.0, 0), std::invalid_argument);
}

TEST(GExpectation, BrownianTerminalIsZero) {
  for (std::size_t n : {4u, 8u, 12u}) {
    const LatticeTree tree(VolatilityBand(0.5, 1.5), 1.0, n);
    EXPECT_LE(std::abs(g_expectation(tree, kB, ValuationMode::Upper)), 1e-12) << n;
    EXPECT_LE(std::abs(g_expectation(tree, kB, ValuationMode::Lower)), 1e-12) << n;
  }
}

TEST(GExpectation, QuadraticVariationExtremes) {
  const LatticeTree tree(VolatilityBand(0.5, 1.5), 2.0, 6);
  EXPECT_NEAR(g_expectation(tree, kQV, ValuationMode::Upper), 2.25 * 2.0, 1e-14);
  EXPECT_NEAR(g_expectation(tree, kQV, ValuationMode::Lower), 0.25 * 2.0, 1e-14);
}

TEST(GExpectation, SquaredTerminal) {
  const LatticeTree tree(VolatilityBand(0.5, 1.5), 1.0, 8);
  const NodeFunction sq = [](const LatticeNode& x) { return x.B * x.B; };
  EXPECT_NEAR(g_expectation(tree, sq, ValuationMode::Upper), 2.25, 1e-13);
  EXPECT_NEAR(g_expectation(tree, sq, ValuationMode::Lower), 0.25, 1e-13);
}

// Independent oracle: the sublinear expectation is the max over adapted
// volatility policies of the linear expectation. For n steps a policy picks
// gamma at each of the 2^n - 1 reachable sign histories.
double policy_enumeration(const VolatilityBand& band, double T, std::size_t n,
                          const std::function<double(double, double)>& f, bool upper) {
  const std::size_t decisions = (1u << n) - 1;
  const double dt = T / static_cast<double>(n);
  double best = upper ? -INFINITY : INFINITY;
  for (std::uint64_t mask = 0; mask < (1ull << decisions); ++mask) {
    double sum = 0.0;
    for (std::uint64_t signs = 0; signs < (1ull << n); ++signs) {
      double B = 0.0, QV = 0.0;
      std::size_t node = 0;  // heap index of the sign history
      for (std::size_t k = 0; k < n; ++k) {
        const double g = (mask >> node) & 1 ? band.hi() : band.lo();
        const bool up = ((signs >> k) & 1) == 0;
        B += (up ? 1.0 : -1.0) * g * std::sqrt(dt);
        QV += g * g * dt;
        node = 2 * node + (up ? 1 : 2);
      }
      sum += f(B, QV);
    }
    const double mean = sum / static_cast<double>(1ull << n);
    best = upper ? std::max(best, mean) : std::min(best, mean);
  }
  return best;
}

TEST(GExpectation, MatchesAdaptedPolicyEnumeration) {
  const VolatilityBand band(0.5, 1.5);
  const std::size_t n = 3;
  const std::vector<std::function<double(double, double)>> fs{
      [](double b, double) { return std::max(b - 0.2, 0.0); },
      [](double b, double qv) { return std::sin(3.0 * b) + 0.3 * qv; },
      [](double b, double qv) { return -b * b * b + qv * b; },
      [](double b, double) { return std::abs(b) < 0.5 ? 1.0 : 0.0; },
  };
  for (const auto& f : fs) {
    const LatticeTree tree(band, 1.0, n);
    const NodeFunction h = [&](const LatticeNode& x) { return f(x.B, x.QV); };
    EXPECT_NEAR(g_expectation(tree, h, ValuationMode::Upper),
                policy_enumeration(band, 1.0, n, f, true), 1e-13);
    EXPECT_NEAR(g_expectation(tree, h, ValuationMode::Lower),
                policy_enumeration(band, 1.0, n, f, false), 1e-13);
  }
}

class AxiomTest : public ::testing::Test {
 protected:
  NodeFunction random_functional() {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double a = u(gen_), b = u(gen_), c = u(gen_), d = 3 * u(gen_), e = u(gen_), k = u(gen_);
    return [=](const LatticeNode& x) {
      return a + b * x.B + c * std::sin(d * x.B) + e * std::max(x.B - k, 0.0) + a * b * x.QV;
    };
  }
  std::mt19937_64 gen_{42};
  LatticeTree tree_{VolatilityBand(0.5, 1.5), 1.0, 8};
};

TEST_F(AxiomTest, SublinearExpectationAxioms) {
  auto U = [&](const NodeFunction& f) { return g_expectation(tree_, f, ValuationMode::Upper); };
  auto L = [&](const NodeFunction& f) { return g_expectation(tree_, f, ValuationMode::Lower); };
  std::uniform_real_distribution<double> lam(0.0, 4.0);
  for (int i = 0; i < 20; ++i) {
    const NodeFunction X = random_functional();
    const NodeFunction Y = random_functional();
    const double ux = U(X), uy = U(Y);
    const double l = lam(gen_);
    const double shift = lam(gen_) - 2.0;
    EXPECT_LE(U([&](const LatticeNode& x) { return X(x) + Y(x); }), ux + uy + 1e-12);
    EXPECT_NEAR(U([&](const LatticeNode& x) { return l * X(x); }), l * ux, 1e-12);
    EXPECT_GE(U([&](const LatticeNode& x) { return X(x) + std::abs(Y(x)); }), ux - 1e-12);
    EXPECT_NEAR(U([&](const LatticeNode& x) { return X(x) + shift; }), ux + shift, 1e-12);
    EXPECT_EQ(L(X), -U([&](const LatticeNode& x) { return -X(x); }));
    EXPECT_LE(L(X), ux);
  }
}

TEST_F(AxiomTest, DegenerateBandCollapses) {
  const LatticeTree flat(VolatilityBand(0.8, 0.8), 1.0, 8);
  for (int i = 0; i < 10; ++i) {
    const NodeFunction X = random_functional();
    EXPECT_EQ(g_expectation(flat, X, ValuationMode::Upper),
              g_expectation(flat, X, ValuationMode::Lower));
  }
}

TEST(ConditionalValuation, ConstantEverywhere) {
  const LatticeTree tree(VolatilityBand(0.5, 1.5), 1.0, 4);
  for (auto mode : {ValuationMode::Upper, ValuationMode::Lower}) {
    const auto v = conditional_valuation(tree, [](const LatticeNode&) { return 2.5; }, mode);
    for (const auto& level : v.values) {
      for (double x : level) EXPECT_EQ(x, 2.5);
    }
  }
}

TEST(ConditionalValuation, BrownianNodesAreMartingale) {
  const LatticeTree tree(VolatilityBand(0.5, 1.5), 1.0, 5);
  for (auto mode : {ValuationMode::Upper, ValuationMode::Lower}) {
    const auto v = conditional_valuation(tree, kB, mode);
    tree.for_each_node([&](const LatticeNode& node) {
      EXPECT_NEAR(v.at(node.depth, node.index), node.B, 1e-14);
    });
  }
}

TEST(ConditionalValuation, QuadraticVariationUpper) {
  const LatticeTree tree(VolatilityBand(0.5, 1.5), 1.0, 5);
  const auto v = conditional_valuation(tree, kQV, ValuationMode::Upper);
  tree.for_each_node([&](const LatticeNode& node) {
    EXPECT_NEAR(v.at(node.depth, node.index), node.QV + 2.25 * (1.0 - node.t), 1e-14);
    if (node.depth < tree.n_steps()) {
      EXPECT_EQ(v.choice[node.depth][node.index], 1);
    }
  });
}

TEST(ConditionalValuation, TableLimit) {
  const LatticeTree tree(VolatilityBand(0.5, 1.5), 1.0, 6);
  EXPECT_THROW(conditional_valuation(tree, kB, ValuationMode::Upper, 100), ResourceLimit);
}

TEST(SymmetricMartingale, Brownian) {
  const LatticeTree tree(VolatilityBand(0.5, 1.5), 1.0, 6);
  EXPECT_TRUE(is_symmetric_g_martingale(tree, kB, 1e-12).pass);
  EXPECT_TRUE(
      is_symmetric_g_martingale(tree, [](const LatticeNode&) { return 7.0; }, 1e-12).pass);
}

TEST(SymmetricMartingale, CompensatedQuadraticVariationFails) {
  const LatticeTree tree(VolatilityBand(0.5, 1.5), 1.0, 6);
  const auto check = is_symmetric_g_martingale(
      tree, [](const LatticeNode& x) { return x.QV - 2.25 * x.t; }, 1e-12);
  EXPECT_FALSE(check.pass);
  EXPECT_LE(check.max_residual_upper, 1e-12);
  // Lower valuation falls short by (sigma_hi^2 - sigma_lo^2)(T - t), largest at the root.
  EXPECT_NEAR(check.max_residual_lower, 2.0, 1e-12);
  EXPECT_EQ(check.worst_depth, 0u);
}

TEST(SymmetricMartingale, DegenerateCompensatedQuadraticVariationPasses) {
  const LatticeTree tree(VolatilityBand(1.5, 1.5), 1.0, 6);
  EXPECT_TRUE(is_symmetric_g_martingale(
                  tree, [](const LatticeNode& x) { return x.QV - 2.25 * x.t; }, 1e-12)
                  .pass);
}

TEST(FractionGrid, Endpoints) {
  const auto g = fraction_grid(-1.0, 8.0, 0.05);
  EXPECT_EQ(g.size(), 181u);
  EXPECT_EQ(g.front(), -1.0);
  EXPECT_NEAR(g.back(), 8.0, 1e-12);
  EXPECT_THROW(fraction_grid(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST(BruteForce, DegenerateMerton) {
  MarketParams p;
  p.c = 0.0;
  const LatticeTree tree(VolatilityBand(1.0, 1.0), 1.0, 6);
  const auto grid = fraction_grid(0.0, 3.0, 0.01);
  const auto r = brute_force_optimal(tree, p, grid);
  for (const auto& row : r.table) EXPECT_LE(std::abs(row[0] - 1.5), 0.01 + 1e-12);
  EXPECT_TRUE(r.table_consistent);
}

TEST(BruteForce, NoExcessReturnChoosesZero) {
  MarketParams p;
  p.mu = p.r;
  p.c = 0.0;
  const LatticeTree tree(VolatilityBand(0.5, 1.5), 1.0, 4);
  const auto grid = fraction_grid(-2.0, 2.0, 0.25);
  const auto r = brute_force_optimal(tree, p, grid);
  for (const auto& row : r.table) {
    EXPECT_EQ(row[0], 0.0);
    EXPECT_EQ(row[1], 0.0);
  }
  EXPECT_EQ(r.value, 0.0);
}

TEST(BruteForce, FeedbackTableMatchesClosedForm) {
  const MarketParams p;
  const LatticeTree tree(VolatilityBand(0.5, 1.5), 1.0, 6);
  const auto grid = fraction_grid(-1.0, 8.0, 0.05);
  const auto r = brute_force_optimal(tree, p, grid);
  ASSERT_TRUE(r.table_consistent);
  for (const auto& row : r.table) {
    EXPECT_LE(std::abs(row[0] - optimal_log(p, 4.0)), 0.05);
    EXPECT_LE(std::abs(row[1] - optimal_log(p, 1.0 / 2.25)), 0.05);
  }
  EXPECT_THROW(brute_force_optimal(tree, p, std::vector<double>{}), std::invalid_argument);
}

// Per-step value of the observable-volatility problem for log utility:
// max_pi E[log increment | gamma] = (A + c v)^2 dt / (2 sigma^2 v), v = gamma^2.
double step_value(const MarketParams& p, double gamma, double dt) {
  const double v = gamma * gamma;
  const double A = p.mu - p.r;
  return (A + p.c * v) * (A + p.c * v) * dt / (2.0 * p.sigma * p.sigma * v);
}

TEST(BruteForce, RootValueMatchesClosedFormRecursion) {
  const MarketParams p;
  const std::size_t n = 6;
  const double dt = 1.0 / n;
  const LatticeTree tree(VolatilityBand(0.5, 1.5), 1.0, n);
  const auto r = brute_force_optimal(tree, p, fraction_grid(-1.0, 8.0, 0.01));
  const double per_step = std::min(step_value(p, 0.5, dt), step_value(p, 1.5, dt));
  EXPECT_NEAR(r.value, n * per_step, 1e-4);
}

TEST(BruteForce, EndpointVolatilitiesSufficeAtBaseline) {
  // At baseline (mu - r)/c = 6 exceeds sigma_hi^2, so the per-step value is
  // decreasing in v on the band and no interior gamma undercuts sigma_hi.
  const MarketParams p;
  const double dt = 0.1;
  const double endpoints = std::min(step_value(p, 0.5, dt), step_value(p, 1.5, dt));
  for (double g = 0.5; g <= 1.5; g += 0.05) {
    EXPECT_GE(step_value(p, g, dt), endpoints - 1e-15) << g;
  }
}

TEST(BruteForce, InteriorVolatilityCanUndercutEndpoints) {
  // With (mu - r)/c inside [sigma_lo^2, sigma_hi^2] the per-step value is
  // minimised at v = (mu - r)/c, strictly inside the band.
  MarketParams p;
  p.mu = 0.03;
  p.r = 0.02;
  p.c = 0.01;
  const double dt = 0.1;
  const double endpoints = std::min(step_value(p, 0.5, dt), step_value(p, 1.5, dt));
  EXPECT_LT(step_value(p, 1.0, dt), endpoints);
  const LatticeTree tree(VolatilityBand(0.5, 1.5), 1.0, 4);
  const auto two = brute_force_optimal(tree, p, fraction_grid(-1.0, 3.0, 0.01));
  const LatticeTree middle(VolatilityBand(1.0, 1.0), 1.0, 4);
  const auto one = brute_force_optimal(middle, p, fraction_grid(-1.0, 3.0, 0.01));
  EXPECT_LT(one.value, two.value);
}

TEST(WealthTree, StatesTrackLogWealth) {
  const MarketParams p;
  const LatticeSpec spec{VolatilityBand(0.5, 1.5), 1.0, 3};
  const LatticeTree tree =
      make_wealth_tree(spec, p, {zero_strategy(), constant_strategy(1.0)}, 2.0);
  tree.for_each_node([&](const LatticeNode& node) {
    EXPECT_NEAR(node.user[0], std::log(2.0), 1e-15);
    const double expected = std::log(2.0) + (p.mu - p.r) * node.t + p.sigma * node.B +
                            (p.c - 0.5 * p.sigma * p.sigma) * node.QV;
    EXPECT_NEAR(node.user[1], expected, 1e-14);
  });
}

}  // namespace
}  // namespace gmerton

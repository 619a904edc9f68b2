#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gmerton/rng.hpp"
#include "gmerton/scenario.hpp"

namespace gmerton {
namespace {

TEST(TimeGrid, UniformQuarterSteps) {
  const TimeGrid g = make_grid(1.0, 4);
  const std::vector<double> expected{0.0, 0.25, 0.5, 0.75, 1.0};
  ASSERT_EQ(g.points().size(), expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_EQ(g.t(k), expected[k]);
  EXPECT_EQ(g.n_steps(), 4u);
  EXPECT_TRUE(g.is_uniform());
}

TEST(TimeGrid, SingleStep) {
  const TimeGrid g = make_grid(2.0, 1);
  EXPECT_EQ(g.t(0), 0.0);
  EXPECT_EQ(g.t(1), 2.0);
  EXPECT_EQ(g.dt(0), 2.0);
}

TEST(TimeGrid, RejectsEmptyGrid) {
  EXPECT_THROW(make_grid(1.0, 0), std::invalid_argument);
  EXPECT_THROW(make_grid(0.0, 4), std::invalid_argument);
  EXPECT_THROW(make_grid(-1.0, 4), std::invalid_argument);
}

TEST(TimeGrid, TerminalPointIsExact) {
  for (std::size_t n : {3u, 7u, 10u, 49u}) {
    EXPECT_EQ(make_grid(0.7, n).horizon(), 0.7);
  }
}

TEST(TimeGrid, FromPointsValidates) {
  EXPECT_THROW(TimeGrid::from_points({0.1, 0.5}), std::invalid_argument);
  EXPECT_THROW(TimeGrid::from_points({0.0, 0.5, 0.5}), std::invalid_argument);
  const TimeGrid g = TimeGrid::from_points({0.0, 0.1, 0.5});
  EXPECT_FALSE(g.is_uniform());
  EXPECT_DOUBLE_EQ(g.dt(1), 0.4);
}

TEST(TimeGrid, NearestPointTiesGoEarlier) {
  const TimeGrid g = make_grid(1.0, 4);
  EXPECT_EQ(g.nearest_point(0.125), 0u);
  EXPECT_EQ(g.nearest_point(0.13), 1u);
  EXPECT_EQ(g.nearest_point(-3.0), 0u);
  EXPECT_EQ(g.nearest_point(9.0), 4u);
}

TEST(VolatilityBand, Validation) {
  EXPECT_THROW(VolatilityBand(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(VolatilityBand(1.0, 0.5), std::invalid_argument);
  EXPECT_TRUE(VolatilityBand(1.0, 1.0).degenerate());
  EXPECT_FALSE(VolatilityBand(0.5, 1.5).degenerate());
}

TEST(GenControl, ConstantHigh) {
  const VolatilityBand band(0.5, 1.5);
  const auto c = gen_control(ControlSpec::constant(1.5), band, make_grid(1.0, 20), 11);
  for (double g : c.gamma) EXPECT_EQ(g, 1.5);
}

TEST(GenControl, ConstantOutsideBandRejected) {
  EXPECT_THROW(gen_control(ControlSpec::constant(2.0), VolatilityBand(0.5, 1.5),
                           make_grid(1.0, 4), 1),
               std::invalid_argument);
}

TEST(GenControl, DegenerateBandForcesLevel) {
  const VolatilityBand band(1.0, 1.0);
  for (const auto& spec : {ControlSpec::constant(1.0), ControlSpec::bang_bang(0.3),
                           ControlSpec::uniform_iid()}) {
    const auto c = gen_control(spec, band, make_grid(1.0, 30), 99);
    for (double g : c.gamma) EXPECT_EQ(g, 1.0);
  }
}

TEST(GenControl, BangBangZeroSwitchFreezesFirstDraw) {
  const VolatilityBand band(0.5, 1.5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = gen_control(ControlSpec::bang_bang(0.0), band, make_grid(1.0, 25), seed);
    EXPECT_TRUE(c.gamma.front() == 0.5 || c.gamma.front() == 1.5);
    for (double g : c.gamma) EXPECT_EQ(g, c.gamma.front());
  }
}

TEST(GenControl, BangBangOnlyExtremes) {
  const VolatilityBand band(0.5, 1.5);
  const auto c = gen_control(ControlSpec::bang_bang(0.5), band, make_grid(1.0, 200), 3);
  bool saw_lo = false, saw_hi = false;
  for (double g : c.gamma) {
    EXPECT_TRUE(g == 0.5 || g == 1.5);
    saw_lo = saw_lo || g == 0.5;
    saw_hi = saw_hi || g == 1.5;
  }
  EXPECT_TRUE(saw_lo && saw_hi);
}

TEST(GenControl, EveryGammaInsideBand) {
  const VolatilityBand band(0.3, 0.9);
  const TimeGrid grid = make_grid(2.0, 64);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (const auto& spec : {ControlSpec::bang_bang(0.2), ControlSpec::uniform_iid(),
                             ControlSpec::constant(0.6)}) {
      const auto c = gen_control(spec, band, grid, seed);
      ASSERT_EQ(c.gamma.size(), 64u);
      for (double g : c.gamma) {
        EXPECT_GE(g, band.lo());
        EXPECT_LE(g, band.hi());
      }
    }
  }
}

TEST(GenControl, DeterministicInSeed) {
  const VolatilityBand band(0.5, 1.5);
  const TimeGrid grid = make_grid(1.0, 40);
  const auto a = gen_control(ControlSpec::uniform_iid(), band, grid, 5);
  const auto b = gen_control(ControlSpec::uniform_iid(), band, grid, 5);
  const auto c = gen_control(ControlSpec::uniform_iid(), band, grid, 6);
  EXPECT_EQ(a.gamma, b.gamma);
  EXPECT_NE(a.gamma, c.gamma);
}

TEST(ControlSpec, LabelRoundTrip) {
  const VolatilityBand band(0.5, 1.5);
  for (const auto& spec : {ControlSpec::constant(0.75), ControlSpec::bang_bang(0.1),
                           ControlSpec::uniform_iid()}) {
    EXPECT_EQ(ControlSpec::parse(spec.label(), band), spec);
  }
  EXPECT_EQ(ControlSpec::parse("lo", band), ControlSpec::constant(0.5));
  EXPECT_EQ(ControlSpec::parse("hi", band), ControlSpec::constant(1.5));
  EXPECT_THROW(ControlSpec::parse("sometimes", band), std::invalid_argument);
  EXPECT_THROW(ControlSpec::parse("constant(x)", band), std::invalid_argument);
}

TEST(ScenarioFamily, InsertsExtremes) {
  const VolatilityBand band(0.5, 1.5);
  const ScenarioFamily fam(band, {ControlSpec::bang_bang(0.1)});
  ASSERT_EQ(fam.size(), 3u);
  EXPECT_EQ(fam.members()[0], ControlSpec::constant(0.5));
  EXPECT_EQ(fam.members()[1], ControlSpec::constant(1.5));
}

TEST(ScenarioFamily, NoDuplicateExtremes) {
  const VolatilityBand band(0.5, 1.5);
  const ScenarioFamily fam(band, {ControlSpec::constant(1.5), ControlSpec::constant(0.5)});
  EXPECT_EQ(fam.size(), 2u);
  EXPECT_EQ(ScenarioFamily(VolatilityBand(1.0, 1.0), {}).size(), 1u);
  EXPECT_TRUE(ScenarioFamily().empty());
}

TEST(RhoOf, Values) {
  const TimeGrid grid = make_grid(1.0, 5);
  EXPECT_EQ(rho_of(VolControl{grid, std::vector<double>(5, 1.0)}).rho,
            std::vector<double>(5, 1.0));
  EXPECT_EQ(rho_of(VolControl{grid, std::vector<double>(5, 2.0)}).rho,
            std::vector<double>(5, 0.25));
  const VolatilityBand band(0.5, 2.0);
  const auto rho = rho_of(gen_control(ControlSpec::uniform_iid(), band, grid, 8)).rho;
  for (double r : rho) {
    EXPECT_GE(r, 0.25);
    EXPECT_LE(r, 4.0);
  }
}

TEST(Rng, UniformOpenInterval) {
  SplitMix64 rng(0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, NormalMoments) {
  NormalStream normals(2024);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = normals.next();
    sum += z;
    sum2 += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sum2 / n, 1.0, 0.015);
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, 0, 0, 0), derive_seed(1, 0, 1, 0));
  EXPECT_NE(derive_seed(1, 0, 0, 1), derive_seed(1, 0, 1, 0));
  EXPECT_NE(derive_seed(1, 0, 0, 0), derive_seed(1, 1, 0, 0));
  EXPECT_EQ(derive_seed(7, 3, 2, 1), derive_seed(7, 3, 2, 1));
}

}  // namespace
}  // namespace gmerton

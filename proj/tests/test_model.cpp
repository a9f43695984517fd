#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ratiodelay/api.hpp"
#include "ratiodelay/sampling.hpp"

using namespace ratiodelay;

namespace {

FunctionalResponse holling(double m, double a) { return {ResponseKind::Holling, m, a}; }
FunctionalResponse ivlev(double m, double a) { return {ResponseKind::Ivlev, m, a}; }

ModelParams single_predator(double r, double K, FunctionalResponse resp, double d) {
  ModelParams p;
  p.r = r;
  p.growth.K = K;
  p.predators = {Predator{resp, d}};
  return p;
}

void expect_error(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected error " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(GrowthLaw, LogisticVanishesAtCarryingCapacity) {
  GrowthLaw g{GrowthKind::Logistic, 0.1};
  EXPECT_EQ(g.value(0.1), 0.0);
  EXPECT_DOUBLE_EQ(g.slope(0.03), -10.0);
  for (double x : {0.0, 0.01, 0.05, 0.099, 0.101, 0.3}) {
    EXPECT_GT((g.K - x) * g.value(x), 0.0) << x;
  }
}

TEST(Response, HollingAtPresetRatio) {
  EXPECT_DOUBLE_EQ(response_value(holling(16, 4), 0.25), 8.0);
  EXPECT_NEAR(response_value(holling(16, 4), 1e-12), 16.0, 1e-9);
}

TEST(Response, IvlevAtInverseLogTwo) {
  EXPECT_NEAR(response_value(ivlev(16, 1), 1.0 / std::numbers::ln2), 8.0, 1e-13);
}

TEST(Response, IvlevUsesSaturationLimitForTinyRatios) {
  EXPECT_EQ(response_value(ivlev(5, 1), 1e-4), 5.0);
  EXPECT_LT(response_value(ivlev(5, 1), 0.1), 5.0);
}

TEST(Response, DerivativeExamples) {
  EXPECT_DOUBLE_EQ(response_derivative(holling(16, 4), 0.25), -16.0);
  EXPECT_DOUBLE_EQ(response_derivative(holling(18, 2), 0.25), -16.0);
  const double ln2 = std::numbers::ln2;
  EXPECT_NEAR(response_derivative(ivlev(16, 1), 1.0 / ln2), -8.0 * ln2 * ln2, 1e-12);
}

TEST(Response, NonPositiveRatioIsDomainError) {
  for (double u : {0.0, -1.0, std::nan("")}) {
    expect_error(ErrorCode::Domain, [&] { response_value(holling(2, 1), u); });
    expect_error(ErrorCode::Domain, [&] { response_derivative(ivlev(2, 1), u); });
  }
}

TEST(Response, DerivativeMatchesFiniteDifferencesOnLogGrid) {
  for (const auto& resp : {holling(16, 4), holling(3, 0.2), ivlev(16, 1), ivlev(2, 7)}) {
    for (double lu = std::log(1e-3); lu <= std::log(1e3); lu += 0.25) {
      const double u = std::exp(lu), h = 1e-6 * u;
      const double fd = (response_value(resp, u + h) - response_value(resp, u - h)) / (2 * h);
      const double exact = response_derivative(resp, u);
      const double roundoff = 1e-9 * resp.m / u;
      EXPECT_NEAR(fd, exact, 1e-6 * std::abs(exact) + roundoff) << to_string(resp.kind) << " u=" << u;
    }
  }
}

TEST(Response, StrictlyDecreasingAndBoundedByM) {
  for (const auto& resp : {holling(16, 4), ivlev(16, 1), ivlev(1, 2)}) {
    double prev = INFINITY;
    for (double lu = std::log(5e-2); lu <= std::log(1e2); lu += 0.05) {
      const double v = response_value(resp, std::exp(lu));
      EXPECT_LT(v, prev);
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, resp.m);
      prev = v;
    }
  }
}

TEST(EquilibriumRatio, ClosedForms) {
  EXPECT_DOUBLE_EQ(equilibrium_ratio(holling(16, 4), 8), 0.25);
  EXPECT_DOUBLE_EQ(equilibrium_ratio(holling(18, 2), 12), 0.25);
  EXPECT_NEAR(equilibrium_ratio(ivlev(16, 1), 8), 1.0 / std::numbers::ln2, 1e-15);
}

TEST(EquilibriumRatio, RequiresSurvival) {
  expect_error(ErrorCode::NoSurvival, [] { equilibrium_ratio(holling(8, 1), 8); });
  expect_error(ErrorCode::NoSurvival, [] { equilibrium_ratio(ivlev(2, 1), 3); });
}

TEST(EquilibriumRatio, SolvesResponseEqualsDeathRateForRandomParameters) {
  sampling::Rng rng(1);
  for (int k = 0; k < 10000; ++k) {
    const double m = sampling::log_uniform(rng, 0.1, 100);
    const double d = m * sampling::uniform(rng, 0.01, 0.99);
    const double a = sampling::log_uniform(rng, 0.01, 100);
    for (const auto& resp : {holling(m, a), ivlev(m, a)}) {
      const double u = equilibrium_ratio(resp, d);
      ASSERT_NEAR(response_value(resp, u), d, 1e-10 * d) << to_string(resp.kind) << " m=" << m << " d=" << d;
    }
  }
}

TEST(Equilibrium, PresetIsExact) {
  for (double r : {6.0, 13.0, 20.0}) {
    const Equilibrium eq = equilibrium(paper_example(r));
    EXPECT_NEAR(eq.x_star, 0.1 * (1 - 5 / r), 1e-15);
    EXPECT_NEAR(eq.y_star[0], (1 - 5 / r) / 40, 1e-16);
    EXPECT_NEAR(eq.y_star[1], (1 - 5 / r) / 40, 1e-16);
    EXPECT_EQ(eq.q_star, eq.x_star);
  }
}

TEST(Equilibrium, NoPositiveEquilibriumAtOrBelowThreshold) {
  for (double r : {5.0, 4.0, 1.0}) {
    expect_error(ErrorCode::NoPositiveEquilibrium, [&] { equilibrium(paper_example(r)); });
  }
}

TEST(Equilibrium, SinglePredatorHalfCapacity) {
  const double d = 3.0;
  const ModelParams p = single_predator(2 * d, 4.0, holling(2 * d, 1.0), d);
  const Equilibrium eq = equilibrium(p);
  EXPECT_NEAR(eq.u_star[0], 1.0, 1e-15);
  EXPECT_NEAR(eq.x_star, 2.0, 1e-12);
  EXPECT_NEAR(eq.y_star[0], 2.0, 1e-12);
}

TEST(Equilibrium, BisectionAgreesWithClosedForm) {
  const GrowthLaw g{GrowthKind::Logistic, 0.7};
  const double x = solve_prey_level_bisect(g, 9.0, 4.0);
  EXPECT_NEAR(x, 0.7 * (1 - 4.0 / 9.0), 1e-14);
}

TEST(Equilibrium, BalanceEquationsForRandomParameters) {
  sampling::Rng rng(2);
  for (int k = 0; k < 1000; ++k) {
    for (ResponseKind kind : {ResponseKind::Holling, ResponseKind::Ivlev}) {
      const ModelParams p = sampling::random_params(rng, 1 + k % 4, kind, false);
      const Equilibrium eq = equilibrium(p);
      EXPECT_GT(eq.x_star, 0.0);
      EXPECT_LT(eq.x_star, p.growth.K);
      double load = 0.0;
      for (std::size_t i = 0; i < p.n(); ++i) {
        EXPECT_NEAR(response_value(p.predators[i].response, eq.u_star[i]), p.predators[i].d, 1e-12 * p.predators[i].d);
        load += p.predators[i].d * eq.y_star[i];
      }
      EXPECT_NEAR(p.r * eq.x_star * p.growth.value(eq.x_star), load, 1e-12 * load);
    }
  }
}

TEST(Validation, RejectsInadmissibleParameters) {
  ModelParams p = paper_example(13);
  p.r = -1;
  expect_error(ErrorCode::Validation, [&] { p.validate(); });
  p = paper_example(13);
  p.growth.K = 0;
  expect_error(ErrorCode::Validation, [&] { p.validate(); });
  p = paper_example(13, 0.0);
  expect_error(ErrorCode::Validation, [&] { p.validate(); });
  p = paper_example(13);
  p.predators[1].d = 18;
  expect_error(ErrorCode::NoSurvival, [&] { p.validate(); });
  p.predators.clear();
  expect_error(ErrorCode::Validation, [&] { p.validate(); });
}

TEST(RightHandSide, VanishesAtEquilibria) {
  sampling::Rng rng(3);
  for (int k = 0; k < 1000; ++k) {
    const auto kind = k % 2 ? ResponseKind::Ivlev : ResponseKind::Holling;
    const ModelParams p = sampling::random_params(rng, 1 + k % 3, kind, true);
    const Equilibrium eq = equilibrium(p);
    const auto f = rhs_undelayed(p, eq.undelayed_state());
    const auto g = rhs_delayed(p, eq.delayed_state());
    const double scale = std::max({p.r * eq.x_star, 1e-300});
    for (double v : f) ASSERT_LE(std::abs(v), 1e-12 * std::max(scale, 1.0));
    for (double v : g) ASSERT_LE(std::abs(v), 1e-12 * std::max(scale, 1.0));
  }
}

TEST(RightHandSide, PresetHandEvaluation) {
  const ModelParams p = paper_example(13);
  const auto f = rhs_undelayed(p, State{0.1, {0.025, 0.025}, std::nullopt});
  // x at carrying capacity: prey growth is zero, predators each eat y p(1/4) = 0.025 * d_i.
  EXPECT_NEAR(f[0], -(0.025 * 8 + 0.025 * 12), 1e-15);
  EXPECT_NEAR(f[1], 0.025 * 8 - 8 * 0.025, 1e-15);
  EXPECT_NEAR(f[2], 0.025 * 12 - 12 * 0.025, 1e-15);
}

TEST(RightHandSide, DelayedUsesMemoryInPredatorRatio) {
  const ModelParams p = paper_example(13, 1.0);
  const State s{0.05, {0.02, 0.02}, 0.08};
  const auto g = rhs_delayed(p, s);
  EXPECT_DOUBLE_EQ(g[3], -0.03);
  EXPECT_NEAR(g[0], 13 * 0.05 * (1 - 0.5) - 0.02 * 16 / (1 + 4 * 0.4) - 0.02 * 18 / (1 + 2 * 0.4), 1e-15);
  EXPECT_NEAR(g[1], 0.02 * 16 / (1 + 4 * 0.25) - 8 * 0.02, 1e-15);
  EXPECT_NEAR(g[2], 0.02 * 18 / (1 + 2 * 0.25) - 12 * 0.02, 1e-15);
  const State fixed{0.05, {0.02, 0.02}, 0.05};
  EXPECT_EQ(rhs_delayed(p, fixed)[3], 0.0);
}

TEST(RightHandSide, PreyOnlyLimit) {
  const ModelParams p = single_predator(2.0, 1.0, holling(3, 1), 1);
  const auto f = rhs_undelayed(p, State{0.4, {1e-12}, std::nullopt});
  EXPECT_NEAR(f[0], 2.0 * 0.4 * 0.6, 1e-10);
}

TEST(RightHandSide, RejectsBoundaryAndWrongShape) {
  const ModelParams p = paper_example(13, 1.0);
  expect_error(ErrorCode::Singularity, [&] { rhs_undelayed(p, State{0.0, {0.1, 0.1}, std::nullopt}); });
  expect_error(ErrorCode::Singularity, [&] { rhs_delayed(p, State{0.1, {0.1, 0.1}, 0.0}); });
  expect_error(ErrorCode::Domain, [&] { rhs_undelayed(p, State{0.1, {-0.1, 0.1}, std::nullopt}); });
  expect_error(ErrorCode::Validation, [&] { rhs_undelayed(p, State{0.1, {0.1}, std::nullopt}); });
  expect_error(ErrorCode::Validation, [&] { rhs_delayed(p, State{0.1, {0.1, 0.1}, std::nullopt}); });
  expect_error(ErrorCode::Validation, [&] { rhs_delayed(paper_example(13, std::nullopt), State{0.1, {0.1, 0.1}, 0.1}); });
}

TEST(Nullcline, RootsHaveSmallResidual) {
  const ModelParams p = paper_example(10);
  const NullclineMesh mesh = prey_nullcline_sample(p, {1e-4, 0.05, 15}, {1e-4, 0.05, 15});
  ASSERT_EQ(mesh.cells.size(), 225u);
  std::size_t with_roots = 0;
  for (const auto& c : mesh.cells) {
    const double y[2] = {c.y1, c.y2};
    for (double x : c.roots) {
      EXPECT_GT(x, 0.0);
      EXPECT_LT(x, p.growth.K);
      EXPECT_LT(std::abs(prey_rate(p, x, y)), 1e-10);
    }
    with_roots += c.roots.empty() ? 0 : 1;
  }
  EXPECT_GT(with_roots, 0u);
}

TEST(Nullcline, ApproachesCarryingCapacityForVanishingPredators) {
  const NullclineMesh mesh = prey_nullcline_sample(paper_example(10), {1e-9, 1e-9, 1}, {1e-9, 1e-9, 1});
  ASSERT_FALSE(mesh.cells[0].roots.empty());
  EXPECT_NEAR(mesh.cells[0].roots.back(), 0.1, 1e-6);
}

TEST(Nullcline, ContainsTheEquilibrium) {
  const ModelParams p = paper_example(10);
  const Equilibrium eq = equilibrium(p);
  const NullclineMesh mesh = prey_nullcline_sample(p, {eq.y_star[0], eq.y_star[0], 1}, {eq.y_star[1], eq.y_star[1], 1});
  bool found = false;
  for (double x : mesh.cells[0].roots) found = found || std::abs(x - eq.x_star) < 1e-9;
  EXPECT_TRUE(found);
}

TEST(Nullcline, NeedsTwoPredators) {
  const ModelParams p = single_predator(2, 1, holling(3, 1), 1);
  expect_error(ErrorCode::UnsupportedDimension, [&] { prey_nullcline_sample(p, {0.1, 0.2, 2}, {0.1, 0.2, 2}); });
}

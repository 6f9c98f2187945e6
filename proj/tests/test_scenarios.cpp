#include <gtest/gtest.h>

#include "ftj/scenarios.hpp"

using namespace ftj;

namespace {
const FluxModel lwr = FluxModel::lwr();
}

TEST(Example41, TangentialChoice) {
    ScenarioResult r = runExample41(lwr, {}, 3.0, 1e-3);
    EXPECT_NEAR(r.F_entropy, 0.18, 1e-6);
    EXPECT_NEAR(r.F_constructed, 0.12, 1e-6);
    EXPECT_NEAR(r.valueOf("F_tangential_min"), 0.12, 1e-15);
    EXPECT_NEAR(r.J_constructed, r.J_entropy, r.eps_J);
    EXPECT_LT(r.time("tau"), 3.0);
    EXPECT_TRUE(r.allClaimsPass());
}

TEST(Example41, NonTangentialChoice) {
    Example41Params p;
    p.fb = 0.20;
    ScenarioResult r = runExample41(lwr, p, 3.0, 1e-3);
    EXPECT_NEAR(r.F_entropy, 0.18, 1e-6);
    EXPECT_NEAR(r.F_constructed, 0.13, 1e-6);
    EXPECT_NEAR(r.valueOf("F_constructed_formula"), 0.13, 1e-12);
    EXPECT_TRUE(std::isnan(r.valueOf("F_tangential_min")));
    EXPECT_TRUE(r.allClaimsPass());
}

TEST(Example41, ViolatedOrdering) {
    Example41Params p;
    p.fb = 0.15;
    try {
        runExample41(lwr, p, 3.0, 1e-3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConstraintViolated);
    }
    Example41Params q;
    q.a3 = 0.45;
    EXPECT_THROW(runExample41(lwr, q, 3.0, 1e-3), Error);
}

TEST(Example42, Times) {
    ScenarioResult r = runExample42(lwr, {0.2, 0.7, 0.6, -1.0, 0.5, 0.23}, 8.0, 1e-3);
    EXPECT_NEAR(r.time("t1"), 1.25, 1e-9);
    EXPECT_NEAR(r.time("t2"), 2.5, 1e-9);
    EXPECT_NEAR(r.time("t3"), 6.875, 1e-9);
    EXPECT_NEAR(r.time("t4"), 5.0 / 3.0, 1e-9);
    EXPECT_NEAR(r.time("t6"), 7.6190476190476, 1e-9);
    EXPECT_NEAR(r.time("t6_a4"), r.time("t6"), 1e-9);
    EXPECT_NEAR(r.time("t3_engine"), 6.875, 1e-9);
    EXPECT_NEAR(r.time("t6_engine"), r.time("t6"), 1e-9);
}

TEST(Example42, Functionals) {
    ScenarioResult r = runExample42(lwr, {0.2, 0.7, 0.6, -1.0, 0.5, 0.23}, 8.0, 1e-3);
    EXPECT_NEAR(r.F_entropy, 0.11, 1e-6);
    EXPECT_NEAR(r.F_constructed, 0.09, 1e-6);
    EXPECT_NEAR(r.J_constructed, r.J_entropy, r.eps_J);
    EXPECT_NEAR(r.valueOf("phi_family_optimal"), 0.2257895, 1e-6);
    EXPECT_NEAR(r.valueOf("phi_family_optimal_bisection"), r.valueOf("phi_family_optimal"), 1e-9);
    EXPECT_NEAR(r.valueOf("F_family_optimal"), 0.0815789, 1e-6);
    EXPECT_TRUE(r.allClaimsPass());
    for (const auto& [k, v] : r.claims) EXPECT_TRUE(v) << k;
}

TEST(Example42, DefaultFluxLevelIsInsideTheFeasibleRange) {
    ScenarioResult r = runExample42(lwr, {}, 8.0, 1e-3);
    double fa4 = 0.0;
    for (const auto& [k, v] : r.parameters)
        if (k == "f_a4") fa4 = v;
    EXPECT_GT(fa4, r.valueOf("phi_family_optimal"));
    EXPECT_LT(fa4, 0.24);
    EXPECT_TRUE(r.allClaimsPass());
}

TEST(Example42, DegenerateLevelCollapsesToEntropy) {
    ScenarioResult r = runExample42(lwr, {0.2, 0.7, 0.6, -1.0, 0.5, 0.24}, 8.0, 1e-3);
    EXPECT_NEAR(r.time("t6_a4"), r.time("t3"), 1e-9);
    EXPECT_NEAR(r.F_constructed, r.F_entropy, 1e-9);
}

TEST(Example42, LevelTooLowIsRejected) {
    // t6 would exceed the horizon
    EXPECT_THROW(runExample42(lwr, {0.2, 0.7, 0.6, -1.0, 0.5, 0.215}, 8.0, 1e-3), Error);
}

TEST(Fractal, LinearGrowth) {
    EXPECT_DOUBLE_EQ(fractalCounterexample(0).tv_flux_trace, 0.0);
    for (int N = 1; N <= 6; ++N) {
        FractalResult f = fractalCounterexample(N, 1e-3);
        EXPECT_GE(f.tv_flux_trace, 0.375 * N - 1e-2);
        EXPECT_NEAR(f.tv_flux_trace, (2 * N - 1) * 0.375, 1e-9);
    }
    EXPECT_GE(fractalCounterexample(6).tv_trace, 3.0 - 1e-2);
}

TEST(Monotone, ClosedFormCases) {
    const double delta = 1e-3;
    Rng rng(5);
    MonotoneCase c = evaluateMonotoneCase(lwr, StepFunction::constant(0.3), 2.0, delta, Monotonicity::NonDecreasing, rng);
    EXPECT_NEAR(c.F_entropy, 0.0, 1e-15);
    EXPECT_TRUE(c.pass);

    MonotoneCase d = evaluateMonotoneCase(lwr, lineDatum({-1.0}, {0.2, 0.4}), 4.0, delta, Monotonicity::NonDecreasing, rng);
    EXPECT_NEAR(d.F_entropy, 0.24 - 0.16, 1e-9);
    EXPECT_TRUE(d.pass);

    EntropyResult e = entropyControl(lwr, lineDatum({0.0}, {0.7, 0.2}), 2.0, delta);
    EXPECT_NEAR(e.control.gamma.first(), 0.25, 1e-15);
    EXPECT_EQ(e.control.gamma.pieces(), 1u);
    MonotoneCase g = evaluateMonotoneCase(lwr, lineDatum({0.0}, {0.7, 0.2}), 2.0, delta, Monotonicity::NonIncreasing, rng);
    EXPECT_NEAR(g.F_entropy, 0.5 - 0.21 - 0.16, 1e-12);
    EXPECT_TRUE(g.pass);
}

TEST(Suites, SmallRunsPassAndAreReproducible) {
    SuiteReport a = maximalitySuite(7, 20, 5);
    EXPECT_TRUE(a.ok());
    SuiteReport b = maximalitySuite(7, 20, 5);
    ASSERT_EQ(a.cases.size(), b.cases.size());
    for (std::size_t i = 0; i < a.cases.size(); ++i) EXPECT_EQ(a.cases[i].margin, b.cases[i].margin);
    EXPECT_TRUE(bvBoundSuite(1, 20).ok());
    MonotoneSuiteResult m = randomMonotoneSuite(2, 10, Monotonicity::NonIncreasing);
    for (const MonotoneCase& c : m.cases) EXPECT_TRUE(c.pass);
}

TEST(Search, ConstantFamilyOnShockRarefaction) {
    ScenarioResult r = runExample41(lwr, {}, 3.0, 1e-3);
    SearchResult s = searchMinF({"example41", lwr, r.u0, 3.0, 1e-3}, {});
    EXPECT_EQ(s.method, "exhaustive");
    ASSERT_TRUE(s.found);
    EXPECT_NEAR(s.F_best, 0.12, 0.005);
    EXPECT_NEAR(s.levels[0], 0.21, 1e-12);
    EXPECT_TRUE(s.tangential.found);
    EXPECT_LE(std::fabs(s.tangential.speed), 10 * 1e-3);
}

TEST(Search, MonotoneDatumKeepsEntropyOptimal) {
    SearchSpec spec;
    spec.pieces = 2;
    spec.method = "descent";
    spec.restarts = 3;
    spec.budget = 4000;
    spec.eps_J = 1e-9;
    SearchResult s = searchMinF({"monotone", lwr, lineDatum({-1.0}, {0.2, 0.4}), 4.0, 1e-3}, spec);
    ASSERT_TRUE(s.found);
    EXPECT_NEAR(s.F_best, s.F_entropy, defaultEpsF(1e-3));

    // a 0.002 flux deficit fits inside the default tolerance and buys a smaller F
    spec.eps_J = -1;
    SearchResult loose = searchMinF({"monotone", lwr, lineDatum({-1.0}, {0.2, 0.4}), 4.0, 1e-3}, spec);
    EXPECT_LT(loose.J_best, loose.J_entropy - 1e-3);
}

// With a J tolerance at round-off level only exact maximizers are accepted and the
// three-piece family recovers the constructed control below the entropy value.
TEST(Search, ThreePieceControlsBelowEntropy) {
    SearchSpec spec;
    spec.pieces = 3;
    spec.level_min = 0.15;
    spec.level_max = 0.25;
    spec.time_step = 1.0 / 3.0;
    spec.method = "descent";
    spec.restarts = 100;
    spec.eps_J = 1e-9;
    SearchResult s = searchMinF({"example42", lwr, lineDatum({-1.0, 0.5}, {0.2, 0.7, 0.6}), 8.0, 1e-3}, spec);
    ASSERT_TRUE(s.found);
    EXPECT_LE(s.F_best, 0.09 + 0.005);
    EXPECT_LT(s.F_best, s.F_entropy);
}

// The default J tolerance lets near-maximizers with a small flux deficit through.
TEST(Search, DefaultToleranceAdmitsNearMaximizers) {
    SearchSpec spec;
    spec.pieces = 3;
    spec.level_min = 0.15;
    spec.level_max = 0.25;
    spec.time_step = 1.0 / 3.0;
    spec.method = "descent";
    spec.restarts = 3;
    SearchResult s = searchMinF({"example42", lwr, lineDatum({-1.0, 0.5}, {0.2, 0.7, 0.6}), 8.0, 1e-3}, spec);
    ASSERT_TRUE(s.found);
    EXPECT_LT(s.J_best, s.J_entropy - 1e-3);
    EXPECT_LE(s.J_entropy - s.J_best, s.eps_J);
}

TEST(Search, Errors) {
    SearchSpec spec;
    spec.level_min = 0.3;
    EXPECT_THROW(searchMinF({"x", lwr, StepFunction::constant(0.3), 1.0, 1e-3}, spec), Error);
    SearchSpec big;
    big.pieces = 4;
    big.method = "exhaustive";
    try {
        searchMinF({"x", lwr, StepFunction::constant(0.3), 1.0, 1e-3}, big);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SearchBudgetExceeded);
    }
}

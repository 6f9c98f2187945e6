#include <gtest/gtest.h>

#include "ftj/scenarios.hpp"
#include "godunov_oracle.hpp"

using namespace ftj;

namespace {
const FluxModel lwr = FluxModel::lwr();
const StepFunction kConst = StepFunction::constant(0.3);
StepFunction ex41() { return lineDatum({-0.5, -0.1}, {0.1, 0.4, 0.3}); }
StepFunction ex42() { return lineDatum({-1.0, 0.5}, {0.2, 0.7, 0.6}); }
}  // namespace

TEST(Junction, EntropyControlConstant) {
    EntropyResult e = entropyControl(lwr, kConst, 2.0, 1e-3);
    EXPECT_EQ(e.control.gamma.pieces(), 1u);
    EXPECT_NEAR(e.control.gamma.first(), 0.21, 1e-15);
    EXPECT_NEAR(e.control.k1.first(), 0.7, 1e-12);
    EXPECT_NEAR(e.control.k2.first(), 0.3, 1e-12);
}

TEST(Junction, EntropyControlShockRarefaction) {
    const StepFunction& g = entropyControl(lwr, ex41(), 3.0, 1e-3).control.gamma;
    EXPECT_NEAR(g.value(0.1), 0.21, 1e-15);
    EXPECT_NEAR(g.value(0.7), 0.24, 1e-15);
    EXPECT_NEAR(g.value(2.0), 0.09, 1e-15);
    EXPECT_NEAR(essentialTV(g), 0.18, 1e-12);
}

TEST(Junction, EntropyControlShockBehindRarefaction) {
    const StepFunction& g = entropyControl(lwr, ex42(), 8.0, 1e-3).control.gamma;
    EXPECT_NEAR(g.value(1.0), 0.21, 1e-15);
    EXPECT_NEAR(g.value(4.0), 0.24, 1e-15);
    EXPECT_NEAR(g.value(7.0), 0.16, 1e-15);
    EXPECT_NEAR(g.pieceStart(g.pieces() - 1), 6.875, 1e-9);
    for (double t : {1.5, 2.0, 2.4}) EXPECT_NEAR(g.value(t), 0.25 - 0.25 / (4 * t * t), 1e-3);
}

// Constant pair (0.7, 0.3): the outgoing trace keeps 0.21 while the incoming flux drops to 0.09
// once the merged shock arrives, so the pair is admissible only up to that time.
TEST(Junction, ConstantPairLosesMatchAfterMergedShock) {
    StepFunction k1 = StepFunction::constant(0.7, 0.0, 3.0), k2 = StepFunction::constant(0.3, 0.0, 3.0);
    CoupledSolution c = evaluateControl(lwr, ex41(), k1, k2, 3.0, {1e-3});
    EXPECT_FALSE(c.control.certificate.admissible);
    EXPECT_NEAR(c.control.certificate.max_flux_mismatch, 0.12, 1e-12);
    EXPECT_GT(c.control.certificate.worst_time, 7.0 / 6.0);
    EXPECT_THROW(makeControl(lwr, ex41(), k1, k2, 3.0, {1e-3}), Error);

    // downstream switching to a1 at the arrival time restores the match
    StepFunction k2b(0.0, 3.0, {7.0 / 6.0}, {0.3, 0.1});
    CoupledSolution d = makeControl(lwr, ex41(), k1, k2b, 3.0, {1e-3});
    EXPECT_NEAR(d.control.gamma.value(0.5), 0.21, 1e-15);
    EXPECT_NEAR(d.control.gamma.value(2.0), 0.09, 1e-15);
    EXPECT_NEAR(d.control.gamma.pieceStart(d.control.gamma.pieces() - 1), 7.0 / 6.0, 1e-9);
}

TEST(Junction, ConstantDataAdmissibility) {
    CoupledSolution a = makeControl(lwr, kConst, StepFunction::constant(0.7, 0.0, 2.0),
                                    StepFunction::constant(0.3, 0.0, 2.0), 2.0);
    EXPECT_NEAR(a.control.gamma.first(), 0.21, 1e-15);
    EXPECT_EQ(a.control.gamma.pieces(), 1u);
    try {
        makeControl(lwr, kConst, StepFunction::constant(0.9, 0.0, 2.0), StepFunction::constant(0.3, 0.0, 2.0), 2.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotAdmissible);
    }
}

TEST(Junction, Membership) {
    const double T = 2.0, delta = 1e-3;
    EntropyResult e = entropyControl(lwr, kConst, T, delta);
    const double eps = defaultEpsJ(lwr, T, delta);
    CoupledSolution same = makeControl(lwr, kConst, e.control.k1, e.control.k2, T);
    EXPECT_TRUE(membershipUmax(same, e.control.certificate.J, eps));
    // admissible but sub-maximal: both roads carry 0.16
    CoupledSolution low = makeControl(lwr, kConst, StepFunction::constant(0.8, 0.0, T),
                                      StepFunction::constant(0.2, 0.0, T), T);
    EXPECT_NEAR(low.control.certificate.J, 0.32, 1e-12);
    EXPECT_FALSE(membershipUmax(low, e.control.certificate.J, eps));
}

// The normalized entropy pair reproduces the entropy junction flux.
TEST(Junction, EntropyPairReproducesGamma) {
    for (const StepFunction& u0 : {ex41(), ex42(), lineDatum({-0.7, 0.2, 0.6}, {0.85, 0.35, 0.9, 0.15})}) {
        const double T = 4.0;
        EntropyResult e = entropyControl(lwr, u0, T, 1e-3);
        CoupledSolution c = makeControl(lwr, u0, e.control.k1, e.control.k2, T);
        EXPECT_NEAR(c.control.certificate.J, e.control.certificate.J, 1e-9);
        EXPECT_NEAR(controlReport(lwr, c, u0).F, controlReport(lwr, e, u0).F, 1e-9);
    }
}

TEST(Junction, NormalizedDataReported) {
    // k2 = 0.7 above theta over an outgoing state 0.7: the trace stays 0.7 and the datum is reported as 0.3
    CoupledSolution c = evaluateControl(lwr, StepFunction::constant(0.7), StepFunction::constant(0.7, 0.0, 1.0),
                                        StepFunction::constant(0.7, 0.0, 1.0), 1.0);
    EXPECT_TRUE(c.control.certificate.admissible);
    EXPECT_NEAR(c.control.k2.first(), 0.3, 1e-12);
    EXPECT_NEAR(c.control.k1.first(), 0.7, 1e-12);
}

// Independent check of the entropy junction flux against a Godunov scheme on the whole line.
TEST(Junction, EntropyFluxAgreesWithGodunov) {
    for (const StepFunction& u0 : {ex41(), ex42()}) {
        const double T = 3.0;
        EntropyResult e = entropyControl(lwr, u0, T, 1e-3);
        const std::size_t n = 8000;
        oracle::Grid g = oracle::cellAverages(u0, -4.0, 4.0, n);
        const double dx = g.dx;
        const std::size_t mid = n / 2;  // interface at x = 0
        double t = 0.0, J = 0.0;
        std::vector<double> F(n + 1);
        while (t < T - 1e-14) {
            double dt = std::min(0.45 * dx, T - t);
            F[0] = oracle::godunovFlux(lwr, g.u[0], g.u[0]);
            for (std::size_t i = 1; i < n; ++i) F[i] = oracle::godunovFlux(lwr, g.u[i - 1], g.u[i]);
            F[n] = oracle::godunovFlux(lwr, g.u[n - 1], g.u[n - 1]);
            J += dt * F[mid];
            for (std::size_t i = 0; i < n; ++i) g.u[i] -= dt / dx * (F[i + 1] - F[i]);
            t += dt;
        }
        EXPECT_NEAR(e.control.certificate.J, J, 5e-3);
    }
}

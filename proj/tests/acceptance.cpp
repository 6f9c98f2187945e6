// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "ftj/cli.hpp"

using namespace ftj;

namespace {

constexpr double kDelta = 1e-3;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

Outcome example41() {
    const FluxModel m = FluxModel::lwr();
    ScenarioResult r = runExample41(m, {}, 3.0, kDelta);
    const double tolJ = 2 * kDelta * 3.0 * m.maxSpeed();
    bool ok = std::fabs(r.F_entropy - 0.18) <= 1e-6 && std::fabs(r.F_constructed - 0.12) <= 1e-6 &&
              std::fabs(r.J_constructed - r.J_entropy) <= tolJ && r.allClaimsPass();
    return {ok, fmt("F_entropy=%.9f F=%.9f |dJ|=%.2e tol=%.1e", r.F_entropy, r.F_constructed,
                    std::fabs(r.J_constructed - r.J_entropy), tolJ)};
}

Outcome example42() {
    const FluxModel m = FluxModel::lwr();
    Example42Params p;
    p.fa4 = 0.23;
    ScenarioResult r = runExample42(m, p, 8.0, kDelta);
    bool ok = std::fabs(r.time("t1") - 1.25) <= 1e-6 && std::fabs(r.time("t2") - 2.5) <= 1e-6 &&
              std::fabs(r.time("t3") - 6.875) <= 1e-6 && std::fabs(r.time("t4") - 1.666667) <= 1e-6 &&
              std::fabs(r.time("t6") - 7.619048) <= 1e-6 && r.claim("t3_lt_t6_lt_T") &&
              r.claim("shock_stays_positive") && std::fabs(r.F_entropy - 0.11) <= 1e-6 &&
              std::fabs(r.F_constructed - 0.09) <= 1e-6 &&
              std::fabs(r.valueOf("phi_family_optimal") - 0.2257895) <= 1e-6 &&
              std::fabs(r.valueOf("F_family_optimal") - 0.0815789) <= 1e-6 && r.allClaimsPass();
    return {ok, fmt("t3=%.7f t6=%.7f phi=%.7f F_opt=%.7f", r.time("t3"), r.time("t6"),
                    r.valueOf("phi_family_optimal"), r.valueOf("F_family_optimal"))};
}

Outcome maximality() {
    SuiteReport s = maximalitySuite(7, 100, 20, kDelta);
    return {s.ok() && static_cast<int>(s.cases.size()) == 100,
            fmt("%.0f/%.0f controls, worst margin %.3e", s.passed(), s.cases.size(), s.worstMargin())};
}

struct MonotoneRuns {
    MonotoneSuiteResult up, down;
};

const MonotoneRuns& monotoneRuns() {
    static const MonotoneRuns runs{randomMonotoneSuite(11, 50, Monotonicity::NonDecreasing, kDelta),
                                   randomMonotoneSuite(12, 50, Monotonicity::NonIncreasing, kDelta)};
    return runs;
}

Outcome monotoneMinimality() {
    const MonotoneRuns& r = monotoneRuns();
    const double eps_F = defaultEpsF(kDelta);
    int cases = 0, maximizers = 0, survivors = 0, near = 0, bad = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const MonotoneSuiteResult* s : {&r.up, &r.down})
        for (const MonotoneCase& c : s->cases) {
            ++cases;
            maximizers += c.maximizers;
            survivors += c.survivors;
            near += c.near_maximizers;
            if (c.survivors == 0) continue;
            double margin = c.min_survivor_F - (c.F_entropy - eps_F);
            worst = std::min(worst, margin);
            if (margin < 0) ++bad;
        }
    return {cases == 100 && bad == 0 && survivors > 0,
            fmt("%.0f data, %.0f sampled maximizers (%.0f with F<=F_entropy), %.0f below bound, worst margin ", cases,
                maximizers, survivors, bad) +
                fmt("%.3e; %.0f non-clearing holds redrawn", worst, near)};
}

Outcome bvBound() {
    SuiteReport s = bvBoundSuite(1, 100, kDelta);
    const FluxModel lwr = FluxModel::lwr();
    int det = 0;
    {
        StepFunction u0 = StepFunction::constant(0.3, 0.0, StepFunction::kInf);
        StepFunction k = StepFunction::constant(0.3, 0.0, 2.0);
        BVBoundReport b = bvTraceBound(lwr, u0, k, solveIBVPOutgoing(lwr, u0, k, 2.0, kDelta));
        det += b.holds && b.lhs == 0.0;
    }
    {
        StepFunction u0(0.0, StepFunction::kInf, {0.5}, {0.7, 0.6});
        StepFunction k = StepFunction::constant(0.3, 0.0, 2.0);
        BVBoundReport b = bvTraceBound(lwr, u0, k, solveIBVPOutgoing(lwr, u0, k, 2.0, kDelta));
        det += b.holds && b.lhs <= b.sup_fprime * 0.1 + b.osc + 1e-9;
    }
    {
        FractalResult f = fractalCounterexample(6, kDelta);
        BVBoundReport b = bvTraceBound(FluxModel::negHalfSquare(-0.5, 1.5), f.u0, f.solution.boundary_datum,
                                       f.solution);
        det += b.holds && b.lhs >= 6 * (0.5 - 0.125) - 1e-9;
    }
    return {s.ok() && static_cast<int>(s.cases.size()) == 100 && det == 3,
            fmt("%.0f/100 random, %.0f/3 deterministic, worst margin %.3e", s.passed(), det, s.worstMargin())};
}

Outcome fractal() {
    bool ok = true;
    std::string d;
    double prev = 0.0;
    for (int N = 1; N <= 6; ++N) {
        FractalResult f = fractalCounterexample(N, kDelta);
        ok = ok && f.tv_flux_trace >= 0.375 * N - 10 * kDelta && f.tv_flux_trace > prev;
        prev = f.tv_flux_trace;
        d += fmt("%.4g ", f.tv_flux_trace);
    }
    return {ok, "tv by depth: " + d};
}

Outcome conservation() {
    cli::WorkedSolutions w = cli::workedSolutions(kDelta);
    SuiteReport s = conservationSuite(3, 200, w.list());
    return {s.ok() && static_cast<int>(s.cases.size()) == 200,
            fmt("%.0f/%.0f rectangles, worst margin %.3e", s.passed(), s.cases.size(), s.worstMargin())};
}

Outcome traceMonotonicity() {
    const MonotoneRuns& r = monotoneRuns();
    int cases = 0, bad = 0;
    double worst = 0.0;
    for (const MonotoneSuiteResult* s : {&r.up, &r.down})
        for (const MonotoneCase& c : s->cases) {
            ++cases;
            worst = std::max(worst, c.trace_violation);
            if (c.trace_violation > kDelta) ++bad;
        }
    return {cases == 100 && bad == 0, fmt("%.0f traces, %.0f violations, largest step against %.3e", cases, bad, worst)};
}

Outcome search() {
    const FluxModel m = FluxModel::lwr();
    ScenarioResult r = runExample41(m, {}, 3.0, kDelta);
    SearchSpec spec;
    spec.method = "exhaustive";
    SearchResult s = searchMinF({"example41", m, r.u0, 3.0, kDelta}, spec);
    bool ok = s.found && std::fabs(s.F_best - 0.12) <= 0.005 && s.tangential.found &&
              std::fabs(s.tangential.speed) <= 10 * kDelta;
    return {ok, fmt("F=%.6f level=%.4f tangential speed=%.2e at t=%.4f", s.F_best, s.levels.empty() ? NAN : s.levels[0],
                    s.tangential.speed, s.tangential.t_birth)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget_s;  // <= 0: no runtime limit
        std::function<Outcome()> run;
    };
    const Criterion all[] = {
        {"1 example41 reproduction", 1.0, example41},
        {"2 example42 reproduction", 2.0, example42},
        {"3 maximality", 30.0, maximality},
        {"4 monotone minimality", 60.0, monotoneMinimality},
        {"5 trace BV bound", 0.0, bvBound},
        {"6 fractal sharpness", 0.0, fractal},
        {"7 conservation", 0.0, conservation},
        {"8 trace monotonicity", 0.0, traceMonotonicity},
        {"9 search recovery", 0.0, search},
    };
    int failed = 0;
    for (const Criterion& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0 && secs > c.budget_s) {
            o.pass = false;
            o.detail += " (over time budget)";
        }
        std::printf("%s  %-28s %7.3fs  %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
        failed += !o.pass;
    }
    std::printf("%d/9 criteria passed\n", 9 - failed);
    return failed == 0 ? 0 : 1;
}

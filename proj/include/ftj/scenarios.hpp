#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "characteristics.hpp"

namespace ftj {

using NamedValues = std::vector<std::pair<std::string, double>>;
using NamedClaims = std::vector<std::pair<std::string, bool>>;

struct ScenarioResult {
    std::string name;
    FluxModel model;
    StepFunction u0;
    double T = 0.0;
    double delta = 0.0;
    NamedValues parameters;
    NamedValues times;
    NamedValues values;  // extra named outputs
    NamedClaims claims;
    double F_entropy = 0.0, F_constructed = 0.0;
    double J_entropy = 0.0, J_constructed = 0.0;
    double eps_J = 0.0;
    FunctionalReport entropy_report, constructed_report;
    EntropyResult entropy;
    CoupledSolution constructed;

    bool allClaimsPass() const {
        return std::all_of(claims.begin(), claims.end(), [](const auto& c) { return c.second; });
    }
    double time(const std::string& key) const {
        for (const auto& [k, v] : times)
            if (k == key) return v;
        return std::numeric_limits<double>::quiet_NaN();
    }
    double valueOf(const std::string& key) const {
        for (const auto& [k, v] : values)
            if (k == key) return v;
        return std::numeric_limits<double>::quiet_NaN();
    }
    bool claim(const std::string& key) const {
        for (const auto& [k, v] : claims)
            if (k == key) return v;
        return false;
    }
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::ConstraintViolated, what);
}

/// Piecewise step datum on the real line from breakpoints and values.
inline StepFunction lineDatum(std::vector<double> breaks, std::vector<double> values) {
    return StepFunction(-StepFunction::kInf, StepFunction::kInf, std::move(breaks), std::move(values));
}

// ---------------------------------------------------------------------------
// Shock overtaken by a rarefaction near the junction, both in free flow.

struct Example41Params {
    double a1 = 0.1, a2 = 0.4, a3 = 0.3;
    double x1 = -0.5, x2 = -0.1;
    double fb = 0.21;  // f(b) = f(c)
};

/// Time at which a trace settles on `state` for good; +inf if it never does.
inline double settleTime(const StepFunction& tr, double state) {
    if (tr.last() != state) return std::numeric_limits<double>::infinity();
    return tr.pieceStart(tr.pieces() - 1);
}

inline ScenarioResult runExample41(const FluxModel& m, const Example41Params& p, double T, double delta,
                                   const JunctionOptions& tol = {}) {
    const double th = m.theta();
    require(p.a1 < p.a3 && p.a3 < p.a2 && p.a2 < th, "a1 < a3 < a2 < theta");
    require(p.x1 < p.x2 && p.x2 < 0.0, "x1 < x2 < 0");
    const double lam = m.shockSpeed(p.a1, p.a2);
    const double fa1 = m.flux(p.a1), fa2 = m.flux(p.a2), fa3 = m.flux(p.a3);
    require(-p.x2 / m.deriv(p.a2) < -p.x1 / lam, "-x2/f'(a2) < -x1/lambda");
    require(-p.x1 / lam < T, "-x1/lambda < T");
    require(fa1 < p.fb, "f(a1) < f(b)");
    require(p.fb <= fa3 + 1e-15, "f(b) <= f(a3)");
    require(fa3 - p.fb < fa2 - fa3, "f(a3) - f(b) < f(a2) - f(a3)");

    ScenarioResult r;
    r.name = "example41";
    r.model = m;
    r.T = T;
    r.delta = delta;
    r.u0 = lineDatum({p.x1, p.x2}, {p.a1, p.a2, p.a3});
    const double b = m.branchInverse(Branch::Plus, p.fb);
    const double c = m.branchInverse(Branch::Minus, p.fb);
    r.parameters = {{"a1", p.a1}, {"a2", p.a2}, {"a3", p.a3}, {"x1", p.x1}, {"x2", p.x2},
                    {"b", b},     {"c", c},     {"f_b", p.fb}};
    r.eps_J = tol.eps_J < 0.0 ? defaultEpsJ(m, T, delta) : tol.eps_J;
    JunctionOptions jo = tol;
    jo.delta = delta;

    r.entropy = entropyControl(m, r.u0, T, delta);
    r.entropy_report = controlReport(m, r.entropy, r.u0);
    r.F_entropy = r.entropy_report.F;
    r.J_entropy = r.entropy_report.J;

    // Constant b upstream; downstream follows the upstream flux, c until the merged shock arrives.
    const StepFunction k1 = StepFunction::constant(b, 0.0, T);
    FTSolution probe = solveIBVPIncoming(m, r.u0, k1, T, delta);
    const double tau = settleTime(probe.boundaryTrace(), p.a1);
    const StepFunction k2 = tau < T ? StepFunction(0.0, T, {tau}, {c, p.a1}) : StepFunction::constant(c, 0.0, T);
    r.constructed = evaluateControl(m, r.u0, k1, k2, T, jo);
    r.constructed_report = controlReport(m, r.constructed, r.u0);
    r.F_constructed = r.constructed_report.F;
    r.J_constructed = r.constructed_report.J;

    const double L = m.maxSpeed();
    const double xa = p.x1 - L * T - 1.0;
    const double dist = l1Distance(r.constructed.left.snapshot(T), r.entropy.full.snapshot(T), xa, 0.0);

    r.times = {{"fan_head_arrival", -p.x2 / m.deriv(p.a3)},
               {"fan_tail_arrival", -p.x2 / m.deriv(p.a2)},
               {"shock_arrival_entropy", -p.x1 / lam},
               {"tau", tau}};
    r.values = {{"F_entropy_formula", 2 * fa2 - fa3 - fa1},
                {"F_constructed_formula", 2 * fa3 - fa1 - p.fb},
                {"terminal_l1_distance", dist}};
    if (std::fabs(p.fb - fa3) <= 1e-12) r.values.push_back({"F_tangential_min", fa3 - fa1});
    r.claims = {{"admissible", r.constructed.control.certificate.admissible},
                {"tau_before_T", tau < T},
                {"J_equal", std::fabs(r.J_constructed - r.J_entropy) <= r.eps_J},
                {"terminal_snapshot_match", dist <= 10.0 * delta * (1.0 + L * T)},
                {"F_decreases", r.F_constructed < r.F_entropy}};
    return r;
}

// ---------------------------------------------------------------------------
// Shock behind a rarefaction that crosses the junction.

struct Example42Params {
    double a1 = 0.2, a2 = 0.7, a3 = 0.6;
    double x1 = -1.0, x2 = 0.5;
    double fa4 = std::numeric_limits<double>::quiet_NaN();  // NaN: midpoint of the feasible range
};

/// Closed-form entropy junction flux for the shock-behind-rarefaction datum.
class Example42Gamma {
public:
    Example42Gamma(const FluxModel& m, const Example42Params& p)
        : m_(m), p_(p), fan_(exactRarefactionTrace(m, p.x2, p.a2, p.a3, 0.0)) {
        t1 = -p.x2 / m.deriv(p.a2);
        t2 = -p.x2 / m.deriv(p.a3);
        t3 = (p.a1 * p.x1 - p.a3 * p.x2 + p.a2 * (p.x2 - p.x1)) / (m.flux(p.a3) - m.flux(p.a1));
    }

    double t1 = 0.0, t2 = 0.0, t3 = 0.0;

    double value(double t) const {
        if (t < t1) return m_.flux(p_.a2);
        if (t < t2) return fan_.flux(t);
        if (t < t3) return m_.flux(p_.a3);
        return m_.flux(p_.a1);
    }

    /// Exact integral of the flux over (0, t).
    double cumulative(double t) const {
        const double fa1 = m_.flux(p_.a1), fa2 = m_.flux(p_.a2), fa3 = m_.flux(p_.a3);
        double s = fa2 * std::min(t, t1);
        if (t > t1) s += fan_.fluxIntegral(t1, std::min(t, t2));
        if (t > t2) s += fa3 * (std::min(t, t3) - t2);
        if (t > t3) s += fa1 * (t - t3);
        return s;
    }

private:
    FluxModel m_;
    Example42Params p_;
    RarefactionTrace fan_;
};

inline double bisect(const std::function<double(double)>& g, double lo, double hi, double tol = 1e-13) {
    double glo = g(lo);
    for (int it = 0; it < 300 && hi - lo > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct Example42Times {
    double t1, t2, t3, t4;
};

inline Example42Times example42Times(const FluxModel& m, const Example42Params& p) {
    Example42Gamma g(m, p);
    const double fa2 = m.flux(p.a2), fa3 = m.flux(p.a3);
    const double target = g.cumulative(g.t3) - g.cumulative(g.t1);
    double t4 = bisect([&](double t) { return (t - g.t1) * fa2 + (g.t3 - t) * fa3 - target; }, g.t1, g.t2);
    return {g.t1, g.t2, g.t3, t4};
}

/// Time at which the cumulative entropy flux from t1 is matched by the two-level profile (f(a2), phi).
inline double example42T6(const FluxModel& m, const Example42Params& p, double t4, double phi, double horizon) {
    Example42Gamma g(m, p);
    const double fa2 = m.flux(p.a2);
    if (phi >= m.flux(p.a3) - 1e-15) return g.t3;
    auto h = [&](double t) {
        return (g.cumulative(t) - g.cumulative(g.t1)) - ((t4 - g.t1) * fa2 + (t - t4) * phi);
    };
    double hi = std::max(horizon, g.t3) * 2.0 + 1.0;
    for (int i = 0; i < 60 && h(hi) > 0.0; ++i) hi *= 2.0;
    return bisect(h, g.t3, hi);
}

inline ScenarioResult runExample42(const FluxModel& m, const Example42Params& p, double T, double delta,
                                   const JunctionOptions& tol = {}) {
    const double th = m.theta();
    require(p.a1 < th && th < p.a3 && p.a3 < p.a2, "a1 < theta < a3 < a2");
    const double fa1 = m.flux(p.a1), fa2 = m.flux(p.a2), fa3 = m.flux(p.a3);
    require(fa1 < fa2 && fa2 < fa3, "f(a1) < f(a2) < f(a3)");
    require(p.x1 < 0.0 && 0.0 < p.x2, "x1 < 0 < x2");
    const double lam = m.shockSpeed(p.a1, p.a2);
    require(lam > 0.0, "lambda > 0");

    ScenarioResult r;
    r.name = "example42";
    r.model = m;
    r.T = T;
    r.delta = delta;
    r.u0 = lineDatum({p.x1, p.x2}, {p.a1, p.a2, p.a3});
    r.eps_J = tol.eps_J < 0.0 ? defaultEpsJ(m, T, delta) : tol.eps_J;
    JunctionOptions jo = tol;
    jo.delta = delta;

    const Example42Times tm = example42Times(m, p);
    require(tm.t2 < tm.t3, "t2 < t3");
    require(tm.t3 < T, "t3 < T");

    // Feasible flux levels: t6(phi) in (t3, T) and f(a2) < phi < f(a3).
    const double phi_T = (T * fa1 - tm.t4 * fa2 - (p.a2 - p.a1) * p.x1) / (T - tm.t4);
    const double phi_T_bisect =
        bisect([&](double phi) { return example42T6(m, p, tm.t4, phi, T) - T; }, fa2, fa3 - 1e-12);
    const double lo = std::max(phi_T, fa2);
    double fa4 = std::isnan(p.fa4) ? 0.5 * (lo + fa3) : p.fa4;
    require(fa2 < fa4 && fa4 <= fa3, "f(a2) < f(a4) <= f(a3)");
    const double t6a = example42T6(m, p, tm.t4, fa4, T);
    const double t6 = (-(p.a2 - p.a1) * p.x1 + tm.t4 * (fa4 - fa2)) / (fa4 - fa1);
    require(t6a < T, "t6(a4) < T");

    const double a4 = m.branchInverse(Branch::Minus, fa4);
    const double a4bar = m.branchInverse(Branch::Plus, fa4);
    const double a1bar = m.companion(p.a1);
    const double a2bar = m.companion(p.a2);
    r.parameters = {{"a1", p.a1}, {"a2", p.a2}, {"a3", p.a3},       {"x1", p.x1},         {"x2", p.x2},
                    {"f_a4", fa4}, {"a4", a4},  {"a4_bar", a4bar}, {"a1_bar", a1bar}, {"a2_bar", a2bar}};

    r.entropy = entropyControl(m, r.u0, T, delta);
    r.entropy_report = controlReport(m, r.entropy, r.u0);
    r.F_entropy = r.entropy_report.F;
    r.J_entropy = r.entropy_report.J;

    const bool collapsed = t6a <= tm.t3 + 1e-12;
    StepFunction k1, k2;
    if (collapsed) {
        k1 = StepFunction(0.0, T, {tm.t4, tm.t3}, {p.a2, a4bar, a1bar});
        k2 = StepFunction(0.0, T, {tm.t1, tm.t4, tm.t3}, {p.a2, a2bar, a4, p.a1});
    } else {
        k1 = StepFunction(0.0, T, {tm.t4, t6a}, {p.a2, a4bar, a1bar});
        k2 = StepFunction(0.0, T, {tm.t1, tm.t4, t6a}, {p.a2, a2bar, a4, p.a1});
    }
    r.constructed = evaluateControl(m, r.u0, k1, k2, T, jo);
    r.constructed_report = controlReport(m, r.constructed, r.u0);
    r.F_constructed = r.constructed_report.F;
    r.J_constructed = r.constructed_report.J;

    // Entropy solution: the trace flux sits at f(a3) right before t3 and at f(a1) after it.
    const StepFunction& ge = r.entropy.control.gamma;
    const double t3_engine = settleTime(r.entropy.full.trace(0.0, Side::Left), p.a1);
    const bool cancels = std::fabs(ge.leftLimit(t3_engine) - fa3) <= 1e-12 && std::fabs(t3_engine - tm.t3) <= 1e-6;
    const double t6_engine = settleTime(r.constructed.left.boundaryTrace(), p.a1);

    // Cumulative flux comparisons against the constructed downstream datum.
    Example42Gamma g(m, p);
    const StepFunction fk2 = fluxOf(m, r.constructed.control.k2);
    const StepFunction fk1 = fluxOf(m, r.constructed.control.k1);
    bool eq_before_t1 = true, above_after_t1 = true;
    for (int i = 1; i <= 200; ++i) {
        double t = tm.t1 * i / 200.0;
        eq_before_t1 = eq_before_t1 && std::fabs(g.cumulative(t) - fk2.integral(0.0, t)) <= 1e-12 &&
                       std::fabs(g.cumulative(t) - fk1.integral(0.0, t)) <= 1e-12;
        double s = tm.t1 + (t6a - tm.t1) * (i - 0.5) / 200.0;
        above_after_t1 = above_after_t1 && g.cumulative(s) > fk2.integral(0.0, s) &&
                         std::fabs(fk2.integral(0.0, s) - fk1.integral(0.0, s)) <= 1e-12;
    }

    bool stays_positive = false;
    double xi_min = std::numeric_limits<double>::quiet_NaN();
    try {
        CharPath xi = forwardBoundaryCharacteristic(r.constructed.right, tm.t1);
        stays_positive = !xi.returned && xi.departure_time < T;
        xi_min = std::numeric_limits<double>::infinity();
        for (const auto& [t, x] : xi.vertices)
            if (t > xi.departure_time) xi_min = std::min(xi_min, x);
        stays_positive = stays_positive && xi_min > 0.0;
    } catch (const Error&) {
        stays_positive = false;
    }

    const double phi_opt = phi_T;
    r.times = {{"t1", tm.t1}, {"t2", tm.t2}, {"t3", tm.t3}, {"t4", tm.t4}, {"t6", t6}, {"t6_a4", t6a},
               {"t3_engine", t3_engine}, {"t6_engine", t6_engine}};
    r.values = {{"F_entropy_formula", 2 * fa3 - fa1 - fa2},
                {"F_constructed_formula", 2 * fa4 - fa1 - fa2},
                {"phi_family_optimal", phi_opt},
                {"phi_family_optimal_bisection", phi_T_bisect},
                {"F_family_optimal", 2 * phi_opt - fa1 - fa2},
                {"xi_min_position", xi_min}};
    r.claims = {{"cancellation_before_junction", cancels},
                {"t6_formula_match", std::fabs(t6a - t6) <= 1e-9},
                {"t3_lt_t6_lt_T", tm.t3 < t6a && t6a < T},
                {"shock_stays_positive", stays_positive},
                {"admissible", r.constructed.control.certificate.admissible},
                {"J_equal", std::fabs(r.J_constructed - r.J_entropy) <= r.eps_J},
                {"cumulative_equal_before_t1", eq_before_t1},
                {"cumulative_above_after_t1", above_after_t1},
                {"F_decreases", collapsed ? std::fabs(r.F_constructed - r.F_entropy) <= 1e-9
                                          : r.F_constructed < r.F_entropy}};
    return r;
}

// ---------------------------------------------------------------------------
// Unbounded trace variation from a datum of unbounded variation.

struct FractalResult {
    int depth = 0;
    double tv_trace = 0.0;
    double tv_flux_trace = 0.0;
    FTSolution solution;
    StepFunction u0;
};

inline StepFunction fractalDatum(int N) {
    std::vector<double> br, vals{1.0};
    for (int n = N; n >= 1; --n) {
        br.push_back(4.0 / 3.0 * std::ldexp(1.0, -n));
        vals.push_back(0.5);
        br.push_back(std::ldexp(1.0, -(n - 1)));
        vals.push_back(1.0);
    }
    return StepFunction(0.0, StepFunction::kInf, br, vals);
}

inline FractalResult fractalCounterexample(int N, double delta = 1e-3) {
    if (N < 0) throw Error(ErrorKind::InvalidArgument, "depth must be non-negative");
    const FluxModel m = FluxModel::negHalfSquare(-0.5, 1.5);
    const double T = 4.0 / 3.0;
    FractalResult r;
    r.depth = N;
    r.u0 = fractalDatum(N);
    r.solution = solveIBVPOutgoing(m, r.u0, StepFunction::constant(0.0, 0.0, T), T, delta);
    StepFunction tr = r.solution.boundaryTrace();
    r.tv_trace = essentialTV(tr, 0.0, T);
    r.tv_flux_trace = essentialTV(fluxOf(m, tr), 0.0, T);
    return r;
}

// ---------------------------------------------------------------------------
// Randomized property suites.

struct SuiteCase {
    std::string label;
    bool pass = true;
    double margin = 0.0;  // positive means satisfied with room to spare
    std::string detail;
};

struct SuiteReport {
    std::string name;
    std::uint64_t seed = 0;
    std::vector<SuiteCase> cases;
    NamedValues stats;

    std::size_t passed() const {
        return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const SuiteCase& c) { return c.pass; }));
    }
    bool ok() const { return passed() == cases.size(); }
    double worstMargin() const {
        double w = std::numeric_limits<double>::infinity();
        for (const auto& c : cases) w = std::min(w, c.margin);
        return w;
    }
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen_); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen_); }
    std::uint64_t next() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

/// Sorted distinct breakpoints in (lo, hi), at least `gap` apart.
inline std::vector<double> randomBreaks(Rng& rng, int n, double lo, double hi, double gap = 0.05) {
    for (;;) {
        std::vector<double> b;
        for (int i = 0; i < n; ++i) b.push_back(std::round(rng.uniform(lo, hi) * 1e6) / 1e6);
        std::sort(b.begin(), b.end());
        bool ok = true;
        for (std::size_t i = 1; i < b.size(); ++i) ok = ok && b[i] - b[i - 1] >= gap;
        if (ok) return b;
    }
}

inline std::vector<double> randomValues(Rng& rng, int n, double lo, double hi, double gap = 0.02) {
    for (;;) {
        std::vector<double> v;
        for (int i = 0; i < n; ++i) v.push_back(std::round(rng.uniform(lo, hi) * 1e6) / 1e6);
        bool ok = true;
        for (std::size_t i = 1; i < v.size(); ++i) ok = ok && std::fabs(v[i] - v[i - 1]) >= gap;
        if (ok) return v;
    }
}

enum class Monotonicity { NonDecreasing, NonIncreasing };

inline StepFunction randomMonotoneDatum(Rng& rng, Monotonicity dir) {
    const int jumps = rng.integer(1, 5);
    std::vector<double> v;
    for (;;) {
        v = randomValues(rng, jumps + 1, 0.05, 0.95, 0.0);
        std::sort(v.begin(), v.end());
        bool ok = true;
        for (std::size_t i = 1; i < v.size(); ++i) ok = ok && v[i] - v[i - 1] >= 0.02;
        if (ok) break;
    }
    if (dir == Monotonicity::NonIncreasing) std::reverse(v.begin(), v.end());
    return lineDatum(randomBreaks(rng, jumps, -2.0, 1.0), v);
}

inline StepFunction randomStepDatum(Rng& rng) {
    const int jumps = rng.integer(1, 5);
    return lineDatum(randomBreaks(rng, jumps, -2.0, 1.5), randomValues(rng, jumps + 1, 0.05, 0.95));
}

/// Downstream datum that carries exactly the upstream junction flux.
inline CoupledSolution incomingLed(const FluxModel& m, const StepFunction& u0, const StepFunction& k1, double T,
                                   const JunctionOptions& opt) {
    FTSolution left = solveIBVPIncoming(m, u0, k1, T, SolveOptions{opt.delta, opt.max_events});
    StepFunction g = fluxOf(m, left.boundaryTrace());
    StepFunction k2 = g.map([&](double q) { return m.branchInverse(Branch::Minus, q); });
    return evaluateControl(m, u0, k1, k2, T, opt);
}

/// Upstream held at a reduced flux on (s, s+d), free (theta) elsewhere.
inline StepFunction holdReleaseDatum(const FluxModel& m, Rng& rng, const StepFunction& gamma, double T) {
    double s = rng.uniform(0.0, 0.5 * T);
    double d = rng.uniform(0.02, 0.2) * T;
    double hold = std::max(gamma.value(s) * rng.uniform(0.6, 0.98), 1e-3);
    return StepFunction(0.0, T, {s, s + d}, {m.theta(), m.branchInverse(Branch::Plus, hold), m.theta()});
}

struct MonotoneCase {
    StepFunction u0;
    double T = 0.0;
    double F_entropy = 0.0;
    double J_entropy = 0.0;
    int candidates = 0;
    int maximizers = 0;  // admissible members of the maximizer set
    int survivors = 0;   // maximizers with F at most the entropy value
    double min_survivor_F = std::numeric_limits<double>::infinity();
    double trace_violation = 0.0;  // largest step against the expected monotonicity of the junction flux
    double snapshot_violation = 0.0;
    int near_maximizers = 0;  // within eps_J of the entropy integral without reaching it
    double min_near_F = std::numeric_limits<double>::infinity();
    bool pass = true;
};

struct MonotoneSuiteResult {
    Monotonicity direction = Monotonicity::NonDecreasing;
    std::uint64_t seed = 0;
    double delta = 0.0;
    double eps_F = 0.0;
    std::vector<MonotoneCase> cases;
};

/// Largest jump of g against the requested direction.
inline double monotoneViolation(const StepFunction& g, bool non_decreasing) {
    double v = 0.0;
    for (std::size_t i = 1; i < g.values().size(); ++i) {
        double d = g.values()[i] - g.values()[i - 1];
        v = std::max(v, non_decreasing ? -d : d);
    }
    return v;
}

inline MonotoneCase evaluateMonotoneCase(const FluxModel& m, const StepFunction& u0, double T, double delta,
                                         Monotonicity dir, Rng& rng) {
    MonotoneCase mc;
    mc.u0 = u0;
    mc.T = T;
    const double eps_F = defaultEpsF(delta);
    const double eps_J = defaultEpsJ(m, T, delta);
    JunctionOptions opt{delta};
    EntropyResult e = entropyControl(m, u0, T, delta);
    FunctionalReport fe = controlReport(m, e, u0);
    mc.F_entropy = fe.F;
    mc.J_entropy = fe.J;
    const double M = fe.F;

    // Junction flux is non-increasing for non-decreasing data and vice versa.
    mc.trace_violation = monotoneViolation(e.control.gamma, dir == Monotonicity::NonIncreasing);
    if (dir == Monotonicity::NonIncreasing)
        mc.snapshot_violation = monotoneViolation(e.full.snapshot(T), false);

    std::vector<CoupledSolution> cands;
    cands.push_back(evaluateControl(m, u0, e.control.k1, e.control.k2, T, opt));

    // Same solution, data on the other side of theta where the trace allows it.
    {
        StepFunction tr = e.full.trace(0.0, Side::Left);
        double s = rng.uniform(0.0, T), d = rng.uniform(0.0, T - s);
        StepFunction swapped(0.0, T, {s, s + d}, {0.0, 1.0, 0.0});
        constexpr double kKeep = -1e300;
        StepFunction alt =
            StepFunction::combine(e.control.k1, tr, [&](double k, double u) { return u < m.theta() ? u : k; });
        StepFunction k1swap = StepFunction::combine(
            StepFunction::combine(swapped, alt, [&](double sel, double a) { return sel > 0.5 ? a : kKeep; }),
            e.control.k1, [&](double x, double k) { return x == kKeep ? k : x; });
        cands.push_back(evaluateControl(m, u0, k1swap, e.control.k2, T, opt));
    }

    // Hold the junction flux below the entropy level, then release at capacity. Only holds whose
    // backlog clears before T keep the integral; the others are near-maximizers and are redrawn.
    const double j_roundoff = 1e-9 * std::max(1.0, mc.J_entropy);
    for (int i = 0, tries = 0; i < 4 && tries < 32; ++tries) {
        CoupledSolution c = incomingLed(m, u0, holdReleaseDatum(m, rng, e.control.gamma, T), T, opt);
        if (c.control.certificate.admissible) {
            FunctionalReport r = controlReport(m, c, u0);
            if (std::fabs(r.J - mc.J_entropy) > j_roundoff) {
                if (membershipUmax(c, mc.J_entropy, eps_J)) {
                    ++mc.near_maximizers;
                    mc.min_near_F = std::min(mc.min_near_F, r.F);
                }
                continue;
            }
        }
        cands.push_back(std::move(c));
        ++i;
    }

    for (const CoupledSolution& c : cands) {
        ++mc.candidates;
        if (!c.control.certificate.admissible) continue;
        if (!membershipUmax(c, mc.J_entropy, eps_J)) continue;
        double F = controlReport(m, c, u0).F;
        ++mc.maximizers;
        if (F > M + eps_F) continue;
        ++mc.survivors;
        mc.min_survivor_F = std::min(mc.min_survivor_F, F);
    }
    const bool min_ok = mc.survivors == 0 || mc.min_survivor_F >= mc.F_entropy - eps_F;
    const bool trace_ok = mc.trace_violation <= delta * std::max(1.0, m.maxSpeed()) + 1e-12;
    const bool snap_ok = mc.snapshot_violation <= delta + 1e-12;
    mc.pass = min_ok && trace_ok && snap_ok;
    return mc;
}

inline MonotoneSuiteResult randomMonotoneSuite(std::uint64_t seed, int count, Monotonicity dir, double delta = 1e-3) {
    const FluxModel m = FluxModel::lwr();
    MonotoneSuiteResult res;
    res.direction = dir;
    res.seed = seed;
    res.delta = delta;
    res.eps_F = defaultEpsF(delta);
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        StepFunction u0 = randomMonotoneDatum(rng, dir);
        double T = std::round(rng.uniform(1.0, 4.0) * 1e3) / 1e3;
        res.cases.push_back(evaluateMonotoneCase(m, u0, T, delta, dir, rng));
    }
    return res;
}

/// Random incoming datum: a few flux levels on random pieces, on either side of theta.
inline StepFunction randomIncomingDatum(const FluxModel& m, Rng& rng, double T) {
    const int n = rng.integer(1, 4);
    std::vector<double> br = n > 1 ? randomBreaks(rng, n - 1, 0.02 * T, 0.98 * T, 0.01 * T) : std::vector<double>{};
    std::vector<double> v;
    for (int i = 0; i < n; ++i) {
        if (rng.uniform(0.0, 1.0) < 0.7)
            v.push_back(m.branchInverse(Branch::Plus, rng.uniform(0.02, 1.0) * m.fmax()));
        else
            v.push_back(rng.uniform(m.uLo(), m.uHi()));
    }
    return StepFunction(0.0, T, br, v);
}


/// Admissible controls never carry more flux than the entropy reference.
inline SuiteReport maximalitySuite(std::uint64_t seed, int count = 100, int data = 20, double delta = 1e-3) {
    const FluxModel m = FluxModel::lwr();
    SuiteReport rep;
    rep.name = "maximality";
    rep.seed = seed;
    Rng rng(seed);
    JunctionOptions opt{delta};
    int tried = 0;
    data = std::max(1, std::min(data, count));
    for (int i = 0; i < data; ++i) {
        StepFunction u0 = randomStepDatum(rng);
        double T = std::round(rng.uniform(1.5, 4.0) * 1e3) / 1e3;
        EntropyResult e = entropyControl(m, u0, T, delta);
        const double Je = e.control.certificate.J;
        const double eps_J = defaultEpsJ(m, T, delta);
        const int want = count / data + (i < count % data ? 1 : 0);
        int got = 0;
        for (int attempt = 0; attempt < 80 && got < want; ++attempt) {
            ++tried;
            StepFunction k1 = attempt % 3 == 2 ? holdReleaseDatum(m, rng, e.control.gamma, T)
                                               : randomIncomingDatum(m, rng, T);
            CoupledSolution c = incomingLed(m, u0, k1, T, opt);
            if (!c.control.certificate.admissible) continue;
            ++got;
            double J = c.control.certificate.J;
            char buf[96];
            std::snprintf(buf, sizeof buf, "J=%.12g J_entropy=%.12g", J, Je);
            rep.cases.push_back({"datum " + std::to_string(i) + " control " + std::to_string(got), J <= Je + eps_J,
                                 Je + eps_J - J, buf});
        }
    }
    rep.stats = {{"data", static_cast<double>(data)},
                 {"candidates", static_cast<double>(tried)},
                 {"admissible", static_cast<double>(rep.cases.size())}};
    return rep;
}

/// Outgoing problems with bounded data variation; checks the trace-variation bound.
inline SuiteReport bvBoundSuite(std::uint64_t seed, int count = 100, double delta = 1e-3) {
    const FluxModel m = FluxModel::lwr();
    SuiteReport rep;
    rep.name = "bvbound";
    rep.seed = seed;
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        StepFunction u0;
        do {
            int jumps = rng.integer(1, 5);
            u0 = StepFunction(0.0, StepFunction::kInf, randomBreaks(rng, jumps, 0.05, 2.0),
                              randomValues(rng, jumps + 1, 0.0, 1.0));
        } while (essentialTV(u0, 0.0, StepFunction::kInf) > 2.0);
        double T = std::round(rng.uniform(1.0, 3.0) * 1e3) / 1e3;
        StepFunction k;
        do {
            int n = rng.integer(1, 4);
            std::vector<double> br = n > 1 ? randomBreaks(rng, n - 1, 0.05, T - 0.05, 0.02) : std::vector<double>{};
            k = StepFunction(0.0, T, br, randomValues(rng, n, 0.0, m.theta(), 0.0));
        } while (essentialTV(fluxOf(m, k), 0.0, T) > 0.5);
        FTSolution sol = solveIBVPOutgoing(m, u0, k, T, delta);
        BVBoundReport b = bvTraceBound(m, u0, k, sol);
        char buf[96];
        std::snprintf(buf, sizeof buf, "lhs=%.12g rhs=%.12g", b.lhs, b.rhs);
        rep.cases.push_back({"instance " + std::to_string(i), b.holds, b.rhs - b.lhs, buf});
    }
    return rep;
}

struct NamedSolution {
    std::string name;
    const FTSolution* full = nullptr;
    const CoupledSolution* coupled = nullptr;
};

/// Random space-time rectangles; the mass balance must close to the relative tolerance.
inline SuiteReport conservationSuite(std::uint64_t seed, int count, const std::vector<NamedSolution>& sols) {
    SuiteReport rep;
    rep.name = "conservation";
    rep.seed = seed;
    if (sols.empty()) return rep;
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        const NamedSolution& ns = sols[static_cast<std::size_t>(rng.integer(0, static_cast<int>(sols.size()) - 1))];
        const FTSolution& ref = ns.full ? *ns.full : ns.coupled->left;
        const double T = ref.T;
        double t1 = rng.uniform(0.0, T), t2 = rng.uniform(0.0, T);
        double a = rng.uniform(-3.0, 3.0), b = rng.uniform(-3.0, 3.0);
        Rectangle r{std::min(t1, t2), std::max(t1, t2), std::min(a, b), std::max(a, b)};
        if (r.t2 - r.t1 < 1e-6 || r.b - r.a < 1e-6) {
            --i;
            continue;
        }
        double res = ns.full ? divergenceBalance(*ns.full, r) : divergenceBalance(*ns.coupled, r);
        double tol = balanceTolerance(ref.model, r);
        char buf[160];
        std::snprintf(buf, sizeof buf, "[%.6g,%.6g]x[%.6g,%.6g] residual=%.3e tol=%.3e", r.t1, r.t2, r.a, r.b, res, tol);
        rep.cases.push_back({ns.name + " #" + std::to_string(i), std::fabs(res) <= tol, tol - std::fabs(res), buf});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Search for a member of the maximizer set with small variation functional.

struct SearchProblem {
    std::string name;
    FluxModel model;
    StepFunction u0;
    double T = 0.0;
    double delta = 1e-3;
};

struct SearchSpec {
    int pieces = 1;
    double level_min = std::numeric_limits<double>::quiet_NaN();  // NaN: level_step
    double level_max = std::numeric_limits<double>::quiet_NaN();  // NaN: f(theta)
    double level_step = 0.005;
    double time_step = -1.0;  // breakpoint grid; negative: T/20
    std::string method = "auto";
    int restarts = 4;
    std::size_t budget = 20000;
    std::uint64_t seed = 1;
    double eps_J = -1.0;
    double M = std::numeric_limits<double>::quiet_NaN();  // NaN: F of the entropy reference
};

struct SearchRecord {
    int iteration = 0;
    double F = 0.0;
    double J = 0.0;
};

struct TangentialShock {
    bool found = false;
    RoadSide side = RoadSide::Outgoing;
    double t_birth = 0.0;
    double speed = 0.0;
};

struct SearchResult {
    std::string method;
    bool found = false;
    double F_best = std::numeric_limits<double>::infinity();
    double J_best = 0.0;
    double F_entropy = 0.0;
    double J_entropy = 0.0;
    double eps_J = 0.0;
    std::vector<double> levels;  // flux levels of the best control
    std::vector<double> breaks;
    CoupledSolution best;
    std::vector<SearchRecord> trace;  // feasible candidates in evaluation order
    int evaluations = 0;
    TangentialShock tangential;
};

/// Shock born on the junction with speed at most `tol` in magnitude.
inline TangentialShock findTangentialShock(const CoupledSolution& c, double tol) {
    TangentialShock best;
    auto scan = [&](const FTSolution& s, RoadSide side) {
        for (const Front& f : s.fronts) {
            if (f.kind != FrontKind::Shock || f.t_birth <= 0.0 || std::fabs(f.x_birth) > 1e-12) continue;
            if (std::fabs(f.speed) > tol) continue;
            if (!best.found || f.t_birth < best.t_birth) best = {true, side, f.t_birth, f.speed};
        }
    };
    scan(c.right, RoadSide::Outgoing);
    scan(c.left, RoadSide::Incoming);
    return best;
}

inline SearchResult searchMinF(const SearchProblem& pb, const SearchSpec& spec) {
    const FluxModel& m = pb.model;
    const double T = pb.T;
    if (spec.pieces < 1) throw Error(ErrorKind::InvalidArgument, "pieces must be at least 1");
    if (!(spec.level_step > 0.0)) throw Error(ErrorKind::InvalidArgument, "level_step must be positive");
    SearchResult res;
    JunctionOptions opt{pb.delta};
    EntropyResult e = entropyControl(m, pb.u0, T, pb.delta);
    FunctionalReport fe = controlReport(m, e, pb.u0);
    res.F_entropy = fe.F;
    res.J_entropy = fe.J;
    res.eps_J = spec.eps_J < 0.0 ? defaultEpsJ(m, T, pb.delta) : spec.eps_J;
    const double M = std::isnan(spec.M) ? fe.F : spec.M;
    const double eps_F = defaultEpsF(pb.delta);

    const double lmin = std::isnan(spec.level_min) ? spec.level_step : spec.level_min;
    const double lmax = std::isnan(spec.level_max) ? m.fmax() : std::min(spec.level_max, m.fmax());
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        double q = std::round((lmin + i * spec.level_step) * 1e12) / 1e12;
        if (q > lmax + 1e-12) break;
        grid.push_back(std::min(q, m.fmax()));
    }
    if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty level grid");
    const int G = static_cast<int>(grid.size());
    const int n = spec.pieces;
    const double dt = spec.time_step > 0.0 ? spec.time_step : T / 20.0;
    const int slots = std::max(1, static_cast<int>(std::floor(T / dt + 1e-9)));

    // Candidate: level indices and breakpoint slots (strictly increasing, inside (0, T)).
    struct Cand {
        std::vector<int> lv;
        std::vector<int> bs;
    };
    auto evaluate = [&](const Cand& c, double& objective) {
        std::vector<double> br, k1v;
        for (int s : c.bs) br.push_back(std::min(s * dt, T));
        for (int i : c.lv) k1v.push_back(m.branchInverse(Branch::Plus, grid[static_cast<std::size_t>(i)]));
        CoupledSolution cs = incomingLed(m, pb.u0, StepFunction(0.0, T, br, k1v), T, opt);
        ++res.evaluations;
        double F = controlReport(m, cs, pb.u0).F;
        double J = cs.control.certificate.J;
        double miss = std::max(0.0, std::fabs(J - res.J_entropy) - res.eps_J);
        bool feasible = cs.control.certificate.admissible && miss == 0.0 && F <= M + eps_F;
        objective = F + 1e3 * (miss + cs.control.certificate.max_flux_mismatch) + (feasible ? 0.0 : 1.0);
        if (feasible) {
            res.trace.push_back({res.evaluations, F, J});
            if (F < res.F_best - 1e-15) {
                res.found = true;
                res.F_best = F;
                res.J_best = J;
                res.best = cs;
                res.levels.clear();
                for (int i : c.lv) res.levels.push_back(grid[static_cast<std::size_t>(i)]);
                res.breaks = br;
            }
        }
        return feasible;
    };
    auto uniformBreaks = [&] {
        std::vector<int> bs;
        for (int i = 1; i < n; ++i) bs.push_back(std::max(1, std::min(slots - 1, (slots * i) / n)));
        return bs;
    };

    double combos = std::pow(static_cast<double>(G), n);
    std::string method = spec.method;
    if (method == "auto") method = combos <= static_cast<double>(spec.budget) ? "exhaustive" : "descent";
    res.method = method;
    if (method == "exhaustive") {
        if (combos > static_cast<double>(spec.budget))
            throw Error(ErrorKind::SearchBudgetExceeded, "exhaustive grid exceeds the evaluation budget");
        Cand c{std::vector<int>(static_cast<std::size_t>(n), 0), uniformBreaks()};
        for (;;) {
            double obj;
            evaluate(c, obj);
            int pos = 0;
            while (pos < n && ++c.lv[static_cast<std::size_t>(pos)] == G) c.lv[static_cast<std::size_t>(pos++)] = 0;
            if (pos == n) break;
        }
    } else if (method == "descent") {
        Rng rng(spec.seed);
        auto nearest = [&](double q) {
            int best = 0;
            for (int i = 1; i < G; ++i)
                if (std::fabs(grid[static_cast<std::size_t>(i)] - q) < std::fabs(grid[static_cast<std::size_t>(best)] - q))
                    best = i;
            return best;
        };
        for (int r = 0; r < std::max(1, spec.restarts); ++r) {
            Cand c{{}, uniformBreaks()};
            if (r > 0 && n > 1 && slots > n) {
                std::vector<int> pool;
                for (int i = 1; i < slots; ++i) pool.push_back(i);
                for (int i = 0; i + 1 < n; ++i)
                    std::swap(pool[static_cast<std::size_t>(i)],
                              pool[static_cast<std::size_t>(rng.integer(i, static_cast<int>(pool.size()) - 1))]);
                c.bs.assign(pool.begin(), pool.begin() + (n - 1));
                std::sort(c.bs.begin(), c.bs.end());
            }
            for (int i = 0; i < n; ++i) {
                double t = (i + 0.5) * T / n;
                c.lv.push_back(r == 0 ? nearest(e.control.gamma.value(t)) : rng.integer(0, G - 1));
            }
            double cur;
            evaluate(c, cur);
            bool improved = true;
            while (improved && static_cast<std::size_t>(res.evaluations) < spec.budget) {
                improved = false;
                for (int i = 0; i < n && !improved; ++i)
                    for (int d : {-1, 1}) {
                        Cand nc = c;
                        int v = nc.lv[static_cast<std::size_t>(i)] + d;
                        if (v < 0 || v >= G) continue;
                        nc.lv[static_cast<std::size_t>(i)] = v;
                        double o;
                        evaluate(nc, o);
                        if (o < cur - 1e-15) {
                            c = nc;
                            cur = o;
                            improved = true;
                            break;
                        }
                    }
                for (int i = 0; i + 1 < n && !improved; ++i)
                    for (int d : {-1, 1}) {
                        Cand nc = c;
                        int v = nc.bs[static_cast<std::size_t>(i)] + d;
                        int lo = i == 0 ? 1 : nc.bs[static_cast<std::size_t>(i - 1)] + 1;
                        int hi = i + 2 < n ? nc.bs[static_cast<std::size_t>(i + 1)] - 1 : slots - 1;
                        if (v < lo || v > hi) continue;
                        nc.bs[static_cast<std::size_t>(i)] = v;
                        double o;
                        evaluate(nc, o);
                        if (o < cur - 1e-15) {
                            c = nc;
                            cur = o;
                            improved = true;
                            break;
                        }
                    }
            }
            if (static_cast<std::size_t>(res.evaluations) >= spec.budget) break;
        }
    } else {
        throw Error(ErrorKind::InvalidArgument, "unknown search method: " + method);
    }
    if (res.found) res.tangential = findTangentialShock(res.best, 10.0 * pb.delta);
    return res;
}

}  // namespace ftj

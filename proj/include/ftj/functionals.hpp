#pragma once

#include <algorithm>
#include <cmath>

#include "fronttrack.hpp"

namespace ftj {

/// Sum of jump magnitudes strictly inside (a, b).
inline double essentialTV(const StepFunction& g, double a, double b) {
    double tv = 0.0;
    const auto& br = g.breakpoints();
    const auto& v = g.values();
    for (std::size_t i = 0; i < br.size(); ++i)
        if (br[i] > a && br[i] < b) tv += std::fabs(v[i + 1] - v[i]);
    return tv;
}

inline double essentialTV(const StepFunction& g) { return essentialTV(g, g.lo(), g.hi()); }

inline double closedTV(const StepFunction& g, double c, double d) {
    return essentialTV(g, c, d) + std::fabs(g.rightLimit(c) - g.leftLimit(c)) +
           std::fabs(g.rightLimit(d) - g.leftLimit(d));
}

inline double fluxIntegralJ(const StepFunction& gamma, double T) { return gamma.integral(0.0, T); }

struct FunctionalReport {
    double J = 0.0;
    double tv_interior = 0.0;
    double initial_left = 0.0;    // |f(u0(0-)) - gamma(0+)|
    double terminal_left = 0.0;   // |f(u1(T,0)) - gamma(T-)|
    double initial_right = 0.0;   // |f(u0(0+)) - gamma(0+)|
    double terminal_right = 0.0;  // |f(u2(T,0)) - gamma(T-)|
    double F = 0.0;
};

inline FunctionalReport functionalF(const StepFunction& gamma, const StepFunction& u0, double left_T_trace,
                                    double right_T_trace, const FluxModel& m) {
    FunctionalReport r;
    const double T = gamma.hi();
    const double g0 = gamma.first(), gT = gamma.last();
    r.J = fluxIntegralJ(gamma, T);
    r.tv_interior = essentialTV(gamma, 0.0, T);
    r.initial_left = std::fabs(m.flux(u0.leftLimit(0.0)) - g0);
    r.terminal_left = std::fabs(m.flux(left_T_trace) - gT);
    r.initial_right = std::fabs(m.flux(u0.rightLimit(0.0)) - g0);
    r.terminal_right = std::fabs(m.flux(right_T_trace) - gT);
    r.F = r.tv_interior + r.initial_left + r.terminal_left + r.initial_right + r.terminal_right;
    return r;
}

struct BVBoundReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double osc = 0.0;
    double tv_fk = 0.0;
    double tv_u = 0.0;
    double sup_fprime = 0.0;
    bool holds = false;
};

/// Trace-variation bound for the outgoing problem with datum u0 on (0, inf) and boundary data k.
inline BVBoundReport bvTraceBound(const FluxModel& m, const StepFunction& u0, const StepFunction& k,
                                  const FTSolution& sol) {
    for (double v : k.values())
        if (v > m.theta() + kStateTol)
            throw Error(ErrorKind::HypothesisViolated, "boundary datum above theta");
    const StepFunction u = u0.restrict(0.0, StepFunction::kInf);
    BVBoundReport r;
    StepFunction ft = sol.boundaryTrace().map([&](double v) { return m.flux(v); });
    r.lhs = essentialTV(ft, 0.0, sol.T);
    StepFunction fk = k.map([&](double v) { return m.flux(v); });
    r.tv_fk = essentialTV(fk, 0.0, sol.T);
    r.tv_u = essentialTV(u, 0.0, StepFunction::kInf);
    for (double v : u.values()) r.sup_fprime = std::max(r.sup_fprime, std::fabs(m.deriv(v)));
    for (double a : k.values())
        for (double b : u.values()) r.osc = std::max(r.osc, std::fabs(m.flux(a) - m.flux(b)));
    if (!std::isfinite(r.tv_fk) || !std::isfinite(r.tv_u))
        throw Error(ErrorKind::HypothesisViolated, "infinite variation in the data");
    r.rhs = 2.0 * r.tv_fk + r.sup_fprime * r.tv_u + r.osc;
    r.holds = r.lhs <= r.rhs + 1e-9;
    return r;
}

}  // namespace ftj

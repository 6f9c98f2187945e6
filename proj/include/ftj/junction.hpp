#pragma once

#include <algorithm>
#include <cmath>

#include "functionals.hpp"

namespace ftj {

struct Certificate {
    double max_flux_mismatch = 0.0;
    double worst_time = 0.0;
    bool admissible = false;
    double J = 0.0;
};

struct Control {
    StepFunction gamma;
    StepFunction k1;
    StepFunction k2;
    Certificate certificate;
};

struct CoupledSolution {
    FTSolution left;   // incoming road, x < 0
    FTSolution right;  // outgoing road, x > 0
    Control control;

    double leftTerminal() const { return left.value(left.T, 0.0, Side::Left); }
    double rightTerminal() const { return right.value(right.T, 0.0, Side::Right); }
};

struct EntropyResult {
    Control control;
    FTSolution full;

    double leftTerminal() const { return full.value(full.T, 0.0, Side::Left); }
    double rightTerminal() const { return full.value(full.T, 0.0, Side::Right); }
};

struct JunctionOptions {
    double delta = 1e-3;
    double eps_match = -1.0;  // negative: 1e-9 f(theta)
    double eps_time = -1.0;   // negative: 1e-9 max(1, T)
    double eps_J = -1.0;      // negative: defaultEpsJ; only read by the scenario drivers
    std::size_t max_events = 5'000'000;
};

inline double defaultEpsMatch(const FluxModel& m) { return 1e-9 * std::fabs(m.fmax()); }
inline double defaultEpsJ(const FluxModel& m, double T, double delta) {
    return std::max(1e-9, 2.0 * delta * T * m.maxSpeed());
}
inline double defaultEpsF(double delta) { return std::max(1e-6, 4.0 * delta); }

inline StepFunction fluxOf(const FluxModel& m, const StepFunction& g) {
    return g.map([&](double v) { return m.flux(v); });
}

/// Entropy reference control: the flux trace of the Cauchy solution at x=0.
inline EntropyResult entropyControl(const FluxModel& m, const StepFunction& u0, double T, const SolveOptions& opt) {
    EntropyResult r;
    r.full = solveCauchy(m, u0, T, opt);
    StepFunction tr = r.full.trace(0.0, Side::Left);
    r.control.gamma = fluxOf(m, tr);
    r.control.k1 = r.control.gamma.map([&](double q) { return m.branchInverse(Branch::Plus, q); });
    r.control.k2 = r.control.gamma.map([&](double q) { return m.branchInverse(Branch::Minus, q); });
    r.control.certificate.admissible = true;
    r.control.certificate.max_flux_mismatch = 0.0;
    r.control.certificate.J = fluxIntegralJ(r.control.gamma, T);
    return r;
}

inline EntropyResult entropyControl(const FluxModel& m, const StepFunction& u0, double T, double delta) {
    return entropyControl(m, u0, T, SolveOptions{delta});
}

namespace detail {

/// Replace data on the wrong side of theta by the admissible-branch state carrying the trace flux.
inline StepFunction normalizeData(const FluxModel& m, RoadSide side, const StepFunction& k, const StepFunction& tr) {
    const double th = m.theta();
    return StepFunction::combine(k, tr, [&](double kv, double uv) {
        bool ok = side == RoadSide::Incoming ? kv >= th - kStateTol : kv <= th + kStateTol;
        return ok ? kv : normalizedDatum(m, side, uv);
    });
}

}  // namespace detail

/// Solves both roads and certifies the flux match; never throws NotAdmissible.
inline CoupledSolution evaluateControl(const FluxModel& m, const StepFunction& u0, const StepFunction& k1,
                                      const StepFunction& k2, double T, const JunctionOptions& opt = {}) {
    const double eps_match = opt.eps_match < 0.0 ? defaultEpsMatch(m) : opt.eps_match;
    const double eps_time = opt.eps_time < 0.0 ? 1e-9 * std::max(1.0, T) : opt.eps_time;
    SolveOptions so{opt.delta, opt.max_events};
    CoupledSolution c;
    c.left = solveIBVPIncoming(m, u0, k1, T, so);
    c.right = solveIBVPOutgoing(m, u0, k2, T, so);
    StepFunction tr1 = c.left.boundaryTrace();
    StepFunction tr2 = c.right.boundaryTrace();
    StepFunction g1 = fluxOf(m, tr1), g2 = fluxOf(m, tr2);

    StepFunction diff = StepFunction::combine(g1, g2, [](double a, double b) { return std::fabs(a - b); });
    Certificate cert;
    for (std::size_t i = 0; i < diff.pieces(); ++i) {
        double a = diff.pieceStart(i), b = diff.pieceEnd(i);
        if (b - a <= eps_time) continue;
        if (diff.values()[i] > cert.max_flux_mismatch) {
            cert.max_flux_mismatch = diff.values()[i];
            cert.worst_time = 0.5 * (a + b);
        }
    }
    cert.admissible = cert.max_flux_mismatch <= eps_match;
    cert.J = fluxIntegralJ(g1, T);
    c.control.gamma = g1;
    c.control.k1 = detail::normalizeData(m, RoadSide::Incoming, k1.restrict(0.0, T), tr1);
    c.control.k2 = detail::normalizeData(m, RoadSide::Outgoing, k2.restrict(0.0, T), tr2);
    c.control.certificate = cert;
    return c;
}

inline CoupledSolution makeControl(const FluxModel& m, const StepFunction& u0, const StepFunction& k1,
                                   const StepFunction& k2, double T, const JunctionOptions& opt = {}) {
    CoupledSolution c = evaluateControl(m, u0, k1, k2, T, opt);
    if (!c.control.certificate.admissible)
        throw NotAdmissibleError(c.control.certificate.max_flux_mismatch, c.control.certificate.worst_time);
    return c;
}

inline bool membershipUmax(const CoupledSolution& candidate, double reference_J, double eps_J) {
    return std::fabs(candidate.control.certificate.J - reference_J) <= eps_J;
}

inline FunctionalReport controlReport(const FluxModel& m, const CoupledSolution& c, const StepFunction& u0) {
    return functionalF(c.control.gamma, u0, c.leftTerminal(), c.rightTerminal(), m);
}

inline FunctionalReport controlReport(const FluxModel& m, const EntropyResult& e, const StepFunction& u0) {
    return functionalF(e.control.gamma, u0, e.leftTerminal(), e.rightTerminal(), m);
}

}  // namespace ftj

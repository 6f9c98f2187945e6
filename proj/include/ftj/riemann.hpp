#pragma once

#include <cmath>
#include <string>

#include "flux.hpp"

namespace ftj {

// Shocks slower than this are treated as stationary.
inline constexpr double kStationarySpeed = 1e-13;
inline constexpr double kStateTol = 1e-12;

enum class WaveKind { Shock, Rarefaction, Constant };

struct WaveFan {
    double ul = 0.0, ur = 0.0;
    WaveKind kind = WaveKind::Constant;
    double speed = 0.0;     // shock only
    double speed_lo = 0.0;  // rarefaction: f'(ul)
    double speed_hi = 0.0;  // rarefaction: f'(ur)
};

inline WaveFan solveRiemann(const FluxModel& m, double ul, double ur) {
    if (!m.inDomain(ul) || !m.inDomain(ur))
        throw Error(ErrorKind::OutOfDomain, "Riemann states outside the working range");
    WaveFan w;
    w.ul = ul;
    w.ur = ur;
    if (ul == ur) {
        w.kind = WaveKind::Constant;
    } else if (ul < ur) {
        w.kind = WaveKind::Shock;
        w.speed = std::fabs(ur - ul) < 1e-14 ? m.deriv(0.5 * (ul + ur)) : m.shockSpeed(ul, ur);
    } else {
        w.kind = WaveKind::Rarefaction;
        w.speed_lo = m.deriv(ul);
        w.speed_hi = m.deriv(ur);
    }
    return w;
}

/// Self-similar value on the ray x/t = slope. A shock moving exactly at `slope`
/// reports its right state.
inline double sampleFan(const WaveFan& w, const FluxModel& m, double slope) {
    switch (w.kind) {
    case WaveKind::Constant: return w.ul;
    case WaveKind::Shock: return slope < w.speed ? w.ul : w.ur;
    case WaveKind::Rarefaction:
        if (slope <= w.speed_lo) return w.ul;
        if (slope >= w.speed_hi) return w.ur;
        return m.derivInverse(slope);
    }
    return w.ul;
}

enum class RoadSide { Incoming, Outgoing };
enum class BoundaryMode { Attained, Relaxed };

struct BoundaryResolution {
    double realized_trace = 0.0;
    WaveFan emitted;
    BoundaryMode satisfied_mode = BoundaryMode::Attained;
};

/// Boundary Riemann problem for any datum k (no normalization needed):
/// the fan between the interior state and k, restricted to the domain side.
/// Waves of zero speed stay outside the domain.
inline BoundaryResolution boundaryTrace(const FluxModel& m, RoadSide side, double k, double interior) {
    BoundaryResolution r;
    if (side == RoadSide::Incoming) {
        r.emitted = solveRiemann(m, interior, k);
        const WaveFan& w = r.emitted;
        switch (w.kind) {
        case WaveKind::Constant: r.realized_trace = interior; break;
        case WaveKind::Shock: r.realized_trace = w.speed < -kStationarySpeed ? k : interior; break;
        case WaveKind::Rarefaction:
            if (w.speed_hi <= 0.0) r.realized_trace = k;
            else if (w.speed_lo >= 0.0) r.realized_trace = interior;
            else r.realized_trace = m.theta();
            break;
        }
    } else {
        r.emitted = solveRiemann(m, k, interior);
        const WaveFan& w = r.emitted;
        switch (w.kind) {
        case WaveKind::Constant: r.realized_trace = interior; break;
        case WaveKind::Shock: r.realized_trace = w.speed > kStationarySpeed ? k : interior; break;
        case WaveKind::Rarefaction:
            if (w.speed_lo >= 0.0) r.realized_trace = k;
            else if (w.speed_hi <= 0.0) r.realized_trace = interior;
            else r.realized_trace = m.theta();
            break;
        }
    }
    r.satisfied_mode = std::fabs(r.realized_trace - k) <= 1e-14 ? BoundaryMode::Attained : BoundaryMode::Relaxed;
    return r;
}

inline BoundaryResolution resolveBoundaryOutgoing(const FluxModel& m, double k, double interior) {
    if (k > m.theta() + kStateTol)
        throw Error(ErrorKind::BoundaryDatumAboveTheta, "outgoing datum " + std::to_string(k) + " above theta");
    return boundaryTrace(m, RoadSide::Outgoing, k, interior);
}

inline BoundaryResolution resolveBoundaryIncoming(const FluxModel& m, double k, double interior) {
    if (k < m.theta() - kStateTol)
        throw Error(ErrorKind::BoundaryDatumBelowTheta, "incoming datum " + std::to_string(k) + " below theta");
    return boundaryTrace(m, RoadSide::Incoming, k, interior);
}

/// Normalized datum that yields the same boundary behaviour: the state on the
/// admissible branch carrying the realized trace flux.
inline double normalizedDatum(const FluxModel& m, RoadSide side, double trace) {
    double q = m.flux(trace);
    return m.branchInverse(side == RoadSide::Incoming ? Branch::Plus : Branch::Minus, q);
}

}  // namespace ftj

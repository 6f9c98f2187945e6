#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "junction.hpp"

namespace ftj {

enum class CharDirection { Backward, Forward };
enum class Extremality { Minimal, Maximal };

struct CharPath {
    std::vector<std::pair<double, double>> vertices;  // (t, x), in the order traversed
    CharDirection direction = CharDirection::Backward;
    Extremality extremality = Extremality::Minimal;
    std::pair<double, double> terminal{0.0, 0.0};
    double origin_foot = 0.0;     // backward: position at t=0 (or 0 if it ended on the boundary)
    bool hit_boundary = false;    // backward: ended on x=0 at time foot_time
    double foot_time = 0.0;
    double departure_time = 0.0;  // forward: when the path leaves x=0
    double t_hat = std::numeric_limits<double>::infinity();  // forward: return time to x=0
    bool returned = false;

    /// Position at time t by linear interpolation along the polyline.
    double positionAt(double t) const {
        for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
            auto [ta, xa] = vertices[i];
            auto [tb, xb] = vertices[i + 1];
            double lo = std::min(ta, tb), hi = std::max(ta, tb);
            if (t >= lo && t <= hi) {
                if (tb == ta) return xb;
                return xa + (xb - xa) * (t - ta) / (tb - ta);
            }
        }
        return vertices.empty() ? 0.0 : vertices.back().second;
    }
};

namespace detail {

inline double charEpsX(double x) { return 1e-10 * (1.0 + std::fabs(x)); }

/// Fronts passing through (t, x) that exist just before t (below) or just after t (above).
inline std::vector<const Front*> frontsThrough(const FTSolution& sol, double t, double x, bool below) {
    std::vector<const Front*> out;
    const double eps = charEpsX(x);
    for (const Front& f : sol.fronts) {
        if (f.t_birth > t) break;
        bool live = below ? (f.t_birth < t && t <= f.t_death) : (f.t_birth <= t && t < f.t_death);
        if (!live) continue;
        if (std::fabs(f.position(t) - x) <= eps) out.push_back(&f);
    }
    return out;
}

/// State of the region containing (t, x) just before (below) or after t, away from fronts.
inline double regionState(const FTSolution& sol, double t, double x, bool below) {
    const Front* L = nullptr;
    const Front* R = nullptr;
    for (const Front& f : sol.fronts) {
        if (f.t_birth > t) break;
        bool live = below ? (f.t_birth < t && t <= f.t_death) : (f.t_birth <= t && t < f.t_death);
        if (!live) continue;
        double p = f.position(t);
        if (p < x) {
            if (!L || p > L->position(t)) L = &f;
        } else if (!R || p < R->position(t)) {
            R = &f;
        }
    }
    if (sol.domain == Domain::OutgoingHalfLine) {
        if (R) return R->ul;
        if (L) return L->ur;
        return sol.far_state;
    }
    if (L) return L->ur;
    if (R) return R->ul;
    return sol.far_state;
}

struct Choice {
    double slope = 0.0;
    const Front* follow = nullptr;
};

/// Admissible directions at a point; fronts are ordered left to right in the
/// time direction of travel. Wedge slopes must stay between their bounding fronts.
inline std::vector<Choice> directions(const FTSolution& sol, double t, double x, bool backward) {
    std::vector<const Front*> B = frontsThrough(sol, t, x, backward);
    std::vector<Choice> out;
    const FluxModel& m = sol.model;
    if (B.empty()) {
        out.push_back({m.deriv(regionState(sol, t, x, backward)), nullptr});
        return out;
    }
    // Backward in time a larger speed lies further left; forward a smaller speed does.
    std::sort(B.begin(), B.end(), [backward](const Front* a, const Front* b) {
        return backward ? a->speed > b->speed : a->speed < b->speed;
    });
    const double tol = 1e-12;
    auto leftOf = [&](double lam, double s) { return backward ? lam >= s - tol : lam <= s + tol; };
    auto rightOf = [&](double lam, double s) { return backward ? lam <= s + tol : lam >= s - tol; };
    {
        double lam = m.deriv(B.front()->ul);
        if (leftOf(lam, B.front()->speed)) out.push_back({lam, nullptr});
    }
    for (std::size_t i = 1; i < B.size(); ++i) {
        double lam = m.deriv(B[i - 1]->ur);
        if (rightOf(lam, B[i - 1]->speed) && leftOf(lam, B[i]->speed)) out.push_back({lam, nullptr});
    }
    {
        double lam = m.deriv(B.back()->ur);
        if (rightOf(lam, B.back()->speed)) out.push_back({lam, nullptr});
    }
    bool genuine = !out.empty();
    for (const Front* f : B)
        if (!backward || f->kind == FrontKind::FanFront || !genuine) out.push_back({f->speed, f});
    return out;
}

/// Leftmost (pickLeft) choice in the direction of travel.
inline Choice pick(const std::vector<Choice>& cs, bool backward, bool pickLeft) {
    Choice best = cs.front();
    for (const Choice& c : cs) {
        bool more_left = backward ? c.slope > best.slope : c.slope < best.slope;
        bool more_right = backward ? c.slope < best.slope : c.slope > best.slope;
        if ((pickLeft && more_left) || (!pickLeft && more_right)) best = c;
    }
    return best;
}

}  // namespace detail

/// Minimal or maximal backward generalized characteristic from (t, x).
inline CharPath backwardCharacteristic(const FTSolution& sol, double t, double x, Extremality ext) {
    CharPath path;
    path.direction = CharDirection::Backward;
    path.extremality = ext;
    path.terminal = {t, x};
    path.vertices.push_back({t, x});
    const bool half = sol.domain != Domain::FullLine;
    const std::size_t guard = 4 * sol.fronts.size() + 16;

    for (std::size_t iter = 0; iter < guard && t > 0.0; ++iter) {
        if (half && iter > 0 && std::fabs(x) <= detail::charEpsX(0.0)) {
            path.hit_boundary = true;
            path.foot_time = t;
            break;
        }
        auto cs = detail::directions(sol, t, x, true);
        detail::Choice c = detail::pick(cs, true, ext == Extremality::Minimal);
        if (c.follow) {
            t = c.follow->t_birth;
            x = c.follow->x_birth;
            path.vertices.push_back({t, x});
            continue;
        }
        // Straight segment x - lam (t - tau), tau decreasing; stop at the latest front crossing.
        const double lam = c.slope;
        const double tol_t = 1e-11 * std::max(1.0, t);
        double tau_hit = 0.0;
        for (const Front& f : sol.fronts) {
            if (f.t_birth >= t) break;
            if (f.speed == lam) continue;
            double tau = (f.x_birth - f.speed * f.t_birth - x + lam * t) / (lam - f.speed);
            double hi = std::min(f.t_death, t);
            if (tau >= f.t_birth && tau <= hi && tau < t - tol_t && tau > tau_hit) tau_hit = tau;
        }
        if (half && lam != 0.0) {
            double tb = t - x / lam;  // where the segment meets x=0
            if (tb < t - tol_t && tb > tau_hit) {
                path.vertices.push_back({tb, 0.0});
                path.hit_boundary = true;
                path.foot_time = tb;
                t = tb;
                x = 0.0;
                break;
            }
        }
        x = x - lam * (t - tau_hit);
        t = tau_hit;
        path.vertices.push_back({t, x});
    }
    if (half && !path.hit_boundary && t > 0.0 && std::fabs(x) <= detail::charEpsX(0.0)) {
        path.hit_boundary = true;
        path.foot_time = t;
    }
    path.origin_foot = path.hit_boundary ? 0.0 : x;
    return path;
}

/// Maximal forward generalized characteristic leaving the outgoing boundary at time t.
inline CharPath forwardBoundaryCharacteristic(const FTSolution& sol, double t) {
    if (sol.domain != Domain::OutgoingHalfLine)
        throw Error(ErrorKind::InvalidArgument, "forward boundary characteristic needs an outgoing solution");
    const FluxModel& m = sol.model;
    const double th = m.theta();
    const double u = sol.value(t, 0.0, Side::Right);
    const double k = sol.boundary_datum.value(t);
    double lam;
    if (u < th) {
        lam = m.deriv(u);
    } else if (k < th && th < u && u <= m.companion(k) + 1e-9) {
        lam = (m.flux(u) - m.flux(k)) / (u - k);
    } else {
        throw Error(ErrorKind::NoForwardCharacteristic,
                    "no forward characteristic at t=" + std::to_string(t) + " (u=" + std::to_string(u) +
                        ", k=" + std::to_string(k) + ")");
    }

    CharPath path;
    path.direction = CharDirection::Forward;
    path.extremality = Extremality::Maximal;
    path.vertices.push_back({t, 0.0});
    const double T = sol.T;
    const double eps0 = detail::charEpsX(0.0);
    double x = 0.0;
    const Front* follow = nullptr;
    path.departure_time = t;

    // A tangential start waits on the boundary until the junction emits a front.
    if (std::fabs(lam) <= 1e-9) {
        const Front* first = nullptr;
        for (const Front& f : sol.fronts) {
            if (f.t_birth < t || f.t_birth >= T) continue;
            if (std::fabs(f.x_birth) > eps0 || f.speed <= 0.0) continue;
            if (!first || f.t_birth < first->t_birth || (f.t_birth == first->t_birth && f.speed > first->speed))
                first = &f;
        }
        if (!first) {
            path.vertices.push_back({T, 0.0});
            path.terminal = {T, 0.0};
            path.departure_time = T;
            return path;
        }
        t = first->t_birth;
        path.vertices.push_back({t, 0.0});
        path.departure_time = t;
        follow = first;
    } else {
        for (const Front& f : sol.fronts) {
            if (f.t_birth > t) break;
            if (f.t_birth == t && std::fabs(f.x_birth) <= eps0 && std::fabs(f.speed - lam) <= 1e-9) follow = &f;
        }
    }

    const std::size_t guard = 4 * sol.fronts.size() + 16;
    for (std::size_t iter = 0; iter < guard && t < T; ++iter) {
        if (follow) {
            double te = std::min(follow->t_death, T);
            x = follow->position(te);
            t = te;
            path.vertices.push_back({t, x});
            if (t >= T) break;
            if (x <= eps0) {
                path.returned = true;
                path.t_hat = t;
                break;
            }
            auto cs = detail::directions(sol, t, x, false);
            detail::Choice c = detail::pick(cs, false, false);
            follow = c.follow;
            lam = c.slope;
            continue;
        }
        // Straight segment; stop at the first shock crossing, the boundary or the horizon.
        const double tol_t = 1e-11 * std::max(1.0, t);
        double tau_hit = T;
        const Front* hit = nullptr;
        for (const Front& f : sol.fronts) {
            if (f.t_birth >= tau_hit) break;
            if (f.t_death <= t || f.speed == lam) continue;
            double tau = (f.x_birth - f.speed * f.t_birth - x + lam * t) / (lam - f.speed);
            if (tau > t + tol_t && tau >= f.t_birth && tau <= f.t_death && tau < tau_hit) {
                tau_hit = tau;
                hit = &f;
            }
        }
        double tb = lam < 0.0 ? t - x / lam : T + 1.0;
        if (tb <= tau_hit) {
            path.vertices.push_back({tb, 0.0});
            path.returned = true;
            path.t_hat = tb;
            t = tb;
            x = 0.0;
            break;
        }
        x = x + lam * (tau_hit - t);
        t = tau_hit;
        path.vertices.push_back({t, x});
        if (!hit) break;
        auto cs = detail::directions(sol, t, x, false);
        detail::Choice c = detail::pick(cs, false, false);
        follow = c.follow;
        lam = c.slope;
    }
    path.terminal = path.vertices.back();
    return path;
}

/// Exact trace of a centered rarefaction at a fixed position x.
struct RarefactionTrace {
    FluxModel model;
    double center = 0.0, ul = 0.0, ur = 0.0, x = 0.0;
    double t_lo = 0.0, t_hi = 0.0;

    double value(double t) const {
        checkWindow(t);
        return model.derivInverse((x - center) / t);
    }
    double flux(double t) const { return model.flux(value(t)); }

    /// Exact integral of f(u(t, x)) over [a, b] inside the window.
    double fluxIntegral(double a, double b) const {
        checkWindow(a);
        checkWindow(b);
        const double d = x - center;
        switch (model.family()) {
        case FluxFamily::QuadraticLWR: {
            const double al = model.alpha(), be = model.beta(), c = model.offset();
            return (al * be * be / 4.0 + c) * (b - a) + d * d / (4.0 * al) * (1.0 / b - 1.0 / a);
        }
        case FluxFamily::NegHalfSquare: return d * d / 2.0 * (1.0 / b - 1.0 / a);
        case FluxFamily::TabulatedConcave: break;
        }
        return simpson(a, b, 1e-12, 40);
    }

private:
    void checkWindow(double t) const {
        const double tol = 1e-12 * std::max(1.0, std::fabs(t));
        if (!(t >= t_lo - tol && t <= t_hi + tol))
            throw Error(ErrorKind::OutsideFanWindow, "time " + std::to_string(t) + " outside the fan window");
    }

    double f(double t) const { return model.flux(model.derivInverse((x - center) / t)); }

    double simpson(double a, double b, double eps, int depth) const {
        double c = 0.5 * (a + b);
        double fa = f(a), fb = f(b), fc = f(c);
        double whole = (b - a) / 6.0 * (fa + 4 * fc + fb);
        return simpsonStep(a, b, fa, fb, fc, whole, eps, depth);
    }

    double simpsonStep(double a, double b, double fa, double fb, double fc, double whole, double eps,
                       int depth) const {
        double c = 0.5 * (a + b), d = 0.5 * (a + c), e = 0.5 * (c + b);
        double fd = f(d), fe = f(e);
        double left = (c - a) / 6.0 * (fa + 4 * fd + fc);
        double right = (b - c) / 6.0 * (fc + 4 * fe + fb);
        if (depth <= 0 || std::fabs(left + right - whole) <= 15 * eps)
            return left + right + (left + right - whole) / 15.0;
        return simpsonStep(a, c, fa, fc, fd, left, eps / 2, depth - 1) +
               simpsonStep(c, b, fc, fb, fe, right, eps / 2, depth - 1);
    }
};

inline RarefactionTrace exactRarefactionTrace(const FluxModel& m, double center, double ul, double ur, double x) {
    if (!(ul > ur)) throw Error(ErrorKind::InvalidArgument, "a rarefaction needs ul > ur");
    RarefactionTrace r;
    r.model = m;
    r.center = center;
    r.ul = ul;
    r.ur = ur;
    r.x = x;
    const double lo = m.deriv(ul), hi = m.deriv(ur);
    const double d = x - center;
    const double inf = std::numeric_limits<double>::infinity();
    if (d == 0.0) {
        if (!(lo <= 0.0 && 0.0 <= hi)) throw Error(ErrorKind::OutsideFanWindow, "fan never covers its center");
        r.t_lo = 0.0;
        r.t_hi = inf;
    } else if (d > 0.0) {
        if (!(hi > 0.0)) throw Error(ErrorKind::OutsideFanWindow, "fan never reaches x");
        r.t_lo = d / hi;
        r.t_hi = lo > 0.0 ? d / lo : inf;
    } else {
        if (!(lo < 0.0)) throw Error(ErrorKind::OutsideFanWindow, "fan never reaches x");
        r.t_lo = d / lo;
        r.t_hi = hi < 0.0 ? d / hi : inf;
    }
    return r;
}

struct Rectangle {
    double t1 = 0.0, t2 = 0.0, a = 0.0, b = 0.0;
};

/// Largest |f| over the working range.
inline double fluxScale(const FluxModel& m) {
    return std::max({std::fabs(m.flux(m.uLo())), std::fabs(m.flux(m.uHi())), std::fabs(m.fmax())});
}

inline double balanceTolerance(const FluxModel& m, const Rectangle& r, double rel = 1e-8) {
    double perimeter = 2.0 * (r.b - r.a) + 2.0 * (r.t2 - r.t1);
    return rel * std::max(1.0, perimeter * fluxScale(m));
}

/// Space-time mass balance over a rectangle inside the domain of one solution.
inline double divergenceBalance(const FTSolution& sol, const Rectangle& r) {
    const FluxModel& m = sol.model;
    double mass = sol.snapshot(r.t2).integral(r.a, r.b) - sol.snapshot(r.t1).integral(r.a, r.b);
    double out = fluxOf(m, sol.trace(r.b, Side::Left)).integral(r.t1, r.t2);
    double in = fluxOf(m, sol.trace(r.a, Side::Right)).integral(r.t1, r.t2);
    return mass + out - in;
}

/// Balance over a rectangle that may straddle the junction of a coupled pair.
inline double divergenceBalance(const CoupledSolution& c, const Rectangle& r) {
    if (r.b <= 0.0) return divergenceBalance(c.left, r);
    if (r.a >= 0.0) return divergenceBalance(c.right, r);
    const FluxModel& m = c.left.model;
    double mass = c.left.snapshot(r.t2).integral(r.a, 0.0) - c.left.snapshot(r.t1).integral(r.a, 0.0) +
                  c.right.snapshot(r.t2).integral(0.0, r.b) - c.right.snapshot(r.t1).integral(0.0, r.b);
    double out = fluxOf(m, c.right.trace(r.b, Side::Left)).integral(r.t1, r.t2);
    double in = fluxOf(m, c.left.trace(r.a, Side::Right)).integral(r.t1, r.t2);
    return mass + out - in;
}

}  // namespace ftj

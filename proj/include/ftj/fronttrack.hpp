#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "riemann.hpp"
#include "step_function.hpp"

namespace ftj {

enum class Domain { FullLine, IncomingHalfLine, OutgoingHalfLine };
enum class FrontKind { Shock, FanFront };
enum class EventKind { Collision, BoundaryJump, BoundaryEmission, FrontAbsorbedAtBoundary };
enum class Side { Left, Right };

inline const char* frontKindName(FrontKind k) { return k == FrontKind::Shock ? "shock" : "fan"; }

inline const char* eventKindName(EventKind k) {
    switch (k) {
    case EventKind::Collision: return "collision";
    case EventKind::BoundaryJump: return "boundary_jump";
    case EventKind::BoundaryEmission: return "boundary_emission";
    case EventKind::FrontAbsorbedAtBoundary: return "absorbed";
    }
    return "?";
}

/// A straight discontinuity between two constant states. Interactions end a
/// front and start new ones, so every front has a single segment.
struct Front {
    int id = 0;
    FrontKind kind = FrontKind::Shock;
    double t_birth = 0.0, x_birth = 0.0;
    double t_death = std::numeric_limits<double>::infinity();
    double speed = 0.0;
    double ul = 0.0, ur = 0.0;

    double position(double t) const { return x_birth + speed * (t - t_birth); }
    bool aliveAt(double t) const { return t_birth <= t && t < t_death; }

    std::vector<std::pair<double, double>> trajectory(double horizon) const {
        double te = std::min(t_death, horizon);
        return {{t_birth, x_birth}, {te, position(te)}};
    }
};

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::Collision;
    double x = 0.0;
};

struct SolveOptions {
    double delta = 1e-3;
    std::size_t max_events = 5'000'000;
};

class FTSolution {
public:
    FluxModel model;
    Domain domain = Domain::FullLine;
    double T = 0.0;
    double delta = 0.0;
    std::vector<Front> fronts;  // ordered by id, hence by birth time
    std::vector<Event> events;
    StepFunction initial_datum;
    StepFunction boundary_datum;
    double far_state = 0.0;  // state at -inf (full line, incoming) or +inf (outgoing)

    double domainLo() const { return domain == Domain::OutgoingHalfLine ? 0.0 : -StepFunction::kInf; }
    double domainHi() const { return domain == Domain::IncomingHalfLine ? 0.0 : StepFunction::kInf; }

    /// One-sided value u(t, x-) or u(t, x+).
    double value(double t, double x, Side side) const {
        const Front* L = nullptr;  // rightmost front strictly left of the probe
        const Front* R = nullptr;  // leftmost front at or right of the probe
        const std::size_t n = bornBy(t);
        for (std::size_t i = 0; i < n; ++i) {
            const Front& f = fronts[i];
            if (!(t < f.t_death)) continue;
            double p = f.position(t);
            bool left = side == Side::Left ? p < x : p <= x;
            if (left) {
                if (!L || p > L->position(t) || (p == L->position(t) && f.speed > L->speed)) L = &f;
            } else {
                if (!R || p < R->position(t) || (p == R->position(t) && f.speed < R->speed)) R = &f;
            }
        }
        if (domain == Domain::OutgoingHalfLine) {
            if (R) return R->ul;
            if (L) return L->ur;
            return far_state;
        }
        if (L) return L->ur;
        if (R) return R->ul;
        return far_state;
    }

    /// Fronts alive at t sorted left to right.
    std::vector<const Front*> aliveAt(double t) const {
        std::vector<const Front*> out;
        const std::size_t n = bornBy(t);
        for (std::size_t i = 0; i < n; ++i)
            if (t < fronts[i].t_death) out.push_back(&fronts[i]);
        std::stable_sort(out.begin(), out.end(), [t](const Front* a, const Front* b) {
            double pa = a->position(t), pb = b->position(t);
            if (pa != pb) return pa < pb;
            return a->speed < b->speed;
        });
        return out;
    }

    StepFunction snapshot(double t) const {
        auto alive = aliveAt(t);
        std::vector<double> br, vals;
        if (domain == Domain::OutgoingHalfLine) {
            std::vector<double> rv{far_state};
            for (auto it = alive.rbegin(); it != alive.rend(); ++it) rv.push_back((*it)->ul);
            vals.assign(rv.rbegin(), rv.rend());
        } else {
            vals.push_back(far_state);
            for (const Front* f : alive) vals.push_back(f->ur);
        }
        for (const Front* f : alive) br.push_back(f->position(t));
        return StepFunction(domainLo(), domainHi(), br, vals);
    }

    /// Times in [0, T] at which the one-sided value at x can change.
    std::vector<double> traceBreakTimes(double x) const {
        const double tol = 1e-13 * (1.0 + std::fabs(x));
        std::vector<double> ts{0.0, T};
        for (const Front& f : fronts) {
            if (f.t_birth >= T) break;
            double te = std::min(f.t_death, T);
            if (std::fabs(f.x_birth - x) <= tol) ts.push_back(f.t_birth);
            if (std::fabs(f.position(te) - x) <= tol) ts.push_back(te);
            if (f.speed != 0.0) {
                double tc = f.t_birth + (x - f.x_birth) / f.speed;
                if (tc >= f.t_birth && tc <= te) ts.push_back(tc);
            }
        }
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        std::vector<double> out;
        for (double t : ts)
            if (t >= 0.0 && t <= T) out.push_back(t);
        return out;
    }

    /// One-sided limit at x as a step function of t on (0, T).
    StepFunction trace(double x, Side side) const {
        std::vector<double> ts = traceBreakTimes(x);
        std::vector<double> br, vals;
        for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
            double a = ts[i], b = ts[i + 1];
            if (!(b > a)) continue;
            if (i > 0) br.push_back(a);
            vals.push_back(value(0.5 * (a + b), x, side));
        }
        if (vals.empty()) vals.push_back(value(0.5 * T, x, side));
        return StepFunction(0.0, T, br, vals);
    }

    /// Trace at the junction from inside the domain.
    StepFunction boundaryTrace() const {
        return trace(0.0, domain == Domain::IncomingHalfLine ? Side::Left : Side::Right);
    }

    double maxFrontSpeed() const {
        double s = 0.0;
        for (const Front& f : fronts) s = std::max(s, std::fabs(f.speed));
        return s;
    }

private:
    std::size_t bornBy(double t) const {
        auto it = std::upper_bound(fronts.begin(), fronts.end(), t,
                                   [](double v, const Front& f) { return v < f.t_birth; });
        return static_cast<std::size_t>(it - fronts.begin());
    }
};

namespace detail {

class Engine {
public:
    Engine(const FluxModel& m, Domain dom, double T, const SolveOptions& opt) : m_(m), dom_(dom), T_(T), opt_(opt) {
        if (!(T > 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
        if (!(opt.delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
        tol_t_ = 1e-12 * std::max(1.0, T);
    }

    FTSolution run(const StepFunction& u0, const StepFunction* k) {
        k_ = k;
        for (double v : u0.values()) checkState(v);
        if (k)
            for (double v : k->values()) checkState(v);

        if (dom_ == Domain::OutgoingHalfLine) {
            far_ = u0.last();
            for (std::size_t i = 0; i < u0.breakpoints().size(); ++i) {
                double x = u0.breakpoints()[i];
                if (x > 0.0) emitWave(0.0, x, u0.values()[i], u0.values()[i + 1], alive_.size(), alive_.size());
            }
        } else {
            far_ = u0.first();
            for (std::size_t i = 0; i < u0.breakpoints().size(); ++i) {
                double x = u0.breakpoints()[i];
                if (dom_ == Domain::FullLine || x < 0.0)
                    emitWave(0.0, x, u0.values()[i], u0.values()[i + 1], alive_.size(), alive_.size());
            }
        }
        if (dom_ != Domain::FullLine) {
            if (!k) throw Error(ErrorKind::InvalidArgument, "half-line problem needs boundary data");
            k_cur_ = k->value(0.0);
            next_jump_ = 0;
            while (next_jump_ < k->breakpoints().size() && k->breakpoints()[next_jump_] <= 0.0) ++next_jump_;
            resolveBoundary(0.0);
        }
        loop();

        FTSolution sol;
        sol.model = m_;
        sol.domain = dom_;
        sol.T = T_;
        sol.delta = opt_.delta;
        sol.fronts = std::move(fronts_);
        sol.events = std::move(events_);
        sol.initial_datum = u0;
        if (k) sol.boundary_datum = *k;
        sol.far_state = far_;
        return sol;
    }

private:
    enum class Next { None, Collision, Arrival, Jump };

    void checkState(double u) const {
        if (!m_.inDomain(u))
            throw Error(ErrorKind::StateEscapedDomain, "state " + std::to_string(u) + " left the working range");
    }

    double pos(int id, double t) const { return fronts_[static_cast<std::size_t>(id)].position(t); }
    double spd(int id) const { return fronts_[static_cast<std::size_t>(id)].speed; }
    Front& fr(int id) { return fronts_[static_cast<std::size_t>(id)]; }

    int newFront(double t, double x, double ul, double ur, FrontKind kind, double speed) {
        checkState(ul);
        checkState(ur);
        Front f;
        f.id = static_cast<int>(fronts_.size());
        f.kind = kind;
        f.t_birth = t;
        f.x_birth = x;
        f.speed = speed;
        f.ul = ul;
        f.ur = ur;
        fronts_.push_back(f);
        return f.id;
    }

    /// Fronts resolving the jump (ul, ur) at (t, x), left to right.
    std::vector<int> waveFronts(double t, double x, double ul, double ur) {
        std::vector<int> ids;
        WaveFan w = solveRiemann(m_, ul, ur);
        if (w.kind == WaveKind::Constant) return ids;
        if (w.kind == WaveKind::Shock) {
            ids.push_back(newFront(t, x, ul, ur, FrontKind::Shock, w.speed));
            return ids;
        }
        const double jump = ul - ur;
        std::size_t n = static_cast<std::size_t>(std::ceil(jump / opt_.delta - 1e-9));
        n = std::max<std::size_t>(n, 1);
        const double step = jump / static_cast<double>(n);
        double a = ul;
        for (std::size_t j = 0; j < n; ++j) {
            double b = (j + 1 == n) ? ur : ul - step * static_cast<double>(j + 1);
            double s = std::fabs(a - b) < 1e-14 ? m_.deriv(0.5 * (a + b)) : m_.shockSpeed(a, b);
            ids.push_back(newFront(t, x, a, b, FrontKind::FanFront, s));
            a = b;
        }
        return ids;
    }

    void emitWave(double t, double x, double ul, double ur, std::size_t first, std::size_t last) {
        std::vector<int> ids = waveFronts(t, x, ul, ur);
        alive_.erase(alive_.begin() + static_cast<long>(first), alive_.begin() + static_cast<long>(last));
        alive_.insert(alive_.begin() + static_cast<long>(first), ids.begin(), ids.end());
    }

    double interiorState() const {
        if (alive_.empty()) return far_;
        return dom_ == Domain::IncomingHalfLine ? fronts_[static_cast<std::size_t>(alive_.back())].ur
                                                : fronts_[static_cast<std::size_t>(alive_.front())].ul;
    }

    void resolveBoundary(double t) {
        const RoadSide side = dom_ == Domain::IncomingHalfLine ? RoadSide::Incoming : RoadSide::Outgoing;
        const double interior = interiorState();
        BoundaryResolution r = boundaryTrace(m_, side, k_cur_, interior);
        if (r.emitted.kind == WaveKind::Constant) return;
        std::vector<int> ids = side == RoadSide::Incoming ? waveFronts(t, 0.0, interior, k_cur_)
                                                          : waveFronts(t, 0.0, k_cur_, interior);
        std::vector<int> keep;
        for (int id : ids) {
            double s = spd(id);
            bool enters = side == RoadSide::Incoming ? s < -kStationarySpeed : s > kStationarySpeed;
            if (enters) keep.push_back(id);
        }
        // Discarded fronts never existed in the domain; drop them from the record.
        if (keep.size() != ids.size()) {
            std::vector<Front> kept;
            for (int id : keep) kept.push_back(fr(id));
            fronts_.resize(static_cast<std::size_t>(ids.front()));
            keep.clear();
            for (Front f : kept) {
                f.id = static_cast<int>(fronts_.size());
                fronts_.push_back(f);
                keep.push_back(f.id);
            }
        }
        if (keep.empty()) return;
        if (side == RoadSide::Incoming) alive_.insert(alive_.end(), keep.begin(), keep.end());
        else alive_.insert(alive_.begin(), keep.begin(), keep.end());
        events_.push_back({t, EventKind::BoundaryEmission, 0.0});
    }

    void countEvent() {
        if (++n_events_ > opt_.max_events)
            throw Error(ErrorKind::EventCountExceeded, "more than " + std::to_string(opt_.max_events) + " events");
    }

    void loop() {
        const double inf = std::numeric_limits<double>::infinity();
        double t_now = 0.0;
        for (;;) {
            // Earliest adjacent collision; ties by position then id.
            double tc = inf, xc = 0.0;
            std::size_t pc = 0;
            int idc = -1;
            for (std::size_t p = 0; p + 1 < alive_.size(); ++p) {
                int a = alive_[p], b = alive_[p + 1];
                double sa = spd(a), sb = spd(b);
                if (!(sa > sb)) continue;
                double gap = std::max(0.0, pos(b, t_now) - pos(a, t_now));
                double t = t_now + gap / (sa - sb);
                double x = pos(a, t);
                bool better = false;
                if (t < tc - tol_t_) better = true;
                else if (t <= tc + tol_t_) better = x < xc || (x == xc && a < idc);
                if (better) {
                    tc = t;
                    xc = x;
                    pc = p;
                    idc = a;
                }
            }

            double ta = inf;
            if (dom_ == Domain::IncomingHalfLine && !alive_.empty()) {
                int f = alive_.back();
                if (spd(f) > kStationarySpeed) ta = std::max(t_now, fr(f).t_birth + (0.0 - fr(f).x_birth) / spd(f));
            } else if (dom_ == Domain::OutgoingHalfLine && !alive_.empty()) {
                int f = alive_.front();
                if (spd(f) < -kStationarySpeed)
                    ta = std::max(t_now, fr(f).t_birth + (0.0 - fr(f).x_birth) / spd(f));
            }

            double tj = inf;
            if (k_ && dom_ != Domain::FullLine && next_jump_ < k_->breakpoints().size())
                tj = k_->breakpoints()[next_jump_];

            // Boundary events sit at x=0: on the incoming side that is the
            // rightmost position, on the outgoing side the leftmost.
            Next next = Next::None;
            double t_next = inf;
            auto consider = [&](Next kind, double t, bool beats_on_tie) {
                if (t == inf) return;
                if (next == Next::None || t < t_next - tol_t_ || (t <= t_next + tol_t_ && beats_on_tie)) {
                    next = kind;
                    t_next = t;
                }
            };
            consider(Next::Collision, tc, true);
            consider(Next::Arrival, ta, dom_ == Domain::OutgoingHalfLine || std::fabs(xc) <= epsX(0.0));
            consider(Next::Jump, tj, false);

            if (next == Next::None || t_next >= T_) break;
            countEvent();
            t_now = std::max(t_now, t_next);
            switch (next) {
            case Next::Collision:
                if (dom_ != Domain::FullLine && std::fabs(xc) <= epsX(0.0)) absorbAtBoundary(t_now);
                else collide(t_now, pc);
                break;
            case Next::Arrival: absorbAtBoundary(t_now); break;
            case Next::Jump:
                k_cur_ = k_->values()[next_jump_ + 1];
                ++next_jump_;
                events_.push_back({t_now, EventKind::BoundaryJump, 0.0});
                resolveBoundary(t_now);
                break;
            case Next::None: break;
            }
        }
    }

    double epsX(double x) const { return 1e-10 * (1.0 + std::fabs(x)); }

    void collide(double t, std::size_t p) {
        std::size_t q = p + 1;
        const double x = pos(alive_[p], t);
        const double eps = epsX(x);
        while (p > 0 && std::fabs(pos(alive_[p - 1], t) - x) <= eps && spd(alive_[p - 1]) > spd(alive_[p])) --p;
        while (q + 1 < alive_.size() && std::fabs(pos(alive_[q + 1], t) - x) <= eps &&
               spd(alive_[q + 1]) < spd(alive_[q]))
            ++q;
        const double ul = fr(alive_[p]).ul, ur = fr(alive_[q]).ur;
        for (std::size_t i = p; i <= q; ++i) fr(alive_[i]).t_death = t;
        events_.push_back({t, EventKind::Collision, x});
        emitWave(t, x, ul, ur, p, q + 1);
    }

    void absorbAtBoundary(double t) {
        const double eps = epsX(0.0);
        bool any = false;
        if (dom_ == Domain::IncomingHalfLine) {
            while (!alive_.empty() && pos(alive_.back(), t) >= -eps) {
                fr(alive_.back()).t_death = t;
                alive_.pop_back();
                any = true;
            }
        } else {
            while (!alive_.empty() && pos(alive_.front(), t) <= eps) {
                fr(alive_.front()).t_death = t;
                alive_.erase(alive_.begin());
                any = true;
            }
        }
        if (any) events_.push_back({t, EventKind::FrontAbsorbedAtBoundary, 0.0});
        resolveBoundary(t);
    }

    const FluxModel& m_;
    Domain dom_;
    double T_;
    SolveOptions opt_;
    double tol_t_ = 0.0;
    const StepFunction* k_ = nullptr;
    double k_cur_ = 0.0;
    std::size_t next_jump_ = 0;
    double far_ = 0.0;
    std::vector<Front> fronts_;
    std::vector<int> alive_;
    std::vector<Event> events_;
    std::size_t n_events_ = 0;
};

}  // namespace detail

inline FTSolution solveCauchy(const FluxModel& m, const StepFunction& u0, double T, const SolveOptions& opt) {
    return detail::Engine(m, Domain::FullLine, T, opt).run(u0, nullptr);
}

inline FTSolution solveCauchy(const FluxModel& m, const StepFunction& u0, double T, double delta) {
    return solveCauchy(m, u0, T, SolveOptions{delta});
}

inline FTSolution solveIBVPIncoming(const FluxModel& m, const StepFunction& u0, const StepFunction& k, double T,
                                    const SolveOptions& opt) {
    return detail::Engine(m, Domain::IncomingHalfLine, T, opt).run(u0.restrict(-StepFunction::kInf, 0.0), &k);
}

inline FTSolution solveIBVPIncoming(const FluxModel& m, const StepFunction& u0, const StepFunction& k, double T,
                                    double delta) {
    return solveIBVPIncoming(m, u0, k, T, SolveOptions{delta});
}

inline FTSolution solveIBVPOutgoing(const FluxModel& m, const StepFunction& u0, const StepFunction& k, double T,
                                    const SolveOptions& opt) {
    return detail::Engine(m, Domain::OutgoingHalfLine, T, opt).run(u0.restrict(0.0, StepFunction::kInf), &k);
}

inline FTSolution solveIBVPOutgoing(const FluxModel& m, const StepFunction& u0, const StepFunction& k, double T,
                                    double delta) {
    return solveIBVPOutgoing(m, u0, k, T, SolveOptions{delta});
}

inline StepFunction trace(const FTSolution& sol, double x, Side side) { return sol.trace(x, side); }
inline StepFunction snapshot(const FTSolution& sol, double t) { return sol.snapshot(t); }

}  // namespace ftj

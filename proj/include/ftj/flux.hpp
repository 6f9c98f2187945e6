#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "errors.hpp"

namespace ftj {

enum class Branch { Minus, Plus };

enum class FluxFamily { QuadraticLWR, NegHalfSquare, TabulatedConcave };

/// Strictly concave flux with a single interior maximum at theta.
///
/// Quadratic families are evaluated in closed form. Tabulated samples are
/// interpolated by a piecewise cubic Hermite whose node slopes come from the
/// local parabola, so quadratic samples are reproduced exactly.
class FluxModel {
public:
    static constexpr double kRootTol = 1e-12;

    static FluxModel lwr(double alpha = 1.0, double beta = 1.0, double c = 0.0,
                         double u_lo = 0.0, double u_hi = 1.0) {
        if (!(alpha > 0.0)) throw Error(ErrorKind::NotConcave, "LWR alpha must be positive");
        FluxModel m;
        m.family_ = FluxFamily::QuadraticLWR;
        m.alpha_ = alpha;
        m.beta_ = beta;
        m.c_ = c;
        m.setRange(u_lo, u_hi);
        m.theta_ = beta / 2.0;
        m.margin_ = 2.0 * alpha;
        m.checkTheta();
        return m;
    }

    static FluxModel negHalfSquare(double u_lo = -1.5, double u_hi = 1.5) {
        FluxModel m;
        m.family_ = FluxFamily::NegHalfSquare;
        m.setRange(u_lo, u_hi);
        m.theta_ = 0.0;
        m.margin_ = 1.0;
        m.checkTheta();
        return m;
    }

    static FluxModel tabulated(std::vector<double> grid, std::vector<double> values) {
        if (grid.size() != values.size() || grid.size() < 3)
            throw Error(ErrorKind::InvalidArgument, "tabulated flux needs at least 3 matching samples");
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1]))
                throw Error(ErrorKind::InvalidArgument, "tabulated grid must be strictly increasing");
        FluxModel m;
        m.family_ = FluxFamily::TabulatedConcave;
        m.setRange(grid.front(), grid.back());
        auto tab = std::make_shared<Table>();
        tab->u = std::move(grid);
        tab->f = std::move(values);
        tab->buildSlopes();
        m.table_ = tab;

        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < tab->u.size(); ++i) {
            margin = std::min(margin, -tab->second(i, tab->u[i]));
            margin = std::min(margin, -tab->second(i, tab->u[i + 1]));
        }
        if (!(margin > 0.0)) throw Error(ErrorKind::NotConcave, "interpolated flux is not strictly concave");
        m.margin_ = margin;

        if (tab->deriv(tab->u.front()) <= 0.0 || tab->deriv(tab->u.back()) >= 0.0)
            throw Error(ErrorKind::InvalidArgument, "tabulated flux has no interior maximum");
        double lo = m.u_lo_, hi = m.u_hi_;
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            double mid = 0.5 * (lo + hi);
            if (tab->deriv(mid) > 0.0) lo = mid; else hi = mid;
        }
        m.theta_ = 0.5 * (lo + hi);
        return m;
    }

    FluxFamily family() const { return family_; }
    double uLo() const { return u_lo_; }
    double uHi() const { return u_hi_; }
    double theta() const { return theta_; }
    double concavityMargin() const { return margin_; }
    double fmax() const { return rawFlux(theta_); }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double offset() const { return c_; }

    bool inDomain(double u) const { return u >= u_lo_ - kDomainTol && u <= u_hi_ + kDomainTol; }

    double flux(double u) const {
        checkDomain(u);
        return rawFlux(u);
    }

    double deriv(double u) const {
        checkDomain(u);
        return rawDeriv(u);
    }

    double second(double u) const {
        checkDomain(u);
        switch (family_) {
        case FluxFamily::QuadraticLWR: return -2.0 * alpha_;
        case FluxFamily::NegHalfSquare: return -1.0;
        case FluxFamily::TabulatedConcave: return table_->second(table_->interval(u), u);
        }
        return 0.0;
    }

    /// Largest characteristic speed magnitude over the working range.
    double maxSpeed() const { return std::max(std::fabs(rawDeriv(u_lo_)), std::fabs(rawDeriv(u_hi_))); }

    double branchInverse(Branch b, double q) const {
        const double top = fmax();
        if (q > top + kRootTol)
            throw Error(ErrorKind::AboveMaximum, "flux value " + std::to_string(q) + " above maximum");
        if (q >= top) return theta_;
        const double end = (b == Branch::Minus) ? u_lo_ : u_hi_;
        const double floor = rawFlux(end);
        if (q < floor - kRootTol)
            throw Error(ErrorKind::BranchRangeError, "flux value " + std::to_string(q) + " below branch range");
        if (q <= floor) return end;

        switch (family_) {
        case FluxFamily::QuadraticLWR: {
            double disc = std::max(0.0, beta_ * beta_ / 4.0 - (q - c_) / alpha_);
            double r = std::sqrt(disc);
            return b == Branch::Minus ? beta_ / 2.0 - r : beta_ / 2.0 + r;
        }
        case FluxFamily::NegHalfSquare: {
            double r = std::sqrt(std::max(0.0, -2.0 * q));
            return b == Branch::Minus ? -r : r;
        }
        case FluxFamily::TabulatedConcave: {
            // f is increasing on the minus branch and decreasing on the plus branch.
            double lo = b == Branch::Minus ? u_lo_ : theta_;
            double hi = b == Branch::Minus ? theta_ : u_hi_;
            for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
                double mid = 0.5 * (lo + hi);
                bool below = rawFlux(mid) < q;
                if ((b == Branch::Minus) == below) lo = mid; else hi = mid;
            }
            return 0.5 * (lo + hi);
        }
        }
        return theta_;
    }

    /// State across theta with the same flux value.
    double companion(double u) const {
        checkDomain(u);
        if (u == theta_) return theta_;
        return branchInverse(u < theta_ ? Branch::Plus : Branch::Minus, rawFlux(u));
    }

    double shockSpeed(double ul, double ur) const {
        checkDomain(ul);
        checkDomain(ur);
        if (std::fabs(ul - ur) < 1e-14)
            throw Error(ErrorKind::DegenerateJump, "jump too small for a shock speed");
        switch (family_) {
        case FluxFamily::QuadraticLWR: return alpha_ * (beta_ - ul - ur);
        case FluxFamily::NegHalfSquare: return -0.5 * (ul + ur);
        case FluxFamily::TabulatedConcave: break;
        }
        return (rawFlux(ur) - rawFlux(ul)) / (ur - ul);
    }

    /// Inverse of f' (f' is strictly decreasing); the result is clamped to the working range.
    double derivInverse(double s) const {
        switch (family_) {
        case FluxFamily::QuadraticLWR: return std::clamp(0.5 * (beta_ - s / alpha_), u_lo_, u_hi_);
        case FluxFamily::NegHalfSquare: return std::clamp(-s, u_lo_, u_hi_);
        case FluxFamily::TabulatedConcave: break;
        }
        if (s >= rawDeriv(u_lo_)) return u_lo_;
        if (s <= rawDeriv(u_hi_)) return u_hi_;
        double lo = u_lo_, hi = u_hi_;
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            double mid = 0.5 * (lo + hi);
            if (rawDeriv(mid) > s) lo = mid; else hi = mid;
        }
        return 0.5 * (lo + hi);
    }

    std::string describe() const {
        switch (family_) {
        case FluxFamily::QuadraticLWR:
            return "lwr(alpha=" + std::to_string(alpha_) + ",beta=" + std::to_string(beta_) +
                   ",c=" + std::to_string(c_) + ")";
        case FluxFamily::NegHalfSquare: return "neg_half_square";
        case FluxFamily::TabulatedConcave: return "tabulated(" + std::to_string(table_->u.size()) + " samples)";
        }
        return "?";
    }

private:
    static constexpr double kDomainTol = 1e-12;

    struct Table {
        std::vector<double> u, f, d;

        void buildSlopes() {
            const std::size_t n = u.size();
            std::vector<double> h(n - 1), s(n - 1);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                h[i] = u[i + 1] - u[i];
                s[i] = (f[i + 1] - f[i]) / h[i];
            }
            d.assign(n, 0.0);
            for (std::size_t i = 1; i + 1 < n; ++i)
                d[i] = (h[i] * s[i - 1] + h[i - 1] * s[i]) / (h[i - 1] + h[i]);
            d[0] = ((2 * h[0] + h[1]) * s[0] - h[0] * s[1]) / (h[0] + h[1]);
            const std::size_t a = n - 2, b = n - 3;
            d[n - 1] = ((2 * h[a] + h[b]) * s[a] - h[a] * s[b]) / (h[a] + h[b]);
        }

        std::size_t interval(double x) const {
            auto it = std::upper_bound(u.begin(), u.end(), x);
            std::size_t i = it == u.begin() ? 0 : static_cast<std::size_t>(it - u.begin()) - 1;
            return std::min(i, u.size() - 2);
        }

        double value(double x) const {
            std::size_t i = interval(x);
            double h = u[i + 1] - u[i], t = (x - u[i]) / h;
            double t2 = t * t, t3 = t2 * t;
            return (2 * t3 - 3 * t2 + 1) * f[i] + (t3 - 2 * t2 + t) * h * d[i] + (-2 * t3 + 3 * t2) * f[i + 1] +
                   (t3 - t2) * h * d[i + 1];
        }

        double deriv(double x) const {
            std::size_t i = interval(x);
            double h = u[i + 1] - u[i], t = (x - u[i]) / h;
            double t2 = t * t;
            return ((6 * t2 - 6 * t) * f[i] + (-6 * t2 + 6 * t) * f[i + 1]) / h + (3 * t2 - 4 * t + 1) * d[i] +
                   (3 * t2 - 2 * t) * d[i + 1];
        }

        double second(std::size_t i, double x) const {
            double h = u[i + 1] - u[i], t = (x - u[i]) / h;
            return ((12 * t - 6) * f[i] + (-12 * t + 6) * f[i + 1]) / (h * h) +
                   ((6 * t - 4) * d[i] + (6 * t - 2) * d[i + 1]) / h;
        }
    };

    void setRange(double lo, double hi) {
        if (!(lo < hi)) throw Error(ErrorKind::InvalidArgument, "u_lo must be below u_hi");
        u_lo_ = lo;
        u_hi_ = hi;
    }

    void checkTheta() const {
        if (theta_ < u_lo_ || theta_ > u_hi_)
            throw Error(ErrorKind::InvalidArgument, "critical state outside the working range");
    }

    void checkDomain(double u) const {
        if (!(u >= u_lo_ - kDomainTol && u <= u_hi_ + kDomainTol))
            throw Error(ErrorKind::OutOfDomain, "state " + std::to_string(u) + " outside [" +
                                                    std::to_string(u_lo_) + "," + std::to_string(u_hi_) + "]");
    }

    double rawFlux(double u) const {
        switch (family_) {
        case FluxFamily::QuadraticLWR: return alpha_ * u * (beta_ - u) + c_;
        case FluxFamily::NegHalfSquare: return -0.5 * u * u;
        case FluxFamily::TabulatedConcave: return table_->value(u);
        }
        return 0.0;
    }

    double rawDeriv(double u) const {
        switch (family_) {
        case FluxFamily::QuadraticLWR: return alpha_ * (beta_ - 2.0 * u);
        case FluxFamily::NegHalfSquare: return -u;
        case FluxFamily::TabulatedConcave: return table_->deriv(u);
        }
        return 0.0;
    }

    FluxFamily family_ = FluxFamily::QuadraticLWR;
    double alpha_ = 1.0, beta_ = 1.0, c_ = 0.0;
    double u_lo_ = 0.0, u_hi_ = 1.0;
    double theta_ = 0.5;
    double margin_ = 2.0;
    std::shared_ptr<const Table> table_;
};

inline double evalFlux(const FluxModel& m, double u) { return m.flux(u); }
inline double fluxDeriv(const FluxModel& m, double u) { return m.deriv(u); }
inline double branchInverse(const FluxModel& m, Branch b, double q) { return m.branchInverse(b, q); }
inline double companion(const FluxModel& m, double u) { return m.companion(u); }
inline double shockSpeed(const FluxModel& m, double ul, double ur) { return m.shockSpeed(ul, ur); }

}  // namespace ftj

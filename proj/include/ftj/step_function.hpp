#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "errors.hpp"

namespace ftj {

/// Right-continuous piecewise-constant function on an interval (lo, hi).
/// Kept canonical: breakpoints strictly increasing and inside (lo, hi),
/// adjacent values distinct.
class StepFunction {
public:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    StepFunction() : vals_{0.0} {}

    static StepFunction constant(double v, double lo = -kInf, double hi = kInf) {
        return StepFunction(lo, hi, {}, {v});
    }

    StepFunction(double lo, double hi, std::vector<double> breaks, std::vector<double> values, double merge_tol = 0.0)
        : lo_(lo), hi_(hi) {
        if (!(lo < hi)) throw Error(ErrorKind::InvalidArgument, "step function interval is empty");
        if (values.size() != breaks.size() + 1)
            throw Error(ErrorKind::InvalidArgument, "step function needs one more value than breakpoints");
        for (std::size_t i = 1; i < breaks.size(); ++i)
            if (breaks[i] < breaks[i - 1])
                throw Error(ErrorKind::InvalidArgument, "breakpoints must be sorted");
        // Drop pieces outside (lo, hi) and zero-length pieces, then merge equal neighbours.
        std::vector<double> b2;
        std::vector<double> v2;
        std::size_t i = 0;
        while (i < breaks.size() && breaks[i] <= lo) ++i;
        v2.push_back(values[i]);
        for (; i < breaks.size() && breaks[i] < hi; ++i) {
            if (!b2.empty() && breaks[i] == b2.back()) {
                v2.back() = values[i + 1];
                continue;
            }
            b2.push_back(breaks[i]);
            v2.push_back(values[i + 1]);
        }
        vals_.push_back(v2[0]);
        for (std::size_t j = 0; j < b2.size(); ++j) {
            if (std::fabs(v2[j + 1] - vals_.back()) <= merge_tol) continue;
            bps_.push_back(b2[j]);
            vals_.push_back(v2[j + 1]);
        }
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<double>& breakpoints() const { return bps_; }
    const std::vector<double>& values() const { return vals_; }
    std::size_t pieces() const { return vals_.size(); }
    bool isConstant() const { return bps_.empty(); }

    double value(double x) const {
        auto it = std::upper_bound(bps_.begin(), bps_.end(), x);
        return vals_[static_cast<std::size_t>(it - bps_.begin())];
    }
    double rightLimit(double x) const { return value(x); }
    double leftLimit(double x) const {
        auto it = std::lower_bound(bps_.begin(), bps_.end(), x);
        return vals_[static_cast<std::size_t>(it - bps_.begin())];
    }
    double first() const { return vals_.front(); }
    double last() const { return vals_.back(); }

    double minValue() const { return *std::min_element(vals_.begin(), vals_.end()); }
    double maxValue() const { return *std::max_element(vals_.begin(), vals_.end()); }

    /// Start of piece i (lo for the first piece).
    double pieceStart(std::size_t i) const { return i == 0 ? lo_ : bps_[i - 1]; }
    double pieceEnd(std::size_t i) const { return i == bps_.size() ? hi_ : bps_[i]; }

    /// Exact integral over (a, b); both ends must be finite.
    double integral(double a, double b) const {
        a = std::max(a, lo_);
        b = std::min(b, hi_);
        if (!(a < b)) return 0.0;
        if (!std::isfinite(a) || !std::isfinite(b))
            throw Error(ErrorKind::InvalidArgument, "integral over an unbounded interval");
        double sum = 0.0;
        for (std::size_t i = 0; i < vals_.size(); ++i) {
            double s = std::max(a, pieceStart(i)), e = std::min(b, pieceEnd(i));
            if (e > s) sum += vals_[i] * (e - s);
        }
        return sum;
    }
    double integral() const { return integral(lo_, hi_); }

    StepFunction map(const std::function<double(double)>& fn, double merge_tol = 0.0) const {
        std::vector<double> v;
        v.reserve(vals_.size());
        for (double x : vals_) v.push_back(fn(x));
        return StepFunction(lo_, hi_, bps_, std::move(v), merge_tol);
    }

    StepFunction restrict(double a, double b) const {
        return StepFunction(std::max(a, lo_), std::min(b, hi_), bps_, vals_);
    }

    /// Pointwise combination on the union of breakpoints, over the intersection of domains.
    static StepFunction combine(const StepFunction& g, const StepFunction& h,
                                const std::function<double(double, double)>& op) {
        double lo = std::max(g.lo_, h.lo_), hi = std::min(g.hi_, h.hi_);
        std::vector<double> br = refinement(g, h);
        std::vector<double> kept;
        for (double x : br)
            if (x > lo && x < hi) kept.push_back(x);
        double probe = lo;
        if (!std::isfinite(lo)) {
            if (!kept.empty()) probe = kept.front() - 1.0;
            else probe = std::isfinite(hi) ? hi - 1.0 : 0.0;
        }
        std::vector<double> v;
        v.push_back(op(g.value(probe), h.value(probe)));
        for (double x : kept) v.push_back(op(g.value(x), h.value(x)));
        return StepFunction(lo, hi, kept, v);
    }

    /// Sorted union of the breakpoints of g and h.
    static std::vector<double> refinement(const StepFunction& g, const StepFunction& h) {
        std::vector<double> br;
        std::merge(g.bps_.begin(), g.bps_.end(), h.bps_.begin(), h.bps_.end(), std::back_inserter(br));
        br.erase(std::unique(br.begin(), br.end()), br.end());
        return br;
    }

    bool operator==(const StepFunction& o) const {
        return lo_ == o.lo_ && hi_ == o.hi_ && bps_ == o.bps_ && vals_ == o.vals_;
    }

private:
    double lo_ = -kInf, hi_ = kInf;
    std::vector<double> bps_;
    std::vector<double> vals_;
};

/// L1 distance over (a, b), both finite.
inline double l1Distance(const StepFunction& g, const StepFunction& h, double a, double b) {
    auto d = StepFunction::combine(g, h, [](double x, double y) { return std::fabs(x - y); });
    return d.integral(a, b);
}

}  // namespace ftj

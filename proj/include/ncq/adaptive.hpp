#pragma once

/// @file adaptive.hpp
/// Adaptive bisection on the Simpson / 3/8 embedded pair.
///
/// With c_S = -1/2880 and c_N = -1/6480 and f'''' locally constant,
/// S - N = (c_N - c_S) (b-a)^5 f'''', so
///
///     |E_N| = |N - S| * (1/6480) / (1/2880 - 1/6480) = 0.8 |N - S|.
///
/// The estimate is exact only in the constant-f'''' limit.

#include "ncq/error.hpp"
#include "ncq/rules.hpp"
#include "ncq/summation.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace ncq {

inline constexpr double kEmbeddedPairFactor = 0.8;
inline constexpr std::size_t kDefaultMaxDepth = 40;

struct AdaptiveResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t panels = 0;
    bool max_depth_reached = false;
    std::size_t function_evaluations = 0;
};

namespace detail {

template <ValueEvaluator F>
class AdaptiveIntegrator {
public:
    AdaptiveIntegrator(const F& f, const Interval& iv, double tol, std::size_t max_depth)
        : f_(f), total_width_(iv.width()), tol_(tol), max_depth_(max_depth) {}

    AdaptiveResult run(const Interval& iv) {
        const double fa = eval(iv.a());
        const double fb = eval(iv.b());
        const double fm = eval(nodes::mid.position(iv));
        visit(iv, fa, fm, fb, 0);

        AdaptiveResult r;
        r.value = pairwise_sum(values_);
        r.error_estimate = pairwise_sum(errors_);
        r.panels = values_.size();
        r.max_depth_reached = depth_hit_;
        r.function_evaluations = evaluations_;
        return r;
    }

private:
    double eval(double x) {
        ++evaluations_;
        return value_at(f_, x);
    }

    void visit(const Interval& iv, double fa, double fm, double fb, std::size_t depth) {
        const double f1 = eval(nodes::third.position(iv));
        const double f2 = eval(nodes::two_thirds.position(iv));
        const double w = iv.width();
        const double simpson = w * ((1.0 / 6.0) * (fa + fb) + (4.0 / 6.0) * fm);
        const double newton = w * (0.125 * (fa + fb) + 0.375 * (f1 + f2));
        const double local = kEmbeddedPairFactor * std::fabs(newton - simpson);
        const double allowed = tol_ * w / total_width_;

        const double m = nodes::mid.position(iv);
        const bool splittable = iv.a() < m && m < iv.b();
        if (local <= allowed || depth >= max_depth_ || !splittable) {
            if (local > allowed) {
                depth_hit_ = true;
            }
            values_.push_back(newton);
            errors_.push_back(local);
            return;
        }
        const Interval left(iv.a(), m);
        const Interval right(m, iv.b());
        const double fl = eval(nodes::mid.position(left));
        const double fr = eval(nodes::mid.position(right));
        visit(left, fa, fl, fm, depth + 1);
        visit(right, fm, fr, fb, depth + 1);
    }

    const F& f_;
    double total_width_;
    double tol_;
    std::size_t max_depth_;
    std::vector<double> values_;
    std::vector<double> errors_;
    std::size_t evaluations_ = 0;
    bool depth_hit_ = false;
};

} // namespace detail

/// Accepts a panel when 0.8 |N - S| <= tol * width / (b - a), otherwise
/// bisects.  Accepted 3/8 values are summed pairwise in interval order.
template <ValueEvaluator F>
AdaptiveResult adaptive_integrate(const F& f, const Interval& iv, double tol, std::size_t max_depth = kDefaultMaxDepth) {
    if (!(tol > 0.0) || !std::isfinite(tol)) {
        throw InvalidInput("tolerance must be positive and finite");
    }
    if (max_depth < 1) {
        throw InvalidInput("max depth must be at least 1");
    }
    return detail::AdaptiveIntegrator<F>(f, iv, tol, max_depth).run(iv);
}

} // namespace ncq

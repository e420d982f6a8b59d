#pragma once

/// @file verification.hpp
/// Numerical checks of the rules' error theory: a high-accuracy reference
/// integral, the two integration-by-parts kernel identities behind the
/// corrected rules, degree of exactness, error-constant recovery, observed
/// convergence order, location of the mean-value point xi, and the exact
/// rational reconstruction of the 3/8 rule from the other three.

#include "ncq/error.hpp"
#include "ncq/jet.hpp"
#include "ncq/rules.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace ncq {

inline constexpr double kMachineEpsilon = std::numeric_limits<double>::epsilon();

/// Relative subtraction-noise floor for |integral - estimate|.
inline constexpr double kCancellationFloor = 1e3 * kMachineEpsilon;

// ---------------------------------------------------------------------------
// Reference integral
// ---------------------------------------------------------------------------

inline constexpr std::size_t kReferenceMaxPanels = std::size_t{1} << 20;
inline constexpr double kReferenceTolerance = 1e-13;

/// Composite 3/8 rule with doubling panel counts until two successive
/// estimates agree to 1e-13 * max(1, |estimate|), then one order-4
/// Richardson step.
template <ValueEvaluator F>
double reference_integral(const F& f, const Interval& iv) {
    std::size_t n = 1;
    double previous = composite_rule(RuleId::Newton38, f, iv, n).estimate;
    while (n < kReferenceMaxPanels) {
        n *= 2;
        const double current = composite_rule(RuleId::Newton38, f, iv, n).estimate;
        const double delta = current - previous;
        if (std::fabs(delta) < kReferenceTolerance * std::max(1.0, std::fabs(current))) {
            return current + delta / 15.0;
        }
        previous = current;
    }
    throw OracleFailure("reference integral did not converge within " + std::to_string(kReferenceMaxPanels) +
                        " panels");
}

// ---------------------------------------------------------------------------
// Kernel identities
// ---------------------------------------------------------------------------

struct IdentityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0; ///< |lhs - rhs| / max(1, |rhs|)
};

struct MomentIdentityCheck : IdentityCheck {
    double moment = 0.0;          ///< integral of (x-a)^3 (x-b) over the interval
    double moment_expected = 0.0; ///< -(b-a)^5 / 20
    double moment_deviation = 0.0;
};

inline constexpr double kMomentTolerance = 1e-13;

namespace detail {

/// x -> f''''((a+x)/2) + f''''((2b+a-x)/2), the symmetric fourth-derivative
/// pair both kernels integrate against.
template <JetEvaluator F>
auto symmetric_fourth(const F& f, const Interval& iv) {
    const double a = iv.a();
    const double b = iv.b();
    return [&f, a, b](double x) {
        return jet_at(f, 0.5 * (a + x)).d4 + jet_at(f, 0.5 * (2.0 * b + a - x)).d4;
    };
}

inline double relative_residual(double lhs, double rhs) { return std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs)); }

} // namespace detail

/// integral (x-a)^4 [f''''((a+x)/2) + f''''((2b+a-x)/2)] dx
///   = 768 integral f - 768 (b-a) f(m) - 32 (b-a)^3 f''(m)
template <JetEvaluator F>
IdentityCheck check_lemma1_identity(const F& f, const Interval& iv) {
    const double a = iv.a();
    const double w = iv.width();
    const auto pair = detail::symmetric_fourth(f, iv);
    const auto kernel = [&](double x) {
        const double t = x - a;
        return (t * t) * (t * t) * pair(x);
    };
    IdentityCheck out;
    out.lhs = reference_integral(kernel, iv);
    const Jet4 fm = detail::jet_at(f, iv.midpoint());
    out.rhs = 768.0 * reference_integral(f, iv) - 768.0 * w * fm.d0 - 32.0 * w * w * w * fm.d2;
    out.residual = detail::relative_residual(out.lhs, out.rhs);
    return out;
}

/// integral (x-a)^3 (x-b) dx over the interval, by quadrature.
inline double kernel_moment(const Interval& iv) {
    const double a = iv.a();
    const double b = iv.b();
    return reference_integral([a, b](double x) { return (x - a) * (x - a) * (x - a) * (x - b); }, iv);
}

/// integral (x-a)^3 (x-b) [f''''((a+x)/2) + f''''((2b+a-x)/2)] dx
///   = 768 integral f - 96 (b-a) [f(a) + 6 f(m) + f(b)] - 8 (b-a)^3 f''(m)
///
/// Throws VerificationFailure when the kernel moment misses -(b-a)^5/20 by
/// more than 1e-13 relative.
template <JetEvaluator F>
MomentIdentityCheck check_lemma2_identity(const F& f, const Interval& iv) {
    const double a = iv.a();
    const double b = iv.b();
    const double w = iv.width();
    const auto pair = detail::symmetric_fourth(f, iv);
    const auto kernel = [&](double x) {
        const double t = x - a;
        return t * t * t * (x - b) * pair(x);
    };
    MomentIdentityCheck out;
    out.lhs = reference_integral(kernel, iv);
    const Jet4 fm = detail::jet_at(f, iv.midpoint());
    const double fa = detail::value_at(f, a);
    const double fb = detail::value_at(f, b);
    out.rhs = 768.0 * reference_integral(f, iv) - 96.0 * w * (fa + 6.0 * fm.d0 + fb) - 8.0 * w * w * w * fm.d2;
    out.residual = detail::relative_residual(out.lhs, out.rhs);

    out.moment = kernel_moment(iv);
    out.moment_expected = -std::pow(w, 5) / 20.0;
    out.moment_deviation = std::fabs(out.moment - out.moment_expected) / std::fabs(out.moment_expected);
    if (!(out.moment_deviation <= kMomentTolerance)) {
        throw VerificationFailure("kernel moment deviates from -(b-a)^5/20 by " +
                                  detail::format_value(out.moment_deviation) + " relative");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Degree of exactness
// ---------------------------------------------------------------------------

inline constexpr int kMaxExactnessProbe = 6;
inline constexpr double kExactnessTolerance = 1e-13;

/// Largest d <= 6 such that every monomial x^k, k <= d, is integrated to
/// 1e-13 relative on [0,1] and [-1,2].  Returns -1 if even constants fail.
inline int exactness_degree(RuleId id) {
    const Interval probes[] = {Interval(0.0, 1.0), Interval(-1.0, 2.0)};
    int degree = -1;
    for (int k = 0; k <= kMaxExactnessProbe; ++k) {
        const auto monomial = [k](const auto& x) { return integer_power(x, k); };
        for (const Interval& iv : probes) {
            const double exact = (std::pow(iv.b(), k + 1) - std::pow(iv.a(), k + 1)) / (k + 1);
            const double estimate = apply_rule(id, monomial, iv).estimate;
            if (std::fabs(estimate - exact) > kExactnessTolerance * std::max(1.0, std::fabs(exact))) {
                return degree;
            }
        }
        degree = k;
    }
    return degree;
}

// ---------------------------------------------------------------------------
// Error-constant recovery
// ---------------------------------------------------------------------------

struct ConstantFit {
    RuleId rule{};
    double fitted_c = 0.0;
    Rational paper_c;
    double relative_deviation = 0.0;
    std::size_t levels_used = 0;
    std::vector<double> level_estimates; ///< c_est per accepted level, widest first
};

/// Shrinks [m - h/2, m + h/2] around the base midpoint, halving h per level,
/// and forms c_est = (integral - R) / (h^5 f''''(m)).  Stops at the
/// cancellation floor; the last accepted c_est is the fit.
template <JetEvaluator F>
ConstantFit estimate_error_constant(RuleId id, const F& f, const Interval& base, std::size_t levels) {
    if (levels < 2) {
        throw InvalidInput("constant fitting needs at least 2 levels");
    }
    const double m = base.midpoint();
    const Jet4 fm = detail::jet_at(f, m);
    const double scale = std::max({1.0, std::fabs(fm.d0), std::fabs(fm.d2)});
    if (!(std::fabs(fm.d4) > 1e-12 * scale)) {
        throw IllConditioned("fourth derivative vanishes at the midpoint " + detail::format_value(m) +
                             "; the error constant cannot be isolated");
    }

    ConstantFit fit;
    fit.rule = id;
    fit.paper_c = rule_spec(id).error_coefficient;
    double h = base.width();
    for (std::size_t level = 0; level < levels; ++level, h *= 0.5) {
        const double lo = m - 0.5 * h;
        const double hi = m + 0.5 * h;
        if (!(lo < m && m < hi)) {
            break;
        }
        const Interval iv(lo, hi);
        const double integral = reference_integral(f, iv);
        const double error = integral - apply_rule(id, f, iv).estimate;
        if (std::fabs(error) < kCancellationFloor * std::fabs(integral)) {
            break;
        }
        const double hw = iv.width();
        fit.level_estimates.push_back(error / (std::pow(hw, 5) * fm.d4));
    }
    fit.levels_used = fit.level_estimates.size();
    if (fit.levels_used < 2) {
        throw InsufficientPrecision("cancellation floor reached after " + std::to_string(fit.levels_used) +
                                    " level(s); need at least 2");
    }
    fit.fitted_c = fit.level_estimates.back();
    const double paper = to_double(fit.paper_c);
    fit.relative_deviation = std::fabs(fit.fitted_c - paper) / std::fabs(paper);
    return fit;
}

// ---------------------------------------------------------------------------
// Convergence order
// ---------------------------------------------------------------------------

struct ConvergenceReport {
    RuleId rule{};
    std::vector<std::size_t> panel_counts;
    std::vector<double> errors;  ///< |integral - composite|, one per panel count
    std::vector<bool> in_fit;    ///< false for errors under the cancellation floor
    double slope = 0.0;          ///< least-squares slope of log|E| against log h
    double reference = 0.0;
};

template <ValueEvaluator F>
ConvergenceReport convergence_order(RuleId id, const F& f, const Interval& iv,
                                    const std::vector<std::size_t>& panel_counts) {
    if (panel_counts.size() < 3) {
        throw InvalidInput("convergence study needs at least 3 panel counts");
    }
    for (std::size_t i = 0; i < panel_counts.size(); ++i) {
        if (panel_counts[i] < 1 || (i > 0 && panel_counts[i] <= panel_counts[i - 1])) {
            throw InvalidInput("panel counts must be positive and strictly increasing");
        }
    }
    ConvergenceReport report;
    report.rule = id;
    report.panel_counts = panel_counts;
    report.reference = reference_integral(f, iv);
    const double floor = kCancellationFloor * std::fabs(report.reference);

    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t n : panel_counts) {
        const double e = std::fabs(report.reference - composite_rule(id, f, iv, n).estimate);
        const bool usable = e > 0.0 && e >= floor;
        report.errors.push_back(e);
        report.in_fit.push_back(usable);
        if (usable) {
            xs.push_back(std::log(iv.width() / static_cast<double>(n)));
            ys.push_back(std::log(e));
        }
    }
    if (xs.size() < 2) {
        throw DegenerateFit("fewer than two errors above the cancellation floor; the rule is exact here");
    }
    const double k = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= k;
    my /= k;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    report.slope = sxy / sxx;
    return report;
}

// ---------------------------------------------------------------------------
// Mean-value point
// ---------------------------------------------------------------------------

struct XiCertificate {
    double xi = 0.0;
    double residual = 0.0; ///< |E - c_R (b-a)^5 f''''(xi)|
    std::optional<std::pair<double, double>> bracket;
    double error = 0.0;    ///< E = integral - R
    double target = 0.0;   ///< f'''' value the point must hit
};

struct XiSearchOptions {
    std::size_t grid_points = 1024;
    std::size_t bisection_iterations = 80;
};

/// Finds a point where f'''' equals E / (c_R (b-a)^5).  Scans a uniform grid
/// for the leftmost sign change, bisects it; without a sign change falls back
/// to the grid point nearest the target (the midpoint when f'''' is flat).
template <JetEvaluator F>
XiCertificate locate_xi(RuleId id, const F& f, const Interval& iv, XiSearchOptions options = {}) {
    if (options.grid_points < 2) {
        throw InvalidInput("xi search needs at least 2 grid points");
    }
    const double c = to_double(rule_spec(id).error_coefficient);
    const double scale = c * std::pow(iv.width(), 5);

    XiCertificate cert;
    cert.error = reference_integral(f, iv) - apply_rule(id, f, iv).estimate;
    cert.target = cert.error / scale;
    const auto fourth = [&](double x) { return detail::jet_at(f, x).d4; };
    const auto residual_at = [&](double x) { return std::fabs(cert.error - scale * fourth(x)); };

    const std::size_t n = options.grid_points;
    std::vector<double> xs(n);
    std::vector<double> gs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = partition_point(iv, i, n - 1);
        gs[i] = fourth(xs[i]) - cert.target;
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (gs[i] == 0.0) {
            cert.xi = xs[i];
            cert.bracket = std::make_pair(xs[i], xs[i]);
            cert.residual = residual_at(cert.xi);
            return cert;
        }
        if (i + 1 < n && (gs[i] < 0.0) != (gs[i + 1] < 0.0) && gs[i + 1] != 0.0) {
            double lo = xs[i];
            double hi = xs[i + 1];
            const bool lo_negative = gs[i] < 0.0;
            for (std::size_t it = 0; it < options.bisection_iterations; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) {
                    break;
                }
                const double g = fourth(mid) - cert.target;
                if (g == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((g < 0.0) == lo_negative) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            cert.xi = 0.5 * (lo + hi);
            cert.bracket = std::make_pair(lo, hi);
            cert.residual = residual_at(cert.xi);
            return cert;
        }
    }

    const auto [lo_it, hi_it] = std::minmax_element(gs.begin(), gs.end());
    if (*hi_it - *lo_it <= 1e-14 * std::max(1.0, std::fabs(cert.target))) {
        cert.xi = iv.midpoint();
    } else {
        std::size_t best = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (std::fabs(gs[i]) < std::fabs(gs[best])) {
                best = i;
            }
        }
        cert.xi = xs[best];
    }
    cert.residual = residual_at(cert.xi);
    return cert;
}

// ---------------------------------------------------------------------------
// Reconstruction of the 3/8 rule
// ---------------------------------------------------------------------------

/// An exact quadrature identity on [a,b] with the middle third M = [t1, t2]:
///
///   full * int_[a,b] f + middle * int_M f
///     = sum_i w_i (b-a) f(node_i) + sum_j c_j (b-a)^(k_j+1) f^(k_j)(node_j)
///       + sum_e e (b-a)^5 f''''(xi_e)
///
/// Error terms stay separate until merge_errors() fuses terms of one sign
/// into a single mean-value term.
struct QuadratureIdentity {
    Rational full{0};
    Rational middle{0};
    std::vector<std::pair<BaryNode, Rational>> values;
    std::vector<Correction> corrections;
    std::vector<Rational> errors;

    /// The rule's own identity on the sub-interval [lo, hi] of [a,b], whose
    /// width is `fraction` of b-a.
    static QuadratureIdentity of_rule(const RuleSpec& spec, const BaryNode& lo, const BaryNode& hi,
                                      const Rational& fraction, bool on_middle) {
        QuadratureIdentity q;
        (on_middle ? q.middle : q.full) = 1;
        for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
            q.values.emplace_back(spec.nodes[i].within(lo, hi), spec.weights[i] * fraction);
        }
        for (const Correction& c : spec.corrections) {
            Rational s = fraction;
            for (int p = 0; p < c.order; ++p) {
                s *= fraction;
            }
            q.corrections.push_back({c.order, c.node.within(lo, hi), c.coefficient * s});
        }
        Rational s5 = fraction * fraction * fraction * fraction * fraction;
        q.errors.push_back(spec.error_coefficient * s5);
        return q;
    }

    QuadratureIdentity scaled(const Rational& k) const {
        QuadratureIdentity q = *this;
        q.full *= k;
        q.middle *= k;
        for (auto& v : q.values) {
            v.second *= k;
        }
        for (auto& c : q.corrections) {
            c.coefficient *= k;
        }
        for (auto& e : q.errors) {
            e *= k;
        }
        return q;
    }

    QuadratureIdentity plus(const QuadratureIdentity& other) const {
        QuadratureIdentity q = *this;
        q.full += other.full;
        q.middle += other.middle;
        for (const auto& [node, w] : other.values) {
            auto it = std::find_if(q.values.begin(), q.values.end(), [&](const auto& v) { return v.first == node; });
            if (it == q.values.end()) {
                q.values.emplace_back(node, w);
            } else {
                it->second += w;
            }
        }
        for (const Correction& c : other.corrections) {
            auto it = std::find_if(q.corrections.begin(), q.corrections.end(),
                                   [&](const Correction& d) { return d.order == c.order && d.node == c.node; });
            if (it == q.corrections.end()) {
                q.corrections.push_back(c);
            } else {
                it->coefficient += c.coefficient;
            }
        }
        q.errors.insert(q.errors.end(), other.errors.begin(), other.errors.end());
        std::erase_if(q.corrections, [](const Correction& c) { return c.coefficient == Rational(0); });
        return q;
    }

    Rational correction_coefficient(int order, const BaryNode& node) const {
        for (const Correction& c : corrections) {
            if (c.order == order && c.node == node) {
                return c.coefficient;
            }
        }
        return 0;
    }

    /// Replaces all error terms by their sum; valid only when they share a
    /// sign, since f'''' then attains the weighted average somewhere.
    QuadratureIdentity merge_errors() const {
        QuadratureIdentity q = *this;
        Rational total = 0;
        bool has_pos = false, has_neg = false;
        for (const Rational& e : errors) {
            total += e;
            has_pos = has_pos || e > 0;
            has_neg = has_neg || e < 0;
        }
        if (has_pos && has_neg) {
            throw VerificationFailure("error terms of opposite sign cannot be merged into one mean-value term");
        }
        q.errors = {total};
        return q;
    }
};

struct NewtonReconstruction {
    /// 4 * integral = sum of these weights times (b-a) f(node); nodes a, t1, m, t2, b.
    std::vector<std::pair<BaryNode, Rational>> four_times_weights;
    /// Per-integral node/weight form with zero weights dropped.
    std::vector<std::pair<BaryNode, Rational>> weights;
    Rational eliminated_error;   ///< merged error of the f''(m)-free identity for 4 int - 27 int_M
    Rational combined_error_4x;  ///< signed, multiplies (b-a)^5 f''''(xi) for 4 integral
    Rational per_integral_error; ///< combined_error_4x / 4
    bool matches_rule_spec = false;
};

/// Eliminates f''(m) between the corrected 1-6-1 rule on [a,b] and the
/// corrected midpoint rule on the middle third, then removes the middle-third
/// integral with Simpson's rule on that third.  All arithmetic is rational.
inline NewtonReconstruction reconstruct_newton() {
    const Rational third(1, 3);
    const QuadratureIdentity blend =
        QuadratureIdentity::of_rule(rule_spec(RuleId::Blend161), nodes::left, nodes::right, 1, false);
    const QuadratureIdentity star =
        QuadratureIdentity::of_rule(rule_spec(RuleId::MidpointCorrected), nodes::third, nodes::two_thirds, third, true);
    const QuadratureIdentity triple =
        QuadratureIdentity::of_rule(rule_spec(RuleId::Simpson), nodes::third, nodes::two_thirds, third, true);

    const Rational blend_f2 = blend.correction_coefficient(2, nodes::mid);
    const Rational star_f2 = star.correction_coefficient(2, nodes::mid);
    QuadratureIdentity eliminated = blend.scaled(star_f2).plus(star.scaled(-blend_f2));
    if (!eliminated.corrections.empty()) {
        throw VerificationFailure("f''(m) survived the elimination");
    }
    eliminated = eliminated.scaled(Rational(4) / eliminated.full).merge_errors();

    const QuadratureIdentity combined = eliminated.plus(triple.scaled(-eliminated.middle / triple.middle)).merge_errors();
    if (combined.middle != Rational(0) || combined.full != Rational(4)) {
        throw VerificationFailure("middle-third integral survived the substitution");
    }

    NewtonReconstruction out;
    out.four_times_weights = combined.values;
    std::sort(out.four_times_weights.begin(), out.four_times_weights.end(),
              [](const auto& l, const auto& r) { return l.first.beta < r.first.beta; });
    for (const auto& [node, w] : out.four_times_weights) {
        if (w != Rational(0)) {
            out.weights.emplace_back(node, w / 4);
        }
    }
    out.eliminated_error = eliminated.errors.front();
    out.combined_error_4x = combined.errors.front();
    out.per_integral_error = out.combined_error_4x / 4;

    const RuleSpec& newton = rule_spec(RuleId::Newton38);
    bool same = out.weights.size() == newton.nodes.size() && out.per_integral_error == newton.error_coefficient;
    for (std::size_t i = 0; same && i < newton.nodes.size(); ++i) {
        same = out.weights[i].first == newton.nodes[i] && out.weights[i].second == newton.weights[i];
    }
    out.matches_rule_spec = same;
    return out;
}

// ---------------------------------------------------------------------------
// Middle-third instance of the corrected midpoint identity
// ---------------------------------------------------------------------------

struct MiddleThirdCheck {
    double normalized_error = 0.0; ///< (int_M f - corrected midpoint) / (h^5 / 1920), h = (b-a)/3
    double fourth_min = 0.0;
    double fourth_max = 0.0;
    bool within_range() const { return fourth_min <= normalized_error && normalized_error <= fourth_max; }
};

/// The normalised error must be a value of f'''' on the middle third.
template <JetEvaluator F>
MiddleThirdCheck check_middle_third(const F& f, const Interval& iv, std::size_t grid_points = 1024) {
    const Interval middle(partition_point(iv, 1, 3), partition_point(iv, 2, 3));
    const double h = iv.width() / 3.0;
    const double m = iv.midpoint();
    const Jet4 fm = detail::jet_at(f, m);
    const double rule = h * fm.d0 + h * h * h / 24.0 * fm.d2;
    MiddleThirdCheck out;
    out.normalized_error = (reference_integral(f, middle) - rule) / (std::pow(h, 5) / 1920.0);
    out.fourth_min = std::numeric_limits<double>::infinity();
    out.fourth_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double d4 = detail::jet_at(f, partition_point(middle, i, grid_points - 1)).d4;
        out.fourth_min = std::min(out.fourth_min, d4);
        out.fourth_max = std::max(out.fourth_max, d4);
    }
    return out;
}

} // namespace ncq

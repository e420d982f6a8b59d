#pragma once

/// @file rules.hpp
/// The four derivative-free / derivative-corrected closed rules and their
/// composite extension.
///
/// Error convention, used throughout the library:
///
///     E := integral(f) - R(f) = c_R * (b - a)^5 * f''''(xi)
///
/// with c_R stored exactly as a rational.
///
///   rule                nodes (weights)                      correction           c_R
///   MidpointCorrected   m (1)                                +(b-a)^3 f''(m)/24   +1/1920
///   Blend161            a, m, b (1/8, 6/8, 1/8)              +(b-a)^3 f''(m)/96   -1/7680
///   Simpson             a, m, b (1/6, 4/6, 1/6)              -                    -1/2880
///   Newton38            a, t1, t2, b (1/8, 3/8, 3/8, 1/8)    -                    -1/6480

#include "ncq/error.hpp"
#include "ncq/jet.hpp"
#include "ncq/summation.hpp"

#include <boost/rational.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ncq {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// ---------------------------------------------------------------------------
// Interval
// ---------------------------------------------------------------------------

/// Oriented integration domain with a < b.
class Interval {
public:
    Interval(double a, double b) : a_(a), b_(b) {
        if (!std::isfinite(a) || !std::isfinite(b)) {
            throw InvalidInput("interval endpoints must be finite");
        }
        if (!(a < b)) {
            throw InvalidInput("interval requires a < b, got [" + detail::format_value(a) + ", " +
                               detail::format_value(b) + "]");
        }
    }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double width() const noexcept { return b_ - a_; }
    double midpoint() const noexcept { return 0.5 * a_ + 0.5 * b_; }

    friend bool operator==(const Interval&, const Interval&) = default;

private:
    double a_;
    double b_;
};

// ---------------------------------------------------------------------------
// Rule specifications
// ---------------------------------------------------------------------------

enum class RuleId { MidpointCorrected, Blend161, Simpson, Newton38 };

inline constexpr std::array<RuleId, 4> kAllRules = {
    RuleId::MidpointCorrected, RuleId::Blend161, RuleId::Simpson, RuleId::Newton38};

inline constexpr std::string_view rule_name(RuleId id) {
    switch (id) {
    case RuleId::MidpointCorrected: return "midpoint-corrected";
    case RuleId::Blend161: return "blend161";
    case RuleId::Simpson: return "simpson";
    case RuleId::Newton38: return "newton38";
    }
    return "?";
}

inline std::optional<RuleId> rule_from_name(std::string_view name) {
    for (RuleId id : kAllRules) {
        if (rule_name(id) == name) {
            return id;
        }
    }
    return std::nullopt;
}

/// Point alpha*a + beta*b with alpha + beta = 1.
struct BaryNode {
    Rational alpha;
    Rational beta;

    double position(const Interval& iv) const { return to_double(alpha) * iv.a() + to_double(beta) * iv.b(); }

    /// The same point expressed relative to a parent interval, given the
    /// sub-interval's own endpoints in the parent's coordinates.
    BaryNode within(const BaryNode& lo, const BaryNode& hi) const {
        return {alpha * lo.alpha + beta * hi.alpha, alpha * lo.beta + beta * hi.beta};
    }

    BaryNode reflected() const { return {beta, alpha}; }

    friend bool operator==(const BaryNode&, const BaryNode&) = default;
};

namespace nodes {
inline const BaryNode left{1, 0};
inline const BaryNode right{0, 1};
inline const BaryNode mid{Rational(1, 2), Rational(1, 2)};
inline const BaryNode third{Rational(2, 3), Rational(1, 3)};
inline const BaryNode two_thirds{Rational(1, 3), Rational(2, 3)};
} // namespace nodes

/// Contribution coefficient * (b-a)^(order+1) * f^(order)(node).
struct Correction {
    int order;
    BaryNode node;
    Rational coefficient;
};

struct RuleSpec {
    RuleId id;
    std::vector<BaryNode> nodes;
    std::vector<Rational> weights;
    std::vector<Correction> corrections;
    Rational error_coefficient;

    int max_derivative_order() const {
        int k = 0;
        for (const auto& c : corrections) {
            k = std::max(k, c.order);
        }
        return k;
    }

    bool has_both_endpoints() const {
        return !nodes.empty() && nodes.front() == nodes::left && nodes.back() == nodes::right;
    }
};

inline const RuleSpec& rule_spec(RuleId id) {
    using R = Rational;
    static const RuleSpec midpoint{RuleId::MidpointCorrected,
                                   {nodes::mid},
                                   {R(1)},
                                   {{2, nodes::mid, R(1, 24)}},
                                   R(1, 1920)};
    static const RuleSpec blend{RuleId::Blend161,
                                {nodes::left, nodes::mid, nodes::right},
                                {R(1, 8), R(6, 8), R(1, 8)},
                                {{2, nodes::mid, R(1, 96)}},
                                R(-1, 7680)};
    static const RuleSpec simpson{RuleId::Simpson,
                                  {nodes::left, nodes::mid, nodes::right},
                                  {R(1, 6), R(4, 6), R(1, 6)},
                                  {},
                                  R(-1, 2880)};
    static const RuleSpec newton{RuleId::Newton38,
                                 {nodes::left, nodes::third, nodes::two_thirds, nodes::right},
                                 {R(1, 8), R(3, 8), R(3, 8), R(1, 8)},
                                 {},
                                 R(-1, 6480)};
    switch (id) {
    case RuleId::MidpointCorrected: return midpoint;
    case RuleId::Blend161: return blend;
    case RuleId::Simpson: return simpson;
    case RuleId::Newton38: return newton;
    }
    return simpson;
}

// ---------------------------------------------------------------------------
// Evaluators
// ---------------------------------------------------------------------------

template <class F>
concept ValueEvaluator = requires(const F& f, double x) {
    { f(x) } -> std::convertible_to<double>;
};

template <class F>
concept JetEvaluator = ValueEvaluator<F> && requires(const F& f, const Jet4& j) {
    { f(j) } -> std::convertible_to<Jet4>;
};

namespace detail {

template <class Fn>
auto with_point_context(double x, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const PoleError& e) {
        throw PoleError(std::string(e.what()) + " (evaluating at x = " + format_value(x) + ")");
    } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " (evaluating at x = " + format_value(x) + ")");
    }
}

template <ValueEvaluator F>
double value_at(const F& f, double x) {
    return with_point_context(x, [&] { return static_cast<double>(f(x)); });
}

template <ValueEvaluator F>
Jet4 jet_at(const F& f, double x) {
    if constexpr (JetEvaluator<F>) {
        return with_point_context(x, [&] { return static_cast<Jet4>(f(jet_seed_variable(x))); });
    } else {
        throw InvalidInput("this operation needs derivatives but the integrand is not jet-capable");
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Application
// ---------------------------------------------------------------------------

struct QuadratureOutcome {
    double estimate = 0.0;
    std::size_t panels = 0;
    std::size_t function_evaluations = 0;
    double correction_contribution = 0.0;
};

namespace detail {

struct PanelSum {
    double estimate;
    double correction;
    std::size_t evaluations;
};

/// One panel.  Endpoint values may be supplied by a composite driver that
/// shares them between neighbours; they are only used for endpoint nodes.
template <ValueEvaluator F>
PanelSum apply_panel(const RuleSpec& spec, const F& f, const Interval& iv, const double* left_value,
                     const double* right_value) {
    const std::size_t n = spec.nodes.size();
    std::vector<double> values(n);
    std::vector<std::optional<Jet4>> jets(n);
    std::size_t evals = 0;

    double correction = 0.0;
    const double width = iv.width();
    for (const Correction& c : spec.corrections) {
        const double x = c.node.position(iv);
        Jet4 j;
        bool found = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (spec.nodes[i] == c.node && jets[i]) {
                j = *jets[i];
                found = true;
            }
        }
        if (!found) {
            j = jet_at(f, x);
            ++evals;
            for (std::size_t i = 0; i < n; ++i) {
                if (spec.nodes[i] == c.node) {
                    jets[i] = j;
                }
            }
        }
        correction += to_double(c.coefficient) * std::pow(width, c.order + 1) * j[c.order];
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (jets[i]) {
            values[i] = jets[i]->d0;
        } else if (spec.nodes[i] == nodes::left && left_value) {
            values[i] = *left_value;
        } else if (spec.nodes[i] == nodes::right && right_value) {
            values[i] = *right_value;
        } else {
            values[i] = value_at(f, spec.nodes[i].position(iv));
            ++evals;
        }
    }

    // Weights are symmetric, so mirrored nodes are added before weighting.
    double sum = 0.0;
    for (std::size_t i = 0; i < n / 2; ++i) {
        sum += to_double(spec.weights[i]) * (values[i] + values[n - 1 - i]);
    }
    if (n % 2 == 1) {
        sum += to_double(spec.weights[n / 2]) * values[n / 2];
    }
    return {width * sum + correction, correction, evals};
}

} // namespace detail

/// Single-panel estimate: weighted node sum plus correction terms, without
/// the f'''' error term.
template <ValueEvaluator F>
QuadratureOutcome apply_rule(RuleId id, const F& f, const Interval& iv) {
    const auto p = detail::apply_panel(rule_spec(id), f, iv, nullptr, nullptr);
    return {p.estimate, 1, p.evaluations, p.correction};
}

/// Endpoint j of an n-panel partition, ((n-j) a + j b) / n.
inline double partition_point(const Interval& iv, std::size_t j, std::size_t n) {
    if (j == 0) {
        return iv.a();
    }
    if (j == n) {
        return iv.b();
    }
    return (static_cast<double>(n - j) * iv.a() + static_cast<double>(j) * iv.b()) / static_cast<double>(n);
}

/// n equal panels, accumulated with pairwise_sum in panel order.
template <ValueEvaluator F>
QuadratureOutcome composite_rule(RuleId id, const F& f, const Interval& iv, std::size_t n) {
    if (n < 1) {
        throw InvalidInput("composite rule needs at least one panel");
    }
    const RuleSpec& spec = rule_spec(id);
    std::vector<double> edges(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        edges[j] = partition_point(iv, j, n);
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (!(edges[j] < edges[j + 1])) {
            throw InvalidInput("too many panels for the interval width");
        }
    }

    std::size_t evals = 0;
    const bool share = spec.has_both_endpoints() && spec.corrections.empty();
    std::vector<double> edge_values;
    if (share) {
        edge_values.resize(n + 1);
        for (std::size_t j = 0; j <= n; ++j) {
            edge_values[j] = detail::value_at(f, edges[j]);
        }
        evals += n + 1;
    }

    std::vector<double> estimates(n);
    std::vector<double> corrections(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Interval panel(edges[j], edges[j + 1]);
        const auto p = share ? detail::apply_panel(spec, f, panel, &edge_values[j], &edge_values[j + 1])
                             : detail::apply_panel(spec, f, panel, nullptr, nullptr);
        estimates[j] = p.estimate;
        corrections[j] = p.correction;
        evals += p.evaluations;
    }
    return {pairwise_sum(estimates), n, evals, pairwise_sum(corrections)};
}

/// |c_R| (b-a)^5 m4, where m4 bounds |f''''| on the interval.
inline double error_bound(RuleId id, const Interval& iv, double m4) {
    if (!(m4 >= 0.0) || !std::isfinite(m4)) {
        throw InvalidInput("fourth-derivative bound must be finite and non-negative");
    }
    const double c = std::fabs(to_double(rule_spec(id).error_coefficient));
    return c * std::pow(iv.width(), 5) * m4;
}

} // namespace ncq

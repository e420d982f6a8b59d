#pragma once

/// @file cli.hpp
/// Command-line front end.  run_cli() is the whole program; tools/ncq.cpp is
/// a thin main() around it so tests can drive the CLI in-process.
///
/// Exit codes: 0 success, 1 usage error (bad flag, unknown rule, malformed
/// expression, invalid interval), 2 domain or oracle error.

#include "ncq/adaptive.hpp"
#include "ncq/error.hpp"
#include "ncq/expr.hpp"
#include "ncq/record.hpp"
#include "ncq/rules.hpp"
#include "ncq/verification.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace ncq {

class UsageError : public Error {
public:
    using Error::Error;
};

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitFailure = 2 };

/// Identity-check residuals above this are reported as a failed verification.
inline constexpr double kIdentityTolerance = 1e-10;

namespace detail {

struct CliOptions {
    std::string format = "json";
    std::string expr;
    std::string rule;
    double a = 0.0;
    double b = 1.0;
    std::size_t panels = 1;
    std::vector<std::size_t> panel_list;
    double tol = 1e-10;
    std::size_t max_depth = kDefaultMaxDepth;
    std::size_t levels = 8;
    std::size_t grid = 1024;
    std::size_t bisect_iters = 80;
};

inline RuleId parse_rule(const std::string& name) {
    if (auto id = rule_from_name(name)) {
        return *id;
    }
    throw UsageError("unknown rule '" + name + "' (expected midpoint-corrected, blend161, simpson or newton38)");
}

inline ExprFunction parse_integrand(const std::string& text) {
    try {
        return ExprFunction(parse(text));
    } catch (const ParseError& e) {
        throw UsageError(std::string("--expr: ") + e.what());
    }
}

inline Interval make_interval(double a, double b) {
    try {
        return Interval(a, b);
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }
}

inline std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

inline std::string rational_text(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline OutputRecord cmd_integrate(const CliOptions& o) {
    const RuleId id = parse_rule(o.rule);
    const Interval iv = make_interval(o.a, o.b);
    if (o.panels < 1) {
        throw UsageError("--panels must be at least 1");
    }
    const ExprFunction f = parse_integrand(o.expr);
    const QuadratureOutcome r = composite_rule(id, f, iv, o.panels);
    OutputRecord rec;
    rec.add("command", std::string("integrate"))
        .add("rule", std::string(rule_name(id)))
        .add("a", iv.a())
        .add("b", iv.b())
        .add("panels", as_int(r.panels))
        .add("estimate", r.estimate)
        .add("function_evaluations", as_int(r.function_evaluations))
        .add("correction_contribution", r.correction_contribution);
    return rec;
}

inline OutputRecord cmd_adaptive(const CliOptions& o) {
    const Interval iv = make_interval(o.a, o.b);
    if (!(o.tol > 0.0)) {
        throw UsageError("--tol must be positive");
    }
    if (o.max_depth < 1) {
        throw UsageError("--max-depth must be at least 1");
    }
    const ExprFunction f = parse_integrand(o.expr);
    const AdaptiveResult r = adaptive_integrate(f, iv, o.tol, o.max_depth);
    OutputRecord rec;
    rec.add("command", std::string("adaptive"))
        .add("a", iv.a())
        .add("b", iv.b())
        .add("tol", o.tol)
        .add("value", r.value)
        .add("error_estimate", r.error_estimate)
        .add("panels", as_int(r.panels))
        .add("max_depth_reached", r.max_depth_reached)
        .add("function_evaluations", as_int(r.function_evaluations));
    return rec;
}

inline OutputRecord cmd_convergence(const CliOptions& o) {
    const RuleId id = parse_rule(o.rule);
    const Interval iv = make_interval(o.a, o.b);
    if (o.panel_list.size() < 3) {
        throw UsageError("--panels needs at least 3 comma-separated counts");
    }
    for (std::size_t i = 0; i < o.panel_list.size(); ++i) {
        if (o.panel_list[i] < 1 || (i > 0 && o.panel_list[i] <= o.panel_list[i - 1])) {
            throw UsageError("--panels must be positive and strictly increasing");
        }
    }
    const ExprFunction f = parse_integrand(o.expr);
    const ConvergenceReport r = convergence_order(id, f, iv, o.panel_list);
    std::vector<std::int64_t> counts;
    std::vector<std::int64_t> used;
    for (std::size_t i = 0; i < r.panel_counts.size(); ++i) {
        counts.push_back(as_int(r.panel_counts[i]));
        used.push_back(r.in_fit[i] ? 1 : 0);
    }
    OutputRecord rec;
    rec.add("command", std::string("convergence"))
        .add("rule", std::string(rule_name(id)))
        .add("a", iv.a())
        .add("b", iv.b())
        .add("reference", r.reference)
        .add("panel_counts", counts)
        .add("errors", r.errors)
        .add("in_fit", used)
        .add("slope", r.slope);
    return rec;
}

inline OutputRecord cmd_constants(const CliOptions& o) {
    const RuleId id = parse_rule(o.rule);
    const Interval iv = make_interval(o.a, o.b);
    if (o.levels < 2) {
        throw UsageError("--levels must be at least 2");
    }
    const ExprFunction f = parse_integrand(o.expr);
    const ConstantFit fit = estimate_error_constant(id, f, iv, o.levels);
    OutputRecord rec;
    rec.add("command", std::string("constants"))
        .add("rule", std::string(rule_name(id)))
        .add("a", iv.a())
        .add("b", iv.b())
        .add("fitted_c", fit.fitted_c)
        .add("paper_c", rational_text(fit.paper_c))
        .add("paper_c_value", to_double(fit.paper_c))
        .add("relative_deviation", fit.relative_deviation)
        .add("levels_used", as_int(fit.levels_used));
    return rec;
}

inline OutputRecord cmd_xi(const CliOptions& o) {
    const RuleId id = parse_rule(o.rule);
    const Interval iv = make_interval(o.a, o.b);
    if (o.grid < 2) {
        throw UsageError("--grid must be at least 2");
    }
    const ExprFunction f = parse_integrand(o.expr);
    const XiCertificate c = locate_xi(id, f, iv, {o.grid, o.bisect_iters});
    std::optional<double> lo;
    std::optional<double> hi;
    if (c.bracket) {
        lo = c.bracket->first;
        hi = c.bracket->second;
    }
    OutputRecord rec;
    rec.add("command", std::string("xi"))
        .add("rule", std::string(rule_name(id)))
        .add("a", iv.a())
        .add("b", iv.b())
        .add("xi", c.xi)
        .add("residual", c.residual)
        .add("error", c.error)
        .add("target_fourth_derivative", c.target)
        .add("bracket_found", c.bracket.has_value())
        .add_optional("bracket_lo", lo)
        .add_optional("bracket_hi", hi);
    return rec;
}

inline OutputRecord cmd_verify(const CliOptions& o) {
    const Interval iv = make_interval(o.a, o.b);
    const ExprFunction f = parse_integrand(o.expr);
    const IdentityCheck l1 = check_lemma1_identity(f, iv);
    const MomentIdentityCheck l2 = check_lemma2_identity(f, iv);
    const NewtonReconstruction nr = reconstruct_newton();
    const bool passed = l1.residual < kIdentityTolerance && l2.residual < kIdentityTolerance &&
                        l2.moment_deviation <= kMomentTolerance && nr.matches_rule_spec;
    OutputRecord rec;
    rec.add("command", std::string("verify"))
        .add("a", iv.a())
        .add("b", iv.b())
        .add("midpoint_kernel_lhs", l1.lhs)
        .add("midpoint_kernel_rhs", l1.rhs)
        .add("midpoint_kernel_residual", l1.residual)
        .add("blend_kernel_lhs", l2.lhs)
        .add("blend_kernel_rhs", l2.rhs)
        .add("blend_kernel_residual", l2.residual)
        .add("moment", l2.moment)
        .add("moment_expected", l2.moment_expected)
        .add("moment_deviation", l2.moment_deviation)
        .add("reconstruct_newton", nr.matches_rule_spec)
        .add("combined_error_4x", rational_text(nr.combined_error_4x))
        .add("passed", passed);
    return rec;
}

} // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    detail::CliOptions o;
    CLI::App app{"Newton-Cotes quadrature with derivative-corrected rules and error-theory checks", "ncq"};
    app.require_subcommand(1);
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

    const auto add_expr = [&](CLI::App* sub) { sub->add_option("--expr", o.expr, "Integrand in x")->required(); };
    const auto add_interval = [&](CLI::App* sub, bool required) {
        auto* a = sub->add_option("--a", o.a, "Left endpoint");
        auto* b = sub->add_option("--b", o.b, "Right endpoint");
        if (required) {
            a->required();
            b->required();
        }
    };
    const auto add_rule = [&](CLI::App* sub) { sub->add_option("--rule", o.rule, "Rule name")->required(); };

    auto* integrate = app.add_subcommand("integrate", "Composite rule estimate");
    add_expr(integrate);
    add_interval(integrate, true);
    add_rule(integrate);
    integrate->add_option("--panels", o.panels, "Number of equal panels");

    auto* adaptive = app.add_subcommand("adaptive", "Adaptive Simpson / 3/8 integration");
    add_expr(adaptive);
    add_interval(adaptive, true);
    adaptive->add_option("--tol", o.tol, "Absolute tolerance")->required();
    adaptive->add_option("--max-depth", o.max_depth, "Maximum bisection depth");

    auto* convergence = app.add_subcommand("convergence", "Observed order of a composite rule");
    add_expr(convergence);
    add_interval(convergence, true);
    add_rule(convergence);
    convergence->add_option("--panels", o.panel_list, "Comma-separated panel counts")->required()->delimiter(',');

    auto* constants = app.add_subcommand("constants", "Recover a rule's error constant");
    add_rule(constants);
    add_expr(constants);
    add_interval(constants, false);
    constants->add_option("--levels", o.levels, "Number of halving levels");

    auto* xi = app.add_subcommand("xi", "Locate the mean-value point of the error term");
    add_expr(xi);
    add_interval(xi, true);
    add_rule(xi);
    xi->add_option("--grid", o.grid, "Scan grid size");
    xi->add_option("--bisect-iters", o.bisect_iters, "Bisection iterations");

    auto* verify = app.add_subcommand("verify", "Kernel identities and the 3/8 reconstruction");
    add_expr(verify);
    add_interval(verify, true);

    // CLI11 consumes arguments from the back.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        OutputRecord rec;
        if (integrate->parsed()) {
            rec = detail::cmd_integrate(o);
        } else if (adaptive->parsed()) {
            rec = detail::cmd_adaptive(o);
        } else if (convergence->parsed()) {
            rec = detail::cmd_convergence(o);
        } else if (constants->parsed()) {
            rec = detail::cmd_constants(o);
        } else if (xi->parsed()) {
            rec = detail::cmd_xi(o);
        } else {
            rec = detail::cmd_verify(o);
        }
        out << (o.format == "csv" ? rec.to_csv() : rec.to_json()) << "\n";
        return kExitOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

} // namespace ncq

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.  Tolerances are fixed here and not configurable.

#include "ncq/cli.hpp"
#include "ncq/ncq.hpp"
#include "test_support.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ncq;
using ncq::testing::Exact;

namespace {

ExprFunction fn(const char* text) { return ExprFunction(parse(text)); }

struct Outcome {
    bool passed = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && passed) {
            detail = what;
        }
        passed = passed && ok;
    }
};

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

// 1. Signed x^4 errors on [0,1], against exact rational arithmetic.
Outcome constant_pinning() {
    Outcome o;
    const Exact expected[] = {Exact(1, 80), Exact(-1, 320), Exact(-1, 120), Exact(-1, 270)};
    const RuleId order[] = {RuleId::MidpointCorrected, RuleId::Blend161, RuleId::Simpson, RuleId::Newton38};
    const ExprFunction f = fn("x^4");
    for (int i = 0; i < 4; ++i) {
        const RuleSpec& spec = rule_spec(order[i]);
        const Exact oracle = testing::exact_monomial_integral(4, 0, 1) - testing::exact_rule_on_monomial(spec, 4, 0, 1);
        o.require(oracle == expected[i], std::string(rule_name(order[i])) + ": rational oracle disagrees");
        o.require(spec.error_coefficient * Exact(24) == expected[i],
                  std::string(rule_name(order[i])) + ": c_R * 24 mismatch");
        const double error = 0.2 - apply_rule(order[i], f, Interval(0, 1)).estimate;
        const double want = testing::to_real(expected[i]);
        const double rel = std::fabs(error - want) / std::fabs(want);
        o.require(rel <= 1e-14, std::string(rule_name(order[i])) + ": relative deviation " + fmt("%.3e", rel));
    }
    return o;
}

// 2. Degree of exactness by a brute-force monomial loop on two intervals.
Outcome exactness() {
    Outcome o;
    for (RuleId id : kAllRules) {
        o.require(exactness_degree(id) == 3, std::string(rule_name(id)) + ": exactness_degree != 3");
        for (const auto& [a, b] : {std::pair{0, 1}, std::pair{-1, 2}}) {
            for (int k = 0; k <= 4; ++k) {
                const ExprFunction f = ExprFunction(parse("x^" + std::to_string(k)));
                const double exact = testing::to_real(testing::exact_monomial_integral(k, a, b));
                const double est = apply_rule(id, f, Interval(a, b)).estimate;
                const bool within = std::fabs(est - exact) <= 1e-13 * std::max(1.0, std::fabs(exact));
                o.require(k < 4 ? within : !within,
                          std::string(rule_name(id)) + ": x^" + std::to_string(k) + " on [" + std::to_string(a) +
                              "," + std::to_string(b) + "]");
            }
        }
    }
    return o;
}

// 3. Kernel identities and the kernel moment.
Outcome kernel_identities() {
    Outcome o;
    double worst = 0.0;
    for (const char* text : {"x^5", "x^6", "exp(x)", "sin(x)"}) {
        for (const auto& [a, b] : {std::pair{0.0, 1.0}, std::pair{1.0, 3.0}}) {
            const ExprFunction f = fn(text);
            const Interval iv(a, b);
            const double r1 = check_lemma1_identity(f, iv).residual;
            const MomentIdentityCheck c2 = check_lemma2_identity(f, iv);
            worst = std::max({worst, r1, c2.residual});
            o.require(r1 < 1e-10 && c2.residual < 1e-10, std::string(text) + ": residual " + fmt("%.3e", worst));
            const double moment = -std::pow(b - a, 5) / 20.0;
            const double dev = std::fabs(kernel_moment(iv) - moment) / std::fabs(moment);
            o.require(dev <= 1e-13, "moment deviation " + fmt("%.3e", dev));
        }
    }
    if (o.passed) {
        o.detail = "worst residual " + fmt("%.3e", worst);
    }
    return o;
}

// 4. Rational reconstruction of the 3/8 rule.
Outcome reconstruction() {
    Outcome o;
    const NewtonReconstruction r = reconstruct_newton();
    const RuleSpec& newton = rule_spec(RuleId::Newton38);
    o.require(r.weights.size() == newton.nodes.size(), "node count");
    for (std::size_t i = 0; o.passed && i < newton.nodes.size(); ++i) {
        o.require(r.weights[i].first == newton.nodes[i] && r.weights[i].second == newton.weights[i],
                  "weight " + std::to_string(i));
    }
    o.require(Exact(1, 9 * 2880) + Exact(1, 9 * 192) == Exact(1, 1620), "oracle sum");
    o.require(r.combined_error_4x == Exact(-1, 1620), "combined 4x coefficient is not -1/1620");
    o.require(r.per_integral_error == newton.error_coefficient, "per-integral coefficient");
    return o;
}

// 5. Error constants recovered from exp on [0,1].
Outcome constants() {
    Outcome o;
    double worst = 0.0;
    for (RuleId id : kAllRules) {
        const ConstantFit fit = estimate_error_constant(id, fn("exp(x)"), Interval(0, 1), 8);
        worst = std::max(worst, fit.relative_deviation);
        o.require(fit.relative_deviation < 0.01,
                  std::string(rule_name(id)) + ": deviation " + fmt("%.3e", fit.relative_deviation));
        o.require((fit.fitted_c > 0) == (fit.paper_c > Exact(0)), std::string(rule_name(id)) + ": sign");
    }
    if (o.passed) {
        o.detail = "worst deviation " + fmt("%.3e", worst);
    }
    return o;
}

// 6. Observed order of the composite rules.
Outcome convergence() {
    Outcome o;
    std::string slopes;
    for (RuleId id : {RuleId::Simpson, RuleId::Newton38}) {
        const ConvergenceReport r =
            convergence_order(id, fn("sin(x)"), Interval(0, std::numbers::pi), {4, 8, 16, 32, 64});
        o.require(std::fabs(r.slope - 4.0) <= 0.05, std::string(rule_name(id)) + ": slope " + fmt("%.4f", r.slope));
        slopes += std::string(rule_name(id)) + " " + fmt("%.4f", r.slope) + " ";
    }
    if (o.passed) {
        o.detail = slopes;
    }
    return o;
}

// 7. Mean-value point certificates.
Outcome xi() {
    Outcome o;
    for (RuleId id : {RuleId::Simpson, RuleId::Newton38, RuleId::MidpointCorrected}) {
        const XiCertificate c = locate_xi(id, fn("x^5"), Interval(0, 1));
        o.require(std::fabs(c.xi - 0.5) <= 1e-9, std::string(rule_name(id)) + ": xi " + fmt("%.17g", c.xi));
    }
    for (const char* text : {"x^5", "x^6 - x", "exp(x)", "sin(3*x)", "1/(1+x^2)", "cosh(x)"}) {
        for (RuleId id : kAllRules) {
            for (const auto& [a, b] : {std::pair{0.0, 1.0}, std::pair{-0.5, 1.5}}) {
                const XiCertificate c = locate_xi(id, fn(text), Interval(a, b));
                o.require(a <= c.xi && c.xi <= b, std::string(text) + ": xi outside interval");
                if (c.bracket) {
                    o.require(c.residual < 1e-12 * std::fabs(c.error),
                              std::string(text) + " " + std::string(rule_name(id)) + ": residual " +
                                  fmt("%.3e", c.residual));
                }
            }
        }
    }
    return o;
}

// 8. Adaptive integration of 4/(1+x^2).
Outcome adaptive() {
    Outcome o;
    const AdaptiveResult r = adaptive_integrate(fn("4/(1+x^2)"), Interval(0, 1), 1e-10);
    const double err = std::fabs(r.value - std::numbers::pi);
    o.require(err <= 1e-10, "error " + fmt("%.3e", err));
    o.require(r.panels < 200, "panels " + std::to_string(r.panels));
    if (o.passed) {
        o.detail = "error " + fmt("%.3e", err) + ", " + std::to_string(r.panels) + " panels";
    }
    return o;
}

// 9. Jet derivatives against central finite differences.
Outcome jets() {
    Outcome o;
    std::mt19937_64 rng(20240601);
    double worst = 0.0;
    for (Function f : kAllFunctions) {
        const auto [lo, hi] = testing::sample_range(f);
        std::uniform_real_distribution<double> dist(lo, hi);
        for (int i = 0; i < 100; ++i) {
            const double x = dist(rng);
            const Jet4 j = jet_univariate(f, jet_seed_variable(x));
            for (int k = 1; k <= 4; ++k) {
                const double rel = testing::relative_error(j[k], testing::central_difference(f, x, k));
                worst = std::max(worst, rel);
                o.require(rel < 1e-6, std::string(function_name(f)) + " d" + std::to_string(k) + " at " +
                                          fmt("%.17g", x) + ": " + fmt("%.3e", rel));
            }
        }
    }
    if (o.passed) {
        o.detail = "worst relative error " + fmt("%.3e", worst);
    }
    return o;
}

// 10. Byte-identical CLI output across repeated runs.
Outcome cli_determinism() {
    Outcome o;
    const std::vector<std::vector<std::string>> commands = {
        {"integrate", "--expr", "x^4", "--a", "0", "--b", "1", "--rule", "newton38"},
        {"adaptive", "--expr", "4/(1+x^2)", "--a", "0", "--b", "1", "--tol", "1e-10"},
        {"convergence", "--expr", "sin(x)", "--a", "0", "--b", "3.141592653589793", "--rule", "simpson", "--panels",
         "4,8,16,32,64"},
        {"constants", "--rule", "blend161", "--expr", "exp(x)", "--levels", "8"},
        {"xi", "--expr", "x^5", "--a", "0", "--b", "1", "--rule", "simpson"},
        {"verify", "--expr", "exp(x)", "--a", "0", "--b", "1"},
    };
    for (const auto& base : commands) {
        for (const char* format : {"json", "csv"}) {
            std::vector<std::string> args = {"--format", format};
            args.insert(args.end(), base.begin(), base.end());
            std::string first;
            for (int i = 0; i < 5; ++i) {
                std::ostringstream out;
                std::ostringstream err;
                const int code = run_cli(args, out, err);
                o.require(code == 0, base[0] + ": exit " + std::to_string(code) + " " + err.str());
                if (i == 0) {
                    first = out.str();
                }
                o.require(out.str() == first, base[0] + " (" + format + "): output differs on run " + std::to_string(i));
            }
        }
    }
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"signed x^4 errors pin the four error constants (1e-14 relative)", constant_pinning},
        {"degree of exactness is 3 for every rule (1e-13 relative)", exactness},
        {"kernel identities (1e-10) and kernel moment (1e-13)", kernel_identities},
        {"3/8 rule reconstructed exactly, 4x coefficient 1/1620", reconstruction},
        {"error constants from exp on [0,1] within 1% (8 levels)", constants},
        {"composite order 4.00 +- 0.05 for simpson and newton38 on sin", convergence},
        {"xi = 0.5 +- 1e-9 for x^5; bracketed residual < 1e-12 |E|; xi in [a,b]", xi},
        {"adaptive 4/(1+x^2) within 1e-10 using < 200 panels", adaptive},
        {"jet derivatives match central differences (1e-6 relative)", jets},
        {"CLI output byte-identical across repeated runs", cli_determinism},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.passed ? 0 : 1;
        std::printf("%s %2d  %s%s%s\n", o.passed ? "PASS" : "FAIL", index, name, o.detail.empty() ? "" : "  [",
                    o.detail.empty() ? "" : (o.detail + "]").c_str());
    }
    std::printf("%d of %d criteria passed\n", index - failures, index);
    return failures == 0 ? 0 : 1;
}

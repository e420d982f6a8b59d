// Integrates a few functions with every rule and prints the error next to the
// bound |c_R| (b-a)^5 max|f''''|.

#include "ncq/ncq.hpp"

#include <cmath>
#include <cstdio>

int main() {
    using namespace ncq;

    const ExprFunction f(parse("exp(x) * sin(x)"));
    const Interval iv(0.0, 1.0);
    const double exact = reference_integral(f, iv);

    double m4 = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        m4 = std::max(m4, std::fabs(f(jet_seed_variable(partition_point(iv, i, 1000))).d4));
    }

    std::printf("%-20s %22s %12s %12s\n", "rule", "estimate", "error", "bound");
    for (RuleId id : kAllRules) {
        const double est = apply_rule(id, f, iv).estimate;
        std::printf("%-20s %22.17g %12.3e %12.3e\n", std::string(rule_name(id)).c_str(), est, exact - est,
                    error_bound(id, iv, m4));
    }

    const AdaptiveResult r = adaptive_integrate(f, iv, 1e-12);
    std::printf("\nadaptive: %.17g (estimated error %.2e, %zu panels)\n", r.value, r.error_estimate, r.panels);
    return 0;
}

// Prints printed closed forms next to their defining integrals for a few
// intervals, flagging the entries that disagree.

#include <cstdio>
#include <vector>

#include "hhkit/bounds.hpp"

int main() {
    using namespace hhkit;
    const std::vector<Interval> intervals{{1.0, 2.0}, {0.5, 3.0}, {2.0, 20.0}};
    const double s = 0.5, q = 2.0;
    for (const auto& iv : intervals) {
        std::printf("[a, b] = [%g, %g], s = %g, q = %g\n", iv.a, iv.b, s, q);
        std::printf("  %-16s %22s %22s %12s\n", "label", "printed", "integral", "deviation");
        for (const auto& set : {coeff_lambda(iv), coeff_mu(q, iv), coeff_C(s, iv), coeff_rho(s, q, iv), coeff_nu(s, q, iv)}) {
            for (std::size_t i = 0; i < set.labels.size(); ++i) {
                const double dev = std::abs(set.values[i] - set.oracle_values[i]);
                std::printf("  %-16s %22.15g %22.15g %12.3g%s\n", set.labels[i].c_str(), set.values[i],
                            set.oracle_values[i], dev, dev > 1e-8 ? "  *" : "");
            }
        }
        std::printf("\n");
    }
    std::printf("* printed form differs from the integral by more than 1e-8\n");
    return 0;
}

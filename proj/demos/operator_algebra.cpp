// Builds a few steepest and mirror operators, composes them and prints
// commutator residuals and boundedness ratios on random inputs.
#include <cstdio>
#include <utility>
#include <vector>

#include "horst/mirror.hpp"
#include "horst/rng.hpp"
#include "horst/steepest.hpp"

using namespace horst;

int main() {
    const std::size_t n = 6;
    Rng rng(2024);
    std::vector<std::pair<Vec, Vec>> samples;
    for (int k = 0; k < 200; ++k) {
        Vec t(n), g(n);
        for (std::size_t j = 0; j < n; ++j) {
            t[j] = 3.0 * rng.normal();
            g[j] = rng.normal();
        }
        samples.emplace_back(std::move(t), std::move(g));
    }

    std::vector<OperatorSpec> ops{sign_operator(), coordinate_operator(), lp_operator(SteepestConfig::from_p(3.0)),
                                  mirror_operator(MirrorMap::quadratic()),
                                  mirror_operator(MirrorMap::hyperbolic(0.1))};

    std::printf("%-26s %14s\n", "operator", "max |A|/(1+|t|)");
    for (const auto& a : ops)
        std::printf("%-26s %14.4f\n", a.label.c_str(), boundedness_ratio(a, samples).max_ratio);

    std::printf("\n%-12s %-12s %14s\n", "A", "B", "max |AB-BA|");
    for (std::size_t i = 0; i < ops.size(); ++i)
        for (std::size_t k = i + 1; k < ops.size(); ++k) {
            double worst = 0.0;
            for (const auto& [t, g] : samples) worst = std::max(worst, commutator_residual(ops[i], ops[k], t, g));
            std::printf("%-12s %-12s %14.4g\n", ops[i].label.c_str(), ops[k].label.c_str(), worst);
        }

    auto ms = compose(mirror_operator(MirrorMap::hyperbolic(0.1)), sign_operator());
    std::printf("\n%s bounded ratio %.4f\n", ms.label.c_str(), boundedness_ratio(ms, samples).max_ratio);
    return 0;
}

// One verdict line per acceptance criterion; exits nonzero if any criterion fails.
// Usage: acceptance [suite ...]   (default: all nine)

#include <cstdio>
#include <string>
#include <vector>

#include "horst/checks.hpp"
#include "oracles.hpp"

int main(int argc, char** argv) {
    using namespace horst;
    CheckContext ctx;
    ctx.brute_force = [](const MarginProblem& p) -> std::optional<double> {
        auto b = oracle::brute_force_l1_margin(p);
        if (!b.feasible) return std::nullopt;
        return b.objective;
    };
    std::vector<SuiteInfo> todo;
    for (int i = 1; i < argc; ++i) {
        auto s = find_suite(argv[i]);
        if (!s) {
            std::fprintf(stderr, "unknown suite %s\n", argv[i]);
            return 2;
        }
        todo.push_back(*s);
    }
    if (todo.empty()) todo = suites();
    int failed = 0;
    for (const auto& s : todo) {
        CriterionResult r = run_suite(s, ctx);
        std::printf("%s\n", verdict_line(r).c_str());
        std::fflush(stdout);
        failed += !r.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(todo.size()) - failed, todo.size());
    return failed ? 1 : 0;
}

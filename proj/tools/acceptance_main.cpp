// Runs the full acceptance suite and prints one pass/fail line per criterion.
// Exits nonzero if any criterion fails.

#include <cstdio>
#include <functional>
#include <utility>
#include <vector>

#include "qmet/acceptance.hpp"

int main() {
    namespace acc = qmet::acceptance;
    const std::vector<std::pair<int, std::function<qmet::acceptance::CriterionResult()>>> checks = {
        {1, acc::criterion_1}, {2, acc::criterion_2},  {3, acc::criterion_3},
        {4, acc::criterion_4}, {5, acc::criterion_5},  {6, acc::criterion_6},
        {7, acc::criterion_7}, {8, acc::criterion_8},  {9, acc::criterion_9},
        {10, acc::criterion_10}};
    int failures = 0;
    for (const auto& [id, fn] : checks) {
        const qmet::acceptance::CriterionResult r = acc::guarded(id, fn);
        std::printf("[%s] criterion %2d: %s  (%s)\n", r.passed ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.details.c_str());
        std::fflush(stdout);
        if (!r.passed) ++failures;
    }
    std::printf("%d/10 criteria passed\n", int(checks.size()) - failures);
    return failures == 0 ? 0 : 1;
}

// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. The same checks back the `rankone validate` subcommand.

#include <cstdio>
#include <string>
#include <vector>

#include "rankone/validation.hpp"

int main(int argc, char** argv) {
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));

    auto results = rankone::validation::run_acceptance(ids);
    bool all_pass = true;
    for (const auto& r : results) {
        std::printf("%s criterion %2d: %s%s%s\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.detail.empty() ? "" : " -- ", r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    std::printf("%s (%zu criteria)\n", all_pass ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
                results.size());
    return all_pass ? 0 : 1;
}

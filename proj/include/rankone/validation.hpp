#pragma once

#include <string>
#include <vector>

namespace rankone::validation {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail; // measured-vs-expected summary, one line
};

// Runs the acceptance criteria (all of them, or the subset of ids given).
// Failures are results, not exceptions.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {});

} // namespace rankone::validation

#pragma once

// End-to-end acceptance checks. Each criterion is self-contained and reports
// a pass/fail verdict plus the measured numbers behind it.

#include <cstdint>
#include <string>
#include <vector>

namespace qreset::acceptance {

struct Options {
    std::uint64_t seed = 42;
    unsigned workers = 1;
    /// Criterion ids to run; empty runs all of them.
    std::vector<int> only;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

constexpr int kCriterionCount = 12;

CriterionResult run_criterion(int id, const Options& opt);
std::vector<CriterionResult> run_all(const Options& opt);

/// "criterion  N PASS  title | detail (12.3 s)"
std::string format_line(const CriterionResult& r);

} // namespace qreset::acceptance

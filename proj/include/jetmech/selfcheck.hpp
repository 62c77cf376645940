#pragma once

#include <string>
#include <vector>

namespace jetmech {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;   ///< measured value vs bound, for the report
};

/// Runs the deterministic invariant battery.  The seed feeds every random
/// draw, so identical seeds give identical reports.
std::vector<CheckResult> run_selfchecks(unsigned long seed);

} // namespace jetmech

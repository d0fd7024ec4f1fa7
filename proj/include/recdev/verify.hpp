#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "recdev/walk_model.hpp"

namespace recdev {

struct CheckResult {
    std::string name;
    std::string law;
    bool passed = false;
    std::string detail;
};

/// Invariant suite over the given laws. `quick` shrinks horizons and path
/// counts; each finished check is echoed to `progress` when non-null.
std::vector<CheckResult> run_invariant_suite(std::vector<std::pair<std::string, StepLaw>> const& laws, bool quick,
                                             std::ostream* progress);

}  // namespace recdev

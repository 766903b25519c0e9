#pragma once

#include <string>
#include <vector>

namespace ratchet {

struct ReproduceCheck {
    std::string name;
    std::string expected; // target, e.g. "2.5 within 1e-06" or ">= 2.5"
    double computed = 0.0;
    bool pass = false;
};

struct ReproduceReport {
    std::string id;
    std::vector<ReproduceCheck> checks;
    bool pass = true;
};

// Known ids: ex1, ex2-d1, ex3-negative, ex4-substitutes, fig1-sweep. Scenario
// files are read from $RATCHET_SCENARIO_DIR when set, else the bundled
// scenarios/ directory.
ReproduceReport reproduce_report(const std::string& id);

// Same, but throws assertion-failure listing every failed check.
ReproduceReport reproduce(const std::string& id);

} // namespace ratchet

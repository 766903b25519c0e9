#pragma once

#include "ratchet/instance.hpp"

#include <string>
#include <vector>

namespace ratchet {

struct AssumptionReport {
    std::string name;
    bool holds = false;
    double margin = 0.0; // smallest slack over the checked inequalities
    std::vector<std::string> witnesses; // up to 10 violating locations
};

// Monotone likelihood ratio across conditioning rows: all 2x2 cross products
// of adjacent rows are ordered. Cells where both products vanish are neutral.
// With strict set, ties on overlapping interior support count as violations.
AssumptionReport check_mlrp(const MarkovKernel& kernel, bool strict = false);

// Conditional-cdf sensitivity |dF(y|x)/dx| stays below 1/(2*delta), measured
// with the same finite differences the impulse response uses.
AssumptionReport check_lipschitz(const MarkovKernel& kernel, double delta);

// Regularity of the virtual values: phi nondecreasing in theta1, psi
// nondecreasing in both coordinates. Errors with discrete-prior-unsupported
// on discrete-kind priors (no hazard rate there).
AssumptionReport check_regularity(const TypeGrid& prior, const MarkovKernel& kernel);

// Purchase-monotone transition: each accept-branch row dominates the matched
// reject-branch row in likelihood ratio. Fails (holds = false) for
// substitutes; that is a finding, not an error.
AssumptionReport check_complement(const MarkovKernel& kernel0, const MarkovKernel& kernel1);

// Log-concavity of a density-kind grid law. Errors with
// discrete-kind-unsupported on discrete grids.
AssumptionReport check_log_concave(const TypeGrid& grid);

// Model-appropriate battery for an instance: MLRP + Lipschitz + regularity on
// each branch, complement ordering for two-branch instances, log-concavity
// and alpha bounds for multi-period chains.
std::vector<AssumptionReport> check_instance(const Instance& inst);

} // namespace ratchet

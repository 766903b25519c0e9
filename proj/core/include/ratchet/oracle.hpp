#pragma once

#include "ratchet/instance.hpp"

#include <string>

namespace ratchet {

// Independent brute-force evaluation of a queried quantity by direct
// enumeration over grid candidates. Supported queries:
//   "monopoly"             best posted price for the first-period marginal
//   "relax"                optimum of the relaxed screening program
//   "commit"               unconstrained commitment revenue
//   "threshold:p1,pA,pR"   lowest accepting type under the given triple
// Uses only grid primitives so solver results can be checked against it.
// Fails with budget-exceeded when the scan would need more than 1e7
// elementary evaluations.
double oracle_bruteforce(const Instance& inst, const std::string& query);

} // namespace ratchet

#pragma once

#include "ratchet/instance.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ratchet {

/// Posterior over the coming period's type at one public history, plus how it
/// was formed. Off-path nodes carry the degenerate boundary belief.
struct BeliefDesc {
    std::string history; // purchase outcomes so far, e.g. "", "A", "AR"
    bool on_path = true;
    bool degenerate = false; // point mass at `at` (boundary belief rule)
    double at = 0.0;
    TypeGrid posterior; // law of the next type under the belief
};

/// One decision node of a multi-period solve.
struct HistoryRecord {
    std::string history;
    double price = 0.0;     // spot or committed price offered here
    double threshold = 0.0; // acceptance cutoff on the current type
    bool all_accept = false;
    bool all_reject = false;
    std::vector<double> u_accept, u_reject; // buyer continuation values on the node grid
};

struct EquilibriumOutcome {
    std::string refinement = "pbe-star";
    double p1 = 0.0;
    double k = 0.0;
    double p_A = 0.0;
    double p_R = 0.0;
    double revenue = 0.0;
    std::vector<double> buyer_value; // interim value per first-period grid point
    std::vector<BeliefDesc> beliefs;
    std::vector<std::uint8_t> accept_mask; // finite games: acceptance by type index

    // Multi-period fields.
    std::vector<HistoryRecord> histories;
    bool committed = false;            // seller commits to the full price path
    std::vector<double> commit_prices; // the committed path when committed
    double commit_gap = 0.0;           // best spot-then-commit value minus commit value

    std::vector<std::string> warnings;
};

struct ContinuationPoint {
    double k = 0.0;
    double p_A = 0.0;
    double p_R = 0.0;
    double pi_A = 0.0; // seller continuation revenue per branch posterior
    double pi_R = 0.0;
    bool all_accept = false;
    bool all_reject = false;
};

// All belief-consistent continuation tuples at a fixed first-period price:
// k scans the type grid (plus the all-reject sentinel), p_A/p_R range over
// the monopoly-price ties of the branch posteriors, and the buyer's threshold
// at (p1, p_A, p_R) must reproduce k. Boundary posteriors follow the
// degenerate belief rule. The list can be empty at pathological p1.
std::vector<ContinuationPoint> continuation_fixed_points(double p1, const Instance& inst);

// Seller-optimal threshold equilibrium of the two-period game. For each
// cutoff the first-period price is pinned to the highest value the marginal
// type accepts; among continuation ties the seller-best is selected.
EquilibriumOutcome solve_pbe_star(const Instance& inst, int threads = 1);

enum class BeliefFilter : std::uint8_t {
    PbeStar,      // off-path rejection believed lowest type, acceptance highest
    Unrestricted  // off-path beliefs free: any mixture rationalizing the price
};

// Exhaustive pure-profile search over (p1, p_A, p_R) x acceptance rules.
// Survivors satisfy buyer rationality (ties may break either way), seller
// continuation rationality under Bayes posteriors on path, and the selected
// off-path belief rule. Sorted by revenue, then lexicographic profile.
std::vector<EquilibriumOutcome> enumerate_discrete(const DiscreteGame& game,
                                                   BeliefFilter filter = BeliefFilter::PbeStar);

// Multi-period modified game: the seller either commits at t = 1 to the
// marginal monopoly path (commit = true compares and reports the gap) or
// plays spot prices solved by backward induction over public histories.
EquilibriumOutcome solve_multi_period(const Instance& inst, bool commit = true, int threads = 1);

struct VerificationReport {
    bool ok = true;
    double max_violation = 0.0;
    std::vector<std::string> issues;
};

// Independent re-check of an outcome against the instance: buyer best
// responses pointwise, seller prices against recomputed posterior monopoly
// sets, the boundary belief rule, and the revenue arithmetic.
VerificationReport verify_equilibrium(const EquilibriumOutcome& candidate, const Instance& inst);

} // namespace ratchet

#pragma once

#include "ratchet/instance.hpp"

#include <string>
#include <vector>

namespace ratchet {

using Table = std::vector<std::vector<double>>;

/// First- and second-period virtual values on the product grid.
/// phi[i]   = theta1_i - (1 - F1(theta1_i)) / f1(theta1_i)
/// psi[i][j] = theta2_j - (1 - F1) / f1 * I(theta1_i, theta2_j)
/// Cells with zero transition mass carry NaN (no impulse there); they never
/// contribute to expectations.
struct VirtualValueTable {
    std::vector<double> phi;
    std::vector<double> inv_hazard; // (1 - F1) / f1 at each theta1 point
    Table psi0;                     // x1 = 0 branch (baseline table)
    Table psi1;                     // x1 = 1 branch (== psi0 outside Complements)
    Table impulse0;
    Table impulse1;
    bool two_branch = false;

    const Table& psi(int x1) const { return (two_branch && x1 == 1) ? psi1 : psi0; }
    const Table& impulse(int x1) const { return (two_branch && x1 == 1) ? impulse1 : impulse0; }
};

// Midpoint-convention inverse hazard (tail past i plus half the own mass,
// over the cell density). Density-kind grids only.
std::vector<double> inverse_hazard(const TypeGrid& grid);

// Finite-difference impulse response -dF(theta2|theta1)/dtheta1 / f(theta2|theta1):
// central differences across neighbouring conditioning points, one-sided at the
// edges; NaN where the cell mass is exactly zero.
Table impulse_response(const MarkovKernel& kernel);

VirtualValueTable virtual_values(const TypeGrid& prior, const MarkovKernel& kernel);
VirtualValueTable virtual_values(const Instance& inst);

// Lowest theta2 grid point with psi >= 0 per theta1 row; to-grid max when psi < 0
// everywhere. Validates the curve is nonincreasing (one-cell slack) when
// require_monotone is set, failing with non-monotone-boundary.
std::vector<double> boundary_curve(const VirtualValueTable& table, const MarkovKernel& kernel,
                                   int x1 = 0, bool require_monotone = false);

// Value of the relaxed program at cutoff k and second-period prices
// (p_A for acceptors, p_R for rejectors), including the lowest-type
// information rent term. Requires p_A >= p_R.
double relaxed_value(const Instance& inst, double k, double p_A, double p_R);
// Multi-period variant: per-period prices for t = 2..T.
double relaxed_value_multi(const Instance& inst, double k, const std::vector<double>& p_A,
                           const std::vector<double>& p_R);

struct RelaxedSolution {
    double k = 0.0;
    double p_A = 0.0;
    double p_R = 0.0;
    double value = 0.0;
    bool collapse = false;  // a p_A == p_R optimum attains the maximum
    bool certified = false; // assumption checks passed
    bool sell_nothing = false;
    std::vector<std::string> warnings;
    std::vector<double> boundary;  // D(theta1) over the prior grid
    std::vector<double> p_A_t, p_R_t; // multi-period per-period prices (t >= 2)
};

RelaxedSolution solve_relaxed(const Instance& inst, int threads = 1);

struct Claim1Certificate {
    double k = 0.0;
    double best_diagonal = 0.0;
    double diag_price = 0.0;
    double best_off_diagonal = 0.0;
    double off_p_A = 0.0;
    double off_p_R = 0.0;
    double gap = 0.0; // best_off_diagonal - best_diagonal
};

// Certifies that constraining p_A = p_R costs nothing at cutoff k.
Claim1Certificate claim1_certify(const Instance& inst, double k);

struct CommitmentResult {
    double p1 = 0.0;
    double p_A = 0.0;
    double p_R = 0.0;
    double revenue = 0.0;
    double k = 0.0;
    bool all_accept = false;
    bool all_reject = false;
    bool threshold = true; // acceptance set is an upper interval of the grid
};

// Full-commitment optimum: unconstrained (p1, p_A, p_R) search against the
// buyer's best response, exact on the discretized instance.
CommitmentResult commitment_optimum(const Instance& inst, int threads = 1);

struct CommitmentEval {
    double revenue = 0.0;
    double k = 0.0;
    bool all_accept = false;
    bool all_reject = false;
    bool threshold = true;
};

CommitmentEval eval_commitment(const Instance& inst, double p1, double p_A, double p_R);

} // namespace ratchet

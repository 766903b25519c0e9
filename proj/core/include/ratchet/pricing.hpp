#pragma once

#include "ratchet/instance.hpp"

#include <cstddef>
#include <vector>

namespace ratchet {

struct MonopolyResult {
    double price = 0.0;
    double revenue = 0.0;
    bool unique = true;
};

// Best posted price against the grid law. Candidates are the support points
// (revenue is piecewise linear in p with breakpoints there); ties break to the
// lowest price and clear the unique flag.
MonopolyResult monopoly_price(const TypeGrid& grid);

// Indices of every support point attaining the maximal revenue (within a
// relative 1e-12 band), ascending.
std::vector<std::size_t> monopoly_price_set(const TypeGrid& grid);

// Survival of kernel row i evaluated exactly at to-grid point a, under the
// to-grid's kind convention.
double row_survival_at(const MarkovKernel& kernel, std::size_t i, std::size_t a);

// h(theta1) = E[(theta2 - p_R)+ | theta1, x1=0] - E[(theta2 - p_A)+ | theta1, x1=1]
// per from-grid point. In the baseline model acc == rej.
std::vector<double> h_function(const MarkovKernel& acc, const MarkovKernel& rej, double p_A,
                               double p_R);

// First-period acceptance test: (theta1 - p1) >= delta * h(theta1), indifference
// resolved as accept. theta1 must be a from-grid support point.
bool buyer_accepts(double theta1, double p1, double p_A, double p_R, double delta,
                   const MarkovKernel& acc, const MarkovKernel& rej);

struct ThresholdResult {
    double k = 0.0;
    bool all_accept = false;
    bool all_reject = false;
    double crossing_gap = 0.0; // |g - h| at the cutoff point
};

// Extract the buyer's cutoff from the acceptance pattern over the grid.
// The pattern must be a single up-crossing; anything else errors with
// multiple-crossings (signals an MLRP/Lipschitz violation at grid scale).
// all_accept reports k at the bottom support point; all_reject leaves k at the
// top support point with the flag set.
ThresholdResult threshold_from_prices(double p1, double p_A, double p_R, double delta,
                                      const TypeGrid& prior, const MarkovKernel& acc,
                                      const MarkovKernel& rej);

struct PostingBenchmark {
    std::vector<double> prices;   // one per period
    std::vector<double> revenues; // discounted per-period revenue
    double revenue = 0.0;
};

// Revenue from committing to posted prices in advance. Baseline and
// multi-period instances separate across periods (marginal monopoly prices);
// the complements and discrete variants need a joint search because the
// second-period law reacts to the first-period purchase.
PostingBenchmark static_posting_benchmark(const Instance& inst);

} // namespace ratchet

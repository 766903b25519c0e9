#include "ratchet/discrete_game.hpp"

#include "ratchet/error.hpp"
#include "internal_util.hpp"

#include <cmath>
#include <string>

namespace ratchet {

double DiscreteGame::theta1_marginal(std::size_t i) const {
    double m = 0.0;
    for (double w : pmf[i]) m += w;
    return m;
}

void DiscreteGame::validate() const {
    if (theta1_values.empty() || theta2_values.empty())
        fail("validation-error", "discrete game needs at least one type per period");
    if (theta1_values.size() > kMaxTypes || theta2_values.size() > kMaxTypes)
        fail("size-limit-exceeded", "discrete game supports at most " +
                                        std::to_string(kMaxTypes) + " types per period");
    if (prices.empty()) fail("validation-error", "discrete game needs a price set");
    if (prices.size() > kMaxPrices)
        fail("size-limit-exceeded",
             "discrete game supports at most " + std::to_string(kMaxPrices) + " prices");
    if (pmf.size() != theta1_values.size())
        fail("validation-error", "pmf rows must match theta1 types");
    double total = 0.0;
    for (const auto& row : pmf) {
        if (row.size() != theta2_values.size())
            fail("validation-error", "pmf columns must match theta2 types");
        for (double w : row) {
            if (!(w >= 0.0)) fail("validation-error", "pmf entries must be nonnegative");
            total += w;
        }
    }
    if (std::abs(total - 1.0) > 1e-9) fail("validation-error", "pmf must sum to one");
    for (std::size_t i = 1; i < theta1_values.size(); ++i)
        if (theta1_values[i] <= theta1_values[i - 1])
            fail("validation-error", "theta1 values must be strictly increasing");
    for (std::size_t j = 1; j < theta2_values.size(); ++j)
        if (theta2_values[j] <= theta2_values[j - 1])
            fail("validation-error", "theta2 values must be strictly increasing");
    if (kappa) {
        if (kappa->size() != theta1_values.size())
            fail("validation-error", "kappa rows must match theta1 types");
        for (const auto& row : *kappa)
            if (row.size() != theta2_values.size())
                fail("validation-error", "kappa columns must match theta2 types");
    }
    if (!(delta >= 0.0) || delta > 1.0)
        fail("validation-error", "delta must lie in [0, 1]");
}

std::vector<bool> posted_acceptance(const DiscreteGame& game, double p1, double p2) {
    const std::size_t n1 = game.theta1_values.size();
    const std::size_t n2 = game.theta2_values.size();
    std::vector<bool> accept(n1, false);
    for (std::size_t i = 0; i < n1; ++i) {
        const double mi = game.theta1_marginal(i);
        double cont_buy = 0.0, cont_skip = 0.0;
        if (mi > 0.0) {
            for (std::size_t j = 0; j < n2; ++j) {
                const double w = game.pmf[i][j] / mi;
                const double vb = game.second_value(i, j, true) - p2;
                const double vs = game.second_value(i, j, false) - p2;
                if (vb >= -detail::accept_eps(p2)) cont_buy += w * vb;
                if (vs >= -detail::accept_eps(p2)) cont_skip += w * vs;
            }
        }
        const double gain = (game.theta1_values[i] - p1) + game.delta * (cont_buy - cont_skip);
        accept[i] = gain >= -detail::accept_eps(std::abs(game.theta1_values[i]) + std::abs(p1));
    }
    return accept;
}

PostedPriceOptimum posted_price_optimum(const DiscreteGame& game) {
    game.validate();
    PostedPriceOptimum best;
    best.revenue = -1.0;
    for (double p1 : game.prices)
        for (double p2 : game.prices) {
            const auto accept = posted_acceptance(game, p1, p2);
            double rev = 0.0;
            for (std::size_t i = 0; i < game.theta1_values.size(); ++i)
                for (std::size_t j = 0; j < game.theta2_values.size(); ++j) {
                    const double w = game.pmf[i][j];
                    if (w == 0.0) continue;
                    if (accept[i]) rev += w * p1;
                    const double v2 = game.second_value(i, j, accept[i]);
                    if (v2 >= p2 - detail::accept_eps(p2)) rev += w * game.delta * p2;
                }
            if (rev > best.revenue + detail::rev_eps(rev)) {
                best.revenue = rev;
                best.p1 = p1;
                best.p2 = p2;
            }
        }
    return best;
}

} // namespace ratchet

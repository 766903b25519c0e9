#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace ratchet {

/// Small finite two-period game for exhaustive equilibrium enumeration.
/// pmf[i][j] is the joint probability of (theta1_values[i], theta2_values[j]).
/// kappa, when present, shifts the buyer's second-period value to
/// theta2 + kappa(theta1, theta2) after a first-period purchase (substitutes
/// for negative kappa, complements for positive).
struct DiscreteGame {
    std::vector<double> theta1_values;
    std::vector<double> theta2_values;
    std::vector<std::vector<double>> pmf;
    std::vector<double> prices;
    double delta = 1.0;
    std::optional<std::vector<std::vector<double>>> kappa;

    static constexpr std::size_t kMaxTypes = 8;
    static constexpr std::size_t kMaxPrices = 25;

    double kappa_at(std::size_t i, std::size_t j) const {
        return kappa ? (*kappa)[i][j] : 0.0;
    }
    // Buyer's second-period value as a function of the first-period outcome.
    double second_value(std::size_t i, std::size_t j, bool bought_first) const {
        return theta2_values[j] + (bought_first ? kappa_at(i, j) : 0.0);
    }
    double theta1_marginal(std::size_t i) const;

    void validate() const;
};

struct PostedPriceOptimum {
    double p1 = 0.0;
    double p2 = 0.0;
    double revenue = 0.0;
};

// Best revenue from posting both prices in advance, against the buyer's
// sequentially optimal response (ties resolved as accept).
PostedPriceOptimum posted_price_optimum(const DiscreteGame& game);

// First-period acceptance by theta1 index under posted prices (p1, p2),
// folding the branch-dependent continuation into the period-1 comparison.
std::vector<bool> posted_acceptance(const DiscreteGame& game, double p1, double p2);

} // namespace ratchet

#pragma once

#include "ratchet/discrete_game.hpp"
#include "ratchet/dist.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ratchet {

enum class ModelKind : std::uint8_t {
    TwoPeriod,   // one prior, one transition kernel
    Complements, // transition kernel depends on the first-period purchase
    MultiPeriod, // T periods of AR(1) transitions, seller may commit
    Discrete     // finite enumeration game
};

struct Tolerances {
    double mass = 1e-12;
    double strictness = 1e-10;
    double revenue_steps = 2.0; // revenue comparisons in units of price-grid steps
};

/// A fully materialized model instance (grids and kernels built), shared by
/// the pricing, mechanism, and equilibrium solvers.
struct Instance {
    ModelKind model = ModelKind::TwoPeriod;
    double delta = 1.0;
    Tolerances tol;
    std::size_t n_price = 401;
    std::uint64_t seed = 0;

    // Continuous variants.
    TypeGrid prior;
    MarkovKernel kernel0; // baseline transition / x1 = 0 branch
    MarkovKernel kernel1; // x1 = 1 branch (== kernel0 outside Complements)

    // MultiPeriod: steps[t] carries period t+2's transition; alphas aligned.
    std::vector<MarkovKernel> steps;
    std::vector<double> alphas;
    std::vector<TypeGrid> noise_grids; // innovation laws, kept for the checkers
    int horizon = 2;

    std::optional<DiscreteGame> game;

    const MarkovKernel& accept_kernel() const { return kernel1; }
    const MarkovKernel& reject_kernel() const { return kernel0; }

    // Largest adjacent spacing among price-carrying grids; revenue
    // tolerances are tol.revenue_steps multiples of this.
    double price_step() const;
    double revenue_tol() const { return tol.revenue_steps * price_step(); }
};

// Baseline two-period instance from a prior and a single kernel.
Instance make_two_period(TypeGrid prior, MarkovKernel kernel, double delta);
// Complement/substitute variant with purchase-dependent transitions.
Instance make_complements(TypeGrid prior, MarkovKernel reject_kernel, MarkovKernel accept_kernel,
                          double delta);
// Multi-period chain theta_{t+1} = alpha_t theta_t + eps_t starting from prior.
Instance make_multi_period(TypeGrid prior, const std::vector<Ar1Step>& steps, double delta,
                           std::size_t n_theta);

// First-period type law: the prior for the continuous variants, the theta1
// marginal (discrete kind) for finite games.
TypeGrid first_period_marginal(const Instance& inst);

} // namespace ratchet

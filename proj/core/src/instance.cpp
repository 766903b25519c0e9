#include "ratchet/instance.hpp"

#include "ratchet/error.hpp"

#include <algorithm>
#include <utility>

namespace ratchet {

namespace {

double max_spacing(const TypeGrid& g) {
    double s = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) s = std::max(s, g.points[i] - g.points[i - 1]);
    return s;
}

} // namespace

double Instance::price_step() const {
    if (model == ModelKind::Discrete) {
        double s = 0.0;
        const auto& p = game->prices;
        for (std::size_t i = 1; i < p.size(); ++i) s = std::max(s, p[i] - p[i - 1]);
        return s;
    }
    double s = max_spacing(prior);
    s = std::max(s, max_spacing(kernel0.to_grid));
    s = std::max(s, max_spacing(kernel1.to_grid));
    for (const auto& k : steps) s = std::max(s, max_spacing(k.to_grid));
    return s;
}

Instance make_two_period(TypeGrid prior, MarkovKernel kernel, double delta) {
    if (!(delta >= 0.0 && delta <= 1.0)) fail("validation-error", "delta out of [0, 1]");
    Instance inst;
    inst.model = ModelKind::TwoPeriod;
    inst.delta = delta;
    inst.prior = std::move(prior);
    inst.kernel0 = std::move(kernel);
    inst.kernel1 = inst.kernel0;
    inst.prior.validate();
    inst.kernel0.validate();
    if (inst.prior.size() != inst.kernel0.from_grid.size())
        fail("grid-mismatch", "prior and kernel from-grid differ");
    return inst;
}

Instance make_complements(TypeGrid prior, MarkovKernel reject_kernel, MarkovKernel accept_kernel,
                          double delta) {
    if (!(delta >= 0.0 && delta <= 1.0)) fail("validation-error", "delta out of [0, 1]");
    Instance inst;
    inst.model = ModelKind::Complements;
    inst.delta = delta;
    inst.prior = std::move(prior);
    inst.kernel0 = std::move(reject_kernel);
    inst.kernel1 = std::move(accept_kernel);
    inst.kernel0.x1_tag = 0;
    inst.kernel1.x1_tag = 1;
    inst.prior.validate();
    inst.kernel0.validate();
    inst.kernel1.validate();
    if (inst.prior.size() != inst.kernel0.from_grid.size() ||
        inst.prior.size() != inst.kernel1.from_grid.size())
        fail("grid-mismatch", "prior and kernel from-grids differ");
    if (inst.kernel0.to_grid.size() != inst.kernel1.to_grid.size())
        fail("grid-mismatch", "complement branches need a common to-grid");
    for (std::size_t j = 0; j < inst.kernel0.to_grid.size(); ++j) {
        const double a = inst.kernel0.to_grid.points[j];
        const double b = inst.kernel1.to_grid.points[j];
        if (std::abs(a - b) > 1e-9 * (1.0 + std::abs(a)))
            fail("grid-mismatch", "complement branches need a common to-grid");
    }
    return inst;
}

Instance make_multi_period(TypeGrid prior, const std::vector<Ar1Step>& steps, double delta,
                           std::size_t n_theta) {
    if (!(delta >= 0.0 && delta <= 1.0)) fail("validation-error", "delta out of [0, 1]");
    if (steps.empty()) fail("validation-error", "multi-period needs at least one transition");
    Instance inst;
    inst.model = ModelKind::MultiPeriod;
    inst.delta = delta;
    inst.prior = std::move(prior);
    inst.prior.validate();
    inst.horizon = static_cast<int>(steps.size()) + 1;
    const TypeGrid* from = &inst.prior;
    for (const auto& s : steps) {
        inst.steps.push_back(kernel_from_ar1(s, *from, n_theta));
        inst.alphas.push_back(s.alpha);
        inst.noise_grids.push_back(s.noise);
        from = &inst.steps.back().to_grid;
    }
    inst.kernel0 = inst.steps.front();
    inst.kernel1 = inst.kernel0;
    return inst;
}

TypeGrid first_period_marginal(const Instance& inst) {
    if (inst.model != ModelKind::Discrete) return inst.prior;
    const DiscreteGame& game = inst.game.value();
    TypeGrid g;
    g.kind = GridKind::Discrete;
    g.points = game.theta1_values;
    for (std::size_t i = 0; i < game.theta1_values.size(); ++i)
        g.weights.push_back(game.theta1_marginal(i));
    return g;
}

} // namespace ratchet

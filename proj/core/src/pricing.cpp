#include "ratchet/pricing.hpp"

#include "ratchet/discrete_game.hpp"
#include "ratchet/error.hpp"
#include "internal_util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ratchet {

namespace {

void check_from_grids_match(const MarkovKernel& acc, const MarkovKernel& rej) {
    const auto& a = acc.from_grid.points;
    const auto& r = rej.from_grid.points;
    if (a.size() != r.size()) fail("grid-mismatch", "acceptance and rejection kernels disagree on the type grid");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - r[i]) > detail::accept_eps(a[i]))
            fail("grid-mismatch", "acceptance and rejection kernels disagree on the type grid");
}

std::size_t locate_point(const TypeGrid& grid, double x, const char* what) {
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid.points[i] - x) <= detail::accept_eps(x)) return i;
    fail("validation-error", std::string(what) + " is not a support point of the type grid");
}

std::vector<bool> acceptance_pattern(double p1, double p_A, double p_R, double delta,
                                     const MarkovKernel& acc, const MarkovKernel& rej) {
    const auto h = h_function(acc, rej, p_A, p_R);
    const auto& x = acc.from_grid.points;
    std::vector<bool> pat(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = (x[i] - p1) - delta * h[i];
        pat[i] = d >= -detail::accept_eps(std::abs(x[i]) + std::abs(p1));
    }
    return pat;
}

} // namespace

MonopolyResult monopoly_price(const TypeGrid& grid) {
    grid.validate();
    const auto scan = detail::monopoly_scan(grid, grid.weights);
    return {grid.points[scan.best_idx], scan.revenue, scan.unique};
}

std::vector<std::size_t> monopoly_price_set(const TypeGrid& grid) {
    grid.validate();
    return detail::monopoly_scan(grid, grid.weights).ties;
}

double row_survival_at(const MarkovKernel& kernel, std::size_t i, std::size_t a) {
    if (i >= kernel.rows.size() || a >= kernel.to_grid.size())
        fail("validation-error", "row_survival_at index out of range");
    return detail::survival_at(kernel.to_grid, kernel.rows[i], a);
}

std::vector<double> h_function(const MarkovKernel& acc, const MarkovKernel& rej, double p_A,
                               double p_R) {
    check_from_grids_match(acc, rej);
    const std::size_t n = acc.from_grid.size();
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i)
        h[i] = rej.row_partial_expectation(i, p_R) - acc.row_partial_expectation(i, p_A);
    return h;
}

bool buyer_accepts(double theta1, double p1, double p_A, double p_R, double delta,
                   const MarkovKernel& acc, const MarkovKernel& rej) {
    check_from_grids_match(acc, rej);
    const std::size_t i = locate_point(acc.from_grid, theta1, "theta1");
    const double h = rej.row_partial_expectation(i, p_R) - acc.row_partial_expectation(i, p_A);
    const double d = (theta1 - p1) - delta * h;
    return d >= -detail::accept_eps(std::abs(theta1) + std::abs(p1));
}

ThresholdResult threshold_from_prices(double p1, double p_A, double p_R, double delta,
                                      const TypeGrid& prior, const MarkovKernel& acc,
                                      const MarkovKernel& rej) {
    prior.validate();
    check_from_grids_match(acc, rej);
    if (prior.size() != acc.from_grid.size())
        fail("grid-mismatch", "prior and kernel disagree on the type grid");

    const auto pat = acceptance_pattern(p1, p_A, p_R, delta, acc, rej);
    const std::size_t n = pat.size();

    std::size_t first_accept = n;
    for (std::size_t i = 0; i < n; ++i)
        if (pat[i]) {
            first_accept = i;
            break;
        }
    for (std::size_t i = first_accept; i < n; ++i)
        if (!pat[i])
            fail("multiple-crossings",
                 "acceptance set is not an upper interval; the instance violates the "
                 "single-crossing structure at this grid scale");

    ThresholdResult out;
    const auto h = h_function(acc, rej, p_A, p_R);
    if (first_accept == n) {
        out.all_reject = true;
        out.k = prior.max();
        out.crossing_gap = std::abs((prior.points[n - 1] - p1) - delta * h[n - 1]);
        return out;
    }
    out.k = prior.points[first_accept];
    out.all_accept = first_accept == 0;
    out.crossing_gap = std::abs((out.k - p1) - delta * h[first_accept]);
    return out;
}

namespace {

PostingBenchmark separable_benchmark(const Instance& inst) {
    PostingBenchmark out;
    TypeGrid marginal = inst.prior;
    double disc = 1.0;
    const std::size_t horizon = inst.model == ModelKind::MultiPeriod
                                    ? static_cast<std::size_t>(inst.horizon)
                                    : 2;
    for (std::size_t t = 0; t < horizon; ++t) {
        if (t > 0) {
            const MarkovKernel& step = inst.model == ModelKind::MultiPeriod
                                           ? inst.steps[t - 1]
                                           : inst.kernel0;
            marginal = push_forward(marginal, step);
            disc *= inst.delta;
        }
        const MonopolyResult m = monopoly_price(marginal);
        out.prices.push_back(m.price);
        out.revenues.push_back(disc * m.revenue);
        out.revenue += disc * m.revenue;
    }
    return out;
}

PostingBenchmark complements_benchmark(const Instance& inst) {
    const TypeGrid& prior = inst.prior;
    const MarkovKernel& k0 = inst.kernel0; // law after no purchase
    const MarkovKernel& k1 = inst.kernel1; // law after purchase
    const std::size_t n = prior.size();
    const std::size_t m = k0.to_grid.size();
    const auto t0 = detail::build_row_tables(k0);
    const auto t1 = detail::build_row_tables(k1);

    double best = -1.0;
    double best_p1 = prior.max();
    double best_p2 = k0.to_grid.min();

    std::vector<std::size_t> order(n);
    std::vector<double> c(n);
    for (std::size_t a = 0; a < m; ++a) {
        const double p2 = k0.to_grid.points[a];
        // With the price pair posted up front the buyer folds the continuation
        // gain into period 1: accept iff theta1 >= c_i.
        for (std::size_t i = 0; i < n; ++i)
            c[i] = prior.points[i] - inst.delta * (t0.pe[i][a] - t1.pe[i][a]);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t l, std::size_t r) { return c[l] > c[r]; });

        double rej_part = 0.0; // delta * p2 * sum over everyone rejecting
        for (std::size_t i = 0; i < n; ++i) rej_part += prior.weights[i] * t0.surv[i][a];
        double mass = 0.0, acc_part = 0.0;
        // All-reject candidate: post p1 above every c.
        double cand = inst.delta * p2 * rej_part;
        if (cand > best) {
            best = cand;
            best_p1 = prior.max() + 1.0;
            best_p2 = p2;
        }
        std::size_t pos = 0;
        while (pos < n) {
            const double cv = c[order[pos]];
            while (pos < n && c[order[pos]] >= cv - detail::accept_eps(cv)) {
                const std::size_t i = order[pos];
                mass += prior.weights[i];
                acc_part += prior.weights[i] * t1.surv[i][a];
                rej_part -= prior.weights[i] * t0.surv[i][a];
                ++pos;
            }
            cand = cv * mass + inst.delta * p2 * (acc_part + rej_part);
            if (cand > best) {
                best = cand;
                best_p1 = cv;
                best_p2 = p2;
            }
        }
    }

    PostingBenchmark out;
    out.prices = {best_p1, best_p2};
    // Split the total at the winning pair for reporting.
    double mass = 0.0, second = 0.0;
    {
        const std::size_t a = locate_point(k0.to_grid, best_p2, "p2");
        for (std::size_t i = 0; i < n; ++i) {
            const double ci = prior.points[i] - inst.delta * (t0.pe[i][a] - t1.pe[i][a]);
            const bool acc = ci >= best_p1 - detail::accept_eps(best_p1);
            if (acc) {
                mass += prior.weights[i];
                second += prior.weights[i] * t1.surv[i][a];
            } else {
                second += prior.weights[i] * t0.surv[i][a];
            }
        }
    }
    out.revenues = {best_p1 * mass, inst.delta * best_p2 * second};
    out.revenue = out.revenues[0] + out.revenues[1];
    return out;
}

PostingBenchmark discrete_benchmark(const Instance& inst) {
    const DiscreteGame& game = inst.game.value();
    const PostedPriceOptimum opt = posted_price_optimum(game);
    PostingBenchmark out;
    out.prices = {opt.p1, opt.p2};
    // Recompute the split under the optimal pair.
    double first = 0.0, second = 0.0;
    const auto accept1 = posted_acceptance(game, opt.p1, opt.p2);
    for (std::size_t i = 0; i < game.theta1_values.size(); ++i)
        for (std::size_t j = 0; j < game.theta2_values.size(); ++j) {
            const double w = game.pmf[i][j];
            if (w == 0.0) continue;
            const bool b1 = accept1[i];
            if (b1) first += w * opt.p1;
            const double v2 = game.second_value(i, j, b1);
            if (v2 >= opt.p2 - detail::accept_eps(opt.p2)) second += w * opt.p2;
        }
    out.revenues = {first, game.delta * second};
    out.revenue = out.revenues[0] + out.revenues[1];
    return out;
}

} // namespace

PostingBenchmark static_posting_benchmark(const Instance& inst) {
    switch (inst.model) {
    case ModelKind::TwoPeriod:
    case ModelKind::MultiPeriod:
        return separable_benchmark(inst);
    case ModelKind::Complements:
        return complements_benchmark(inst);
    case ModelKind::Discrete:
        return discrete_benchmark(inst);
    }
    fail("validation-error", "unknown model kind");
}

} // namespace ratchet

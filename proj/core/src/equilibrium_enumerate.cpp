#include "ratchet/equilibrium.hpp"

#include "ratchet/error.hpp"
#include "internal_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ratchet {

namespace {

// Value of the zero-sum game max_mu min_col mu . payoff[:,col], by primal
// simplex on the shifted dual (all payoffs positive => slack basis is
// feasible and the objective is bounded). Bland's rule, so no cycling.
double matrix_game_value(const std::vector<std::vector<double>>& payoff) {
    const std::size_t nr = payoff.size();
    const std::size_t nc = payoff.front().size();
    double shift = 1.0;
    for (const auto& row : payoff)
        for (double v : row) shift = std::max(shift, 1.0 - v);

    const std::size_t cols = nc + nr + 1;
    std::vector<std::vector<double>> t(nr + 1, std::vector<double>(cols, 0.0));
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t q = 0; q < nc; ++q) t[i][q] = payoff[i][q] + shift;
        t[i][nc + i] = 1.0;
        t[i][cols - 1] = 1.0;
    }
    for (std::size_t q = 0; q < nc; ++q) t[nr][q] = -1.0;

    std::vector<std::size_t> basis(nr);
    std::iota(basis.begin(), basis.end(), nc);

    for (int guard = 0; guard < 10000; ++guard) {
        std::size_t enter = cols - 1;
        for (std::size_t q = 0; q + 1 < cols; ++q)
            if (t[nr][q] < -1e-12) {
                enter = q;
                break;
            }
        if (enter == cols - 1) break;
        std::size_t leave = nr;
        double best_ratio = 0.0;
        for (std::size_t i = 0; i < nr; ++i) {
            if (t[i][enter] <= 1e-12) continue;
            const double ratio = t[i][cols - 1] / t[i][enter];
            if (leave == nr || ratio < best_ratio - 1e-15 ||
                (std::abs(ratio - best_ratio) <= 1e-15 && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave == nr) fail("internal-error", "game-value program unbounded");
        const double piv = t[leave][enter];
        for (double& v : t[leave]) v /= piv;
        for (std::size_t i = 0; i <= nr; ++i) {
            if (i == leave) continue;
            const double f = t[i][enter];
            if (f == 0.0) continue;
            for (std::size_t q = 0; q < cols; ++q) t[i][q] -= f * t[leave][q];
        }
        basis[leave] = enter;
    }
    const double z = t[nr][cols - 1];
    if (!(z > 0.0)) fail("internal-error", "game-value program degenerate");
    return 1.0 / z - shift;
}

} // namespace

std::vector<EquilibriumOutcome> enumerate_discrete(const DiscreteGame& game, BeliefFilter filter) {
    game.validate();
    const std::size_t n1 = game.theta1_values.size();
    const std::size_t n2 = game.theta2_values.size();

    std::vector<double> prices = game.prices;
    std::sort(prices.begin(), prices.end());
    prices.erase(std::unique(prices.begin(), prices.end()), prices.end());
    const std::size_t np = prices.size();

    std::vector<double> marginal(n1);
    for (std::size_t i = 0; i < n1; ++i) marginal[i] = game.theta1_marginal(i);

    // Per-type second-period tables: buyer continuation value (conditional)
    // and seller revenue, both absolute (pmf-weighted) and conditional.
    auto tables = [&](bool bought) {
        std::vector<std::vector<double>> cont(n1, std::vector<double>(np, 0.0));
        std::vector<std::vector<double>> rev_abs(n1, std::vector<double>(np, 0.0));
        std::vector<std::vector<double>> rev_cond(n1, std::vector<double>(np, 0.0));
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t q = 0; q < np; ++q) {
                const double p = prices[q];
                double cv = 0.0, ra = 0.0;
                for (std::size_t j = 0; j < n2; ++j) {
                    const double sv = game.second_value(i, j, bought);
                    cv += game.pmf[i][j] * std::max(sv - p, 0.0);
                    if (sv >= p - detail::accept_eps(p)) ra += game.pmf[i][j] * p;
                }
                rev_abs[i][q] = ra;
                if (marginal[i] > 0.0) {
                    cont[i][q] = cv / marginal[i];
                    rev_cond[i][q] = ra / marginal[i];
                }
            }
        return std::make_tuple(cont, rev_abs, rev_cond);
    };
    const auto [cont_a, rev_abs_a, rev_cond_a] = tables(true);
    const auto [cont_r, rev_abs_r, rev_cond_r] = tables(false);

    // Off-path price admissibility, branch by branch. PBE-star pins the
    // boundary belief; the unrestricted filter asks for any belief that
    // rationalizes the price (a matrix-game feasibility check).
    std::size_t lo = 0, hi = n1 - 1;
    while (lo + 1 < n1 && marginal[lo] <= 0.0) ++lo;
    while (hi > 0 && marginal[hi] <= 0.0) --hi;
    auto off_path_ok = [&](bool bought, std::size_t q) {
        const auto& rc = bought ? rev_cond_a : rev_cond_r;
        if (filter == BeliefFilter::PbeStar) {
            const std::size_t i = bought ? hi : lo;
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t q2 = 0; q2 < np; ++q2) best = std::max(best, rc[i][q2]);
            return rc[i][q] >= best - detail::rev_eps(best);
        }
        if (np == 1) return true;
        std::vector<std::vector<double>> payoff;
        for (std::size_t i = 0; i < n1; ++i) {
            if (marginal[i] <= 0.0) continue;
            std::vector<double> row;
            for (std::size_t q2 = 0; q2 < np; ++q2)
                if (q2 != q) row.push_back(rc[i][q] - rc[i][q2]);
            payoff.push_back(std::move(row));
        }
        return matrix_game_value(payoff) >= -1e-9 * (1.0 + prices[q]);
    };
    std::vector<std::vector<char>> off_ok(2, std::vector<char>(np));
    for (std::size_t q = 0; q < np; ++q) {
        off_ok[0][q] = off_path_ok(false, q) ? 1 : 0;
        off_ok[1][q] = off_path_ok(true, q) ? 1 : 0;
    }

    std::vector<EquilibriumOutcome> out;
    const std::size_t full = (std::size_t{1} << n1) - 1;
    std::vector<double> branch_a(np), branch_r(np);

    for (std::size_t mask = 0; mask <= full; ++mask) {
        double mass_acc = 0.0;
        for (std::size_t q = 0; q < np; ++q) branch_a[q] = branch_r[q] = 0.0;
        for (std::size_t i = 0; i < n1; ++i) {
            const bool in = mask >> i & 1;
            if (in) mass_acc += marginal[i];
            for (std::size_t q = 0; q < np; ++q) {
                if (in)
                    branch_a[q] += rev_abs_a[i][q];
                else
                    branch_r[q] += rev_abs_r[i][q];
            }
        }
        double best_a = 0.0, best_r = 0.0;
        for (std::size_t q = 0; q < np; ++q) {
            best_a = std::max(best_a, branch_a[q]);
            best_r = std::max(best_r, branch_r[q]);
        }

        for (std::size_t q1 = 0; q1 < np; ++q1) {
            const double p1 = prices[q1];
            for (std::size_t qa = 0; qa < np; ++qa) {
                if (mask != 0) {
                    if (branch_a[qa] < best_a - detail::rev_eps(best_a)) continue;
                } else if (!off_ok[1][qa]) {
                    continue;
                }
                for (std::size_t qr = 0; qr < np; ++qr) {
                    if (mask != full) {
                        if (branch_r[qr] < best_r - detail::rev_eps(best_r)) continue;
                    } else if (!off_ok[0][qr]) {
                        continue;
                    }
                    bool valid = true;
                    for (std::size_t i = 0; i < n1 && valid; ++i) {
                        const double gain =
                            (game.theta1_values[i] - p1) +
                            game.delta * (cont_a[i][qa] - cont_r[i][qr]);
                        const double eps = detail::accept_eps(
                            std::abs(game.theta1_values[i]) + std::abs(p1));
                        valid = (mask >> i & 1) ? gain >= -eps : gain <= eps;
                    }
                    if (!valid) continue;

                    EquilibriumOutcome eq;
                    eq.refinement =
                        filter == BeliefFilter::PbeStar ? "pbe-star" : "unrestricted";
                    eq.p1 = p1;
                    eq.p_A = prices[qa];
                    eq.p_R = prices[qr];
                    eq.revenue =
                        mass_acc * p1 + game.delta * (branch_a[qa] + branch_r[qr]);
                    eq.k = game.theta1_values.back() + 1.0;
                    for (std::size_t i = 0; i < n1; ++i)
                        if (mask >> i & 1) {
                            eq.k = game.theta1_values[i];
                            break;
                        }
                    eq.accept_mask.resize(n1);
                    eq.buyer_value.resize(n1);
                    for (std::size_t i = 0; i < n1; ++i) {
                        const bool in = mask >> i & 1;
                        eq.accept_mask[i] = in ? 1 : 0;
                        eq.buyer_value[i] =
                            in ? (game.theta1_values[i] - p1) + game.delta * cont_a[i][qa]
                               : game.delta * cont_r[i][qr];
                    }
                    for (bool branch : {true, false}) {
                        BeliefDesc bd;
                        bd.history = branch ? "A" : "R";
                        bd.on_path = branch ? mask != 0 : mask != full;
                        TypeGrid post;
                        post.points = game.theta2_values;
                        post.kind = GridKind::Discrete;
                        post.weights.assign(n2, 0.0);
                        if (bd.on_path) {
                            double w = 0.0;
                            for (std::size_t i = 0; i < n1; ++i) {
                                if ((mask >> i & 1) != (branch ? 1 : 0)) continue;
                                for (std::size_t j = 0; j < n2; ++j)
                                    post.weights[j] += game.pmf[i][j];
                                w += marginal[i];
                            }
                            if (w > 0.0)
                                for (double& v : post.weights) v /= w;
                        } else if (filter == BeliefFilter::PbeStar) {
                            const std::size_t i = branch ? hi : lo;
                            bd.degenerate = true;
                            bd.at = game.theta1_values[i];
                            for (std::size_t j = 0; j < n2; ++j)
                                post.weights[j] = game.pmf[i][j] / marginal[i];
                        }
                        // Unrestricted off-path beliefs are existential; no
                        // single posterior is reported for them.
                        bd.posterior = std::move(post);
                        eq.beliefs.push_back(std::move(bd));
                    }
                    out.push_back(std::move(eq));
                }
            }
        }
    }

    std::sort(out.begin(), out.end(), [](const EquilibriumOutcome& x, const EquilibriumOutcome& y) {
        if (x.revenue != y.revenue) return x.revenue > y.revenue;
        if (x.p1 != y.p1) return x.p1 < y.p1;
        if (x.p_A != y.p_A) return x.p_A < y.p_A;
        if (x.p_R != y.p_R) return x.p_R < y.p_R;
        return x.accept_mask < y.accept_mask;
    });
    return out;
}

} // namespace ratchet

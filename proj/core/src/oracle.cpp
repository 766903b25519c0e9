#include "ratchet/oracle.hpp"

#include "ratchet/discrete_game.hpp"
#include "ratchet/error.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

namespace ratchet {

namespace {

constexpr double kBudget = 1e7;
constexpr double kInf = std::numeric_limits<double>::infinity();

double acc_eps(double scale) { return 1e-9 * (1.0 + std::abs(scale)); }
double rev_eps(double scale) { return 1e-12 * (1.0 + std::abs(scale)); }

void charge(double evals) {
    if (evals > kBudget) fail("budget-exceeded", "instance too large for the brute-force oracle");
}

double oracle_monopoly(const Instance& inst) {
    const TypeGrid g = first_period_marginal(inst);
    const std::size_t n = g.size();
    charge(static_cast<double>(n) * static_cast<double>(n));
    double best = -kInf;
    std::vector<double> rev(n);
    for (std::size_t j = 0; j < n; ++j) {
        rev[j] = g.points[j] * g.survival(g.points[j]);
        if (rev[j] > best) best = rev[j];
    }
    for (std::size_t j = 0; j < n; ++j)
        if (rev[j] >= best - rev_eps(best)) return g.points[j];
    fail("internal-error", "monopoly scan found no price");
}

double oracle_threshold(const Instance& inst, double p1, double p_A, double p_R) {
    if (inst.model == ModelKind::Discrete)
        fail("validation-error", "threshold query needs a density-model instance");
    const MarkovKernel& ka = inst.accept_kernel();
    const MarkovKernel& kr = inst.reject_kernel();
    const std::size_t n = inst.prior.size();
    charge(2.0 * static_cast<double>(n) * static_cast<double>(ka.to_grid.size()));
    for (std::size_t i = 0; i < n; ++i) {
        const double x = inst.prior.points[i];
        const double h = kr.row_partial_expectation(i, p_R) - ka.row_partial_expectation(i, p_A);
        const double d = (x - p1) - inst.delta * h;
        if (d >= -acc_eps(std::abs(x) + std::abs(p1))) return x;
    }
    return inst.prior.max();
}

// Relaxed program by exhaustive scan of every threshold and branch price
// pair with p_A >= p_R, reproducing the hazard/impulse grid conventions.
double oracle_relax(const Instance& inst) {
    if (inst.model != ModelKind::TwoPeriod && inst.model != ModelKind::Complements)
        fail("validation-error", "relax query covers two-period models");
    const TypeGrid& prior = inst.prior;
    if (prior.kind == GridKind::Discrete)
        fail("discrete-prior-unsupported", "hazard rate needs a density-kind grid");
    const MarkovKernel& ka = inst.accept_kernel();
    const MarkovKernel& kr = inst.reject_kernel();
    const std::size_t n = prior.size();
    const std::size_t m = ka.to_grid.size();
    const double nn = static_cast<double>(n), mm = static_cast<double>(m);
    charge((nn + 1.0) * (mm + 1.0) * (mm + 2.0) / 2.0 + 2.0 * nn * mm);

    std::vector<double> ih(n, std::numeric_limits<double>::quiet_NaN());
    double tail = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        const double w = prior.weights[i];
        if (w > 0.0) ih[i] = (tail + 0.5 * w) * prior.cell_width(i) / w;
        tail += w;
    }

    // psi masses w_i K[i][j] psi[i][j] per branch; impulse from midpoint row
    // cdfs differenced across neighbouring conditioning points.
    auto psi_mass = [&](const MarkovKernel& k) {
        std::vector<std::vector<double>> cdf(n, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                cdf[i][j] = acc + 0.5 * k.rows[i][j];
                acc += k.rows[i][j];
            }
        }
        std::vector<std::vector<double>> s(n, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            const double w = prior.weights[i];
            if (w <= 0.0) continue;
            const std::size_t lo = i > 0 ? i - 1 : i;
            const std::size_t hi = i + 1 < n ? i + 1 : i;
            const double dx = prior.points[hi] - prior.points[lo];
            for (std::size_t j = 0; j < m; ++j) {
                const double mass = k.rows[i][j];
                if (mass <= 0.0) continue;
                double impulse = 0.0;
                if (dx > 0.0) {
                    const double f2 =
                        mass / (k.to_grid.kind == GridKind::Discrete ? 1.0
                                                                     : k.to_grid.cell_width(j));
                    impulse = -(cdf[hi][j] - cdf[lo][j]) / dx / f2;
                }
                s[i][j] = w * mass * (k.to_grid.points[j] - ih[i] * impulse);
            }
        }
        return s;
    };
    const auto sa = psi_mass(ka);
    const auto sr = psi_mass(kr);

    std::vector<double> phi_w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (prior.weights[i] > 0.0)
            phi_w[i] = prior.weights[i] * (prior.points[i] - ih[i]);

    std::vector<double> rent(m + 1, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        rent[r] = kr.row_partial_expectation(0, ka.to_grid.points[r]);

    std::vector<double> colA(m, 0.0), colR(m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) colR[j] += sr[i][j];

    double best = -kInf, best_diag = -kInf;
    double phi_acc = 0.0;
    std::vector<double> fa(m + 1), gr(m + 1);
    for (std::size_t k = n + 1; k-- > 0;) {
        if (k < n) {
            phi_acc += phi_w[k];
            for (std::size_t j = 0; j < m; ++j) {
                colA[j] += sa[k][j];
                colR[j] -= sr[k][j];
            }
        }
        fa[m] = gr[m] = 0.0;
        for (std::size_t j = m; j-- > 0;) {
            fa[j] = fa[j + 1] + colA[j];
            gr[j] = gr[j + 1] + colR[j];
        }
        for (std::size_t r = 0; r <= m; ++r) gr[r] -= rent[r];
        for (std::size_t a = 0; a <= m; ++a)
            for (std::size_t r = 0; r <= a; ++r) {
                const double v = phi_acc + inst.delta * (fa[a] + gr[r]);
                if (r == a && v >= best_diag) best_diag = v;
                if (v >= best) best = v;
            }
    }
    return best_diag >= best - rev_eps(best) ? best_diag : best;
}

double oracle_commit_discrete(const Instance& inst) {
    const DiscreteGame& game = inst.game.value();
    game.validate();
    const std::size_t n1 = game.theta1_values.size();
    const std::size_t n2 = game.theta2_values.size();
    const double np = static_cast<double>(game.prices.size());
    charge(np * np * np * 2.0 * static_cast<double>(n1) * static_cast<double>(n2));
    double best = -kInf;
    std::vector<bool> acc(n1);
    for (double p1 : game.prices)
        for (double pa : game.prices)
            for (double pr : game.prices) {
                for (std::size_t i = 0; i < n1; ++i) {
                    const double mi = game.theta1_marginal(i);
                    double cb = 0.0, cs = 0.0;
                    if (mi > 0.0)
                        for (std::size_t j = 0; j < n2; ++j) {
                            const double w = game.pmf[i][j] / mi;
                            const double vb = game.second_value(i, j, true) - pa;
                            const double vs = game.second_value(i, j, false) - pr;
                            if (vb >= -acc_eps(pa)) cb += w * vb;
                            if (vs >= -acc_eps(pr)) cs += w * vs;
                        }
                    const double gain = (game.theta1_values[i] - p1) + game.delta * (cb - cs);
                    acc[i] = gain >= -acc_eps(std::abs(game.theta1_values[i]) + std::abs(p1));
                }
                double rev = 0.0;
                for (std::size_t i = 0; i < n1; ++i)
                    for (std::size_t j = 0; j < n2; ++j) {
                        const double w = game.pmf[i][j];
                        if (w == 0.0) continue;
                        if (acc[i]) rev += w * p1;
                        const double p2 = acc[i] ? pa : pr;
                        if (game.second_value(i, j, acc[i]) >= p2 - acc_eps(p2))
                            rev += w * game.delta * p2;
                    }
                if (rev > best) best = rev;
            }
    return best;
}

// Commitment revenue by full scan: every second-period price pair on the
// grid, and for each pair every first-period cutoff c_i as the posted p1,
// plus the post-above-everything candidate.
double oracle_commit(const Instance& inst) {
    if (inst.model == ModelKind::Discrete) return oracle_commit_discrete(inst);
    if (inst.model == ModelKind::MultiPeriod)
        fail("validation-error", "commit query covers two-period models");
    const TypeGrid& prior = inst.prior;
    const MarkovKernel& ka = inst.accept_kernel();
    const MarkovKernel& kr = inst.reject_kernel();
    const std::size_t n = prior.size();
    const std::size_t m = ka.to_grid.size();
    const double nn = static_cast<double>(n), mm = static_cast<double>(m);
    charge(mm * mm * (nn + 1.0) * nn + 2.0 * nn * mm);

    std::vector<std::vector<double>> pea(n, std::vector<double>(m));
    std::vector<std::vector<double>> per(n, std::vector<double>(m));
    std::vector<std::vector<double>> sva(n, std::vector<double>(m));
    std::vector<std::vector<double>> svr(n, std::vector<double>(m));
    for (std::size_t i = 0; i < n; ++i) {
        const TypeGrid da = ka.row_dist(i), dr = kr.row_dist(i);
        for (std::size_t a = 0; a < m; ++a) {
            pea[i][a] = ka.row_partial_expectation(i, ka.to_grid.points[a]);
            per[i][a] = kr.row_partial_expectation(i, kr.to_grid.points[a]);
            sva[i][a] = da.survival(ka.to_grid.points[a]);
            svr[i][a] = dr.survival(kr.to_grid.points[a]);
        }
    }

    double best = -kInf;
    std::vector<double> c(n);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t r = 0; r < m; ++r) {
            const double pa = ka.to_grid.points[a];
            const double pr = kr.to_grid.points[r];
            for (std::size_t i = 0; i < n; ++i)
                c[i] = prior.points[i] - inst.delta * (per[i][r] - pea[i][a]);
            double all_rej = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                all_rej += prior.weights[i] * inst.delta * pr * svr[i][r];
            if (all_rej > best) best = all_rej;
            for (std::size_t cand = 0; cand < n; ++cand) {
                const double p1 = c[cand];
                double rev = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double w = prior.weights[i];
                    if (c[i] >= p1 - acc_eps(std::abs(prior.points[i]) + std::abs(p1)))
                        rev += w * (p1 + inst.delta * pa * sva[i][a]);
                    else
                        rev += w * inst.delta * pr * svr[i][r];
                }
                if (rev > best) best = rev;
            }
        }
    return best;
}

} // namespace

double oracle_bruteforce(const Instance& inst, const std::string& query) {
    if (query == "monopoly") return oracle_monopoly(inst);
    if (query == "relax") return oracle_relax(inst);
    if (query == "commit") return oracle_commit(inst);
    if (query.rfind("threshold:", 0) == 0) {
        std::istringstream in(query.substr(10));
        double p1 = 0.0, pa = 0.0, pr = 0.0;
        char c1 = 0, c2 = 0;
        if (!(in >> p1 >> c1 >> pa >> c2 >> pr) || c1 != ',' || c2 != ',' ||
            (in >> std::ws, !in.eof()))
            fail("validation-error", "threshold query expects threshold:p1,pA,pR");
        return oracle_threshold(inst, p1, pa, pr);
    }
    fail("validation-error", "unknown oracle query " + query);
}

} // namespace ratchet

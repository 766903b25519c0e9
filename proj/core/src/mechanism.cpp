#include "ratchet/mechanism.hpp"

#include "ratchet/assumptions.hpp"
#include "ratchet/error.hpp"
#include "ratchet/pricing.hpp"
#include "internal_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace ratchet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double cell_or_unit(const TypeGrid& g, std::size_t j) {
    return g.kind == GridKind::Discrete ? 1.0 : g.cell_width(j);
}

} // namespace

std::vector<double> inverse_hazard(const TypeGrid& grid) {
    grid.validate();
    if (grid.kind == GridKind::Discrete)
        fail("discrete-prior-unsupported", "hazard rate needs a density-kind grid");
    const std::size_t n = grid.size();
    std::vector<double> out(n, kNaN);
    double tail = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        const double w = grid.weights[i];
        if (w > 0.0) out[i] = (tail + 0.5 * w) * grid.cell_width(i) / w;
        tail += w;
    }
    return out;
}

Table impulse_response(const MarkovKernel& kernel) {
    kernel.validate();
    const std::size_t n = kernel.rows.size();
    const std::size_t m = kernel.to_grid.size();
    const auto& x = kernel.from_grid.points;

    // Midpoint row cdfs: mass strictly below j plus half the own cell.
    Table cdf(n, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            cdf[i][j] = acc + 0.5 * kernel.rows[i][j];
            acc += kernel.rows[i][j];
        }
    }

    Table out(n, std::vector<double>(m, kNaN));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i > 0 ? i - 1 : i;
        const std::size_t hi = i + 1 < n ? i + 1 : i;
        const double dx = x[hi] - x[lo];
        for (std::size_t j = 0; j < m; ++j) {
            const double mass = kernel.rows[i][j];
            if (mass == 0.0) continue; // no density, impulse undefined here
            if (dx <= 0.0) {
                out[i][j] = 0.0;
                continue;
            }
            const double slope = (cdf[hi][j] - cdf[lo][j]) / dx;
            const double f2 = mass / cell_or_unit(kernel.to_grid, j);
            out[i][j] = -slope / f2;
        }
    }
    return out;
}

VirtualValueTable virtual_values(const TypeGrid& prior, const MarkovKernel& kernel) {
    if (prior.size() != kernel.from_grid.size())
        fail("grid-mismatch", "prior and kernel from-grid differ");
    VirtualValueTable t;
    t.inv_hazard = inverse_hazard(prior);
    const std::size_t n = prior.size();
    const std::size_t m = kernel.to_grid.size();
    t.phi.assign(n, kNaN);
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isnan(t.inv_hazard[i])) t.phi[i] = prior.points[i] - t.inv_hazard[i];
    t.impulse0 = impulse_response(kernel);
    t.psi0.assign(n, std::vector<double>(m, kNaN));
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(t.inv_hazard[i])) continue;
        for (std::size_t j = 0; j < m; ++j)
            if (!std::isnan(t.impulse0[i][j]))
                t.psi0[i][j] = kernel.to_grid.points[j] - t.inv_hazard[i] * t.impulse0[i][j];
    }
    return t;
}

VirtualValueTable virtual_values(const Instance& inst) {
    switch (inst.model) {
    case ModelKind::TwoPeriod:
        return virtual_values(inst.prior, inst.kernel0);
    case ModelKind::MultiPeriod:
        return virtual_values(inst.prior, inst.steps.front());
    case ModelKind::Complements: {
        VirtualValueTable t = virtual_values(inst.prior, inst.kernel0);
        VirtualValueTable t1 = virtual_values(inst.prior, inst.kernel1);
        t.psi1 = std::move(t1.psi0);
        t.impulse1 = std::move(t1.impulse0);
        t.two_branch = true;
        return t;
    }
    case ModelKind::Discrete:
        fail("discrete-prior-unsupported", "virtual values need a density-kind prior");
    }
    fail("validation-error", "unknown model kind");
}

std::vector<double> boundary_curve(const VirtualValueTable& table, const MarkovKernel& kernel,
                                   int x1, bool require_monotone) {
    const Table& psi = table.psi(x1);
    const std::size_t n = psi.size();
    const std::size_t m = n ? psi[0].size() : 0;
    std::vector<double> out(n);
    std::vector<std::size_t> idx(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t first = m;
        for (std::size_t j = 0; j < m; ++j) {
            const double v = psi[i][j];
            if (!std::isnan(v) && v >= 0.0) {
                first = j;
                break;
            }
        }
        idx[i] = first;
        out[i] = first < m ? kernel.to_grid.points[first] : kernel.to_grid.max();
    }
    if (require_monotone)
        for (std::size_t i = 1; i < n; ++i)
            if (idx[i] > idx[i - 1] + 1)
                fail("non-monotone-boundary",
                     "allocation boundary rises by more than one cell between adjacent "
                     "conditioning points");
    return out;
}

namespace {

// Column-aggregated relaxation tables. sa/sr carry w1_i * K[i][j] * psi[i][j]
// for the accept/reject branches; rent[r] is the lowest type's option value at
// the rejection price, with a one-past-the-end sentinel for "no trade".
struct RelaxTables {
    Table sa, sr;
    std::vector<double> rent;
    std::vector<double> phi_w;
    std::vector<double> prices; // to-grid points
    std::size_t n = 0, m = 0;
};

RelaxTables build_relax_tables(const Instance& inst, const VirtualValueTable& vv) {
    const MarkovKernel& ka = inst.accept_kernel();
    const MarkovKernel& kr = inst.reject_kernel();
    RelaxTables t;
    t.n = inst.prior.size();
    t.m = ka.to_grid.size();
    t.prices = ka.to_grid.points;
    t.sa.assign(t.n, std::vector<double>(t.m, 0.0));
    t.sr.assign(t.n, std::vector<double>(t.m, 0.0));
    t.phi_w.assign(t.n, 0.0);
    const Table& psi_a = vv.psi(1);
    const Table& psi_r = vv.psi(0);
    for (std::size_t i = 0; i < t.n; ++i) {
        const double w = inst.prior.weights[i];
        if (w <= 0.0) continue;
        t.phi_w[i] = w * vv.phi[i];
        for (std::size_t j = 0; j < t.m; ++j) {
            if (ka.rows[i][j] > 0.0) t.sa[i][j] = w * ka.rows[i][j] * psi_a[i][j];
            if (kr.rows[i][j] > 0.0) t.sr[i][j] = w * kr.rows[i][j] * psi_r[i][j];
        }
    }
    t.rent.assign(t.m + 1, 0.0);
    for (std::size_t r = 0; r < t.m; ++r)
        t.rent[r] = kr.row_partial_expectation(0, t.prices[r]);
    return t;
}

// Best prices at a fixed acceptance column split. colA/colR are per-column
// psi masses for acceptors/rejectors. Returns diagonal and constrained
// (p_A >= p_R) optima over grid prices plus the no-trade sentinel m.
struct SplitOptima {
    double diag = 0.0;
    std::size_t diag_c = 0;
    double off = 0.0;
    std::size_t off_a = 0, off_r = 0;
};

SplitOptima optimize_split(const std::vector<double>& colA, const std::vector<double>& colR,
                           const std::vector<double>& rent) {
    const std::size_t m = colA.size();
    std::vector<double> fa(m + 1, 0.0), gr(m + 1, 0.0);
    for (std::size_t j = m; j-- > 0;) {
        fa[j] = fa[j + 1] + colA[j];
        gr[j] = gr[j + 1] + colR[j];
    }
    for (std::size_t r = 0; r <= m; ++r) gr[r] -= rent[r];

    SplitOptima out;
    out.diag = -std::numeric_limits<double>::infinity();
    out.off = -std::numeric_limits<double>::infinity();
    double pm = -std::numeric_limits<double>::infinity();
    std::size_t pm_arg = 0;
    for (std::size_t a = 0; a <= m; ++a) {
        if (gr[a] > pm) {
            pm = gr[a];
            pm_arg = a;
        }
        const double d = fa[a] + gr[a];
        if (d > out.diag) {
            out.diag = d;
            out.diag_c = a;
        }
        const double v = fa[a] + pm;
        if (v > out.off) {
            out.off = v;
            out.off_a = a;
            out.off_r = pm_arg;
        }
    }
    return out;
}

std::vector<std::string> collect_warnings(const std::vector<AssumptionReport>& reports,
                                          bool& certified) {
    std::vector<std::string> warnings;
    certified = true;
    for (const auto& r : reports)
        if (!r.holds) {
            certified = false;
            warnings.push_back(r.name + " failed (margin " + std::to_string(r.margin) + ")");
        }
    return warnings;
}

double price_or_sentinel(const std::vector<double>& prices, std::size_t idx) {
    return idx < prices.size() ? prices[idx] : prices.back() + 1.0;
}

RelaxedSolution solve_relaxed_two_period(const Instance& inst) {
    const VirtualValueTable vv = virtual_values(inst);
    RelaxedSolution sol;
    const auto reports = check_instance(inst);
    sol.warnings = collect_warnings(reports, sol.certified);

    const RelaxTables t = build_relax_tables(inst, vv);
    std::vector<double> colA(t.m, 0.0), colR(t.m, 0.0);
    for (std::size_t i = 0; i < t.n; ++i)
        for (std::size_t j = 0; j < t.m; ++j) colR[j] += t.sr[i][j];

    struct Best {
        double value = -std::numeric_limits<double>::infinity();
        std::size_t k = 0, a = 0, r = 0;
    };
    Best best, best_diag;
    double phi_acc = 0.0;
    // k walks from the all-reject sentinel down to full acceptance; the
    // lowest k wins ties because later (smaller-k) strict improvements only.
    for (std::size_t k = t.n + 1; k-- > 0;) {
        if (k < t.n) {
            phi_acc += t.phi_w[k];
            for (std::size_t j = 0; j < t.m; ++j) {
                colA[j] += t.sa[k][j];
                colR[j] -= t.sr[k][j];
            }
        }
        const SplitOptima opt = optimize_split(colA, colR, t.rent);
        const double vd = phi_acc + inst.delta * opt.diag;
        const double vo = phi_acc + inst.delta * opt.off;
        if (vd >= best_diag.value) {
            best_diag = {vd, k, opt.diag_c, opt.diag_c};
        }
        if (vo >= best.value) {
            best = {vo, k, opt.off_a, opt.off_r};
        }
    }

    const bool collapse = best_diag.value >= best.value - detail::rev_eps(best.value);
    const Best& pick = collapse ? best_diag : best;
    sol.collapse = collapse;
    sol.value = pick.value;
    sol.k = pick.k < t.n ? inst.prior.points[pick.k] : inst.prior.max() + 1.0;
    sol.p_A = price_or_sentinel(t.prices, pick.a);
    sol.p_R = price_or_sentinel(t.prices, pick.r);
    sol.sell_nothing = pick.k >= t.n && pick.a >= t.m && pick.r >= t.m;

    bool monotone_ok = true;
    for (const auto& r : reports)
        if ((r.name == "A3-Regularity" || r.name == "A3'-Regularityx") && !r.holds)
            monotone_ok = false;
    bool have_regularity = false;
    for (const auto& r : reports)
        if (r.name == "A3-Regularity" || r.name == "A3'-Regularityx") have_regularity = true;
    if (!have_regularity) {
        monotone_ok = false;
        sol.warnings.push_back("A3-Regularity skipped (discrete-kind prior)");
    }
    try {
        sol.boundary = boundary_curve(vv, inst.reject_kernel(), 0, monotone_ok);
    } catch (const Error&) {
        // Tolerance-level regularity passes can still jostle a flat boundary.
        sol.warnings.push_back("boundary not monotone at grid scale");
        sol.boundary = boundary_curve(vv, inst.reject_kernel(), 0, false);
    }
    return sol;
}

RelaxedSolution solve_relaxed_multi(const Instance& inst) {
    RelaxedSolution sol;
    const auto reports = check_instance(inst);
    sol.warnings = collect_warnings(reports, sol.certified);

    const std::size_t n = inst.prior.size();
    const std::size_t T = static_cast<std::size_t>(inst.horizon);
    const auto ih = inverse_hazard(inst.prior);

    // Composed kernels prior -> theta_t and per-period psi tables.
    struct PeriodTab {
        Table s;                   // w1_i * C[i][j] * psi_t[i][j]
        std::vector<double> rent;  // sentinel at m
        std::vector<double> prices;
        double disc = 1.0;
        std::size_t m = 0;
    };
    std::vector<PeriodTab> periods;
    MarkovKernel composed = inst.steps.front();
    double aprod = 1.0, disc = 1.0;
    for (std::size_t t = 2; t <= T; ++t) {
        if (t > 2) composed = compose(composed, inst.steps[t - 2]);
        aprod *= inst.alphas[t - 2];
        disc *= inst.delta;
        PeriodTab pt;
        pt.m = composed.to_grid.size();
        pt.prices = composed.to_grid.points;
        pt.disc = disc;
        pt.s.assign(n, std::vector<double>(pt.m, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            const double w = inst.prior.weights[i];
            if (w <= 0.0 || std::isnan(ih[i])) continue;
            for (std::size_t j = 0; j < pt.m; ++j)
                if (composed.rows[i][j] > 0.0)
                    pt.s[i][j] = w * composed.rows[i][j] *
                                 (composed.to_grid.points[j] - ih[i] * aprod);
        }
        pt.rent.assign(pt.m + 1, 0.0);
        for (std::size_t r = 0; r < pt.m; ++r)
            pt.rent[r] = composed.row_partial_expectation(0, pt.prices[r]);
        periods.push_back(std::move(pt));
    }

    std::vector<double> phi_w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (inst.prior.weights[i] > 0.0 && !std::isnan(ih[i]))
            phi_w[i] = inst.prior.weights[i] * (inst.prior.points[i] - ih[i]);

    struct Best {
        double value = -std::numeric_limits<double>::infinity();
        std::size_t k = 0;
        std::vector<std::size_t> a, r;
    };
    Best best, best_diag;
    std::vector<std::vector<double>> colA(periods.size()), colR(periods.size());
    for (std::size_t p = 0; p < periods.size(); ++p) {
        colA[p].assign(periods[p].m, 0.0);
        colR[p].assign(periods[p].m, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < periods[p].m; ++j) colR[p][j] += periods[p].s[i][j];
    }
    double phi_acc = 0.0;
    for (std::size_t k = n + 1; k-- > 0;) {
        if (k < n) {
            phi_acc += phi_w[k];
            for (std::size_t p = 0; p < periods.size(); ++p)
                for (std::size_t j = 0; j < periods[p].m; ++j) {
                    colA[p][j] += periods[p].s[k][j];
                    colR[p][j] -= periods[p].s[k][j];
                }
        }
        double vd = phi_acc, vo = phi_acc;
        std::vector<std::size_t> da(periods.size()), dr(periods.size()), oa(periods.size()),
            orr(periods.size());
        for (std::size_t p = 0; p < periods.size(); ++p) {
            const SplitOptima opt = optimize_split(colA[p], colR[p], periods[p].rent);
            vd += periods[p].disc * opt.diag;
            vo += periods[p].disc * opt.off;
            da[p] = dr[p] = opt.diag_c;
            oa[p] = opt.off_a;
            orr[p] = opt.off_r;
        }
        if (vd >= best_diag.value) best_diag = {vd, k, da, dr};
        if (vo >= best.value) best = {vo, k, oa, orr};
    }

    const bool collapse = best_diag.value >= best.value - detail::rev_eps(best.value);
    const Best& pick = collapse ? best_diag : best;
    sol.collapse = collapse;
    sol.value = pick.value;
    sol.k = pick.k < n ? inst.prior.points[pick.k] : inst.prior.max() + 1.0;
    bool nothing = pick.k >= n;
    for (std::size_t p = 0; p < periods.size(); ++p) {
        sol.p_A_t.push_back(price_or_sentinel(periods[p].prices, pick.a[p]));
        sol.p_R_t.push_back(price_or_sentinel(periods[p].prices, pick.r[p]));
        nothing = nothing && pick.a[p] >= periods[p].m && pick.r[p] >= periods[p].m;
    }
    sol.p_A = sol.p_A_t.front();
    sol.p_R = sol.p_R_t.front();
    sol.sell_nothing = nothing;
    return sol;
}

} // namespace

double relaxed_value(const Instance& inst, double k, double p_A, double p_R) {
    if (inst.model == ModelKind::MultiPeriod)
        return relaxed_value_multi(inst, k, {p_A}, {p_R});
    if (p_A < p_R - detail::accept_eps(std::abs(p_A) + std::abs(p_R)))
        fail("constraint-violated", "relaxed program requires p_A >= p_R");
    const VirtualValueTable vv = virtual_values(inst);
    const MarkovKernel& ka = inst.accept_kernel();
    const MarkovKernel& kr = inst.reject_kernel();
    const Table& psi_a = vv.psi(1);
    const Table& psi_r = vv.psi(0);
    double val = 0.0;
    for (std::size_t i = 0; i < inst.prior.size(); ++i) {
        const double w = inst.prior.weights[i];
        if (w <= 0.0) continue;
        const double x = inst.prior.points[i];
        const bool accept = x >= k - detail::accept_eps(std::abs(x) + std::abs(k));
        if (accept) val += w * vv.phi[i];
        const MarkovKernel& kb = accept ? ka : kr;
        const Table& psi = accept ? psi_a : psi_r;
        const double p = accept ? p_A : p_R;
        double part = 0.0;
        for (std::size_t j = 0; j < kb.to_grid.size(); ++j) {
            if (kb.rows[i][j] <= 0.0) continue;
            const double y = kb.to_grid.points[j];
            if (y >= p - detail::accept_eps(std::abs(y) + std::abs(p)))
                part += kb.rows[i][j] * psi[i][j];
        }
        val += inst.delta * w * part;
    }
    val -= inst.delta * kr.row_partial_expectation(0, p_R);
    return val;
}

double relaxed_value_multi(const Instance& inst, double k, const std::vector<double>& p_A,
                           const std::vector<double>& p_R) {
    if (inst.model != ModelKind::MultiPeriod)
        fail("validation-error", "multi-period relaxed value needs a multi-period instance");
    const std::size_t T = static_cast<std::size_t>(inst.horizon);
    if (p_A.size() != T - 1 || p_R.size() != T - 1)
        fail("validation-error", "need one price per period from 2 on");
    for (std::size_t t = 0; t + 2 <= T; ++t)
        if (p_A[t] < p_R[t] - detail::accept_eps(std::abs(p_A[t]) + std::abs(p_R[t])))
            fail("constraint-violated", "relaxed program requires p_A >= p_R per period");

    const auto ih = inverse_hazard(inst.prior);
    const std::size_t n = inst.prior.size();
    double val = 0.0;
    std::vector<bool> accept(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = inst.prior.weights[i];
        const double x = inst.prior.points[i];
        accept[i] = x >= k - detail::accept_eps(std::abs(x) + std::abs(k));
        if (accept[i] && w > 0.0) val += w * (x - ih[i]);
    }

    MarkovKernel composed = inst.steps.front();
    double aprod = 1.0, disc = 1.0;
    for (std::size_t t = 2; t <= T; ++t) {
        if (t > 2) composed = compose(composed, inst.steps[t - 2]);
        aprod *= inst.alphas[t - 2];
        disc *= inst.delta;
        const double pa = p_A[t - 2], pr = p_R[t - 2];
        for (std::size_t i = 0; i < n; ++i) {
            const double w = inst.prior.weights[i];
            if (w <= 0.0 || std::isnan(ih[i])) continue;
            const double p = accept[i] ? pa : pr;
            double part = 0.0;
            for (std::size_t j = 0; j < composed.to_grid.size(); ++j) {
                if (composed.rows[i][j] <= 0.0) continue;
                const double y = composed.to_grid.points[j];
                if (y >= p - detail::accept_eps(std::abs(y) + std::abs(p)))
                    part += composed.rows[i][j] * (y - ih[i] * aprod);
            }
            val += disc * w * part;
        }
        val -= disc * composed.row_partial_expectation(0, pr);
    }
    return val;
}

RelaxedSolution solve_relaxed(const Instance& inst, int threads) {
    (void)threads; // the column sweep is linear in the tables; no need to split
    if (inst.model == ModelKind::MultiPeriod) return solve_relaxed_multi(inst);
    return solve_relaxed_two_period(inst);
}

Claim1Certificate claim1_certify(const Instance& inst, double k) {
    if (inst.model == ModelKind::MultiPeriod || inst.model == ModelKind::Discrete)
        fail("validation-error", "claim-1 certification covers two-period models");
    const VirtualValueTable vv = virtual_values(inst);
    const RelaxTables t = build_relax_tables(inst, vv);

    std::vector<double> colA(t.m, 0.0), colR(t.m, 0.0);
    double phi_acc = 0.0;
    for (std::size_t i = 0; i < t.n; ++i) {
        const double x = inst.prior.points[i];
        if (x >= k - detail::accept_eps(std::abs(x) + std::abs(k))) {
            phi_acc += t.phi_w[i];
            for (std::size_t j = 0; j < t.m; ++j) colA[j] += t.sa[i][j];
        } else {
            for (std::size_t j = 0; j < t.m; ++j) colR[j] += t.sr[i][j];
        }
    }
    const SplitOptima opt = optimize_split(colA, colR, t.rent);
    Claim1Certificate cert;
    cert.k = k;
    cert.best_diagonal = phi_acc + inst.delta * opt.diag;
    cert.diag_price = price_or_sentinel(t.prices, opt.diag_c);
    cert.best_off_diagonal = phi_acc + inst.delta * opt.off;
    cert.off_p_A = price_or_sentinel(t.prices, opt.off_a);
    cert.off_p_R = price_or_sentinel(t.prices, opt.off_r);
    cert.gap = cert.best_off_diagonal - cert.best_diagonal;
    return cert;
}

namespace {

struct CommitBest {
    double revenue = -std::numeric_limits<double>::infinity();
    double p1 = 0.0;
    std::size_t a = 0, r = 0;
    bool all_reject = false;
};

// Scan all first-period prices for one (p_A, p_R) grid pair. c_i is the type's
// acceptance cutoff on p1; walking candidates in descending c order grows the
// acceptance set one tie-group at a time.
void commit_scan_pair(const Instance& inst, const detail::RowTables& ta,
                      const detail::RowTables& tr, std::size_t a, std::size_t r,
                      std::vector<std::size_t>& order, std::vector<double>& c,
                      CommitBest& best) {
    const std::size_t n = inst.prior.size();
    const double pa = inst.accept_kernel().to_grid.points[a];
    const double pr = inst.reject_kernel().to_grid.points[r];
    for (std::size_t i = 0; i < n; ++i)
        c[i] = inst.prior.points[i] - inst.delta * (tr.pe[i][r] - ta.pe[i][a]);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t rr) { return c[l] > c[rr]; });

    double rej_second = 0.0;
    for (std::size_t i = 0; i < n; ++i) rej_second += inst.prior.weights[i] * tr.surv[i][r];
    double mass = 0.0, acc_second = 0.0;

    double cand = inst.delta * pr * rej_second; // all-reject
    if (cand > best.revenue) {
        best.revenue = cand;
        best.p1 = inst.prior.max() + 1.0;
        best.a = a;
        best.r = r;
        best.all_reject = true;
    }
    std::size_t pos = 0;
    while (pos < n) {
        const double cv = c[order[pos]];
        // Group boundary must match the acceptance test at p1 = cv exactly.
        while (pos < n &&
               c[order[pos]] >= cv - detail::accept_eps(std::abs(cv) +
                                                        std::abs(inst.prior.points[order[pos]]))) {
            const std::size_t i = order[pos];
            mass += inst.prior.weights[i];
            acc_second += inst.prior.weights[i] * ta.surv[i][a];
            rej_second -= inst.prior.weights[i] * tr.surv[i][r];
            ++pos;
        }
        cand = cv * mass + inst.delta * (pa * acc_second + pr * rej_second);
        if (cand > best.revenue) {
            best.revenue = cand;
            best.p1 = cv;
            best.a = a;
            best.r = r;
            best.all_reject = false;
        }
    }
}

// Among (p_A, p_R) pairs the optimum ties across, prefer the highest p_A and
// then the lowest p_R. Degenerate kernels make whole families of price splits
// revenue-equal (only p1 + delta*p_A matters), and this rule picks the split
// closest to posting a single static price.
bool prefer_pair(std::size_t a, std::size_t r, const CommitBest& best) {
    return a > best.a || (a == best.a && r < best.r);
}

// Revisit one pair's candidates and keep the first that reaches the tie band
// [floor, max]. Within a pair the walk order is the same as the scan's, so the
// pick is deterministic and independent of the thread layout.
void commit_pick_pair(const Instance& inst, const detail::RowTables& ta,
                      const detail::RowTables& tr, std::size_t a, std::size_t r, double floor,
                      std::vector<std::size_t>& order, std::vector<double>& c,
                      CommitBest& best) {
    const bool seen = best.revenue > -std::numeric_limits<double>::infinity();
    if (seen && !prefer_pair(a, r, best)) return;
    const std::size_t n = inst.prior.size();
    const double pa = inst.accept_kernel().to_grid.points[a];
    const double pr = inst.reject_kernel().to_grid.points[r];
    for (std::size_t i = 0; i < n; ++i)
        c[i] = inst.prior.points[i] - inst.delta * (tr.pe[i][r] - ta.pe[i][a]);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t rr) { return c[l] > c[rr]; });

    double rej_second = 0.0;
    for (std::size_t i = 0; i < n; ++i) rej_second += inst.prior.weights[i] * tr.surv[i][r];
    double mass = 0.0, acc_second = 0.0;

    double cand = inst.delta * pr * rej_second; // all-reject
    if (cand >= floor) {
        best.revenue = cand;
        best.p1 = inst.prior.max() + 1.0;
        best.a = a;
        best.r = r;
        best.all_reject = true;
        return;
    }
    std::size_t pos = 0;
    while (pos < n) {
        const double cv = c[order[pos]];
        while (pos < n &&
               c[order[pos]] >= cv - detail::accept_eps(std::abs(cv) +
                                                        std::abs(inst.prior.points[order[pos]]))) {
            const std::size_t i = order[pos];
            mass += inst.prior.weights[i];
            acc_second += inst.prior.weights[i] * ta.surv[i][a];
            rej_second -= inst.prior.weights[i] * tr.surv[i][r];
            ++pos;
        }
        cand = cv * mass + inst.delta * (pa * acc_second + pr * rej_second);
        if (cand >= floor) {
            best.revenue = cand;
            best.p1 = cv;
            best.a = a;
            best.r = r;
            best.all_reject = false;
            return;
        }
    }
}

CommitmentResult commitment_discrete(const Instance& inst) {
    const DiscreteGame& game = inst.game.value();
    game.validate();
    CommitmentResult best;
    best.revenue = -std::numeric_limits<double>::infinity();
    const std::size_t n1 = game.theta1_values.size();
    const std::size_t n2 = game.theta2_values.size();
    for (double p1 : game.prices)
        for (double pa : game.prices)
            for (double pr : game.prices) {
                double rev = 0.0;
                std::vector<bool> acc(n1);
                for (std::size_t i = 0; i < n1; ++i) {
                    const double mi = game.theta1_marginal(i);
                    double cb = 0.0, cs = 0.0;
                    if (mi > 0.0)
                        for (std::size_t j = 0; j < n2; ++j) {
                            const double w = game.pmf[i][j] / mi;
                            const double vb = game.second_value(i, j, true) - pa;
                            const double vs = game.second_value(i, j, false) - pr;
                            if (vb >= -detail::accept_eps(pa)) cb += w * vb;
                            if (vs >= -detail::accept_eps(pr)) cs += w * vs;
                        }
                    const double gain =
                        (game.theta1_values[i] - p1) + game.delta * (cb - cs);
                    acc[i] = gain >= -detail::accept_eps(std::abs(game.theta1_values[i]) +
                                                         std::abs(p1));
                }
                for (std::size_t i = 0; i < n1; ++i)
                    for (std::size_t j = 0; j < n2; ++j) {
                        const double w = game.pmf[i][j];
                        if (w == 0.0) continue;
                        if (acc[i]) rev += w * p1;
                        const double p2 = acc[i] ? pa : pr;
                        if (game.second_value(i, j, acc[i]) >=
                            p2 - detail::accept_eps(p2))
                            rev += w * game.delta * p2;
                    }
                if (rev > best.revenue + detail::rev_eps(rev)) {
                    best.revenue = rev;
                    best.p1 = p1;
                    best.p_A = pa;
                    best.p_R = pr;
                    std::size_t first = n1;
                    bool interval = true;
                    for (std::size_t i = 0; i < n1; ++i)
                        if (acc[i]) {
                            if (first == n1) first = i;
                        } else if (first < n1) {
                            interval = false;
                        }
                    best.threshold = interval;
                    best.all_reject = first == n1;
                    best.all_accept = first == 0 && interval;
                    best.k = first < n1 ? game.theta1_values[first]
                                        : game.theta1_values.back() + 1.0;
                }
            }
    return best;
}

} // namespace

CommitmentResult commitment_optimum(const Instance& inst, int threads) {
    if (inst.model == ModelKind::MultiPeriod)
        fail("validation-error", "commitment optimum covers two-period models");
    if (inst.model == ModelKind::Discrete) return commitment_discrete(inst);

    const detail::RowTables ta = detail::build_row_tables(inst.accept_kernel());
    const detail::RowTables tr = detail::build_row_tables(inst.reject_kernel());
    const std::size_t m = inst.accept_kernel().to_grid.size();
    const std::size_t n = inst.prior.size();

    const std::size_t nthreads =
        std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(
                                                           std::max(threads, 1)),
                                                       m));
    std::vector<CommitBest> slot(nthreads);
    auto work = [&](std::size_t tid) {
        std::vector<std::size_t> order(n);
        std::vector<double> c(n);
        for (std::size_t a = tid; a < m; a += nthreads)
            for (std::size_t r = 0; r < m; ++r)
                commit_scan_pair(inst, ta, tr, a, r, order, c, slot[tid]);
    };
    auto run = [&](auto& fn) {
        if (nthreads == 1) {
            fn(0);
            return;
        }
        std::vector<std::thread> pool;
        for (std::size_t tidx = 0; tidx < nthreads; ++tidx) pool.emplace_back(fn, tidx);
        for (auto& th : pool) th.join();
    };
    run(work);
    double max_rev = slot[0].revenue;
    for (std::size_t s = 1; s < nthreads; ++s) max_rev = std::max(max_rev, slot[s].revenue);

    // Second pass: pick the reported triple from the tie band around the
    // maximum. Candidate revenues are exact per (a, r, p1), so the band is
    // independent of the thread layout, and rounding noise between
    // revenue-equal splits cannot steer the choice.
    const double floor = max_rev - detail::rev_eps(max_rev);
    std::vector<CommitBest> pick(nthreads);
    auto refine = [&](std::size_t tid) {
        std::vector<std::size_t> order(n);
        std::vector<double> c(n);
        for (std::size_t a = tid; a < m; a += nthreads)
            for (std::size_t r = 0; r < m; ++r)
                commit_pick_pair(inst, ta, tr, a, r, floor, order, c, pick[tid]);
    };
    run(refine);
    CommitBest best = pick[0];
    for (std::size_t s = 1; s < nthreads; ++s) {
        const CommitBest& cb = pick[s];
        if (cb.revenue == -std::numeric_limits<double>::infinity()) continue;
        if (best.revenue == -std::numeric_limits<double>::infinity() ||
            prefer_pair(cb.a, cb.r, best))
            best = cb;
    }

    CommitmentResult out;
    out.revenue = max_rev;
    out.p1 = best.p1;
    out.p_A = inst.accept_kernel().to_grid.points[best.a];
    out.p_R = inst.reject_kernel().to_grid.points[best.r];
    const CommitmentEval ev = eval_commitment(inst, out.p1, out.p_A, out.p_R);
    out.k = ev.k;
    out.all_accept = ev.all_accept;
    out.all_reject = ev.all_reject;
    out.threshold = ev.threshold;
    return out;
}

CommitmentEval eval_commitment(const Instance& inst, double p1, double p_A, double p_R) {
    if (inst.model == ModelKind::MultiPeriod || inst.model == ModelKind::Discrete)
        fail("validation-error", "commitment evaluation covers continuous two-period models");
    const MarkovKernel& ka = inst.accept_kernel();
    const MarkovKernel& kr = inst.reject_kernel();
    const std::size_t n = inst.prior.size();

    CommitmentEval out;
    double rev = 0.0;
    std::size_t first = n;
    bool interval = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = inst.prior.weights[i];
        const double x = inst.prior.points[i];
        const double h = kr.row_partial_expectation(i, p_R) - ka.row_partial_expectation(i, p_A);
        const double d = (x - p1) - inst.delta * h;
        const bool acc = d >= -detail::accept_eps(std::abs(x) + std::abs(p1));
        if (acc && first == n) first = i;
        if (!acc && first < n) interval = false;
        if (w <= 0.0) continue;
        if (acc) {
            rev += w * p1;
            rev += inst.delta * w * p_A * ka.row_dist(i).survival(p_A);
        } else {
            rev += inst.delta * w * p_R * kr.row_dist(i).survival(p_R);
        }
    }
    out.revenue = rev;
    out.threshold = interval;
    out.all_reject = first == n;
    out.all_accept = first == 0 && interval;
    out.k = first < n ? inst.prior.points[first] : inst.prior.max() + 1.0;
    return out;
}

} // namespace ratchet

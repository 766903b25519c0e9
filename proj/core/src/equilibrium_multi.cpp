#include "ratchet/equilibrium.hpp"

#include "ratchet/assumptions.hpp"
#include "ratchet/error.hpp"
#include "internal_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ratchet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SuppRange {
    std::size_t lo = 0, hi = 0;
};

SuppRange support_range(const std::vector<double>& w) {
    SuppRange r;
    r.lo = 0;
    r.hi = w.size() - 1;
    while (r.lo + 1 < w.size() && w[r.lo] <= 0.0) ++r.lo;
    while (r.hi > 0 && w[r.hi] <= 0.0) --r.hi;
    return r;
}

TypeGrid grid_from(const TypeGrid& like, std::vector<double> weights, double mass) {
    TypeGrid g;
    g.points = like.points;
    g.kind = like.kind;
    if (mass > 0.0)
        for (double& v : weights) v /= mass;
    g.weights = std::move(weights);
    return g;
}

void gate_assumptions(const Instance& inst, std::vector<std::string>& warnings) {
    for (const auto& rep : check_instance(inst)) {
        if (rep.name == "A4-LogConcaveAR1" && !rep.holds)
            fail("assumption-violated",
                 "multi-period solve needs a log-concave prior and innovations with "
                 "0 < alpha < 1/(2 delta); margin " +
                     std::to_string(rep.margin));
        if (!rep.holds)
            warnings.push_back(rep.name + " failed (margin " + std::to_string(rep.margin) + ")");
    }
}

// Marginal monopoly path started from a posterior over the period-`first`
// grid: committed prices, their grid indexes, and the discounted revenue.
struct CommitPath {
    std::vector<double> prices;
    std::vector<std::size_t> idx;
    double value = 0.0; // discounted to period `first`
};

CommitPath commit_path(const Instance& inst, TypeGrid marg, int first) {
    CommitPath out;
    double disc = 1.0;
    for (int t = first; t <= inst.horizon; ++t) {
        if (t > first) {
            marg = push_forward(marg, inst.steps[t - 2]);
            disc *= inst.delta;
        }
        const auto scan = detail::monopoly_scan(marg, marg.weights);
        out.prices.push_back(marg.points[scan.best_idx]);
        out.idx.push_back(scan.best_idx);
        out.value += disc * scan.revenue;
    }
    return out;
}

const TypeGrid& period_grid(const Instance& inst, int t) {
    return t == 1 ? inst.prior : inst.steps[t - 2].to_grid;
}

// Buyer values along a committed price path, prices[s] covering period
// first + s; u[s] is indexed by the period-(first+s) grid.
std::vector<std::vector<double>> path_values(const Instance& inst,
                                             const std::vector<double>& prices, int first) {
    const int len = inst.horizon - first + 1;
    std::vector<std::vector<double>> u(static_cast<std::size_t>(len));
    for (int s = len; s-- > 0;) {
        const int t = first + s;
        const TypeGrid& grid = period_grid(inst, t);
        auto& us = u[static_cast<std::size_t>(s)];
        us.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double cont = 0.0;
            if (t < inst.horizon) {
                const MarkovKernel& step = inst.steps[t - 1];
                for (std::size_t j = 0; j < step.to_grid.size(); ++j)
                    cont += step.rows[i][j] * u[static_cast<std::size_t>(s) + 1][j];
            }
            us[i] = std::max(grid.points[i] - prices[static_cast<std::size_t>(s)], 0.0) +
                    inst.delta * cont;
        }
    }
    return u;
}

void emit_path_records(const Instance& inst, const std::vector<double>& prices, int first,
                       const std::string& prefix, std::vector<HistoryRecord>& records) {
    const auto u = path_values(inst, prices, first);
    for (int s = 0; s < inst.horizon - first + 1; ++s) {
        const int t = first + s;
        const TypeGrid& grid = period_grid(inst, t);
        const auto sr = support_range(grid.weights);
        const double p = prices[static_cast<std::size_t>(s)];
        HistoryRecord h;
        h.history = prefix + std::string(static_cast<std::size_t>(s), '*');
        h.price = p;
        h.threshold = p;
        h.all_accept = p <= grid.points[sr.lo] + detail::accept_eps(std::abs(p));
        h.all_reject = p > grid.points[sr.hi] + detail::accept_eps(std::abs(p));
        h.u_accept.resize(grid.size());
        h.u_reject.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double cont = 0.0;
            if (t < inst.horizon) {
                const MarkovKernel& step = inst.steps[t - 1];
                for (std::size_t j = 0; j < step.to_grid.size(); ++j)
                    cont += step.rows[i][j] * u[static_cast<std::size_t>(s) + 1][j];
            }
            h.u_accept[i] = (grid.points[i] - p) + inst.delta * cont;
            h.u_reject[i] = inst.delta * cont;
        }
        records.push_back(std::move(h));
    }
}

void warn_price_order(const std::vector<double>& acc, const std::vector<double>& rej,
                      std::vector<std::string>& warnings) {
    for (std::size_t s = 0; s < acc.size() && s < rej.size(); ++s)
        if (acc[s] < rej[s] - detail::accept_eps(std::abs(acc[s]) + std::abs(rej[s])))
            warnings.push_back("acceptance-branch price below rejection branch in period " +
                               std::to_string(s + 2));
}

void root_beliefs(const Instance& inst, std::size_t k, EquilibriumOutcome& out) {
    const MarkovKernel& step = inst.steps[0];
    const std::size_t n = inst.prior.size();
    const std::size_t m = step.to_grid.size();
    const auto sr = support_range(inst.prior.weights);
    std::vector<double> pa(m, 0.0), pr(m, 0.0);
    double wa = 0.0, wr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = inst.prior.weights[i];
        if (i >= k) {
            wa += w;
            for (std::size_t j = 0; j < m; ++j) pa[j] += w * step.rows[i][j];
        } else {
            wr += w;
            for (std::size_t j = 0; j < m; ++j) pr[j] += w * step.rows[i][j];
        }
    }
    BeliefDesc ba;
    ba.history = "A";
    ba.on_path = wa > 0.0;
    ba.degenerate = wa <= 0.0;
    ba.at = inst.prior.points[sr.hi];
    ba.posterior = wa > 0.0 ? grid_from(step.to_grid, pa, wa)
                            : grid_from(step.to_grid, step.rows[sr.hi], 1.0);
    BeliefDesc br;
    br.history = "R";
    br.on_path = wr > 0.0;
    br.degenerate = wr <= 0.0;
    br.at = inst.prior.points[sr.lo];
    br.posterior = wr > 0.0 ? grid_from(step.to_grid, pr, wr)
                            : grid_from(step.to_grid, step.rows[sr.lo], 1.0);
    out.beliefs = {std::move(ba), std::move(br)};
}

// Screen once at t = 1, then commit branch by branch; compare against full
// commitment from the start and keep the better of the two.
EquilibriumOutcome solve_with_commitment(const Instance& inst) {
    const int T = inst.horizon;
    const std::size_t n = inst.prior.size();
    const auto sr = support_range(inst.prior.weights);
    const MarkovKernel& step1 = inst.steps[0];

    const CommitPath bench = commit_path(inst, inst.prior, 1);

    std::vector<MarkovKernel> comp;
    comp.push_back(step1);
    for (int t = 3; t <= T; ++t) comp.push_back(compose(comp.back(), inst.steps[t - 2]));
    std::vector<detail::RowTables> ctab;
    ctab.reserve(comp.size());
    for (const auto& c : comp) ctab.push_back(detail::build_row_tables(c));

    auto option_value = [&](const CommitPath& path, std::size_t i) {
        double u = 0.0, disc = 1.0;
        for (std::size_t s = 0; s < path.idx.size(); ++s) {
            u += disc * ctab[s].pe[i][path.idx[s]];
            disc *= inst.delta;
        }
        return u;
    };

    struct Best {
        double value = -kInf;
        std::size_t k = 0;
        double p1 = 0.0, w_acc = 0.0;
        CommitPath acc, rej;
        bool valid = false, all_reject = false;
    } best;

    std::vector<double> pushed_acc(step1.to_grid.size(), 0.0);
    std::vector<double> pushed_rej(step1.to_grid.size(), 0.0);
    double w_acc = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += inst.prior.weights[i];
        for (std::size_t j = 0; j < pushed_rej.size(); ++j)
            pushed_rej[j] += inst.prior.weights[i] * step1.rows[i][j];
    }

    for (std::size_t k = n + 1; k-- > 0;) {
        if (k < n) {
            const double w = inst.prior.weights[k];
            w_acc += w;
            for (std::size_t j = 0; j < pushed_acc.size(); ++j) {
                pushed_acc[j] += w * step1.rows[k][j];
                pushed_rej[j] -= w * step1.rows[k][j];
            }
            if (w <= 0.0) continue; // same split as k + 1
        }
        const bool all_reject = w_acc <= 0.0;
        const bool all_accept = w_acc >= total;
        const double w_rej = std::max(total - w_acc, 0.0);

        const TypeGrid marg_a = all_reject ? grid_from(step1.to_grid, step1.rows[sr.hi], 1.0)
                                           : grid_from(step1.to_grid, pushed_acc, w_acc);
        const TypeGrid marg_r = all_accept ? grid_from(step1.to_grid, step1.rows[sr.lo], 1.0)
                                           : grid_from(step1.to_grid, pushed_rej, w_rej);
        const CommitPath pa = commit_path(inst, marg_a, 2);
        const CommitPath pr = commit_path(inst, marg_r, 2);

        double p1;
        bool feasible = true;
        if (all_reject) {
            double top = -kInf;
            for (std::size_t i = sr.lo; i <= sr.hi; ++i) {
                if (inst.prior.weights[i] <= 0.0) continue;
                top = std::max(top, inst.prior.points[i] +
                                        inst.delta * (option_value(pa, i) - option_value(pr, i)));
            }
            p1 = top + 1.0;
        } else {
            p1 = kInf;
            for (std::size_t i = k; i < n; ++i) {
                if (inst.prior.weights[i] <= 0.0) continue;
                p1 = std::min(p1, inst.prior.points[i] +
                                      inst.delta * (option_value(pa, i) - option_value(pr, i)));
            }
            for (std::size_t i = 0; i < k && feasible; ++i) {
                if (inst.prior.weights[i] <= 0.0) continue;
                const double c = inst.prior.points[i] +
                                 inst.delta * (option_value(pa, i) - option_value(pr, i));
                feasible =
                    c < p1 - detail::accept_eps(std::abs(inst.prior.points[i]) + std::abs(p1));
            }
        }
        if (!feasible) continue;
        const double value = p1 * w_acc + inst.delta * (w_acc * pa.value + w_rej * pr.value);
        if (!best.valid || value > best.value || (value == best.value && k < best.k)) {
            best = {value, k, p1, w_acc, pa, pr, true, all_reject};
        }
    }
    if (!best.valid) fail("no-fixed-point", "no feasible screening threshold");
    const double h_star = best.value;

    EquilibriumOutcome out;
    out.commit_prices = bench.prices;
    out.commit_gap = h_star - bench.value;
    out.committed = bench.value >= h_star - detail::rev_eps(std::abs(bench.value));
    warn_price_order(best.acc.prices, best.rej.prices, out.warnings);

    if (out.committed) {
        out.p1 = bench.prices[0];
        out.k = bench.prices[0];
        out.p_A = out.p_R = bench.prices[1];
        out.revenue = bench.value;
        out.buyer_value = path_values(inst, bench.prices, 1).front();
        emit_path_records(inst, bench.prices, 1, "", out.histories);
        std::size_t k_idx = n;
        for (std::size_t i = 0; i < n; ++i)
            if (inst.prior.points[i] >=
                bench.prices[0] - detail::accept_eps(std::abs(inst.prior.points[i]) +
                                                     std::abs(bench.prices[0]))) {
                k_idx = i;
                break;
            }
        root_beliefs(inst, k_idx, out);
        return out;
    }

    out.p1 = best.p1;
    out.k = best.k < n ? inst.prior.points[best.k] : inst.prior.max() + 1.0;
    out.p_A = best.acc.prices.front();
    out.p_R = best.rej.prices.front();
    out.revenue = h_star;
    out.buyer_value.resize(n);

    HistoryRecord root;
    root.history = "";
    root.price = best.p1;
    root.threshold = out.k;
    root.all_accept = best.k <= sr.lo;
    root.all_reject = best.all_reject;
    root.u_accept.resize(n);
    root.u_reject.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        root.u_accept[i] =
            (inst.prior.points[i] - best.p1) + inst.delta * option_value(best.acc, i);
        root.u_reject[i] = inst.delta * option_value(best.rej, i);
        out.buyer_value[i] = i >= best.k ? root.u_accept[i] : root.u_reject[i];
    }
    out.histories.push_back(std::move(root));
    emit_path_records(inst, best.acc.prices, 2, "A", out.histories);
    emit_path_records(inst, best.rej.prices, 2, "R", out.histories);
    root_beliefs(inst, best.k, out);
    return out;
}

// Fully sequential play: every public node reprices against its posterior.
// Solving a node scans thresholds, recursing into both branch children.
struct NodeSol {
    double seller = 0.0;
    std::vector<double> buyer;
    double price = 0.0, threshold = 0.0;
    std::size_t k_idx = 0, price_idx = 0;
    bool all_accept = false, all_reject = false;
};

class SpotSolver {
public:
    explicit SpotSolver(const Instance& inst) : inst_(inst) {
        tables_.reserve(inst.steps.size());
        for (const auto& s : inst.steps) tables_.push_back(detail::build_row_tables(s));
    }

    NodeSol solve(const TypeGrid& g, int t, const std::string& hist,
                  std::vector<HistoryRecord>* rec) {
        if (t == inst_.horizon) return terminal(g, hist, rec);
        return middle(g, t, hist, rec);
    }

private:
    NodeSol terminal(const TypeGrid& g, const std::string& hist,
                     std::vector<HistoryRecord>* rec) {
        const auto scan = detail::monopoly_scan(g, g.weights);
        const auto sr = support_range(g.weights);
        NodeSol s;
        s.price = g.points[scan.best_idx];
        s.price_idx = scan.best_idx;
        s.threshold = s.price;
        s.seller = scan.revenue;
        s.all_accept = scan.best_idx <= sr.lo;
        s.buyer.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            s.buyer[i] = std::max(g.points[i] - s.price, 0.0);
        if (rec) {
            HistoryRecord h;
            h.history = hist;
            h.price = s.price;
            h.threshold = s.price;
            h.all_accept = s.all_accept;
            h.u_accept.resize(g.size());
            h.u_reject.assign(g.size(), 0.0);
            for (std::size_t i = 0; i < g.size(); ++i) h.u_accept[i] = g.points[i] - s.price;
            rec->push_back(std::move(h));
        }
        return s;
    }

    NodeSol middle(const TypeGrid& g, int t, const std::string& hist,
                   std::vector<HistoryRecord>* rec) {
        const MarkovKernel& step = inst_.steps[static_cast<std::size_t>(t) - 1];
        const auto& tab = tables_[static_cast<std::size_t>(t) - 1];
        const std::size_t n = g.size();
        const std::size_t m = step.to_grid.size();
        const auto sr = support_range(g.weights);
        const bool child_terminal = t + 1 == inst_.horizon;

        std::vector<double> pa(m, 0.0), pr(m, 0.0);
        double w_acc = 0.0, total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += g.weights[i];
            for (std::size_t j = 0; j < m; ++j) pr[j] += g.weights[i] * step.rows[i][j];
        }

        struct Best {
            double value = -kInf;
            std::size_t k = 0;
            double p1 = 0.0;
            bool valid = false, all_reject = false;
        } best;

        std::vector<double> ua(n), ur(n), c(n);
        auto fold = [&](const NodeSol& child, std::vector<double>& u) {
            if (child_terminal) {
                for (std::size_t i = 0; i < n; ++i) u[i] = tab.pe[i][child.price_idx];
            } else {
                for (std::size_t i = 0; i < n; ++i) {
                    double v = 0.0;
                    for (std::size_t j = 0; j < m; ++j) v += step.rows[i][j] * child.buyer[j];
                    u[i] = v;
                }
            }
        };
        auto branch_grids = [&](bool all_rej, bool all_acc, double wa, double wr) {
            TypeGrid ga = all_rej ? grid_from(step.to_grid, step.rows[sr.hi], 1.0)
                                  : grid_from(step.to_grid, pa, wa);
            TypeGrid gr = all_acc ? grid_from(step.to_grid, step.rows[sr.lo], 1.0)
                                  : grid_from(step.to_grid, pr, wr);
            return std::make_pair(std::move(ga), std::move(gr));
        };

        for (std::size_t k = n + 1; k-- > 0;) {
            if (k < n) {
                const double w = g.weights[k];
                w_acc += w;
                for (std::size_t j = 0; j < m; ++j) {
                    pa[j] += w * step.rows[k][j];
                    pr[j] -= w * step.rows[k][j];
                }
                if (w <= 0.0) continue;
            }
            const bool all_reject = w_acc <= 0.0;
            const bool all_accept = w_acc >= total;
            const double w_rej = std::max(total - w_acc, 0.0);
            auto [ga, gr] = branch_grids(all_reject, all_accept, w_acc, w_rej);
            const NodeSol ca = solve(ga, t + 1, hist, nullptr);
            const NodeSol cr = solve(gr, t + 1, hist, nullptr);
            fold(ca, ua);
            fold(cr, ur);
            for (std::size_t i = 0; i < n; ++i)
                c[i] = g.points[i] + inst_.delta * (ua[i] - ur[i]);

            double p1;
            bool feasible = true;
            if (all_reject) {
                double top = -kInf;
                for (std::size_t i = sr.lo; i <= sr.hi; ++i)
                    if (g.weights[i] > 0.0) top = std::max(top, c[i]);
                p1 = top + 1.0;
            } else {
                p1 = kInf;
                for (std::size_t i = k; i < n; ++i)
                    if (g.weights[i] > 0.0) p1 = std::min(p1, c[i]);
                for (std::size_t i = 0; i < k && feasible; ++i) {
                    if (g.weights[i] <= 0.0) continue;
                    feasible = c[i] < p1 - detail::accept_eps(std::abs(g.points[i]) +
                                                              std::abs(p1));
                }
            }
            if (!feasible) continue;
            const double value =
                p1 * w_acc + inst_.delta * (w_acc * ca.seller + w_rej * cr.seller);
            if (!best.valid || value > best.value || (value == best.value && k < best.k))
                best = {value, k, p1, true, all_reject};
        }
        if (!best.valid) fail("no-fixed-point", "no feasible threshold at an interior node");

        // Re-solve the chosen children, with record emission when requested.
        double wa = 0.0;
        std::fill(pa.begin(), pa.end(), 0.0);
        std::fill(pr.begin(), pr.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (i >= best.k) {
                wa += g.weights[i];
                for (std::size_t j = 0; j < m; ++j) pa[j] += g.weights[i] * step.rows[i][j];
            } else {
                for (std::size_t j = 0; j < m; ++j) pr[j] += g.weights[i] * step.rows[i][j];
            }
        }
        const bool all_accept = wa >= total;
        const double wr = std::max(total - wa, 0.0);
        auto [ga, gr] = branch_grids(best.all_reject, all_accept, wa, wr);

        NodeSol s;
        s.price = best.p1;
        s.k_idx = best.k;
        s.threshold = best.k < n ? g.points[best.k] : g.points.back() + 1.0;
        s.seller = best.value;
        s.all_accept = best.k <= sr.lo;
        s.all_reject = best.all_reject;
        s.buyer.resize(n);

        std::vector<HistoryRecord> rec_a, rec_r;
        const NodeSol ca = solve(ga, t + 1, hist + "A", rec ? &rec_a : nullptr);
        const NodeSol cr = solve(gr, t + 1, hist + "R", rec ? &rec_r : nullptr);
        fold(ca, ua);
        fold(cr, ur);
        for (std::size_t i = 0; i < n; ++i) {
            const double acc = (g.points[i] - best.p1) + inst_.delta * ua[i];
            const double rej = inst_.delta * ur[i];
            s.buyer[i] = i >= best.k ? acc : rej;
        }
        if (rec) {
            HistoryRecord h;
            h.history = hist;
            h.price = best.p1;
            h.threshold = s.threshold;
            h.all_accept = s.all_accept;
            h.all_reject = s.all_reject;
            h.u_accept.resize(n);
            h.u_reject.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                h.u_accept[i] = (g.points[i] - best.p1) + inst_.delta * ua[i];
                h.u_reject[i] = inst_.delta * ur[i];
            }
            rec->push_back(std::move(h));
            for (auto& r : rec_a) rec->push_back(std::move(r));
            for (auto& r : rec_r) rec->push_back(std::move(r));
        }
        return s;
    }

    const Instance& inst_;
    std::vector<detail::RowTables> tables_;
};

EquilibriumOutcome solve_spot(const Instance& inst) {
    const CommitPath bench = commit_path(inst, inst.prior, 1);

    if (inst.horizon == 2) {
        // The two-period spot game is exactly the threshold-equilibrium
        // solve on the single transition.
        EquilibriumOutcome out =
            solve_pbe_star(make_two_period(inst.prior, inst.steps[0], inst.delta));
        out.commit_prices = bench.prices;
        out.commit_gap = out.revenue - bench.value;
        const MarkovKernel& step = inst.steps[0];
        const std::size_t n = inst.prior.size();
        HistoryRecord root;
        root.history = "";
        root.price = out.p1;
        root.threshold = out.k;
        root.all_accept = out.k <= inst.prior.min();
        root.all_reject = out.k > inst.prior.max();
        root.u_accept.resize(n);
        root.u_reject.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            root.u_accept[i] = (inst.prior.points[i] - out.p1) +
                               inst.delta * step.row_partial_expectation(i, out.p_A);
            root.u_reject[i] = inst.delta * step.row_partial_expectation(i, out.p_R);
        }
        out.histories.push_back(std::move(root));
        for (bool branch : {true, false}) {
            const double p = branch ? out.p_A : out.p_R;
            HistoryRecord h;
            h.history = branch ? "A" : "R";
            h.price = p;
            h.threshold = p;
            h.all_accept = p <= step.to_grid.min();
            h.u_accept.resize(step.to_grid.size());
            h.u_reject.assign(step.to_grid.size(), 0.0);
            for (std::size_t j = 0; j < step.to_grid.size(); ++j)
                h.u_accept[j] = step.to_grid.points[j] - p;
            out.histories.push_back(std::move(h));
        }
        return out;
    }

    SpotSolver solver(inst);
    std::vector<HistoryRecord> records;
    const NodeSol root = solver.solve(inst.prior, 1, "", &records);

    EquilibriumOutcome out;
    out.p1 = root.price;
    out.k = root.threshold;
    out.revenue = root.seller;
    out.buyer_value = root.buyer;
    out.committed = false;
    out.commit_prices = bench.prices;
    out.commit_gap = root.seller - bench.value;
    out.histories = std::move(records);
    for (const auto& h : out.histories) {
        if (h.history == "A") out.p_A = h.price;
        if (h.history == "R") out.p_R = h.price;
    }
    root_beliefs(inst, root.k_idx, out);
    for (const auto& ha : out.histories)
        for (const auto& hr : out.histories)
            if (ha.history.size() == hr.history.size() && !ha.history.empty() &&
                ha.history.front() == 'A' && hr.history.front() == 'R' &&
                ha.history.substr(1) == hr.history.substr(1) &&
                ha.price < hr.price - detail::accept_eps(std::abs(ha.price) + std::abs(hr.price)))
                out.warnings.push_back("acceptance-branch price below rejection branch at '" +
                                       ha.history + "'");
    return out;
}

} // namespace

EquilibriumOutcome solve_multi_period(const Instance& inst, bool commit, int threads) {
    (void)threads; // the scans are cheap enough to stay serial and exact
    if (inst.model != ModelKind::MultiPeriod)
        fail("validation-error", "multi-period solve needs a multi-period scenario");
    if (inst.horizon < 2) fail("validation-error", "horizon must be at least 2");
    if (inst.horizon > 6) fail("horizon-limit", "horizons beyond 6 periods are not supported");
    if (!commit && inst.horizon > 4)
        fail("horizon-limit", "the sequential-repricing recursion is capped at 4 periods");
    std::vector<std::string> warnings;
    gate_assumptions(inst, warnings);
    EquilibriumOutcome out = commit ? solve_with_commitment(inst) : solve_spot(inst);
    out.warnings.insert(out.warnings.end(), warnings.begin(), warnings.end());
    return out;
}

} // namespace ratchet

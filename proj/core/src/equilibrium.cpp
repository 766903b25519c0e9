#include "ratchet/equilibrium.hpp"

#include "ratchet/assumptions.hpp"
#include "ratchet/error.hpp"
#include "ratchet/pricing.hpp"
#include "internal_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ratchet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TypeGrid posterior_grid(const TypeGrid& to, const std::vector<double>& w, double mass) {
    TypeGrid g;
    g.points = to.points;
    g.kind = to.kind;
    g.weights.resize(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) g.weights[j] = mass > 0.0 ? w[j] / mass : w[j];
    return g;
}

// Branch posteriors over the to-grid at threshold index k (0..n; n = all
// reject). Boundary branches carry the degenerate belief row.
struct Branches {
    std::vector<double> acc, rej; // unnormalized mixture weights
    double w_acc = 0.0, w_rej = 0.0;
    bool acc_degenerate = false, rej_degenerate = false;
};

Branches branches_at(const Instance& inst, std::size_t k) {
    const MarkovKernel& ka = inst.accept_kernel();
    const MarkovKernel& kr = inst.reject_kernel();
    const std::size_t n = inst.prior.size();
    const std::size_t m = ka.to_grid.size();
    Branches b;
    b.acc.assign(m, 0.0);
    b.rej.assign(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = inst.prior.weights[i];
        if (i >= k) {
            b.w_acc += w;
            for (std::size_t j = 0; j < m; ++j) b.acc[j] += w * ka.rows[i][j];
        } else {
            b.w_rej += w;
            for (std::size_t j = 0; j < m; ++j) b.rej[j] += w * kr.rows[i][j];
        }
    }
    if (k >= n) {
        b.acc = ka.rows[n - 1];
        b.acc_degenerate = true;
    }
    if (k == 0) {
        b.rej = kr.rows[0];
        b.rej_degenerate = true;
    }
    return b;
}

void append_check_warnings(const Instance& inst, std::vector<std::string>& warnings) {
    bool have_regularity = false;
    for (const auto& rep : check_instance(inst)) {
        if (rep.name == "A3-Regularity" || rep.name == "A3'-Regularityx") have_regularity = true;
        if (!rep.holds)
            warnings.push_back(rep.name + " failed (margin " + std::to_string(rep.margin) + ")");
    }
    if (!have_regularity && inst.model != ModelKind::Discrete &&
        inst.model != ModelKind::MultiPeriod)
        warnings.push_back("A3-Regularity skipped (discrete-kind prior)");
}

void require_two_period(const Instance& inst, const char* what) {
    if (inst.model == ModelKind::Discrete)
        fail("validation-error", std::string(what) + " needs a continuous scenario");
    if (inst.model == ModelKind::MultiPeriod && inst.horizon != 2)
        fail("validation-error", std::string(what) + " covers two-period scenarios");
}

} // namespace

std::vector<ContinuationPoint> continuation_fixed_points(double p1, const Instance& inst) {
    require_two_period(inst, "continuation scan");
    const MarkovKernel& ka = inst.accept_kernel();
    const MarkovKernel& kr = inst.reject_kernel();
    const std::size_t n = inst.prior.size();
    const auto ta = detail::build_row_tables(ka);
    const auto tr = detail::build_row_tables(kr);

    std::vector<ContinuationPoint> out;
    for (std::size_t k = 0; k <= n; ++k) {
        const Branches b = branches_at(inst, k);
        const auto scan_a = detail::monopoly_scan(ka.to_grid, b.acc);
        const auto scan_r = detail::monopoly_scan(kr.to_grid, b.rej);
        for (std::size_t a : scan_a.ties)
            for (std::size_t r : scan_r.ties) {
                // Buyer's threshold at (p1, p_A, p_R) must reproduce k exactly.
                bool consistent = true;
                for (std::size_t i = 0; i < n && consistent; ++i) {
                    const double c =
                        inst.prior.points[i] - inst.delta * (tr.pe[i][r] - ta.pe[i][a]);
                    const bool accepts =
                        c >= p1 - detail::accept_eps(std::abs(inst.prior.points[i]) +
                                                     std::abs(p1));
                    consistent = accepts == (i >= k);
                }
                if (!consistent) continue;
                ContinuationPoint pt;
                pt.k = k < n ? inst.prior.points[k] : inst.prior.max() + 1.0;
                pt.p_A = ka.to_grid.points[a];
                pt.p_R = kr.to_grid.points[r];
                pt.pi_A = b.acc_degenerate ? scan_a.revenue : scan_a.revenue / b.w_acc;
                pt.pi_R = b.rej_degenerate ? scan_r.revenue : scan_r.revenue / b.w_rej;
                pt.all_accept = k == 0;
                pt.all_reject = k >= n;
                out.push_back(pt);
            }
    }
    return out;
}

EquilibriumOutcome solve_pbe_star(const Instance& inst, int threads) {
    (void)threads; // the k-scan is linear after the incremental tables
    require_two_period(inst, "threshold equilibrium solve");
    const MarkovKernel& ka = inst.accept_kernel();
    const MarkovKernel& kr = inst.reject_kernel();
    const std::size_t n = inst.prior.size();
    const std::size_t m = ka.to_grid.size();
    const auto ta = detail::build_row_tables(ka);
    const auto tr = detail::build_row_tables(kr);

    struct Cand {
        double G = -kInf;
        std::size_t k = 0, a = 0, r = 0;
        double p1 = 0.0, piA = 0.0, piR = 0.0;
        bool valid = false;
    };
    Cand best;

    // Acceptance set {i >= k} grows as k walks down from the all-reject
    // sentinel; positions track the unnormalized branch posteriors.
    std::vector<double> acc(m, 0.0), rej(m, 0.0);
    double w_acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) rej[j] += inst.prior.weights[i] * kr.rows[i][j];

    for (std::size_t k = n + 1; k-- > 0;) {
        if (k < n) {
            const double w = inst.prior.weights[k];
            w_acc += w;
            for (std::size_t j = 0; j < m; ++j) {
                acc[j] += w * ka.rows[k][j];
                rej[j] -= w * kr.rows[k][j];
            }
        }
        const bool acc_deg = k >= n;
        const bool rej_deg = k == 0;
        const auto scan_a = detail::monopoly_scan(ka.to_grid, acc_deg ? ka.rows[n - 1] : acc);
        const auto scan_r = detail::monopoly_scan(kr.to_grid, rej_deg ? kr.rows[0] : rej);
        const double W = k < n ? w_acc : 0.0;

        for (std::size_t a : scan_a.ties)
            for (std::size_t r : scan_r.ties) {
                double p1;
                if (k < n) {
                    // Highest price the marginal type accepts; every type
                    // below k must strictly prefer rejection at it.
                    p1 = kInf;
                    for (std::size_t i = k; i < n; ++i)
                        p1 = std::min(p1, inst.prior.points[i] -
                                              inst.delta * (tr.pe[i][r] - ta.pe[i][a]));
                    bool feasible = true;
                    for (std::size_t i = 0; i < k && feasible; ++i) {
                        const double c = inst.prior.points[i] -
                                         inst.delta * (tr.pe[i][r] - ta.pe[i][a]);
                        feasible = c < p1 - detail::accept_eps(
                                                std::abs(inst.prior.points[i]) + std::abs(p1));
                    }
                    if (!feasible) continue;
                } else {
                    double top = -kInf;
                    for (std::size_t i = 0; i < n; ++i)
                        top = std::max(top, inst.prior.points[i] -
                                                inst.delta * (tr.pe[i][r] - ta.pe[i][a]));
                    p1 = top + 1.0;
                }
                const double piA = acc_deg ? scan_a.revenue : scan_a.revenue / W;
                const double piR =
                    rej_deg ? scan_r.revenue : scan_r.revenue / (1.0 - W > 0.0 ? 1.0 - W : 1.0);
                const double G = (p1 + inst.delta * piA) * W + inst.delta * piR * (1.0 - W);
                const bool better =
                    !best.valid || G > best.G ||
                    (G == best.G && (k < best.k || (k == best.k && (a < best.a ||
                                                                    (a == best.a && r < best.r)))));
                if (better) best = {G, k, a, r, p1, piA, piR, true};
            }
    }
    if (!best.valid)
        fail("no-fixed-point", "no belief-consistent threshold found on the price grid");

    EquilibriumOutcome out;
    out.p1 = best.p1;
    out.k = best.k < n ? inst.prior.points[best.k] : inst.prior.max() + 1.0;
    out.p_A = ka.to_grid.points[best.a];
    out.p_R = kr.to_grid.points[best.r];
    out.revenue = best.G;
    out.buyer_value.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ua = (inst.prior.points[i] - best.p1) + inst.delta * ta.pe[i][best.a];
        const double ur = inst.delta * tr.pe[i][best.r];
        out.buyer_value[i] = i >= best.k ? ua : ur;
    }
    const Branches b = branches_at(inst, best.k);
    BeliefDesc ba;
    ba.history = "A";
    ba.on_path = best.k < n;
    ba.degenerate = b.acc_degenerate;
    ba.at = inst.prior.points[n - 1];
    ba.posterior = posterior_grid(ka.to_grid, b.acc, b.w_acc);
    BeliefDesc br;
    br.history = "R";
    br.on_path = best.k > 0;
    br.degenerate = b.rej_degenerate;
    br.at = inst.prior.points[0];
    br.posterior = posterior_grid(kr.to_grid, b.rej, b.w_rej);
    out.beliefs = {std::move(ba), std::move(br)};
    append_check_warnings(inst, out.warnings);
    return out;
}

namespace {

double revenue_at_price(const TypeGrid& g, double p) {
    return p * g.survival(p);
}

void check_branch_price(const char* label, const TypeGrid& post, double price, double tol,
                        VerificationReport& rep) {
    const auto scan = detail::monopoly_scan(post, post.weights);
    const double at = revenue_at_price(post, price);
    const double gap = scan.revenue - at;
    if (gap > tol) {
        rep.issues.push_back(std::string(label) + " price is not posterior-optimal (gap " +
                             std::to_string(gap) + ")");
        rep.max_violation = std::max(rep.max_violation, gap);
    }
}

void verify_two_period(const EquilibriumOutcome& cand, const Instance& inst,
                       VerificationReport& rep) {
    const MarkovKernel& ka = inst.accept_kernel();
    const MarkovKernel& kr = inst.reject_kernel();
    const std::size_t n = inst.prior.size();
    const double tol = inst.revenue_tol();

    std::size_t k_idx = n;
    for (std::size_t i = 0; i < n; ++i)
        if (inst.prior.points[i] >=
            cand.k - detail::accept_eps(std::abs(inst.prior.points[i]) + std::abs(cand.k))) {
            k_idx = i;
            break;
        }

    // Buyer best responses, pointwise.
    double W = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double h = kr.row_partial_expectation(i, cand.p_R) -
                         ka.row_partial_expectation(i, cand.p_A);
        const double d = (inst.prior.points[i] - cand.p1) - inst.delta * h;
        const double eps =
            detail::accept_eps(std::abs(inst.prior.points[i]) + std::abs(cand.p1));
        const bool should_accept = i >= k_idx;
        if (should_accept) W += inst.prior.weights[i];
        if (should_accept && d < -eps) {
            rep.issues.push_back("type " + std::to_string(inst.prior.points[i]) +
                                 " accepts against strict preference");
            rep.max_violation = std::max(rep.max_violation, -d);
        } else if (!should_accept && d > eps) {
            rep.issues.push_back("type " + std::to_string(inst.prior.points[i]) +
                                 " rejects against strict preference");
            rep.max_violation = std::max(rep.max_violation, d);
        }
    }

    // Seller continuation rationality against recomputed posteriors.
    const Branches b = branches_at(inst, k_idx);
    const TypeGrid post_a = posterior_grid(ka.to_grid, b.acc, b.w_acc);
    const TypeGrid post_r = posterior_grid(kr.to_grid, b.rej, b.w_rej);
    check_branch_price("acceptance", post_a, cand.p_A, tol, rep);
    check_branch_price("rejection", post_r, cand.p_R, tol, rep);

    // Revenue arithmetic.
    const double piA = revenue_at_price(post_a, cand.p_A);
    const double piR = revenue_at_price(post_r, cand.p_R);
    const double G = (cand.p1 + inst.delta * piA) * W + inst.delta * piR * (1.0 - W);
    const double dr = std::abs(G - cand.revenue);
    if (dr > tol) {
        rep.issues.push_back("revenue mismatch (" + std::to_string(dr) + ")");
        rep.max_violation = std::max(rep.max_violation, dr);
    }
}

void verify_discrete(const EquilibriumOutcome& cand, const Instance& inst,
                     VerificationReport& rep) {
    const DiscreteGame& game = inst.game.value();
    const std::size_t n1 = game.theta1_values.size();
    const std::size_t n2 = game.theta2_values.size();
    if (cand.accept_mask.size() != n1) {
        rep.issues.push_back("acceptance rule does not cover the type set");
        rep.max_violation = kInf;
        return;
    }
    const double tol = 1e-9;

    // Buyer rationality with branch-dependent continuations.
    for (std::size_t i = 0; i < n1; ++i) {
        const double mi = game.theta1_marginal(i);
        double ca = 0.0, cr = 0.0;
        for (std::size_t j = 0; j < n2 && mi > 0.0; ++j) {
            const double w = game.pmf[i][j] / mi;
            ca += w * std::max(game.second_value(i, j, true) - cand.p_A, 0.0);
            cr += w * std::max(game.second_value(i, j, false) - cand.p_R, 0.0);
        }
        const double gain = (game.theta1_values[i] - cand.p1) + game.delta * (ca - cr);
        if (cand.accept_mask[i] && gain < -tol) {
            rep.issues.push_back("type " + std::to_string(game.theta1_values[i]) +
                                 " accepts against strict preference");
            rep.max_violation = std::max(rep.max_violation, -gain);
        }
        if (!cand.accept_mask[i] && gain > tol) {
            rep.issues.push_back("type " + std::to_string(game.theta1_values[i]) +
                                 " rejects against strict preference");
            rep.max_violation = std::max(rep.max_violation, gain);
        }
    }

    // Seller continuation rationality per branch. On-path: Bayes posterior
    // over the branch types; off-path: the boundary belief rule.
    auto branch_rev = [&](bool branch_accept, double price) {
        double rev = 0.0;
        bool any = false;
        for (std::size_t i = 0; i < n1; ++i) {
            if ((cand.accept_mask[i] != 0) != branch_accept) continue;
            any = true;
            for (std::size_t j = 0; j < n2; ++j)
                if (game.second_value(i, j, branch_accept) >=
                    price - detail::accept_eps(price))
                    rev += game.pmf[i][j] * price;
        }
        return std::make_pair(rev, any);
    };
    auto row_rev = [&](std::size_t i, bool bought, double price) {
        const double mi = game.theta1_marginal(i);
        double rev = 0.0;
        for (std::size_t j = 0; j < n2; ++j)
            if (game.second_value(i, j, bought) >= price - detail::accept_eps(price))
                rev += game.pmf[i][j] / mi * price;
        return rev;
    };
    for (bool branch : {true, false}) {
        const double price = branch ? cand.p_A : cand.p_R;
        const auto [rev, on_path] = branch_rev(branch, price);
        double best = -kInf, at = -kInf;
        if (on_path) {
            at = rev;
            for (double p : game.prices) best = std::max(best, branch_rev(branch, p).first);
        } else {
            const std::size_t i = branch ? n1 - 1 : 0; // boundary belief
            at = row_rev(i, branch, price);
            for (double p : game.prices) best = std::max(best, row_rev(i, branch, p));
        }
        if (best - at > tol) {
            rep.issues.push_back(std::string(branch ? "acceptance" : "rejection") +
                                 " price is not belief-optimal (gap " +
                                 std::to_string(best - at) + ")");
            rep.max_violation = std::max(rep.max_violation, best - at);
        }
    }
}

void verify_multi(const EquilibriumOutcome& cand, const Instance& inst,
                  VerificationReport& rep) {
    // Per-period price ordering across matched histories, plus the revenue
    // arithmetic for the committed path.
    for (const auto& ha : cand.histories)
        for (const auto& hr : cand.histories) {
            if (ha.history.size() != hr.history.size() || ha.history.empty()) continue;
            if (ha.history.back() == 'A' && hr.history.back() == 'R' &&
                ha.history.substr(0, ha.history.size() - 1) ==
                    hr.history.substr(0, hr.history.size() - 1)) {
                if (ha.price < hr.price - detail::accept_eps(ha.price)) {
                    rep.issues.push_back("acceptance-branch price below rejection branch at '" +
                                         ha.history + "'");
                    rep.max_violation =
                        std::max(rep.max_violation, hr.price - ha.price);
                }
            }
        }
    if (cand.committed) {
        TypeGrid marg = inst.prior;
        double expect = 0.0, disc = 1.0;
        for (std::size_t t = 0; t < cand.commit_prices.size(); ++t) {
            if (t > 0) {
                marg = push_forward(marg, inst.steps[t - 1]);
                disc *= inst.delta;
            }
            expect += disc * revenue_at_price(marg, cand.commit_prices[t]);
        }
        const double dr = std::abs(expect - cand.revenue);
        if (dr > inst.revenue_tol()) {
            rep.issues.push_back("committed-path revenue mismatch (" + std::to_string(dr) + ")");
            rep.max_violation = std::max(rep.max_violation, dr);
        }
    }
}

} // namespace

VerificationReport verify_equilibrium(const EquilibriumOutcome& candidate, const Instance& inst) {
    VerificationReport rep;
    switch (inst.model) {
    case ModelKind::TwoPeriod:
    case ModelKind::Complements:
        verify_two_period(candidate, inst, rep);
        break;
    case ModelKind::Discrete:
        verify_discrete(candidate, inst, rep);
        break;
    case ModelKind::MultiPeriod:
        if (inst.horizon == 2 && candidate.histories.empty())
            verify_two_period(candidate, inst, rep);
        else
            verify_multi(candidate, inst, rep);
        break;
    }
    rep.ok = rep.issues.empty();
    return rep;
}

} // namespace ratchet

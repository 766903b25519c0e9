#include "ratchet/assumptions.hpp"

#include "ratchet/error.hpp"
#include "ratchet/mechanism.hpp"
#include "internal_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ratchet {

namespace {

constexpr double kStrictSlack = 1e-10;
constexpr std::size_t kMaxWitnesses = 10;

void add_witness(AssumptionReport& rep, const std::string& w) {
    if (rep.witnesses.size() < kMaxWitnesses) rep.witnesses.push_back(w);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// First and last positive cell per row; rows from the mass-splitting builders
// have interval support, so anything between these is interior.
std::pair<std::size_t, std::size_t> support_span(const std::vector<double>& row) {
    std::size_t lo = row.size(), hi = 0;
    for (std::size_t j = 0; j < row.size(); ++j)
        if (row[j] > 0.0) {
            if (lo == row.size()) lo = j;
            hi = j;
        }
    return {lo, hi};
}

} // namespace

AssumptionReport check_mlrp(const MarkovKernel& kernel, bool strict) {
    kernel.validate();
    AssumptionReport rep;
    rep.name = "A1-MLRP";
    rep.margin = 1.0; // relative slacks live in [-1, 1]

    const std::size_t n = kernel.rows.size();
    const std::size_t m = kernel.to_grid.size();
    std::vector<std::pair<std::size_t, std::size_t>> span(n);
    for (std::size_t i = 0; i < n; ++i) span[i] = support_span(kernel.rows[i]);

    const double threshold = strict ? kStrictSlack : -kStrictSlack;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t ip = i + 1; ip < n; ++ip)
            for (std::size_t j = 0; j + 1 < m; ++j) {
                const double a = kernel.rows[ip][j + 1] * kernel.rows[i][j];
                const double b = kernel.rows[ip][j] * kernel.rows[i][j + 1];
                double slack;
                if (a == 0.0 && b == 0.0) {
                    const bool interior = j > span[i].first && j + 1 < span[i].second &&
                                          j > span[ip].first && j + 1 < span[ip].second;
                    if (!interior) continue;
                    slack = strict ? 0.0 : -1.0;
                } else {
                    slack = (a - b) / std::max(a, b);
                }
                rep.margin = std::min(rep.margin, slack);
                if (slack < threshold)
                    add_witness(rep, "rows (" + fmt(kernel.from_grid.points[i]) + ", " +
                                         fmt(kernel.from_grid.points[ip]) + ") cols (" +
                                         fmt(kernel.to_grid.points[j]) + ", " +
                                         fmt(kernel.to_grid.points[j + 1]) +
                                         "): cross products " + fmt(a) + " < " + fmt(b));
            }
    rep.holds = rep.witnesses.empty();
    return rep;
}

AssumptionReport check_lipschitz(const MarkovKernel& kernel, double delta) {
    kernel.validate();
    if (!(delta > 0.0 && delta <= 1.0)) fail("validation-error", "delta out of (0, 1]");
    AssumptionReport rep;
    rep.name = "A2-Lipschitz";
    rep.margin = std::numeric_limits<double>::infinity();

    const std::size_t n = kernel.rows.size();
    std::vector<double> g(n); // slack(i, i') = g(i') - g(i), minimized over i < i'
    for (std::size_t i = 0; i < n; ++i)
        g[i] = kernel.from_grid.points[i] / delta - kernel.row_mean(i);

    double run_max = -std::numeric_limits<double>::infinity();
    std::size_t run_arg = 0;
    for (std::size_t ip = 0; ip < n; ++ip) {
        if (ip > 0) {
            const double slack = g[ip] - run_max;
            rep.margin = std::min(rep.margin, slack);
            const double scale = (kernel.from_grid.points[ip] - kernel.from_grid.points[run_arg]) / delta;
            if (slack < kStrictSlack * (1.0 + std::abs(scale)))
                add_witness(rep, "from-pair (" + fmt(kernel.from_grid.points[run_arg]) + ", " +
                                     fmt(kernel.from_grid.points[ip]) +
                                     "): mean change exceeds bound, slack " + fmt(slack));
        }
        if (g[ip] > run_max) {
            run_max = g[ip];
            run_arg = ip;
        }
    }
    rep.holds = rep.witnesses.empty();
    return rep;
}

AssumptionReport check_regularity(const TypeGrid& prior, const MarkovKernel& kernel) {
    if (prior.kind == GridKind::Discrete)
        fail("discrete-prior-unsupported", "regularity needs a density-kind prior (hazard rate)");
    AssumptionReport rep;
    rep.name = "A3-Regularity";
    rep.margin = std::numeric_limits<double>::infinity();

    const VirtualValueTable table = virtual_values(prior, kernel);
    const auto& psi = table.psi0;
    const std::size_t n = psi.size();
    const std::size_t m = n ? psi[0].size() : 0;

    auto relative = [](double lo, double hi) { return (hi - lo) / (1.0 + std::abs(lo)); };

    // Along theta2 within each row, comparing consecutive live cells.
    for (std::size_t i = 0; i < n; ++i) {
        double prev = std::numeric_limits<double>::quiet_NaN();
        std::size_t prev_j = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const double v = psi[i][j];
            if (std::isnan(v)) continue;
            if (!std::isnan(prev)) {
                const double slack = relative(prev, v);
                rep.margin = std::min(rep.margin, slack);
                if (slack < -kStrictSlack)
                    add_witness(rep, "psi decreasing in theta2 at theta1=" +
                                         fmt(kernel.from_grid.points[i]) + " between theta2=" +
                                         fmt(kernel.to_grid.points[prev_j]) + " and " +
                                         fmt(kernel.to_grid.points[j]));
            }
            prev = v;
            prev_j = j;
        }
    }
    // Along theta1 within each column.
    for (std::size_t j = 0; j < m; ++j) {
        double prev = std::numeric_limits<double>::quiet_NaN();
        std::size_t prev_i = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = psi[i][j];
            if (std::isnan(v)) continue;
            if (!std::isnan(prev)) {
                const double slack = relative(prev, v);
                rep.margin = std::min(rep.margin, slack);
                if (slack < -kStrictSlack)
                    add_witness(rep, "psi decreasing in theta1 at theta2=" +
                                         fmt(kernel.to_grid.points[j]) + " between theta1=" +
                                         fmt(kernel.from_grid.points[prev_i]) + " and " +
                                         fmt(kernel.from_grid.points[i]));
            }
            prev = v;
            prev_i = i;
        }
    }
    rep.holds = rep.witnesses.empty();
    return rep;
}

AssumptionReport check_complement(const MarkovKernel& kernel0, const MarkovKernel& kernel1) {
    kernel0.validate();
    kernel1.validate();
    if (kernel0.from_grid.size() != kernel1.from_grid.size() ||
        kernel0.to_grid.size() != kernel1.to_grid.size())
        fail("grid-mismatch", "complement check needs kernels on shared grids");
    for (std::size_t j = 0; j < kernel0.to_grid.size(); ++j)
        if (std::abs(kernel0.to_grid.points[j] - kernel1.to_grid.points[j]) >
            detail::accept_eps(kernel0.to_grid.points[j]))
            fail("grid-mismatch", "complement check needs kernels on shared grids");

    AssumptionReport rep;
    rep.name = "A5-Complement";
    rep.margin = 1.0;

    const std::size_t n = kernel0.rows.size();
    const std::size_t m = kernel0.to_grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto s0 = support_span(kernel0.rows[i]);
        const auto s1 = support_span(kernel1.rows[i]);
        for (std::size_t j = 0; j + 1 < m; ++j) {
            const double a = kernel1.rows[i][j + 1] * kernel0.rows[i][j];
            const double b = kernel1.rows[i][j] * kernel0.rows[i][j + 1];
            double slack;
            if (a == 0.0 && b == 0.0) {
                const bool interior = j > s0.first && j + 1 < s0.second && j > s1.first &&
                                      j + 1 < s1.second;
                if (!interior) continue;
                slack = -1.0;
            } else {
                slack = (a - b) / std::max(a, b);
            }
            rep.margin = std::min(rep.margin, slack);
            if (slack < -kStrictSlack)
                add_witness(rep, "row theta1=" + fmt(kernel0.from_grid.points[i]) + " cols (" +
                                     fmt(kernel0.to_grid.points[j]) + ", " +
                                     fmt(kernel0.to_grid.points[j + 1]) +
                                     "): branch ratio decreasing");
        }
    }
    rep.holds = rep.witnesses.empty();
    return rep;
}

AssumptionReport check_log_concave(const TypeGrid& grid) {
    grid.validate();
    if (grid.kind == GridKind::Discrete)
        fail("discrete-kind-unsupported", "log-concavity check needs a density-kind grid");
    AssumptionReport rep;
    rep.name = "A4-LogConcaveAR1";
    rep.margin = 1.0;

    for (std::size_t i = 0; i + 2 < grid.size(); ++i) {
        const double mid = grid.weights[i + 1];
        const double lhs = mid * mid;
        const double rhs = grid.weights[i] * grid.weights[i + 2];
        double slack;
        if (lhs == 0.0 && rhs == 0.0) {
            // Zero mass flanked by zero products: outside the support, skip.
            continue;
        }
        slack = (lhs - rhs) / std::max(lhs, rhs);
        rep.margin = std::min(rep.margin, slack);
        if (slack < -kStrictSlack)
            add_witness(rep, "cells around " + fmt(grid.points[i + 1]) +
                                 ": m^2 = " + fmt(lhs) + " < " + fmt(rhs));
    }
    rep.holds = rep.witnesses.empty();
    return rep;
}

namespace {

AssumptionReport merged(std::string name, std::vector<AssumptionReport> parts) {
    AssumptionReport rep;
    rep.name = std::move(name);
    rep.holds = true;
    rep.margin = std::numeric_limits<double>::infinity();
    for (auto& p : parts) {
        rep.holds = rep.holds && p.holds;
        rep.margin = std::min(rep.margin, p.margin);
        for (auto& w : p.witnesses) add_witness(rep, w);
    }
    if (!rep.holds && rep.witnesses.empty()) add_witness(rep, "component check failed");
    return rep;
}

MarkovKernel implied_kernel(const DiscreteGame& game) {
    std::vector<double> t1, w1;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < game.theta1_values.size(); ++i) {
        const double mi = game.theta1_marginal(i);
        if (mi <= 0.0) continue;
        t1.push_back(game.theta1_values[i]);
        w1.push_back(mi);
        std::vector<double> row = game.pmf[i];
        for (double& v : row) v /= mi;
        rows.push_back(std::move(row));
    }
    TypeGrid from = make_discrete(t1, w1);
    return kernel_from_table(from, game.theta2_values, std::move(rows), GridKind::Discrete);
}

} // namespace

std::vector<AssumptionReport> check_instance(const Instance& inst) {
    std::vector<AssumptionReport> out;
    switch (inst.model) {
    case ModelKind::TwoPeriod: {
        out.push_back(check_mlrp(inst.kernel0, false));
        out.push_back(check_lipschitz(inst.kernel0, inst.delta));
        if (inst.prior.kind != GridKind::Discrete)
            out.push_back(check_regularity(inst.prior, inst.kernel0));
        break;
    }
    case ModelKind::Complements: {
        auto m0 = check_mlrp(inst.kernel0, false);
        auto m1 = check_mlrp(inst.kernel1, false);
        out.push_back(merged("A1'-MLRPx", {m0, m1}));
        auto l0 = check_lipschitz(inst.kernel0, inst.delta);
        auto l1 = check_lipschitz(inst.kernel1, inst.delta);
        out.push_back(merged("A2'-Lipschitzx", {l0, l1}));
        if (inst.prior.kind != GridKind::Discrete) {
            auto r0 = check_regularity(inst.prior, inst.kernel0);
            auto r1 = check_regularity(inst.prior, inst.kernel1);
            out.push_back(merged("A3'-Regularityx", {r0, r1}));
        }
        out.push_back(check_complement(inst.kernel0, inst.kernel1));
        break;
    }
    case ModelKind::MultiPeriod: {
        std::vector<AssumptionReport> mlrps, lips, lcs;
        for (const auto& step : inst.steps) {
            mlrps.push_back(check_mlrp(step, false));
            lips.push_back(check_lipschitz(step, inst.delta));
        }
        out.push_back(merged("A1-MLRP", std::move(mlrps)));
        out.push_back(merged("A2-Lipschitz", std::move(lips)));
        if (inst.prior.kind != GridKind::Discrete) lcs.push_back(check_log_concave(inst.prior));
        for (const auto& g : inst.noise_grids)
            if (g.kind != GridKind::Discrete && g.size() > 1) lcs.push_back(check_log_concave(g));
        AssumptionReport alpha;
        alpha.name = "A4-LogConcaveAR1";
        alpha.holds = true;
        alpha.margin = std::numeric_limits<double>::infinity();
        const double bound = 1.0 / (2.0 * inst.delta);
        for (std::size_t t = 0; t < inst.alphas.size(); ++t) {
            const double a = inst.alphas[t];
            const double slack = std::min(a, bound - a) / bound;
            alpha.margin = std::min(alpha.margin, slack);
            if (slack < kStrictSlack) {
                alpha.holds = false;
                add_witness(alpha, "step " + fmt(static_cast<double>(t + 2)) + ": alpha " +
                                       fmt(a) + " outside (0, " + fmt(bound) + ")");
            }
        }
        lcs.push_back(std::move(alpha));
        out.push_back(merged("A4-LogConcaveAR1", std::move(lcs)));
        break;
    }
    case ModelKind::Discrete: {
        const MarkovKernel k = implied_kernel(inst.game.value());
        out.push_back(check_mlrp(k, false));
        if (inst.delta > 0.0) out.push_back(check_lipschitz(k, inst.delta));
        break;
    }
    }
    return out;
}

} // namespace ratchet

#pragma once

// Shared grid arithmetic for the solvers. Not installed; conventions here are
// part of the numeric contract (the brute-force oracle replicates them).

#include "ratchet/dist.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace ratchet::detail {

// Tie band for buyer indifference and revenue comparisons.
inline double accept_eps(double scale) { return 1e-9 * (1.0 + std::abs(scale)); }
inline double rev_eps(double scale) { return 1e-12 * (1.0 + std::abs(scale)); }

// Survival of the (possibly unnormalized) weight vector w over the support
// grid, evaluated exactly at support point a.
inline double survival_at(const TypeGrid& support, const std::vector<double>& w, std::size_t a) {
    double s = w[a] * support.point_tail_fraction(a);
    for (std::size_t j = a + 1; j < w.size(); ++j) s += w[j];
    return s;
}

struct MonopolyScan {
    double revenue = 0.0;      // on the same scale as w
    std::size_t best_idx = 0;  // lowest-price argmax
    std::vector<std::size_t> ties;
    bool unique = true;
};

// Scan all support points as price candidates. w need not be normalized;
// the argmax set is scale-invariant.
inline MonopolyScan monopoly_scan(const TypeGrid& support, const std::vector<double>& w) {
    const std::size_t n = support.size();
    MonopolyScan out;
    double tail = 0.0;
    std::vector<double> rev(n);
    for (std::size_t j = n; j-- > 0;) {
        rev[j] = support.points[j] * (tail + w[j] * support.point_tail_fraction(j));
        tail += w[j];
    }
    out.best_idx = 0;
    out.revenue = rev[0];
    for (std::size_t j = 1; j < n; ++j)
        if (rev[j] > out.revenue) {
            out.revenue = rev[j];
            out.best_idx = j;
        }
    const double eps = rev_eps(out.revenue);
    for (std::size_t j = 0; j < n; ++j)
        if (rev[j] >= out.revenue - eps) out.ties.push_back(j);
    out.best_idx = out.ties.front();
    out.revenue = rev[out.best_idx];
    out.unique = out.ties.size() == 1;
    return out;
}

// Per-row tables over (from-point, to-point): partial expectations
// PE[i][a] = E[(theta' - y_a)+ | i] and survivals S[i][a], both evaluated at
// to-grid support points under the to-grid convention.
struct RowTables {
    std::vector<std::vector<double>> pe;
    std::vector<std::vector<double>> surv;
};

inline RowTables build_row_tables(const MarkovKernel& k) {
    const std::size_t nf = k.rows.size();
    const std::size_t nt = k.to_grid.size();
    RowTables t;
    t.pe.assign(nf, std::vector<double>(nt, 0.0));
    t.surv.assign(nf, std::vector<double>(nt, 0.0));
    for (std::size_t i = 0; i < nf; ++i) {
        double mass = 0.0, value = 0.0;
        for (std::size_t a = nt; a-- > 0;) {
            const double wa = k.rows[i][a];
            const double y = k.to_grid.points[a];
            t.pe[i][a] = value - y * mass; // own point contributes (y-y)+ = 0
            t.surv[i][a] = mass + wa * k.to_grid.point_tail_fraction(a);
            mass += wa;
            value += wa * y;
        }
    }
    return t;
}

} // namespace ratchet::detail

#include "ratchet/dist.hpp"

#include "ratchet/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ratchet {

namespace {

constexpr double kTieEps = 1e-12;

double tie_scale(double x) { return 1.0 + std::abs(x); }

void renormalize(std::vector<double>& w) {
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (total <= 0.0) fail("invalid-grid", "weights sum to zero");
    for (double& v : w) v /= total;
}

} // namespace

double TypeGrid::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) m += weights[i] * points[i];
    return m;
}

std::size_t TypeGrid::lower_geq(double cut) const {
    // first index with x_i >= cut - eps
    const double eps = kTieEps * tie_scale(cut);
    auto it = std::lower_bound(points.begin(), points.end(), cut - eps);
    return static_cast<std::size_t>(it - points.begin());
}

double TypeGrid::mass_geq(double x) const {
    double m = 0.0;
    for (std::size_t i = lower_geq(x); i < weights.size(); ++i) m += weights[i];
    return m;
}

double TypeGrid::mass_lt(double x) const {
    double m = 0.0;
    const std::size_t k = lower_geq(x);
    for (std::size_t i = 0; i < k; ++i) m += weights[i];
    return m;
}

double TypeGrid::cell_width(std::size_t i) const {
    const std::size_t n = points.size();
    if (n == 1) return 1.0;
    const double lo = (i == 0) ? points[0] : 0.5 * (points[i - 1] + points[i]);
    const double hi = (i + 1 == n) ? points[n - 1] : 0.5 * (points[i] + points[i + 1]);
    const double w = hi - lo;
    return (w > 0.0) ? w : 1.0;
}

double TypeGrid::point_tail_fraction(std::size_t i) const {
    const std::size_t n = points.size();
    if (kind == GridKind::Discrete || n == 1) return 1.0;
    if (i == 0) return 1.0;
    if (i + 1 == n) return 0.0;
    const double lo = 0.5 * (points[i - 1] + points[i]);
    const double hi = 0.5 * (points[i] + points[i + 1]);
    return (hi - points[i]) / (hi - lo);
}

double TypeGrid::survival(double p) const {
    const std::size_t n = points.size();
    if (n == 0) return 0.0;
    if (kind == GridKind::Discrete || n == 1) return mass_geq(p);
    if (p <= points.front()) return 1.0;
    if (p >= points.back()) return 0.0;
    // Piecewise-linear within each trapezoid cell.
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = (i == 0) ? points[0] : 0.5 * (points[i - 1] + points[i]);
        const double hi = (i + 1 == n) ? points[n - 1] : 0.5 * (points[i] + points[i + 1]);
        if (p <= lo) {
            s += weights[i];
        } else if (p < hi) {
            s += weights[i] * (hi - p) / (hi - lo);
        }
    }
    return s;
}

void TypeGrid::validate(double mass_tol) const {
    if (points.empty()) fail("invalid-grid", "empty grid");
    if (points.size() != weights.size()) fail("invalid-grid", "points/weights size mismatch");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i] > points[i - 1])) fail("invalid-grid", "points not strictly ascending");
    double total = 0.0;
    for (double w : weights) {
        if (w < -mass_tol) fail("invalid-grid", "negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > mass_tol) fail("invalid-grid", "weights do not sum to 1");
}

TypeGrid make_uniform(double lo, double hi, std::size_t n) {
    if (!(lo < hi)) fail("invalid-bounds", "uniform grid needs lo < hi");
    if (n < 2) fail("invalid-bounds", "uniform grid needs at least 2 points");
    TypeGrid g;
    g.kind = GridKind::Density;
    g.points.resize(n);
    g.weights.assign(n, 1.0 / static_cast<double>(n - 1));
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g.points[i] = lo + h * static_cast<double>(i);
    g.points.back() = hi;
    g.weights.front() *= 0.5;
    g.weights.back() *= 0.5;
    renormalize(g.weights);
    return g;
}

TypeGrid make_discrete(std::vector<double> points, std::vector<double> weights) {
    TypeGrid g;
    g.kind = GridKind::Discrete;
    g.points = std::move(points);
    g.weights = std::move(weights);
    if (g.points.empty() || g.points.size() != g.weights.size())
        fail("invalid-grid", "discrete grid needs matching nonempty points/weights");
    renormalize(g.weights);
    g.validate();
    return g;
}

TypeGrid make_trunc_gaussian(double mu, double sigma, std::size_t n) {
    if (!(sigma > 0.0)) fail("invalid-bounds", "trunc_gaussian needs sigma > 0");
    if (n < 2) fail("invalid-bounds", "trunc_gaussian needs at least 2 points");
    const double lo = mu - 5.0 * sigma;
    const double hi = mu + 5.0 * sigma;
    TypeGrid g;
    g.kind = GridKind::Density;
    g.points.resize(n);
    g.weights.resize(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = lo + h * static_cast<double>(i);
        g.points[i] = x;
        const double z = (x - mu) / sigma;
        double w = std::exp(-0.5 * z * z);
        if (i == 0 || i + 1 == n) w *= 0.5;
        g.weights[i] = w;
    }
    g.points.back() = hi;
    renormalize(g.weights);
    return g;
}

TypeGrid truncate(const TypeGrid& g, double k, TruncSide side, double tol) {
    TypeGrid out;
    out.kind = g.kind;
    const std::size_t split = g.lower_geq(k);
    const std::size_t lo = (side == TruncSide::Geq) ? split : 0;
    const std::size_t hi = (side == TruncSide::Geq) ? g.size() : split;
    double total = 0.0;
    for (std::size_t i = lo; i < hi; ++i) total += g.weights[i];
    if (total < tol) fail("empty-truncation", "truncation retains no mass");
    for (std::size_t i = lo; i < hi; ++i) {
        out.points.push_back(g.points[i]);
        out.weights.push_back(g.weights[i] / total);
    }
    return out;
}

TypeGrid MarkovKernel::row_dist(std::size_t i) const {
    TypeGrid g;
    g.kind = to_grid.kind;
    g.points = to_grid.points;
    g.weights = rows[i];
    return g;
}

double MarkovKernel::row_mean(std::size_t i) const {
    double m = 0.0;
    for (std::size_t j = 0; j < to_grid.points.size(); ++j) m += rows[i][j] * to_grid.points[j];
    return m;
}

double MarkovKernel::row_partial_expectation(std::size_t i, double p) const {
    double m = 0.0;
    for (std::size_t j = to_grid.lower_geq(p); j < to_grid.points.size(); ++j) {
        const double d = to_grid.points[j] - p;
        if (d > 0.0) m += rows[i][j] * d;
    }
    return m;
}

void MarkovKernel::validate(double mass_tol) const {
    from_grid.validate(mass_tol);
    to_grid.validate(mass_tol);
    if (rows.size() != from_grid.size()) fail("grid-mismatch", "kernel row count != from-grid size");
    for (const auto& row : rows) {
        if (row.size() != to_grid.size()) fail("grid-mismatch", "kernel row width != to-grid size");
        double total = 0.0;
        for (double v : row) {
            if (v < -mass_tol) fail("invalid-grid", "negative kernel mass");
            total += v;
        }
        if (std::abs(total - 1.0) > mass_tol) fail("invalid-grid", "kernel row mass != 1");
    }
}

namespace {

// Deposit mass at position y onto the grid, splitting linearly between the
// bracketing points (exactly mean-preserving for interior y).
void deposit(std::vector<double>& row, const std::vector<double>& pts, double y, double mass) {
    const std::size_t n = pts.size();
    if (n == 1 || y <= pts.front()) {
        row.front() += mass;
        return;
    }
    if (y >= pts.back()) {
        row.back() += mass;
        return;
    }
    auto it = std::upper_bound(pts.begin(), pts.end(), y);
    const std::size_t j = static_cast<std::size_t>(it - pts.begin()) - 1;
    const double lam = (y - pts[j]) / (pts[j + 1] - pts[j]);
    row[j] += (1.0 - lam) * mass;
    row[j + 1] += lam * mass;
}

} // namespace

MarkovKernel kernel_from_ar1(const Ar1Step& step, const TypeGrid& from, std::size_t n_to) {
    from.validate();
    step.noise.validate();
    const double a = step.alpha;
    const double lo = std::min(a * from.min(), a * from.max()) + step.noise.min();
    const double hi = std::max(a * from.min(), a * from.max()) + step.noise.max();

    MarkovKernel k;
    k.from_grid = from;
    if (!(hi > lo)) {
        // Degenerate reachable set (single point).
        k.to_grid.points = {lo};
        k.to_grid.weights = {1.0};
        k.to_grid.kind = GridKind::Discrete;
        k.rows.assign(from.size(), {1.0});
        return k;
    }
    if (n_to < 2) fail("invalid-bounds", "ar1 kernel needs at least 2 to-grid points");
    k.to_grid.points.resize(n_to);
    const double h = (hi - lo) / static_cast<double>(n_to - 1);
    for (std::size_t j = 0; j < n_to; ++j) k.to_grid.points[j] = lo + h * static_cast<double>(j);
    k.to_grid.points.back() = hi;
    k.to_grid.kind = (from.kind == GridKind::Density || step.noise.kind == GridKind::Density)
                         ? GridKind::Density
                         : GridKind::Discrete;
    k.rows.assign(from.size(), std::vector<double>(n_to, 0.0));
    for (std::size_t i = 0; i < from.size(); ++i) {
        const double base = a * from.points[i];
        for (std::size_t l = 0; l < step.noise.size(); ++l)
            deposit(k.rows[i], k.to_grid.points, base + step.noise.points[l], step.noise.weights[l]);
    }
    // to-grid weights: marginal under the from-grid prior, for validate() only
    k.to_grid.weights.assign(n_to, 0.0);
    for (std::size_t i = 0; i < from.size(); ++i)
        for (std::size_t j = 0; j < n_to; ++j) k.to_grid.weights[j] += from.weights[i] * k.rows[i][j];
    renormalize(k.to_grid.weights);
    return k;
}

MarkovKernel kernel_from_table(const TypeGrid& from, std::vector<double> to_points,
                               std::vector<std::vector<double>> rows, GridKind to_kind) {
    MarkovKernel k;
    k.from_grid = from;
    k.to_grid.points = std::move(to_points);
    k.to_grid.kind = to_kind;
    k.rows = std::move(rows);
    if (k.rows.size() != from.size()) fail("grid-mismatch", "table row count != from-grid size");
    for (auto& row : k.rows) {
        if (row.size() != k.to_grid.points.size())
            fail("grid-mismatch", "table row width != to-grid size");
        renormalize(row);
    }
    k.to_grid.weights.assign(k.to_grid.points.size(), 0.0);
    for (std::size_t i = 0; i < from.size(); ++i)
        for (std::size_t j = 0; j < k.to_grid.points.size(); ++j)
            k.to_grid.weights[j] += from.weights[i] * k.rows[i][j];
    renormalize(k.to_grid.weights);
    k.validate();
    return k;
}

MarkovKernel independent_kernel(const TypeGrid& from, const TypeGrid& marginal) {
    MarkovKernel k;
    k.from_grid = from;
    k.to_grid = marginal;
    k.rows.assign(from.size(), marginal.weights);
    return k;
}

TypeGrid posterior(const MarkovKernel& kernel, const TypeGrid& prior, const Condition& cond,
                   double tol) {
    if (prior.size() != kernel.from_grid.size())
        fail("grid-mismatch", "prior size != kernel from-grid size");
    TypeGrid out;
    out.kind = kernel.to_grid.kind;
    out.points = kernel.to_grid.points;
    out.weights.assign(out.points.size(), 0.0);

    if (cond.kind == Condition::Kind::AtPoint) {
        const double eps = kTieEps * tie_scale(cond.value);
        for (std::size_t i = 0; i < prior.size(); ++i) {
            if (std::abs(kernel.from_grid.points[i] - cond.value) <= eps) {
                out.weights = kernel.rows[i];
                return out;
            }
        }
        fail("empty-event", "conditioning point is not in the grid support");
    }

    const std::size_t split = kernel.from_grid.lower_geq(cond.value);
    const std::size_t lo = (cond.kind == Condition::Kind::Geq) ? split : 0;
    const std::size_t hi = (cond.kind == Condition::Kind::Geq) ? prior.size() : split;
    double total = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        const double w = prior.weights[i];
        total += w;
        for (std::size_t j = 0; j < out.weights.size(); ++j) out.weights[j] += w * kernel.rows[i][j];
    }
    if (total < tol) fail("empty-event", "conditioning event has no prior mass");
    for (double& w : out.weights) w /= total;
    return out;
}

double partial_expectation(const TypeGrid& g, double p) {
    double m = 0.0;
    for (std::size_t i = g.lower_geq(p); i < g.size(); ++i) {
        const double d = g.points[i] - p;
        if (d > 0.0) m += g.weights[i] * d;
    }
    return m;
}

TypeGrid push_forward(const TypeGrid& prior, const MarkovKernel& kernel) {
    if (prior.size() != kernel.from_grid.size())
        fail("grid-mismatch", "prior size != kernel from-grid size");
    TypeGrid out;
    out.kind = kernel.to_grid.kind;
    out.points = kernel.to_grid.points;
    out.weights.assign(out.points.size(), 0.0);
    for (std::size_t i = 0; i < prior.size(); ++i)
        for (std::size_t j = 0; j < out.weights.size(); ++j)
            out.weights[j] += prior.weights[i] * kernel.rows[i][j];
    return out;
}

MarkovKernel compose(const MarkovKernel& a, const MarkovKernel& b) {
    if (a.to_grid.size() != b.from_grid.size())
        fail("grid-mismatch", "composition needs a.to_grid == b.from_grid");
    MarkovKernel k;
    k.from_grid = a.from_grid;
    k.to_grid = b.to_grid;
    k.rows.assign(a.from_grid.size(), std::vector<double>(b.to_grid.size(), 0.0));
    for (std::size_t i = 0; i < a.from_grid.size(); ++i)
        for (std::size_t j = 0; j < a.to_grid.size(); ++j) {
            const double w = a.rows[i][j];
            if (w == 0.0) continue;
            for (std::size_t l = 0; l < b.to_grid.size(); ++l) k.rows[i][l] += w * b.rows[j][l];
        }
    return k;
}

} // namespace ratchet

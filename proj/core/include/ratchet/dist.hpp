#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ratchet {

enum class GridKind : std::uint8_t {
    Discrete, // genuine point masses
    Density   // trapezoid-cell discretization of a density
};

/// One-period type distribution on a finite ascending grid.
///
/// Density-kind grids carry trapezoid cell masses: point i owns the cell
/// between the midpoints toward its neighbours; the first and last cells are
/// one-sided, so the support endpoints are honoured exactly. survival() and
/// cdf() evaluate the implied piecewise-linear law for density grids and the
/// inclusive point-mass law for discrete grids. mass_geq()/mass_lt() are
/// always exact inclusive sums over grid points (a point equal to the cut
/// belongs to the >= side); allocation logic uses those.
struct TypeGrid {
    std::vector<double> points;
    std::vector<double> weights;
    GridKind kind = GridKind::Density;

    std::size_t size() const { return points.size(); }
    double min() const { return points.front(); }
    double max() const { return points.back(); }

    double mean() const;
    double mass_geq(double x) const;
    double mass_lt(double x) const;
    double survival(double p) const;
    double cdf(double x) const { return 1.0 - survival(x); }

    // Cell geometry for density grids (width of the owned cell; a lone point
    // gets width 1 so density == mass).
    double cell_width(std::size_t i) const;
    double density(std::size_t i) const { return weights[i] / cell_width(i); }

    // Fraction of cell i's mass lying at-or-above points[i], matching
    // survival() evaluated exactly at a support point: 1 for discrete grids,
    // the right-share of the cell for density grids (1 at the low edge, 0 at
    // the high edge, 1/2 for uniformly spaced interior points).
    double point_tail_fraction(std::size_t i) const;

    // First/last index with x_i >= / < cut under the inclusive convention;
    // lower_geq returns size() when nothing qualifies.
    std::size_t lower_geq(double cut) const;

    void validate(double mass_tol = 1e-12) const;
};

TypeGrid make_uniform(double lo, double hi, std::size_t n);
TypeGrid make_discrete(std::vector<double> points, std::vector<double> weights);
// Gaussian truncated at +-5 sigma, trapezoid-discretized on n points.
TypeGrid make_trunc_gaussian(double mu, double sigma, std::size_t n);

enum class TruncSide : std::uint8_t { Geq, Lt };

// Restrict to { x >= k } or { x < k } and renormalize. The grid point equal
// to k belongs to the Geq side. Errors with empty-truncation if the retained
// mass is below tol.
TypeGrid truncate(const TypeGrid& g, double k, TruncSide side, double tol = 1e-12);

/// Conditional law of next-period types given the current one: row i is the
/// distribution of theta' given theta = from_grid.points[i], all rows sharing
/// to_grid.points. x1_tag distinguishes complement-model branches (-1: n/a).
struct MarkovKernel {
    TypeGrid from_grid;
    TypeGrid to_grid;
    std::vector<std::vector<double>> rows;
    int x1_tag = -1;

    TypeGrid row_dist(std::size_t i) const;
    double row_mean(std::size_t i) const;
    // Partial expectation E[(theta' - p)+ | theta = from_i].
    double row_partial_expectation(std::size_t i, double p) const;
    void validate(double mass_tol = 1e-12) const;
};

/// AR(1) step theta' = alpha * theta + eps with eps ~ noise.
struct Ar1Step {
    double alpha = 0.0;
    TypeGrid noise;
};

// Discretize the AR(1) conditional laws on a fresh n_to-point uniform grid
// covering the reachable range. Shifted noise mass is split linearly between
// bracketing grid points, which preserves row means exactly.
MarkovKernel kernel_from_ar1(const Ar1Step& step, const TypeGrid& from, std::size_t n_to);

MarkovKernel kernel_from_table(const TypeGrid& from, std::vector<double> to_points,
                               std::vector<std::vector<double>> rows, GridKind to_kind);

// Same next-period law in every row.
MarkovKernel independent_kernel(const TypeGrid& from, const TypeGrid& marginal);

struct Condition {
    enum class Kind : std::uint8_t { Geq, Lt, AtPoint } kind;
    double value;

    static Condition geq(double k) { return {Kind::Geq, k}; }
    static Condition lt(double k) { return {Kind::Lt, k}; }
    static Condition at_point(double x) { return {Kind::AtPoint, x}; }
};

// Posterior over next-period types given an event on the current type.
// Errors with empty-event when the conditioning event has no prior mass.
TypeGrid posterior(const MarkovKernel& kernel, const TypeGrid& prior, const Condition& cond,
                   double tol = 1e-12);

// E[(theta - p)+] by exact summation over grid points.
double partial_expectation(const TypeGrid& g, double p);

// Marginal of the next period: mixture of kernel rows weighted by the prior.
TypeGrid push_forward(const TypeGrid& prior, const MarkovKernel& kernel);

// Two-step composition: rows map a.from_grid into b.to_grid.
MarkovKernel compose(const MarkovKernel& a, const MarkovKernel& b);

} // namespace ratchet

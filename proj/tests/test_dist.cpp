#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ratchet/dist.hpp"
#include "ratchet/error.hpp"
#include "testutil.hpp"

#include <cmath>

using namespace ratchet;

TEST_CASE("uniform grid reproduces the continuous law at cell resolution") {
    TypeGrid g = make_uniform(1.0, 2.0, 401);
    REQUIRE(g.size() == 401);
    CHECK(g.kind == GridKind::Density);
    double mass = 0.0;
    for (double w : g.weights) mass += w;
    CHECK(std::abs(mass - 1.0) < 1e-12);
    CHECK(std::abs(g.mean() - 1.5) < 1e-12);
    // The implied piecewise-linear cdf of a uniform grid is the uniform cdf.
    for (double x : {1.1, 1.25, 1.5 + 0.0025 / 3.0, 1.9})
        CHECK(std::abs(g.survival(x) - (2.0 - x)) < 1e-12);
    CHECK(g.survival(0.5) == doctest::Approx(1.0));
    CHECK(g.survival(2.5) == doctest::Approx(0.0));
}

TEST_CASE("inclusive point masses on a coarse uniform grid") {
    TypeGrid g = make_uniform(1.0, 2.0, 5);
    CHECK(std::abs(g.weights.front() - 0.125) < 1e-15);
    CHECK(std::abs(g.weights[2] - 0.25) < 1e-15);
    CHECK(std::abs(g.mass_geq(1.5) - 0.625) < 1e-15);
    CHECK(std::abs(g.mass_lt(1.5) - 0.375) < 1e-15);
    CHECK(std::abs(g.mass_geq(1.5) + g.mass_lt(1.5) - 1.0) < 1e-15);
    CHECK(g.lower_geq(1.5) == 2);
    CHECK(g.lower_geq(1.5 + 1e-9) == 3);
    CHECK(g.lower_geq(2.5) == g.size());
    CHECK(g.point_tail_fraction(0) == doctest::Approx(1.0));
    CHECK(g.point_tail_fraction(2) == doctest::Approx(0.5));
    CHECK(g.point_tail_fraction(4) == doctest::Approx(0.0));
}

TEST_CASE("grid constructors reject malformed input") {
    CHECK_THROWS_WITH_AS(make_uniform(2.0, 1.0, 11), doctest::Contains("invalid-bounds"), Error);
    CHECK_THROWS_WITH_AS(make_uniform(1.0, 2.0, 1), doctest::Contains("invalid-bounds"), Error);
    CHECK_THROWS_WITH_AS(make_trunc_gaussian(1.0, 0.0, 11), doctest::Contains("invalid-bounds"),
                         Error);
    CHECK_THROWS_WITH_AS(make_discrete({2.0, 1.0}, {0.5, 0.5}), doctest::Contains("invalid-grid"),
                         Error);
    CHECK_THROWS_WITH_AS(make_discrete({1.0, 2.0}, {0.0, 0.0}), doctest::Contains("invalid-grid"),
                         Error);
    CHECK_THROWS_WITH_AS(make_discrete({1.0, 2.0}, {-0.1, 1.1}), doctest::Contains("invalid-grid"),
                         Error);
    CHECK_THROWS_WITH_AS(make_discrete({1.0}, {1.0, 0.0}), doctest::Contains("invalid-grid"),
                         Error);
    // Positive weights that miss total mass 1 are rescaled, not rejected.
    TypeGrid scaled = make_discrete({1.0, 2.0}, {0.5, 0.4});
    CHECK(std::abs(scaled.weights[0] - 5.0 / 9.0) < 1e-15);
    CHECK(std::abs(scaled.weights[1] - 4.0 / 9.0) < 1e-15);
}

TEST_CASE("truncated gaussian grid is a proper symmetric law") {
    TypeGrid g = make_trunc_gaussian(1.5, 0.25, 401);
    double mass = 0.0;
    for (double w : g.weights) mass += w;
    CHECK(std::abs(mass - 1.0) < 1e-12);
    CHECK(std::abs(g.mean() - 1.5) < 1e-9);
    CHECK(g.min() == doctest::Approx(1.5 - 1.25));
    CHECK(g.max() == doctest::Approx(1.5 + 1.25));
}

TEST_CASE("conditioning splits the law without losing mass") {
    TypeGrid g = make_uniform(1.0, 2.0, 401);
    TypeGrid up = truncate(g, 1.5, TruncSide::Geq);
    TypeGrid dn = truncate(g, 1.5, TruncSide::Lt);
    CHECK(up.min() == doctest::Approx(1.5));
    CHECK(dn.max() < 1.5);
    const double m = g.mass_geq(1.5);
    CHECK(std::abs(m * up.mean() + (1.0 - m) * dn.mean() - g.mean()) < 1e-12);
    double um = 0.0;
    for (double w : up.weights) um += w;
    CHECK(std::abs(um - 1.0) < 1e-12);
    CHECK_THROWS_WITH_AS(truncate(g, 3.0, TruncSide::Geq), doctest::Contains("empty-truncation"),
                         Error);
    TypeGrid d = make_discrete({1.0, 2.0}, {0.4, 0.6});
    TypeGrid dup = truncate(d, 2.0, TruncSide::Geq);
    CHECK(dup.size() == 1);
    CHECK(dup.weights[0] == doctest::Approx(1.0));
}

TEST_CASE("partial expectation of a kinked payoff is exact on-grid") {
    TypeGrid g = make_uniform(0.0, 1.0, 401);
    // (x - 1/2)+ is piecewise linear with its kink on a grid point, so the
    // cell rule integrates it exactly: value 1/8.
    CHECK(std::abs(partial_expectation(g, 0.5) - 0.125) < 1e-12);
    CHECK(partial_expectation(g, 1.5) == doctest::Approx(0.0));
    CHECK(std::abs(partial_expectation(g, -1.0) - (g.mean() + 1.0)) < 1e-12);
}

TEST_CASE("mass-splitting transition rows keep conditional means exact") {
    TypeGrid from = make_uniform(1.0, 2.0, 101);
    TypeGrid noise = make_uniform(0.0, 1.0, 101);
    MarkovKernel k = kernel_from_ar1(Ar1Step{0.7, noise}, from, 101);
    REQUIRE(k.rows.size() == from.size());
    CHECK(k.to_grid.min() == doctest::Approx(0.7 * 1.0 + 0.0));
    CHECK(k.to_grid.max() == doctest::Approx(0.7 * 2.0 + 1.0));
    for (std::size_t i = 0; i < from.size(); i += 10) {
        const double want = 0.7 * from.points[i] + noise.mean();
        CHECK(std::abs(k.row_mean(i) - want) < 1e-12);
    }
}

TEST_CASE("independent transitions ignore the conditioning event") {
    TypeGrid prior = make_uniform(1.0, 2.0, 101);
    TypeGrid next = make_uniform(1.0, 2.0, 101);
    MarkovKernel k = independent_kernel(prior, next);
    TypeGrid post = posterior(k, prior, Condition::geq(1.5));
    REQUIRE(post.size() == next.size());
    for (std::size_t j = 0; j < post.size(); ++j) {
        CHECK(post.points[j] == doctest::Approx(next.points[j]));
        CHECK(std::abs(post.weights[j] - next.weights[j]) < 1e-15);
    }
}

TEST_CASE("posterior matches hand Bayes on a two-state chain") {
    TypeGrid prior = make_discrete({1.0, 2.0}, {0.4, 0.6});
    MarkovKernel k = kernel_from_table(prior, {1.0, 2.0},
                                       {{0.8, 0.2}, {0.3, 0.7}}, GridKind::Discrete);
    TypeGrid hi = posterior(k, prior, Condition::geq(2.0));
    CHECK(std::abs(hi.weights[0] - 0.3) < 1e-15);
    CHECK(std::abs(hi.weights[1] - 0.7) < 1e-15);
    TypeGrid lo = posterior(k, prior, Condition::lt(2.0));
    CHECK(std::abs(lo.weights[0] - 0.8) < 1e-15);
    TypeGrid at = posterior(k, prior, Condition::at_point(2.0));
    CHECK(std::abs(at.weights[1] - 0.7) < 1e-15);
    TypeGrid all = posterior(k, prior, Condition::geq(0.0));
    CHECK(std::abs(all.weights[0] - (0.4 * 0.8 + 0.6 * 0.3)) < 1e-15);
    CHECK_THROWS_WITH_AS(posterior(k, prior, Condition::geq(5.0)),
                         doctest::Contains("empty-event"), Error);
}

TEST_CASE("push-forward and composition agree with direct mixing") {
    TypeGrid prior = make_discrete({1.0, 2.0}, {0.4, 0.6});
    MarkovKernel a = kernel_from_table(prior, {1.0, 2.0},
                                       {{0.8, 0.2}, {0.3, 0.7}}, GridKind::Discrete);
    TypeGrid mid = push_forward(prior, a);
    CHECK(std::abs(mid.weights[0] - 0.5) < 1e-15);
    CHECK(std::abs(mid.mean() - (0.4 * a.row_mean(0) + 0.6 * a.row_mean(1))) < 1e-15);
    MarkovKernel b = kernel_from_table(a.to_grid, {1.0, 2.0},
                                       {{0.9, 0.1}, {0.2, 0.8}}, GridKind::Discrete);
    MarkovKernel c = compose(a, b);
    REQUIRE(c.rows.size() == 2);
    CHECK(std::abs(c.rows[0][0] - (0.8 * 0.9 + 0.2 * 0.2)) < 1e-15);
    CHECK(std::abs(c.rows[1][1] - (0.3 * 0.1 + 0.7 * 0.8)) < 1e-15);
}

TEST_CASE("kernel tables are validated") {
    TypeGrid prior = make_discrete({1.0, 2.0}, {0.4, 0.6});
    CHECK_THROWS_WITH_AS(kernel_from_table(prior, {1.0, 2.0}, {{0.8, 0.2}},
                                           GridKind::Discrete),
                         doctest::Contains("grid-mismatch"), Error);
    CHECK_THROWS_WITH_AS(kernel_from_table(prior, {1.0, 2.0}, {{0.8}, {0.3, 0.7}},
                                           GridKind::Discrete),
                         doctest::Contains("grid-mismatch"), Error);
    CHECK_THROWS_WITH_AS(kernel_from_table(prior, {2.0, 1.0}, {{0.8, 0.2}, {0.3, 0.7}},
                                           GridKind::Discrete),
                         doctest::Contains("invalid-grid"), Error);
    // Rows are rescaled to probability rows, not rejected.
    MarkovKernel k = kernel_from_table(prior, {1.0, 2.0}, {{0.8, 0.3}, {0.3, 0.7}},
                                       GridKind::Discrete);
    CHECK(std::abs(k.rows[0][0] - 8.0 / 11.0) < 1e-15);
}

TEST_CASE("cell-integrated gaussian rows are full-support probability rows") {
    TypeGrid prior = make_trunc_gaussian(1.5, 0.25, 101);
    MarkovKernel k = testutil::ar1_gauss_cells(prior, 0.5, 0.75, 0.25 * std::sqrt(0.75), 101);
    for (std::size_t i = 0; i < k.rows.size(); i += 20) {
        double s = 0.0;
        for (double v : k.rows[i]) {
            CHECK(v > 0.0);
            s += v;
        }
        CHECK(std::abs(s - 1.0) < 1e-12);
    }
    // Conditional means track alpha * x + mu up to cell quantization.
    const double slope = (k.row_mean(k.rows.size() - 1) - k.row_mean(0)) /
                         (prior.max() - prior.min());
    CHECK(std::abs(slope - 0.5) < 1e-3);
}

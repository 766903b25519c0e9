#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ratchet/error.hpp"
#include "ratchet/mechanism.hpp"
#include "ratchet/scenario.hpp"
#include "testutil.hpp"

#include <cmath>
#include <random>

using namespace ratchet;

TEST_CASE("midpoint inverse hazard is exact on uniform interiors") {
    TypeGrid g = make_uniform(1.0, 2.0, 401);
    std::vector<double> ih = inverse_hazard(g);
    REQUIRE(ih.size() == g.size());
    for (std::size_t i = 1; i + 1 < g.size(); ++i)
        CHECK(std::abs(ih[i] - (2.0 - g.points[i])) < 1e-12);
    CHECK_THROWS_WITH_AS(inverse_hazard(make_discrete({1.0, 2.0}, {0.5, 0.5})),
                         doctest::Contains("discrete-prior-unsupported"), Error);
}

TEST_CASE("impulse response vanishes for independent transitions") {
    Instance inst = Scenario::load(testutil::scenario_path("example1.json")).build();
    Table imp = impulse_response(inst.kernel0);
    for (std::size_t i = 0; i < imp.size(); i += 40)
        for (std::size_t j = 0; j < imp[i].size(); j += 40)
            CHECK(imp[i][j] == doctest::Approx(0.0));
}

TEST_CASE("impulse response is NaN exactly on zero-mass cells") {
    TypeGrid from = make_discrete({1.0, 2.0}, {0.5, 0.5});
    MarkovKernel k = kernel_from_table(from, {1.0, 2.0, 3.0},
                                       {{0.5, 0.0, 0.5}, {0.2, 0.3, 0.5}},
                                       GridKind::Discrete);
    Table imp = impulse_response(k);
    CHECK(std::isnan(imp[0][1]));
    CHECK(std::isfinite(imp[0][0]));
    CHECK(std::isfinite(imp[0][2]));
    for (double v : imp[1]) CHECK(std::isfinite(v));
}

TEST_CASE("impulse response recovers the persistence coefficient") {
    const double alpha = 0.5;
    TypeGrid prior = make_trunc_gaussian(1.5, 0.25, 201);
    MarkovKernel k = testutil::ar1_gauss_cells(prior, alpha, 0.75, 0.25 * std::sqrt(0.75), 201);
    Table imp = impulse_response(k);
    // Stay inside the genuine cell windows: the first and last to-grid cells
    // absorb the rest of the real line, so their finite differences do not
    // approximate the density ratio.
    for (std::size_t i = 5; i + 5 < imp.size(); i += 11) {
        for (std::size_t j = 2; j + 2 < imp[i].size(); j += 9) {
            if (k.rows[i][j] < 1e-6) continue;
            CHECK(imp[i][j] == doctest::Approx(alpha).epsilon(0.05));
        }
    }
}

TEST_CASE("virtual values reduce to raw types under independence") {
    Instance inst = Scenario::load(testutil::scenario_path("example1.json")).build();
    VirtualValueTable t = virtual_values(inst);
    CHECK_FALSE(t.two_branch);
    REQUIRE(t.phi.size() == inst.prior.size());
    for (std::size_t i = 0; i < t.phi.size(); ++i)
        CHECK(std::abs(t.phi[i] - (inst.prior.points[i] - t.inv_hazard[i])) < 1e-12);
    for (std::size_t i = 0; i < t.psi0.size(); i += 50)
        for (std::size_t j = 0; j < t.psi0[i].size(); j += 50)
            CHECK(std::abs(t.psi0[i][j] - inst.kernel0.to_grid.points[j]) < 1e-12);
}

TEST_CASE("exclusion boundary is flat at the bottom when every type trades") {
    Instance inst = Scenario::load(testutil::scenario_path("example1.json")).build();
    VirtualValueTable t = virtual_values(inst);
    std::vector<double> d = boundary_curve(t, inst.kernel0, 0, true);
    REQUIRE(d.size() == inst.prior.size());
    for (double v : d) CHECK(v == doctest::Approx(inst.kernel0.to_grid.min()));
}

TEST_CASE("a rising exclusion boundary is rejected when monotonicity is required") {
    TypeGrid from = make_discrete({1.0, 2.0}, {0.5, 0.5});
    MarkovKernel k = kernel_from_table(from, {1.0, 1.5, 2.0, 2.5},
                                       {{0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}},
                                       GridKind::Discrete);
    VirtualValueTable t;
    t.phi = {1.0, 2.0};
    t.inv_hazard = {0.0, 0.0};
    t.psi0 = {{1.0, 1.0, 1.0, 1.0}, {-1.0, -1.0, -1.0, 1.0}};
    t.impulse0 = {{0.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}};
    std::vector<double> d = boundary_curve(t, k, 0, false);
    CHECK(d[0] == doctest::Approx(1.0));
    CHECK(d[1] == doctest::Approx(2.5));
    CHECK_THROWS_WITH_AS(boundary_curve(t, k, 0, true),
                         doctest::Contains("non-monotone-boundary"), Error);
}

TEST_CASE("relaxed program value demands ordered continuation prices") {
    Instance inst = Scenario::load(testutil::scenario_path("example1.json")).build();
    CHECK_THROWS_WITH_AS(relaxed_value(inst, 1.5, 1.0, 1.2),
                         doctest::Contains("constraint-violated"), Error);
}

TEST_CASE("relaxed optimum on the independent benchmark collapses prices") {
    Instance inst = Scenario::load(testutil::scenario_path("example1.json")).build();
    RelaxedSolution rs = solve_relaxed(inst);
    CHECK(rs.k == doctest::Approx(1.0));
    CHECK(rs.p_A == doctest::Approx(1.0025));
    CHECK(rs.p_R == doctest::Approx(1.0025));
    CHECK(std::abs(rs.value - 2.001246875000036) < 1e-12);
    CHECK(rs.collapse);
    CHECK(rs.certified);
    CHECK_FALSE(rs.sell_nothing);
    CHECK(std::abs(relaxed_value(inst, rs.k, rs.p_A, rs.p_R) - rs.value) < 1e-12);
}

TEST_CASE("relaxed optimum dominates random feasible choices") {
    Instance inst = Scenario::load(testutil::scenario_path("ar1_41.json")).build();
    RelaxedSolution rs = solve_relaxed(inst);
    CHECK(std::abs(rs.value - 2.12390883492948) < 1e-9);
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<std::size_t> ki(0, inst.prior.size() - 1);
    std::uniform_int_distribution<std::size_t> pi(0, inst.kernel0.to_grid.size() - 1);
    for (int trial = 0; trial < 60; ++trial) {
        const double k = inst.prior.points[ki(rng)];
        double a = inst.kernel0.to_grid.points[pi(rng)];
        double b = inst.kernel0.to_grid.points[pi(rng)];
        if (a < b) std::swap(a, b);
        CHECK(relaxed_value(inst, k, a, b) <= rs.value + 1e-9);
    }
}

TEST_CASE("equal-price restriction is costless at the relaxed cutoff") {
    Instance inst = Scenario::load(testutil::scenario_path("example1.json")).build();
    for (double k : {1.0, 1.25, 1.5}) {
        Claim1Certificate c = claim1_certify(inst, k);
        CHECK(c.k == doctest::Approx(k));
        CHECK(c.gap <= 1e-9);
        CHECK(std::abs(c.gap - (c.best_off_diagonal - c.best_diagonal)) < 1e-15);
    }
}

TEST_CASE("full-commitment optimum on the independent benchmark") {
    Instance inst = Scenario::load(testutil::scenario_path("example1.json")).build();
    CommitmentResult cr = commitment_optimum(inst);
    CHECK(std::abs(cr.p1 - 1.5) < 1e-9);
    CHECK(cr.p_A == doctest::Approx(1.0));
    CHECK(cr.p_R == doctest::Approx(2.0));
    CHECK(std::abs(cr.revenue - 2.5) < 1e-9);
    CHECK(cr.all_accept);
    CHECK(cr.threshold);
    CHECK(cr.k == doctest::Approx(inst.prior.min()));

    CommitmentEval ev = eval_commitment(inst, 1.5, 1.0, 2.0);
    CHECK(std::abs(ev.revenue - 2.5) < 1e-9);
    CHECK(ev.all_accept);
}

TEST_CASE("commitment search does not impose an order on the follow-up prices") {
    Instance inst = Scenario::load(testutil::scenario_path("fig1_limit.json")).build();
    CommitmentResult cr = commitment_optimum(inst);
    CHECK(cr.p_A < cr.p_R); // reward path priced below punish path here
    CHECK(std::abs(cr.p_A - 1.1875) < 1e-9);
    CHECK(std::abs(cr.p_R - 1.2000000000000002) < 1e-9);
    CHECK(std::abs(cr.p1 - 1.2125) < 1e-9);
    CHECK(std::abs(cr.revenue - 2.135367974703769) < 1e-9);
}

TEST_CASE("commitment tie band prefers rewarding acceptance") {
    Instance inst = Scenario::load(testutil::scenario_path("perfect_correlation.json")).build();
    CommitmentResult cr = commitment_optimum(inst);
    CHECK(std::abs(cr.p1 - 1.005) < 1e-9);
    CHECK(cr.p_A == doctest::Approx(1.0));
    CHECK(std::abs(cr.p_R - 1.0025) < 1e-9);
    CHECK(std::abs(cr.revenue - 2.002493750000029) < 1e-9);
    CommitmentEval ev = eval_commitment(inst, cr.p1, cr.p_A, cr.p_R);
    CHECK(std::abs(ev.revenue - cr.revenue) < 1e-12);
}

TEST_CASE("commitment optimum is thread-count invariant") {
    Instance inst = Scenario::load(testutil::scenario_path("ar1_41.json")).build();
    CommitmentResult a = commitment_optimum(inst, 1);
    CommitmentResult b = commitment_optimum(inst, 4);
    CHECK(a.p1 == b.p1);
    CHECK(a.p_A == b.p_A);
    CHECK(a.p_R == b.p_R);
    CHECK(a.revenue == b.revenue);
    CHECK(std::abs(a.revenue - 2.3187700473183592) < 1e-9);
}

TEST_CASE("multi-period relaxed value reproduces its own optimum") {
    Instance inst = Scenario::load(testutil::scenario_path("multi_t3.json")).build();
    RelaxedSolution rs = solve_relaxed(inst);
    REQUIRE(rs.p_A_t.size() == 2);
    REQUIRE(rs.p_R_t.size() == 2);
    for (std::size_t t = 0; t < rs.p_A_t.size(); ++t) CHECK(rs.p_A_t[t] >= rs.p_R_t[t] - 1e-12);
    CHECK(std::abs(relaxed_value_multi(inst, rs.k, rs.p_A_t, rs.p_R_t) - rs.value) < 1e-12);
}

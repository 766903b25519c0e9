#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ratchet/assumptions.hpp"
#include "ratchet/error.hpp"
#include "ratchet/scenario.hpp"
#include "testutil.hpp"

#include <algorithm>
#include <cmath>

using namespace ratchet;

namespace {

MarkovKernel uniform_family(double alpha, std::size_t n = 201) {
    TypeGrid from = make_uniform(1.0, 2.0, n);
    return testutil::ar1_uniform_cells(from, alpha, 0.25, 1.0, n);
}

} // namespace

TEST_CASE("likelihood-ratio order holds for positively correlated rows") {
    AssumptionReport r = check_mlrp(uniform_family(0.5));
    CHECK(r.holds);
    CHECK(r.witnesses.empty());
    CHECK(r.margin > -1e-10);
}

TEST_CASE("likelihood-ratio order fails under negative correlation") {
    AssumptionReport r = check_mlrp(uniform_family(-0.5));
    CHECK_FALSE(r.holds);
    CHECK(r.margin < -0.9);
    CHECK_FALSE(r.witnesses.empty());
    CHECK(r.witnesses.size() <= 10);
}

TEST_CASE("strictness mode rejects tied rows that pass weakly") {
    TypeGrid from = make_discrete({1.0, 2.0}, {0.5, 0.5});
    MarkovKernel tied = kernel_from_table(from, {1.0, 2.0, 3.0},
                                          {{0.2, 0.6, 0.2}, {0.2, 0.6, 0.2}},
                                          GridKind::Discrete);
    CHECK(check_mlrp(tied, false).holds);
    CHECK_FALSE(check_mlrp(tied, true).holds);
}

TEST_CASE("a single cross-product violation is caught and reported") {
    TypeGrid from = make_discrete({1.0, 2.0}, {0.5, 0.5});
    MarkovKernel bad = kernel_from_table(from, {1.0, 2.0},
                                         {{0.5, 0.5}, {0.6, 0.4}}, GridKind::Discrete);
    AssumptionReport r = check_mlrp(bad);
    CHECK_FALSE(r.holds);
    CHECK(r.margin < 0.0);
    REQUIRE_FALSE(r.witnesses.empty());
}

TEST_CASE("likelihood-ratio order implies stochastic dominance of rows") {
    MarkovKernel k = testutil::ar1_gauss_cells(make_trunc_gaussian(1.5, 0.25, 101),
                                               0.5, 0.75, 0.25 * std::sqrt(0.75), 101);
    REQUIRE(check_mlrp(k).holds);
    for (std::size_t i = 0; i + 1 < k.rows.size(); ++i) {
        TypeGrid lo = k.row_dist(i);
        TypeGrid hi = k.row_dist(i + 1);
        for (std::size_t j = 0; j < k.to_grid.size(); j += 7)
            CHECK(hi.survival(k.to_grid.points[j]) >= lo.survival(k.to_grid.points[j]) - 1e-12);
    }
}

TEST_CASE("mean-sensitivity bound separates tame and explosive persistence") {
    AssumptionReport ok = check_lipschitz(uniform_family(0.5), 1.0);
    CHECK(ok.holds);
    CHECK(ok.margin > 0.0);
    CHECK(ok.margin < 0.005);

    AssumptionReport bad = check_lipschitz(uniform_family(1.2), 1.0);
    CHECK_FALSE(bad.holds);
    CHECK(bad.margin == doctest::Approx(-0.2).epsilon(0.05));

    // A smaller discount loosens the bound: alpha = 1.2 < 1 / 0.5.
    CHECK(check_lipschitz(uniform_family(1.2), 0.5).holds);
    CHECK_THROWS_WITH_AS(check_lipschitz(uniform_family(0.5), 1.5),
                         doctest::Contains("validation-error"), Error);
    CHECK_THROWS_WITH_AS(check_lipschitz(uniform_family(0.5), 0.0),
                         doctest::Contains("validation-error"), Error);
}

TEST_CASE("regularity of the dynamic virtual value on the independent benchmark") {
    Instance inst = Scenario::load(testutil::scenario_path("example1.json")).build();
    AssumptionReport r = check_regularity(inst.prior, inst.kernel0);
    CHECK(r.holds);
    CHECK(r.margin >= 0.0);

    TypeGrid d = make_discrete({1.0, 2.0}, {0.5, 0.5});
    MarkovKernel k = independent_kernel(d, make_uniform(1.0, 2.0, 41));
    CHECK_THROWS_WITH_AS(check_regularity(d, k), doctest::Contains("discrete-prior-unsupported"),
                         Error);
}

TEST_CASE("complementarity orders the accept and reject transitions") {
    TypeGrid from = make_uniform(1.0, 2.0, 101);
    MarkovKernel base = testutil::ar1_uniform_cells(from, 0.4, 0.25, 1.0, 101);
    MarkovKernel lifted = testutil::ar1_uniform_cells(from, 0.4, 0.45, 1.0, 101);
    CHECK(check_complement(lifted, base).holds);
    AssumptionReport swapped = check_complement(base, lifted);
    CHECK_FALSE(swapped.holds);
    CHECK(swapped.margin < 0.0);
}

TEST_CASE("log-concavity check on density grids") {
    CHECK(check_log_concave(make_trunc_gaussian(1.5, 0.25, 401)).holds);
    CHECK(check_log_concave(make_uniform(1.0, 2.0, 201)).holds);

    // Bimodal mixture of two gaussians has a log-convex valley.
    const std::size_t n = 201;
    std::vector<double> pts(n), w(n);
    double tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = 3.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        const double d = std::exp(-0.5 * std::pow((pts[i] - 0.7) / 0.2, 2)) +
                         std::exp(-0.5 * std::pow((pts[i] - 2.3) / 0.2, 2));
        w[i] = d;
        tot += d;
    }
    for (double& v : w) v /= tot;
    TypeGrid bimodal;
    bimodal.points = pts;
    bimodal.weights = w;
    bimodal.kind = GridKind::Density;
    CHECK_FALSE(check_log_concave(bimodal).holds);
    CHECK_THROWS_WITH_AS(check_log_concave(make_discrete({1.0, 2.0}, {0.5, 0.5})),
                         doctest::Contains("discrete-kind-unsupported"), Error);
}

TEST_CASE("per-model assumption bundles carry the expected names") {
    auto names = [](const std::vector<AssumptionReport>& rs) {
        std::vector<std::string> out;
        for (const auto& r : rs) out.push_back(r.name);
        return out;
    };

    Instance two = Scenario::load(testutil::scenario_path("example1.json")).build();
    auto tn = names(check_instance(two));
    REQUIRE(tn.size() == 3);
    CHECK(tn[0] == "A1-MLRP");
    CHECK(tn[1] == "A2-Lipschitz");
    CHECK(tn[2] == "A3-Regularity");

    TypeGrid cfrom = make_uniform(1.0, 2.0, 101);
    Instance comp = make_complements(cfrom,
                                     testutil::ar1_uniform_cells(cfrom, 0.4, 0.25, 1.0, 101),
                                     testutil::ar1_uniform_cells(cfrom, 0.4, 0.45, 1.0, 101),
                                     1.0);
    auto cn = names(check_instance(comp));
    REQUIRE(cn.size() == 4);
    CHECK(cn[0] == "A1'-MLRPx");
    CHECK(cn[1] == "A2'-Lipschitzx");
    CHECK(cn[2] == "A3'-Regularityx");
    CHECK(cn[3] == "A5-Complement");

    Instance multi = Scenario::load(testutil::scenario_path("multi_t3.json")).build();
    auto mn = names(check_instance(multi));
    REQUIRE(mn.size() == 3);
    CHECK(mn[2] == "A4-LogConcaveAR1");

    Instance disc = Scenario::load(testutil::scenario_path("ex3_negative.json")).build();
    auto dn = names(check_instance(disc));
    REQUIRE(dn.size() == 2);
    CHECK(dn[0] == "A1-MLRP");
    CHECK(dn[1] == "A2-Lipschitz");
}

TEST_CASE("multi-period log-concavity bundle enforces the persistence window") {
    TypeGrid prior = make_trunc_gaussian(1.5, 0.25, 101);
    TypeGrid noise = make_trunc_gaussian(1.05, 0.2, 101);

    Instance ok = make_multi_period(prior, {Ar1Step{0.3, noise}, Ar1Step{0.3, noise}}, 1.0, 101);
    auto oks = check_instance(ok);
    REQUIRE(oks.size() == 3);
    CHECK(oks[2].name == "A4-LogConcaveAR1");
    CHECK(oks[2].holds);

    // alpha above 1 / (2 delta) breaks the window even with the same noise.
    Instance hot = make_multi_period(prior, {Ar1Step{0.6, noise}, Ar1Step{0.6, noise}}, 1.0, 101);
    auto hots = check_instance(hot);
    CHECK_FALSE(hots[2].holds);
}

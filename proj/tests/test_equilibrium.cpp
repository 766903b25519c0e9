#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ratchet/equilibrium.hpp"
#include "ratchet/pricing.hpp"
#include "ratchet/scenario.hpp"
#include "ratchet/serialize.hpp"
#include "testutil.hpp"

#include <algorithm>
#include <cmath>

using namespace ratchet;

namespace {

const BeliefDesc* find_belief(const EquilibriumOutcome& out, const std::string& h) {
    for (const auto& b : out.beliefs)
        if (b.history == h) return &b;
    return nullptr;
}

bool has_profile(const std::vector<EquilibriumOutcome>& outs, double p1, double p_A, double p_R) {
    for (const auto& o : outs)
        if (std::abs(o.p1 - p1) < 1e-12 && std::abs(o.p_A - p_A) < 1e-12 &&
            std::abs(o.p_R - p_R) < 1e-12)
            return true;
    return false;
}

} // namespace

TEST_CASE("threshold equilibrium of the independent benchmark") {
    Instance inst = Scenario::load(testutil::scenario_path("example1.json")).build();
    EquilibriumOutcome out = solve_pbe_star(inst);
    CHECK(out.refinement == "pbe-star");
    CHECK(std::abs(out.p1 - 1.0025) < 1e-12);
    CHECK(std::abs(out.k - 1.0025) < 1e-12);
    CHECK(out.p_A == doctest::Approx(1.0));
    CHECK(out.p_R == doctest::Approx(1.0));
    CHECK(std::abs(out.revenue - 2.0012468750000405) < 1e-12);

    VerificationReport v = verify_equilibrium(out, inst);
    CHECK(v.ok);
    CHECK(v.max_violation <= 1e-9);
    CHECK(v.issues.empty());

    REQUIRE_FALSE(out.buyer_value.empty());
    for (std::size_t i = 1; i < out.buyer_value.size(); ++i)
        CHECK(out.buyer_value[i] >= out.buyer_value[i - 1] - 1e-12);
    // Interim values decompose into the acceptance decision plus the
    // discounted follow-up surplus at the branch price.
    for (std::size_t i = 0; i < out.buyer_value.size(); i += 23) {
        const double x = inst.prior.points[i];
        const bool acc = x >= out.k - 1e-12;
        const double direct =
            acc ? (x - out.p1) + inst.delta * inst.kernel1.row_partial_expectation(i, out.p_A)
                : inst.delta * inst.kernel0.row_partial_expectation(i, out.p_R);
        CHECK(std::abs(out.buyer_value[i] - direct) < 1e-12);
    }
}

TEST_CASE("equilibrium beliefs are the Bayes posteriors of the cutoff split") {
    Instance inst = Scenario::load(testutil::scenario_path("example1.json")).build();
    EquilibriumOutcome out = solve_pbe_star(inst);

    const BeliefDesc* acc = find_belief(out, "A");
    const BeliefDesc* rej = find_belief(out, "R");
    REQUIRE(acc != nullptr);
    REQUIRE(rej != nullptr);
    CHECK(acc->on_path);
    CHECK(rej->on_path);

    TypeGrid accLaw = posterior(inst.kernel1, inst.prior, Condition::geq(out.k));
    TypeGrid rejLaw = posterior(inst.kernel0, inst.prior, Condition::lt(out.k));
    REQUIRE(acc->posterior.size() == accLaw.size());
    for (std::size_t j = 0; j < accLaw.size(); ++j) {
        CHECK(std::abs(acc->posterior.weights[j] - accLaw.weights[j]) < 1e-12);
        CHECK(std::abs(rej->posterior.weights[j] - rejLaw.weights[j]) < 1e-12);
    }
}

TEST_CASE("ratchet equilibrium cannot beat the posted-price benchmark") {
    Instance ex1 = Scenario::load(testutil::scenario_path("example1.json")).build();
    EquilibriumOutcome out = solve_pbe_star(ex1);
    CHECK(out.revenue <= static_posting_benchmark(ex1).revenue + ex1.revenue_tol());

    std::mt19937_64 rng(99);
    for (int r = 0; r < 3; ++r) {
        Instance inst = testutil::make_ar1_instance(testutil::draw_ar1_params(rng), 101);
        EquilibriumOutcome o = solve_pbe_star(inst);
        CHECK(o.revenue <= static_posting_benchmark(inst).revenue + inst.revenue_tol());
        CHECK(verify_equilibrium(o, inst).ok);
    }
}

TEST_CASE("continuation fixed points never price the acceptors below the rejectors") {
    Instance inst = Scenario::load(testutil::scenario_path("example1.json")).build();
    EquilibriumOutcome out = solve_pbe_star(inst);
    std::vector<ContinuationPoint> pts = continuation_fixed_points(out.p1, inst);
    REQUIRE_FALSE(pts.empty());
    bool found = false;
    for (const auto& c : pts) {
        CHECK(c.p_A >= c.p_R - 1e-15);
        ThresholdResult t = threshold_from_prices(out.p1, c.p_A, c.p_R, inst.delta, inst.prior,
                                                  inst.accept_kernel(), inst.reject_kernel());
        if (c.all_reject) {
            CHECK(t.all_reject);
        } else {
            CHECK(std::abs(t.k - c.k) < 1e-12);
        }
        if (std::abs(c.k - out.k) < 1e-12 && std::abs(c.p_A - out.p_A) < 1e-12) found = true;
    }
    CHECK(found);
}

TEST_CASE("a tampered outcome fails independent verification") {
    Instance inst = Scenario::load(testutil::scenario_path("example1.json")).build();
    EquilibriumOutcome out = solve_pbe_star(inst);
    out.p_A += 0.05;
    VerificationReport v = verify_equilibrium(out, inst);
    CHECK_FALSE(v.ok);
    CHECK_FALSE(v.issues.empty());
}

TEST_CASE("finite-game enumeration under the two off-path belief rules") {
    Instance neg = Scenario::load(testutil::scenario_path("ex3_negative.json")).build();
    REQUIRE(neg.game.has_value());
    auto strict = enumerate_discrete(*neg.game, BeliefFilter::PbeStar);
    auto loose = enumerate_discrete(*neg.game, BeliefFilter::Unrestricted);
    REQUIRE_FALSE(strict.empty());
    double best = 0.0;
    for (const auto& o : strict) best = std::max(best, o.revenue);
    CHECK(std::abs(best - 3.0) < 1e-12);
    // Every strict survivor also survives with free off-path beliefs.
    for (const auto& s : strict) CHECK(has_profile(loose, s.p1, s.p_A, s.p_R));

    Instance sub = Scenario::load(testutil::scenario_path("ex4_substitutes.json")).build();
    REQUIRE(sub.game.has_value());
    auto subs = enumerate_discrete(*sub.game, BeliefFilter::PbeStar);
    double sbest = 0.0;
    for (const auto& o : subs) sbest = std::max(sbest, o.revenue);
    CHECK(sbest >= 1.25 - 1e-12);
}

TEST_CASE("the belief refinement prunes the commitment-like profile") {
    Instance d1 = Scenario::load(testutil::scenario_path("ex2_d1.json")).build();
    REQUIRE(d1.game.has_value());
    auto loose = enumerate_discrete(*d1.game, BeliefFilter::Unrestricted);
    auto strict = enumerate_discrete(*d1.game, BeliefFilter::PbeStar);
    CHECK(has_profile(loose, 1.5, 1.0, 2.0));
    CHECK_FALSE(has_profile(strict, 1.5, 1.0, 2.0));
}

TEST_CASE("enumeration revenue matches a direct recomputation") {
    Instance neg = Scenario::load(testutil::scenario_path("ex3_negative.json")).build();
    const DiscreteGame& g = *neg.game;
    auto outs = enumerate_discrete(g, BeliefFilter::PbeStar);
    const auto& o = outs.front();
    REQUIRE(o.accept_mask.size() == g.theta1_values.size());
    double rev = 0.0;
    for (std::size_t i = 0; i < g.theta1_values.size(); ++i) {
        double second = 0.0;
        for (std::size_t j = 0; j < g.theta2_values.size(); ++j) {
            const double price = o.accept_mask[i] ? o.p_A : o.p_R;
            const double value = g.second_value(i, j, o.accept_mask[i] != 0);
            if (value >= price - 1e-12) second += g.pmf[i][j] * price;
        }
        rev += g.theta1_marginal(i) * (o.accept_mask[i] ? o.p1 : 0.0) + g.delta * second;
    }
    CHECK(std::abs(rev - o.revenue) < 1e-12);
}

TEST_CASE("three-period committed play follows the marginal monopoly path") {
    Instance inst = Scenario::load(testutil::scenario_path("multi_t3.json")).build();
    EquilibriumOutcome out = solve_multi_period(inst, true);
    CHECK(out.committed);
    PostingBenchmark bench = static_posting_benchmark(inst);
    REQUIRE(out.commit_prices.size() == bench.prices.size());
    for (std::size_t t = 0; t < bench.prices.size(); ++t)
        CHECK(std::abs(out.commit_prices[t] - bench.prices[t]) < 1e-12);
    CHECK(std::abs(out.revenue - bench.revenue) < 1e-9);
    CHECK(out.commit_gap <= 1e-9);

    REQUIRE(out.histories.size() == 3);
    for (const auto& rec : out.histories) {
        const std::size_t depth = rec.history.size();
        REQUIRE(depth < bench.prices.size());
        CHECK(std::abs(rec.price - bench.prices[depth]) < 1e-12);
    }
    CHECK(out.histories[1].history == "*");
    CHECK(out.histories[2].history == "**");
}

TEST_CASE("three-period spot play ratchets prices by purchase history") {
    Instance inst = Scenario::load(testutil::scenario_path("multi_t3.json")).build();
    EquilibriumOutcome out = solve_multi_period(inst, false);
    CHECK_FALSE(out.committed);
    CHECK(std::abs(out.revenue - 3.045049119) < 1e-8);
    REQUIRE(out.histories.size() == 7);

    auto price_at = [&](const std::string& h) -> const HistoryRecord* {
        for (const auto& r : out.histories)
            if (r.history == h) return &r;
        return nullptr;
    };
    for (const std::string& h : {std::string(""), std::string("A"), std::string("R")}) {
        const HistoryRecord* a = price_at(h + "A");
        const HistoryRecord* r = price_at(h + "R");
        REQUIRE(a != nullptr);
        REQUIRE(r != nullptr);
        CHECK(a->price >= r->price - 1e-12);
    }
    for (const auto& rec : out.histories) {
        for (std::size_t i = 1; i < rec.u_accept.size(); ++i)
            CHECK(rec.u_accept[i] >= rec.u_accept[i - 1] - 1e-9);
        for (std::size_t i = 1; i < rec.u_reject.size(); ++i)
            CHECK(rec.u_reject[i] >= rec.u_reject[i - 1] - 1e-9);
    }
}

TEST_CASE("a two-period chain solved as a chain matches the direct solve") {
    TypeGrid prior = make_trunc_gaussian(1.5, 0.25, 101);
    TypeGrid noise = make_trunc_gaussian(1.05, 0.2, 101);
    Instance chain = make_multi_period(prior, {Ar1Step{0.3, noise}}, 1.0, 101);
    REQUIRE(chain.horizon == 2);
    EquilibriumOutcome spot = solve_multi_period(chain, false);
    EquilibriumOutcome direct =
        solve_pbe_star(make_two_period(chain.prior, chain.steps[0], chain.delta));
    CHECK(std::abs(spot.revenue - direct.revenue) < 1e-12);
    CHECK(std::abs(spot.p1 - direct.p1) < 1e-12);
    CHECK(std::abs(spot.commit_gap - (spot.revenue - static_posting_benchmark(chain).revenue)) <
          1e-12);
}

TEST_CASE("solver output is thread-count invariant") {
    Instance inst = Scenario::load(testutil::scenario_path("ar1_smooth.json")).build();
    std::string a = to_json(solve_pbe_star(inst, 1));
    std::string b = to_json(solve_pbe_star(inst, 4));
    CHECK(a == b);
}

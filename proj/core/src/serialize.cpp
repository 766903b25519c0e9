#include "ratchet/serialize.hpp"

#include <json.hpp>

namespace ratchet {

namespace {

using njson = nlohmann::ordered_json;

njson grid_json(const TypeGrid& g) {
    njson j;
    j["kind"] = g.kind == GridKind::Discrete ? "discrete" : "density";
    j["points"] = g.points;
    j["weights"] = g.weights;
    return j;
}

njson belief_json(const BeliefDesc& b) {
    njson j;
    j["history"] = b.history;
    j["on_path"] = b.on_path;
    j["degenerate"] = b.degenerate;
    if (b.degenerate) j["at"] = b.at;
    j["posterior"] = grid_json(b.posterior);
    return j;
}

njson history_json(const HistoryRecord& h) {
    njson j;
    j["history"] = h.history;
    j["price"] = h.price;
    j["threshold"] = h.threshold;
    j["all_accept"] = h.all_accept;
    j["all_reject"] = h.all_reject;
    j["u_accept"] = h.u_accept;
    j["u_reject"] = h.u_reject;
    return j;
}

njson outcome_json(const EquilibriumOutcome& o) {
    njson j;
    j["refinement"] = o.refinement;
    j["p1"] = o.p1;
    j["k"] = o.k;
    j["p_A"] = o.p_A;
    j["p_R"] = o.p_R;
    j["revenue"] = o.revenue;
    j["buyer_value"] = o.buyer_value;
    if (!o.accept_mask.empty()) {
        njson mask = njson::array();
        for (auto v : o.accept_mask) mask.push_back(v != 0);
        j["accept_mask"] = std::move(mask);
    }
    njson beliefs = njson::array();
    for (const auto& b : o.beliefs) beliefs.push_back(belief_json(b));
    j["beliefs"] = std::move(beliefs);
    if (!o.histories.empty()) {
        njson hist = njson::array();
        for (const auto& h : o.histories) hist.push_back(history_json(h));
        j["histories"] = std::move(hist);
        j["committed"] = o.committed;
        j["commit_prices"] = o.commit_prices;
        j["commit_gap"] = o.commit_gap;
    }
    j["warnings"] = o.warnings;
    return j;
}

std::string dump(const njson& j) { return j.dump(2) + "\n"; }

} // namespace

std::string to_json(const std::vector<AssumptionReport>& reports) {
    njson arr = njson::array();
    for (const auto& r : reports) {
        njson j;
        j["name"] = r.name;
        j["holds"] = r.holds;
        j["margin"] = r.margin;
        j["witnesses"] = r.witnesses;
        arr.push_back(std::move(j));
    }
    return dump(arr);
}

std::string to_json(const MonopolyResult& result) {
    njson j;
    j["price"] = result.price;
    j["revenue"] = result.revenue;
    j["unique"] = result.unique;
    return dump(j);
}

std::string to_json(const PostingBenchmark& benchmark) {
    njson j;
    j["prices"] = benchmark.prices;
    j["revenues"] = benchmark.revenues;
    j["revenue"] = benchmark.revenue;
    return dump(j);
}

std::string to_json(const RelaxedSolution& solution) {
    njson j;
    j["k"] = solution.k;
    j["p_A"] = solution.p_A;
    j["p_R"] = solution.p_R;
    j["value"] = solution.value;
    j["collapse"] = solution.collapse;
    j["certified"] = solution.certified;
    j["sell_nothing"] = solution.sell_nothing;
    if (!solution.p_A_t.empty()) {
        j["p_A_t"] = solution.p_A_t;
        j["p_R_t"] = solution.p_R_t;
    }
    j["boundary"] = solution.boundary;
    j["warnings"] = solution.warnings;
    return dump(j);
}

std::string to_json(const Claim1Certificate& certificate) {
    njson j;
    j["k"] = certificate.k;
    j["best_diagonal"] = certificate.best_diagonal;
    j["diag_price"] = certificate.diag_price;
    j["best_off_diagonal"] = certificate.best_off_diagonal;
    j["off_p_A"] = certificate.off_p_A;
    j["off_p_R"] = certificate.off_p_R;
    j["gap"] = certificate.gap;
    return dump(j);
}

std::string to_json(const CommitmentResult& result) {
    njson j;
    j["p1"] = result.p1;
    j["p_A"] = result.p_A;
    j["p_R"] = result.p_R;
    j["revenue"] = result.revenue;
    j["k"] = result.k;
    j["all_accept"] = result.all_accept;
    j["all_reject"] = result.all_reject;
    j["threshold"] = result.threshold;
    return dump(j);
}

std::string to_json(const EquilibriumOutcome& outcome) { return dump(outcome_json(outcome)); }

std::string to_json(const std::vector<EquilibriumOutcome>& outcomes) {
    njson arr = njson::array();
    for (const auto& o : outcomes) arr.push_back(outcome_json(o));
    return dump(arr);
}

std::string to_json(const std::vector<ContinuationPoint>& points) {
    njson arr = njson::array();
    for (const auto& p : points) {
        njson j;
        j["k"] = p.k;
        j["p_A"] = p.p_A;
        j["p_R"] = p.p_R;
        j["pi_A"] = p.pi_A;
        j["pi_R"] = p.pi_R;
        j["all_accept"] = p.all_accept;
        j["all_reject"] = p.all_reject;
        arr.push_back(std::move(j));
    }
    return dump(arr);
}

std::string to_json(const VerificationReport& report) {
    njson j;
    j["ok"] = report.ok;
    j["max_violation"] = report.max_violation;
    j["issues"] = report.issues;
    return dump(j);
}

std::string to_json(const ReproduceReport& report) {
    njson j;
    j["id"] = report.id;
    j["pass"] = report.pass;
    njson arr = njson::array();
    for (const auto& c : report.checks) {
        njson e;
        e["name"] = c.name;
        e["expected"] = c.expected;
        e["computed"] = c.computed;
        e["pass"] = c.pass;
        arr.push_back(std::move(e));
    }
    j["checks"] = std::move(arr);
    return dump(j);
}

std::string json_object(const std::vector<std::pair<std::string, std::string>>& members) {
    njson j;
    for (const auto& [key, value] : members) j[key] = njson::parse(value);
    return dump(j);
}

std::string json_string(const std::string& value) { return njson(value).dump(); }

std::string json_number(double value) { return njson(value).dump(); }

} // namespace ratchet

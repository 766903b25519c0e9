#include "ratchet/sweep.hpp"

#include "ratchet/equilibrium.hpp"
#include "ratchet/error.hpp"
#include "ratchet/mechanism.hpp"
#include "ratchet/pricing.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace ratchet {

namespace {

using njson = nlohmann::ordered_json;

const char* kHeader =
    "param,p_star,p_A_commit,p_R_commit,p_A_eq,p_R_eq,benchmark,commit_revenue,eq_revenue,error";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

SweepRow compute_row(const Scenario& base, const std::string& parameter, double value) {
    SweepRow row;
    row.param = value;
    try {
        Scenario s = base;
        s.set_parameter(parameter, value);
        const Instance inst = s.build();
        row.price_step = inst.price_step();
        row.p_star = monopoly_price(first_period_marginal(inst)).price;
        const CommitmentResult c = commitment_optimum(inst);
        row.p_A_commit = c.p_A;
        row.p_R_commit = c.p_R;
        row.commit_revenue = c.revenue;
        const EquilibriumOutcome e = solve_pbe_star(inst);
        row.p_A_eq = e.p_A;
        row.p_R_eq = e.p_R;
        row.eq_revenue = e.revenue;
        row.benchmark = static_posting_benchmark(inst).revenue;
    } catch (const Error& err) {
        row.error = err.code();
    }
    return row;
}

} // namespace

SweepSpec sweep_spec_from_text(const std::string& text) {
    njson doc = njson::parse(text, nullptr, false);
    if (doc.is_discarded()) fail("parse-error", "sweep spec is not valid JSON");
    if (!doc.is_object()) fail("parse-error", "sweep spec root must be an object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "parameter" && key != "values")
            fail("validation-error", key + ": unknown key");
    }
    SweepSpec spec;
    if (!doc.contains("parameter") || !doc["parameter"].is_string())
        fail("validation-error", "parameter: missing or not a string");
    spec.parameter = doc["parameter"].get<std::string>();
    if (!doc.contains("values") || !doc["values"].is_array() || doc["values"].empty())
        fail("validation-error", "values: missing or not a non-empty array");
    for (const auto& v : doc["values"]) {
        if (!v.is_number()) fail("validation-error", "values: expected numbers");
        spec.values.push_back(v.get<double>());
    }
    return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("validation-error", "cannot open sweep spec " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return sweep_spec_from_text(buf.str());
}

std::vector<SweepRow> sweep_rows(const Scenario& base, const SweepSpec& spec, int threads) {
    std::vector<double> values = spec.values;
    std::sort(values.begin(), values.end());
    std::vector<SweepRow> rows(values.size());

    const std::size_t nthreads = std::max<std::size_t>(
        1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), rows.size()));
    auto work = [&](std::size_t tid) {
        for (std::size_t i = tid; i < rows.size(); i += nthreads)
            rows[i] = compute_row(base, spec.parameter, values[i]);
    };
    if (nthreads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = kHeader;
    out += '\n';
    for (const SweepRow& r : rows) {
        out += fmt(r.param);
        if (r.error.empty()) {
            for (double v : {r.p_star, r.p_A_commit, r.p_R_commit, r.p_A_eq, r.p_R_eq,
                             r.benchmark, r.commit_revenue, r.eq_revenue}) {
                out += ',';
                out += fmt(v);
            }
            out += ',';
        } else {
            out += ",,,,,,,,,";
            out += r.error;
        }
        out += '\n';
    }
    return out;
}

std::string run_sweep(const Scenario& base, const SweepSpec& spec, int threads) {
    return sweep_csv(sweep_rows(base, spec, threads));
}

} // namespace ratchet

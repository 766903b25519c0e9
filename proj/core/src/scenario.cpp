#include "ratchet/scenario.hpp"

#include "ratchet/dist.hpp"
#include "ratchet/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace ratchet {

namespace {

using njson = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    fail("validation-error", path + ": " + what);
}

void check_keys(const njson& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) bad(path.empty() ? key : path + "." + key, "unknown key");
    }
}

const njson& require(const njson& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) bad(path.empty() ? key : path + "." + key, "missing");
    return *it;
}

double num(const njson& j, const std::string& path) {
    if (!j.is_number()) bad(path, "expected a number");
    return j.get<double>();
}

std::size_t size_at(const njson& j, const std::string& path) {
    if (!j.is_number_unsigned() || j.get<std::size_t>() < 2) bad(path, "expected an integer >= 2");
    return j.get<std::size_t>();
}

std::vector<double> num_list(const njson& j, const std::string& path) {
    if (!j.is_array() || j.empty()) bad(path, "expected a non-empty array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(num(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<std::vector<double>> num_table(const njson& j, const std::string& path) {
    if (!j.is_array() || j.empty()) bad(path, "expected a non-empty array of rows");
    std::vector<std::vector<double>> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(num_list(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

TypeGrid parse_dist(const njson& j, const std::string& path, std::size_t default_n) {
    if (!j.is_object() || j.size() != 1) bad(path, "expected exactly one distribution form");
    const auto it = j.begin();
    const std::string form = it.key();
    const njson& body = it.value();
    const std::string sub = path + "." + form;
    if (form == "uniform") {
        check_keys(body, sub, {"lo", "hi", "n"});
        const std::size_t n =
            body.contains("n") ? size_at(body["n"], sub + ".n") : default_n;
        return make_uniform(num(require(body, sub, "lo"), sub + ".lo"),
                            num(require(body, sub, "hi"), sub + ".hi"), n);
    }
    if (form == "discrete") {
        check_keys(body, sub, {"points", "weights"});
        return make_discrete(num_list(require(body, sub, "points"), sub + ".points"),
                             num_list(require(body, sub, "weights"), sub + ".weights"));
    }
    if (form == "trunc_gaussian") {
        check_keys(body, sub, {"mu", "sigma", "n"});
        const std::size_t n =
            body.contains("n") ? size_at(body["n"], sub + ".n") : default_n;
        return make_trunc_gaussian(num(require(body, sub, "mu"), sub + ".mu"),
                                   num(require(body, sub, "sigma"), sub + ".sigma"), n);
    }
    bad(sub, "unknown distribution form");
}

Ar1Step parse_ar1_step(const njson& j, const std::string& path, std::size_t default_n) {
    if (!j.is_object() || j.size() != 1) bad(path, "expected exactly one transition form");
    const auto it = j.begin();
    const std::string form = it.key();
    const njson& body = it.value();
    const std::string sub = path + "." + form;
    if (form == "ar1") {
        check_keys(body, sub, {"alpha", "noise"});
        Ar1Step step;
        step.alpha = num(require(body, sub, "alpha"), sub + ".alpha");
        step.noise = parse_dist(require(body, sub, "noise"), sub + ".noise", default_n);
        return step;
    }
    if (form == "ar1_stationary") {
        check_keys(body, sub, {"alpha", "mu", "sigma", "n"});
        const double alpha = num(require(body, sub, "alpha"), sub + ".alpha");
        const double mu = num(require(body, sub, "mu"), sub + ".mu");
        const double sigma = num(require(body, sub, "sigma"), sub + ".sigma");
        if (!(std::abs(alpha) < 1.0)) bad(sub + ".alpha", "stationary form needs |alpha| < 1");
        const std::size_t n =
            body.contains("n") ? size_at(body["n"], sub + ".n") : default_n;
        Ar1Step step;
        step.alpha = alpha;
        step.noise =
            make_trunc_gaussian((1.0 - alpha) * mu, sigma * std::sqrt(1.0 - alpha * alpha), n);
        return step;
    }
    bad(sub, "transition form is not an ar1 family");
}

MarkovKernel parse_kernel(const njson& j, const std::string& path, const TypeGrid& prior,
                          std::size_t n_theta) {
    if (!j.is_object() || j.size() != 1) bad(path, "expected exactly one transition form");
    const std::string form = j.begin().key();
    if (form == "ar1" || form == "ar1_stationary")
        return kernel_from_ar1(parse_ar1_step(j, path, n_theta), prior, n_theta);
    if (form == "table") {
        const auto& body = j["table"];
        const std::string sub = path + ".table";
        check_keys(body, sub, {"rows"});
        return kernel_from_table(prior, prior.points,
                                 num_table(require(body, sub, "rows"), sub + ".rows"),
                                 prior.kind);
    }
    bad(path + "." + form, "unknown transition form");
}

njson parse_document(const std::string& text) {
    njson doc = njson::parse(text, nullptr, false);
    if (doc.is_discarded()) fail("parse-error", "scenario is not valid JSON");
    if (!doc.is_object()) fail("parse-error", "scenario root must be an object");
    return doc;
}

struct Defaults {
    std::size_t n_theta = 401, n_price = 401;
};

Instance build_instance(const njson& doc, std::size_t grid_override) {
    const std::string model =
        require(doc, "", "model").is_string() ? doc["model"].get<std::string>() : "";
    Defaults dft;
    if (model == "multi_period") dft = {101, 101};

    std::size_t n_theta = dft.n_theta, n_price = dft.n_price;
    if (doc.contains("grids")) {
        const auto& g = doc["grids"];
        check_keys(g, "grids", {"n_theta", "n_price"});
        if (g.contains("n_theta")) n_theta = size_at(g["n_theta"], "grids.n_theta");
        if (g.contains("n_price")) n_price = size_at(g["n_price"], "grids.n_price");
    }
    if (grid_override >= 2) n_theta = n_price = grid_override;

    const double delta = num(require(doc, "", "delta"), "delta");
    if (!(delta > 0.0 && delta <= 1.0)) bad("delta", "must lie in (0, 1]");

    Instance inst;
    if (model == "two_period") {
        check_keys(doc, "", {"model", "delta", "prior", "kernel", "grids", "tolerances", "seed"});
        TypeGrid prior = parse_dist(require(doc, "", "prior"), "prior", n_theta);
        // Second-period prices are scanned on the kernel's to-grid, so that
        // grid carries n_price points.
        MarkovKernel kernel = parse_kernel(require(doc, "", "kernel"), "kernel", prior, n_price);
        inst = make_two_period(std::move(prior), std::move(kernel), delta);
    } else if (model == "complements") {
        check_keys(doc, "",
                   {"model", "delta", "prior", "kernel_reject", "kernel_accept", "grids",
                    "tolerances", "seed"});
        TypeGrid prior = parse_dist(require(doc, "", "prior"), "prior", n_theta);
        MarkovKernel rej =
            parse_kernel(require(doc, "", "kernel_reject"), "kernel_reject", prior, n_price);
        MarkovKernel acc =
            parse_kernel(require(doc, "", "kernel_accept"), "kernel_accept", prior, n_price);
        inst = make_complements(std::move(prior), std::move(rej), std::move(acc), delta);
    } else if (model == "multi_period") {
        check_keys(doc, "", {"model", "delta", "prior", "steps", "grids", "tolerances", "seed"});
        TypeGrid prior = parse_dist(require(doc, "", "prior"), "prior", n_theta);
        const auto& steps = require(doc, "", "steps");
        if (!steps.is_array() || steps.empty()) bad("steps", "expected a non-empty array");
        std::vector<Ar1Step> parsed;
        for (std::size_t t = 0; t < steps.size(); ++t)
            parsed.push_back(
                parse_ar1_step(steps[t], "steps[" + std::to_string(t) + "]", n_theta));
        inst = make_multi_period(std::move(prior), parsed, delta, n_theta);
    } else if (model == "discrete") {
        check_keys(doc, "", {"model", "delta", "game", "grids", "tolerances", "seed"});
        const auto& g = require(doc, "", "game");
        check_keys(g, "game", {"theta1_values", "theta2_values", "pmf", "prices", "kappa"});
        DiscreteGame game;
        game.theta1_values = num_list(require(g, "game", "theta1_values"), "game.theta1_values");
        game.theta2_values = num_list(require(g, "game", "theta2_values"), "game.theta2_values");
        game.pmf = num_table(require(g, "game", "pmf"), "game.pmf");
        game.prices = num_list(require(g, "game", "prices"), "game.prices");
        if (g.contains("kappa")) game.kappa = num_table(g["kappa"], "game.kappa");
        game.delta = delta;
        game.validate();
        inst.model = ModelKind::Discrete;
        inst.delta = delta;
        inst.game = std::move(game);
    } else {
        bad("model", "expected one of two_period, complements, multi_period, discrete");
    }

    inst.n_price = n_price;
    if (doc.contains("tolerances")) {
        const auto& t = doc["tolerances"];
        check_keys(t, "tolerances", {"mass", "strictness", "revenue"});
        if (t.contains("mass")) inst.tol.mass = num(t["mass"], "tolerances.mass");
        if (t.contains("strictness"))
            inst.tol.strictness = num(t["strictness"], "tolerances.strictness");
        if (t.contains("revenue"))
            inst.tol.revenue_steps = num(t["revenue"], "tolerances.revenue");
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) bad("seed", "expected a non-negative integer");
        inst.seed = doc["seed"].get<std::uint64_t>();
    }
    return inst;
}

// Retarget an "alpha" inside any ar1/ar1_stationary form found under the
// kernel-carrying keys; returns how many spots were updated.
int set_alpha(njson& doc, double value) {
    int hits = 0;
    auto touch = [&](njson& node) {
        for (const char* form : {"ar1", "ar1_stationary"})
            if (node.is_object() && node.contains(form)) {
                node[form]["alpha"] = value;
                ++hits;
            }
    };
    for (const char* key : {"kernel", "kernel_reject", "kernel_accept"})
        if (doc.contains(key)) touch(doc[key]);
    if (doc.contains("steps") && doc["steps"].is_array())
        for (auto& s : doc["steps"]) touch(s);
    return hits;
}

} // namespace

Scenario Scenario::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("validation-error", "cannot open scenario file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

Scenario Scenario::from_text(const std::string& text) {
    Scenario s;
    s.text_ = text;
    s.build(); // validate eagerly so load reports problems at the call site
    return s;
}

Instance Scenario::build() const { return build_instance(parse_document(text_), grid_override_); }

void Scenario::set_parameter(const std::string& path, double value) {
    njson doc = parse_document(text_);
    if (path == "delta") {
        doc["delta"] = value;
    } else if (path == "ar1.alpha") {
        if (set_alpha(doc, value) == 0)
            fail("validation-error", "scenario has no ar1 transition for " + path);
    } else {
        fail("validation-error", "unsupported parameter path " + path);
    }
    text_ = doc.dump(2);
    build();
}

void Scenario::set_grid(std::size_t n) {
    if (n < 2) fail("validation-error", "grid override must be >= 2");
    grid_override_ = n;
    build();
}

} // namespace ratchet

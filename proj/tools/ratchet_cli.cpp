#include "ratchet/assumptions.hpp"
#include "ratchet/equilibrium.hpp"
#include "ratchet/error.hpp"
#include "ratchet/mechanism.hpp"
#include "ratchet/oracle.hpp"
#include "ratchet/pricing.hpp"
#include "ratchet/reproduce.hpp"
#include "ratchet/scenario.hpp"
#include "ratchet/serialize.hpp"
#include "ratchet/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

namespace {

struct Options {
    std::string out;  // JSON destination; stdout when empty
    std::string csv;  // CSV destination for sweeps; stdout when empty
    std::size_t grid = 0;
    int threads = 1;
    long long seed = -1;
};

void add_global_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--out", opt.out, "write the JSON result to this file");
    cmd->add_option("--csv", opt.csv, "write CSV output to this file (sweep)");
    cmd->add_option("--grid", opt.grid, "override both grid sizes")->check(CLI::Range(2, 100000));
    cmd->add_option("--threads", opt.threads, "worker threads")->check(CLI::Range(1, 256));
    cmd->add_option("--seed", opt.seed, "override the scenario seed");
}

ratchet::Instance build_instance(const std::string& path, const Options& opt) {
    ratchet::Scenario s = ratchet::Scenario::load(path);
    if (opt.grid >= 2) s.set_grid(opt.grid);
    ratchet::Instance inst = s.build();
    if (opt.seed >= 0) inst.seed = static_cast<std::uint64_t>(opt.seed);
    return inst;
}

void emit(const Options& opt, const std::string& text) {
    if (opt.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.out, std::ios::binary);
    if (!out) ratchet::fail("validation-error", "cannot write " + opt.out);
    out << text;
}

void emit_csv(const Options& opt, const std::string& text) {
    if (opt.csv.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.csv, std::ios::binary);
    if (!out) ratchet::fail("validation-error", "cannot write " + opt.csv);
    out << text;
}

std::string sweep_rows_json(const std::vector<ratchet::SweepRow>& rows) {
    std::string out = "[";
    bool first = true;
    for (const auto& r : rows) {
        if (!first) out += ",";
        first = false;
        std::vector<std::pair<std::string, std::string>> members;
        members.emplace_back("param", ratchet::json_number(r.param));
        if (r.error.empty()) {
            members.emplace_back("p_star", ratchet::json_number(r.p_star));
            members.emplace_back("p_A_commit", ratchet::json_number(r.p_A_commit));
            members.emplace_back("p_R_commit", ratchet::json_number(r.p_R_commit));
            members.emplace_back("p_A_eq", ratchet::json_number(r.p_A_eq));
            members.emplace_back("p_R_eq", ratchet::json_number(r.p_R_eq));
            members.emplace_back("benchmark", ratchet::json_number(r.benchmark));
            members.emplace_back("commit_revenue", ratchet::json_number(r.commit_revenue));
            members.emplace_back("eq_revenue", ratchet::json_number(r.eq_revenue));
        } else {
            members.emplace_back("error", ratchet::json_string(r.error));
        }
        std::string obj = ratchet::json_object(members);
        while (!obj.empty() && (obj.back() == '\n')) obj.pop_back();
        out += obj;
    }
    out += "]\n";
    return out;
}

int exit_code_for(const ratchet::Error& e) {
    return e.code() == "assertion-failure" ? 2 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"limited-commitment dynamic pricing toolkit"};
    app.require_subcommand(1);

    Options opt;
    std::string scenario_path, sweep_path, reproduce_id, oracle_query;

    auto* cmd_check = app.add_subcommand("check", "run the assumption checkers");
    auto* cmd_monopoly = app.add_subcommand("monopoly", "first-period monopoly price");
    auto* cmd_relax = app.add_subcommand("relax", "relaxed screening program optimum");
    auto* cmd_commit = app.add_subcommand("commit", "unconstrained commitment optimum");
    auto* cmd_eq = app.add_subcommand("equilibrium", "solve for the PBE-star outcome");
    auto* cmd_enum = app.add_subcommand("enumerate", "enumerate finite-game equilibria");
    auto* cmd_multi = app.add_subcommand("multi", "multi-period solve, commit and spot");
    auto* cmd_sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
    auto* cmd_repro = app.add_subcommand("reproduce", "re-run a bundled example");
    auto* cmd_oracle = app.add_subcommand("oracle", "brute-force oracle query");

    for (CLI::App* cmd : {cmd_check, cmd_monopoly, cmd_relax, cmd_commit, cmd_eq, cmd_enum,
                          cmd_multi, cmd_sweep, cmd_oracle})
        cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
    cmd_sweep->add_option("sweepspec", sweep_path, "sweep spec JSON file")->required();
    cmd_repro->add_option("id", reproduce_id, "example id")->required();
    cmd_oracle->add_option("query", oracle_query, "monopoly | relax | commit | threshold:p1,pA,pR")
        ->required();
    for (CLI::App* cmd : {cmd_check, cmd_monopoly, cmd_relax, cmd_commit, cmd_eq, cmd_enum,
                          cmd_multi, cmd_sweep, cmd_repro, cmd_oracle})
        add_global_flags(cmd, opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_check->parsed()) {
            emit(opt, ratchet::to_json(ratchet::check_instance(build_instance(scenario_path, opt))));
        } else if (cmd_monopoly->parsed()) {
            const ratchet::Instance inst = build_instance(scenario_path, opt);
            emit(opt, ratchet::to_json(ratchet::monopoly_price(ratchet::first_period_marginal(inst))));
        } else if (cmd_relax->parsed()) {
            const ratchet::Instance inst = build_instance(scenario_path, opt);
            emit(opt, ratchet::to_json(ratchet::solve_relaxed(inst, opt.threads)));
        } else if (cmd_commit->parsed()) {
            const ratchet::Instance inst = build_instance(scenario_path, opt);
            emit(opt, ratchet::to_json(ratchet::commitment_optimum(inst, opt.threads)));
        } else if (cmd_eq->parsed()) {
            const ratchet::Instance inst = build_instance(scenario_path, opt);
            const ratchet::EquilibriumOutcome outcome = ratchet::solve_pbe_star(inst, opt.threads);
            const ratchet::VerificationReport report = ratchet::verify_equilibrium(outcome, inst);
            emit(opt, ratchet::json_object({{"outcome", ratchet::to_json(outcome)},
                                            {"verification", ratchet::to_json(report)}}));
        } else if (cmd_enum->parsed()) {
            const ratchet::Instance inst = build_instance(scenario_path, opt);
            if (inst.model != ratchet::ModelKind::Discrete)
                ratchet::fail("validation-error", "enumerate needs a discrete-model scenario");
            const auto& game = inst.game.value();
            const auto star = ratchet::enumerate_discrete(game, ratchet::BeliefFilter::PbeStar);
            const auto all =
                ratchet::enumerate_discrete(game, ratchet::BeliefFilter::Unrestricted);
            emit(opt, ratchet::json_object({{"pbe_star", ratchet::to_json(star)},
                                            {"unrestricted", ratchet::to_json(all)}}));
        } else if (cmd_multi->parsed()) {
            const ratchet::Instance inst = build_instance(scenario_path, opt);
            const auto commit = ratchet::solve_multi_period(inst, true, opt.threads);
            std::string spot_json;
            try {
                spot_json = ratchet::to_json(ratchet::solve_multi_period(inst, false, opt.threads));
            } catch (const ratchet::Error& e) {
                spot_json = ratchet::json_object({{"error", ratchet::json_string(e.code())},
                                                  {"message", ratchet::json_string(e.what())}});
            }
            emit(opt, ratchet::json_object(
                          {{"commit", ratchet::to_json(commit)}, {"spot", spot_json}}));
        } else if (cmd_sweep->parsed()) {
            ratchet::Scenario base = ratchet::Scenario::load(scenario_path);
            if (opt.grid >= 2) base.set_grid(opt.grid);
            const ratchet::SweepSpec spec = ratchet::load_sweep_spec(sweep_path);
            const auto rows = ratchet::sweep_rows(base, spec, opt.threads);
            if (!opt.out.empty()) emit(opt, sweep_rows_json(rows));
            if (opt.out.empty() || !opt.csv.empty()) emit_csv(opt, ratchet::sweep_csv(rows));
        } else if (cmd_repro->parsed()) {
            const ratchet::ReproduceReport report = ratchet::reproduce_report(reproduce_id);
            emit(opt, ratchet::to_json(report));
            if (!report.pass) {
                std::fprintf(stderr, "{\"error\": \"assertion-failure\", \"id\": %s}\n",
                             ratchet::json_string(report.id).c_str());
                return 2;
            }
        } else if (cmd_oracle->parsed()) {
            const ratchet::Instance inst = build_instance(scenario_path, opt);
            const double value = ratchet::oracle_bruteforce(inst, oracle_query);
            emit(opt, ratchet::json_object({{"query", ratchet::json_string(oracle_query)},
                                            {"value", ratchet::json_number(value)}}));
        }
    } catch (const ratchet::Error& e) {
        std::fprintf(stderr, "{\"error\": %s, \"message\": %s}\n",
                     ratchet::json_string(e.code()).c_str(),
                     ratchet::json_string(e.what()).c_str());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "{\"error\": \"internal-error\", \"message\": %s}\n",
                     ratchet::json_string(std::string(e.what())).c_str());
        return 3;
    }
    return 0;
}

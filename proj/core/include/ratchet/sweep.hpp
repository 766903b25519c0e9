#pragma once

#include "ratchet/scenario.hpp"

#include <string>
#include <vector>

namespace ratchet {

struct SweepSpec {
    std::string parameter; // dotted path, e.g. "ar1.alpha" or "delta"
    std::vector<double> values;
};

SweepSpec load_sweep_spec(const std::string& path);
SweepSpec sweep_spec_from_text(const std::string& text);

struct SweepRow {
    double param = 0.0;
    double p_star = 0.0;
    double p_A_commit = 0.0, p_R_commit = 0.0;
    double p_A_eq = 0.0, p_R_eq = 0.0;
    double benchmark = 0.0, commit_revenue = 0.0, eq_revenue = 0.0;
    double price_step = 0.0;   // grid spacing of the row's instance, for slack checks
    std::string error;         // error code when the row failed; numeric fields unset
};

// One row per value, ordered by ascending parameter value. Row failures are
// recorded in the error field without aborting the rest of the sweep. Rows
// are independent and may be computed in parallel; output order is fixed.
std::vector<SweepRow> sweep_rows(const Scenario& base, const SweepSpec& spec, int threads = 1);

std::string sweep_csv(const std::vector<SweepRow>& rows);

// sweep_csv(sweep_rows(...)); the CSV has a fixed header and %.12g cells.
std::string run_sweep(const Scenario& base, const SweepSpec& spec, int threads = 1);

} // namespace ratchet

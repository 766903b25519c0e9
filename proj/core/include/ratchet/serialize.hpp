#pragma once

#include "ratchet/assumptions.hpp"
#include "ratchet/equilibrium.hpp"
#include "ratchet/mechanism.hpp"
#include "ratchet/pricing.hpp"
#include "ratchet/reproduce.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ratchet {

// JSON renderings of the solver results, with stable field order so that
// identical inputs give byte-identical files.
std::string to_json(const std::vector<AssumptionReport>& reports);
std::string to_json(const MonopolyResult& result);
std::string to_json(const PostingBenchmark& benchmark);
std::string to_json(const RelaxedSolution& solution);
std::string to_json(const Claim1Certificate& certificate);
std::string to_json(const CommitmentResult& result);
std::string to_json(const EquilibriumOutcome& outcome);
std::string to_json(const std::vector<EquilibriumOutcome>& outcomes);
std::string to_json(const std::vector<ContinuationPoint>& points);
std::string to_json(const VerificationReport& report);
std::string to_json(const ReproduceReport& report);

// Compose an object from already-serialized members, preserving order.
std::string json_object(const std::vector<std::pair<std::string, std::string>>& members);
// Bare JSON fragments (no trailing newline), for assembling json_object members.
std::string json_string(const std::string& value);
std::string json_number(double value);

} // namespace ratchet

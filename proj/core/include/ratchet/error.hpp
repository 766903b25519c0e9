#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ratchet {

// All library failures carry a stable machine-readable code alongside the
// human-readable message. Codes used across the library:
//   invalid-bounds, invalid-grid, grid-mismatch, empty-truncation, empty-event,
//   discrete-prior-unsupported, multiple-crossings, constraint-violated,
//   assumption-violated, non-monotone-boundary, size-limit-exceeded,
//   horizon-limit, no-fixed-point, budget-exceeded, parse-error,
//   validation-error, assertion-failure
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
    throw Error(code, message);
}

} // namespace ratchet

#pragma once

#include "ratchet/instance.hpp"

#include <cstddef>
#include <string>

namespace ratchet {

// A scenario file: strict-schema JSON, kept in source form so parameter
// overrides rebuild the instance from scratch. Unknown keys are rejected
// with the offending field path.
class Scenario {
public:
    static Scenario load(const std::string& path);
    static Scenario from_text(const std::string& text);

    Instance build() const;

    // Dotted override, e.g. "delta" or "ar1.alpha" (the latter retargets
    // every ar1 transition in the file, keeping stationary forms stationary).
    void set_parameter(const std::string& path, double value);
    // Square grid override applied at build time to n_theta and n_price.
    void set_grid(std::size_t n);

    const std::string& text() const { return text_; }

private:
    std::string text_;
    std::size_t grid_override_ = 0;
};

} // namespace ratchet

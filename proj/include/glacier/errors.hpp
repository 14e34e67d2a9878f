#pragma once

#include <stdexcept>
#include <string>

namespace glacier {

// File-level problems: missing paths, malformed headers, truncated payloads.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Inputs that parse fine but violate a contract: misaligned grids, value
// count mismatches, non-binary masks where a mask is required.
struct structural_error : std::runtime_error {
    explicit structural_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or missing configuration. The CLI maps this to exit code 2; the two
// error types above map to exit code 3.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace glacier

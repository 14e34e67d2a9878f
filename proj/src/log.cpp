#include "glacier/log.hpp"

#include <iostream>

namespace glacier {

namespace {
bool g_verbose = false;
}

void set_verbose(bool on) { g_verbose = on; }
bool verbose() { return g_verbose; }

void log_warn(const std::string& msg) {
    std::cerr << "warning: " << msg << "\n";
}

void log_info(const std::string& msg) {
    if (g_verbose) std::cerr << msg << "\n";
}

} // namespace glacier

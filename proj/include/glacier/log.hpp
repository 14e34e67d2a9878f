#pragma once

#include <string>

namespace glacier {

// Warnings always reach stderr; info lines only when verbose is on.
void set_verbose(bool on);
bool verbose();
void log_warn(const std::string& msg);
void log_info(const std::string& msg);

} // namespace glacier

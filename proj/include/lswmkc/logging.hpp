#pragma once

#include <string_view>

namespace lswmkc::log {

// Reads LSWMKC_LOG (trace|debug|info|warn|error|off, default warn).
void init_from_env();

void debug(std::string_view msg);
void info(std::string_view msg);
void warn(std::string_view msg);

}  // namespace lswmkc::log

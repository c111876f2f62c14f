#pragma once

#include <string>

namespace bankembed {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

void set_log_level(LogLevel level);
// Accepts "error" | "warn" | "info" | "debug"; returns false on unknown names.
bool set_log_level(const std::string& name);
LogLevel log_level();

void log_error(const std::string& msg);
void log_warn(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace bankembed

#include "bankembed/log.hpp"

#include <atomic>
#include <iostream>

namespace bankembed {

namespace {
std::atomic<LogLevel> g_level{LogLevel::warn};

void emit(LogLevel level, const char* tag, const std::string& msg) {
  if (level <= g_level.load(std::memory_order_relaxed)) {
    std::cerr << "[" << tag << "] " << msg << "\n";
  }
}
}  // namespace

void set_log_level(LogLevel level) { g_level.store(level); }

bool set_log_level(const std::string& name) {
  if (name == "error") set_log_level(LogLevel::error);
  else if (name == "warn") set_log_level(LogLevel::warn);
  else if (name == "info") set_log_level(LogLevel::info);
  else if (name == "debug") set_log_level(LogLevel::debug);
  else return false;
  return true;
}

LogLevel log_level() { return g_level.load(); }

void log_error(const std::string& msg) { emit(LogLevel::error, "error", msg); }
void log_warn(const std::string& msg) { emit(LogLevel::warn, "warn", msg); }
void log_info(const std::string& msg) { emit(LogLevel::info, "info", msg); }
void log_debug(const std::string& msg) { emit(LogLevel::debug, "debug", msg); }

}  // namespace bankembed

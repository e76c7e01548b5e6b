#include "qtp/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string_view>

namespace qtp {
namespace {

LogLevel level_from_env() {
  const char* v = std::getenv("QTP_LOG");
  if (!v) return LogLevel::Warn;
  const std::string_view s(v);
  if (s == "error") return LogLevel::Error;
  if (s == "info") return LogLevel::Info;
  if (s == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

std::atomic<int>& current() {
  static std::atomic<int> level{static_cast<int>(level_from_env())};
  return level;
}

std::mutex g_log_mutex;

}  // namespace

LogLevel log_level() { return static_cast<LogLevel>(current().load()); }
void set_log_level(LogLevel level) { current().store(static_cast<int>(level)); }

void log_message(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) > current().load()) return;
  static constexpr const char* kTags[] = {"error", "warn", "info", "debug"};
  std::lock_guard lock(g_log_mutex);
  std::cerr << "[qtp " << kTags[static_cast<int>(level)] << "] " << msg << '\n';
}

}  // namespace qtp

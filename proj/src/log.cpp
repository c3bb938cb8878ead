#include "deqe/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace deqe {

namespace {
std::atomic<LogLevel> g_level{LogLevel::Warn};
std::mutex g_mutex;
}  // namespace

void set_log_level(LogLevel level) { g_level = level; }

LogLevel log_level() { return g_level; }

void log(LogLevel level, std::string_view message) {
  if (level < g_level.load()) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "de-qe: " << message << '\n';
}

}  // namespace deqe

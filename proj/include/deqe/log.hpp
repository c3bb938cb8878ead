#pragma once

#include <string_view>

namespace deqe {

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Quiet = 3 };

// Diagnostics go to stderr; data never does.
void set_log_level(LogLevel level);
LogLevel log_level();

void log(LogLevel level, std::string_view message);

inline void log_info(std::string_view message) { log(LogLevel::Info, message); }
inline void log_warn(std::string_view message) { log(LogLevel::Warn, message); }

}  // namespace deqe

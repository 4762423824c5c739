#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace ofl {

enum class LogLevel { kError = 0, kInfo = 1, kTrace = 2 };

// Level comes from OFL_LOG={error|info|trace}; anything else means error.
inline LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("OFL_LOG");
    if (env == nullptr) return LogLevel::kError;
    std::string v(env);
    if (v == "trace") return LogLevel::kTrace;
    if (v == "info") return LogLevel::kInfo;
    return LogLevel::kError;
  }();
  return level;
}

inline bool log_enabled(LogLevel level) {
  return static_cast<int>(level) <= static_cast<int>(log_level());
}

inline void log_line(LogLevel level, const std::string& message) {
  if (log_enabled(level)) std::fprintf(stderr, "[ofl] %s\n", message.c_str());
}

}  // namespace ofl

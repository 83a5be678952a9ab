#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>
#include <string_view>

namespace orbitsplit {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

namespace detail {

inline LogLevel parse_log_level(const char* s) {
    if (s == nullptr) return LogLevel::Info;
    std::string_view v(s);
    if (v == "error") return LogLevel::Error;
    if (v == "warn") return LogLevel::Warn;
    if (v == "info") return LogLevel::Info;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Info;
}

inline std::mutex& log_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace detail

// Level comes from the ORBITSPLIT_LOG environment variable (error|warn|info|debug).
inline LogLevel log_level() {
    static LogLevel level = detail::parse_log_level(std::getenv("ORBITSPLIT_LOG"));
    return level;
}

inline void log_message(LogLevel level, std::string_view msg) {
    if (level > log_level()) return;
    static constexpr const char* names[] = {"error", "warn", "info", "debug"};
    std::lock_guard<std::mutex> lock(detail::log_mutex());
    std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << "\n";
}

inline void log_error(std::string_view msg) { log_message(LogLevel::Error, msg); }
inline void log_warn(std::string_view msg) { log_message(LogLevel::Warn, msg); }
inline void log_info(std::string_view msg) { log_message(LogLevel::Info, msg); }
inline void log_debug(std::string_view msg) { log_message(LogLevel::Debug, msg); }

}  // namespace orbitsplit

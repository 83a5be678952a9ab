#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace orbitsplit {

// Shortest decimal representation that round-trips the exact double.
// All CSV/JSONL emitters go through this so identical runs produce
// byte-identical files.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    }
    return std::string(buf, ptr);
}

}  // namespace orbitsplit

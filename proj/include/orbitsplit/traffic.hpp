#pragma once

// Diurnal RU traffic generation and CSV trace I/O.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "orbitsplit/format.hpp"

namespace orbitsplit {

struct TrafficProfile {
    enum class Kind { Business, Residential, Custom };

    Kind kind = Kind::Business;
    double peak_mbps = 200.0;
    double mean_mbps = 100.0;
    double peak_hour = 12.0;
    double noise_std_mbps = 5.0;
    std::uint64_t seed = 1;

    static TrafficProfile business(std::uint64_t seed = 1) {
        TrafficProfile p;
        p.kind = Kind::Business;
        p.peak_hour = 12.0;
        p.seed = seed;
        return p;
    }

    static TrafficProfile residential(std::uint64_t seed = 1) {
        TrafficProfile p;
        p.kind = Kind::Residential;
        p.peak_hour = 20.0;
        p.seed = seed;
        return p;
    }

    void validate() const {
        if (!(mean_mbps > 0.0) || mean_mbps > peak_mbps) {
            throw std::invalid_argument("traffic profile requires 0 < mean_mbps <= peak_mbps");
        }
        if (peak_hour < 0.0 || peak_hour >= 24.0) {
            throw std::invalid_argument("traffic profile requires 0 <= peak_hour < 24");
        }
        if (noise_std_mbps < 0.0) {
            throw std::invalid_argument("traffic profile requires noise_std_mbps >= 0");
        }
    }
};

struct TrafficSample {
    long step = 0;
    double time_of_day_h = 0.0;
    double lambda_ru_mbps = 0.0;
};

inline constexpr const char* kTraceCsvHeader = "step,time_of_day_h,lambda_ru_mbps";

// Raised-cosine day curve: mean at the half-way points, peak at peak_hour,
// symmetric trough twelve hours later. Gaussian jitter on top, clamped so the
// emitted load stays inside [0, peak].
inline std::vector<TrafficSample> generate(const TrafficProfile& profile, int steps_per_day,
                                           int days = 1) {
    profile.validate();
    if (steps_per_day < 1) throw std::invalid_argument("steps_per_day must be >= 1");
    if (days < 1) throw std::invalid_argument("days must be >= 1");

    std::mt19937_64 rng(profile.seed);
    std::normal_distribution<double> noise(0.0, profile.noise_std_mbps > 0.0
                                                    ? profile.noise_std_mbps
                                                    : 1.0);
    const double two_pi = 2.0 * 3.14159265358979323846;

    std::vector<TrafficSample> out;
    out.reserve(static_cast<std::size_t>(steps_per_day) * days);
    for (long k = 0; k < static_cast<long>(steps_per_day) * days; ++k) {
        const double tod = static_cast<double>(k % steps_per_day) * 24.0 / steps_per_day;
        double v = profile.mean_mbps +
                   (profile.peak_mbps - profile.mean_mbps) *
                       std::cos(two_pi * (tod - profile.peak_hour) / 24.0);
        v = std::clamp(v, 0.0, profile.peak_mbps);
        if (profile.noise_std_mbps > 0.0) v += noise(rng);
        v = std::clamp(v, 0.0, profile.peak_mbps);
        out.push_back({k, tod, v});
    }
    return out;
}

inline void save_trace(const std::vector<TrafficSample>& trace, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << kTraceCsvHeader << "\n";
    for (const auto& s : trace) {
        f << s.step << ',' << format_double(s.time_of_day_h) << ','
          << format_double(s.lambda_ru_mbps) << "\n";
    }
    if (!f) throw std::runtime_error("write failed for " + path);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

inline double parse_csv_double(const std::string& s, const std::string& path, long line_no) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw std::runtime_error(path + ": parse error at line " + std::to_string(line_no) +
                                 ": bad number '" + s + "'");
    }
    return v;
}

inline long parse_csv_long(const std::string& s, const std::string& path, long line_no) {
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::runtime_error(path + ": parse error at line " + std::to_string(line_no) +
                                 ": bad integer '" + s + "'");
    }
    return v;
}

}  // namespace detail

// Strict reader for the schema above. An empty file is an empty trace; a file
// with content must start with the exact header.
inline std::vector<TrafficSample> load_trace(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open trace file " + path);

    std::vector<TrafficSample> out;
    std::string line;
    long line_no = 0;
    bool header_seen = false;
    while (std::getline(f, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kTraceCsvHeader) {
                throw std::runtime_error(path + ": parse error at line 1: expected header '" +
                                         std::string(kTraceCsvHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 3) {
            throw std::runtime_error(path + ": parse error at line " + std::to_string(line_no) +
                                     ": expected 3 fields, got " + std::to_string(fields.size()));
        }
        TrafficSample s;
        s.step = detail::parse_csv_long(fields[0], path, line_no);
        s.time_of_day_h = detail::parse_csv_double(fields[1], path, line_no);
        s.lambda_ru_mbps = detail::parse_csv_double(fields[2], path, line_no);
        if (s.lambda_ru_mbps < 0.0) {
            throw std::runtime_error(path + ": negative traffic at line " +
                                     std::to_string(line_no));
        }
        if (!out.empty() && s.step <= out.back().step) {
            throw std::runtime_error(path + ": steps not strictly increasing at line " +
                                     std::to_string(line_no));
        }
        out.push_back(s);
    }
    return out;
}

inline double peak_lambda(const std::vector<TrafficSample>& trace) {
    double peak = 0.0;
    for (const auto& s : trace) peak = std::max(peak, s.lambda_ru_mbps);
    return peak;
}

}  // namespace orbitsplit

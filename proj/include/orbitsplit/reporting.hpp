#pragma once

// Run metrics (per-episode normalized power, short/long-term reward, negative
// reward fraction, option-by-hour histogram) and deterministic CSV/JSONL/SVG
// emission.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "orbitsplit/dqn.hpp"
#include "orbitsplit/format.hpp"
#include "orbitsplit/traffic.hpp"

namespace orbitsplit {

inline constexpr int kShortTermWindow = 50;  // episodes

struct RunMetrics {
    int episodes = 0;
    double p_norm_w = 0.0;
    std::vector<double> episode_norm_power;
    std::vector<double> episode_mean_reward;
    std::vector<double> short_term_reward;
    std::vector<double> long_term_reward;
    std::vector<double> negative_fraction_running;
    double negative_fraction = 0.0;
    std::array<std::array<long, 7>, 24> option_by_hour{};
    bool has_option_by_hour = false;
};

// The trace, when provided, maps each step to its time of day for the
// option-by-hour histogram: step k of an episode sees trace[(k+1) mod N], the
// sample its reward was evaluated against.
inline RunMetrics compute_metrics(const std::vector<TrainStepLog>& log, double p_norm_w,
                                  const std::vector<TrafficSample>* trace = nullptr) {
    if (log.empty()) throw std::invalid_argument("compute_metrics: empty log");
    if (!(p_norm_w > 0.0)) throw std::invalid_argument("compute_metrics: p_norm_w must be positive");

    RunMetrics m;
    m.p_norm_w = p_norm_w;

    // Per-episode accumulation; episodes appear in order in the log.
    std::vector<double> ep_power_sum, ep_reward_sum;
    std::vector<long> ep_steps, ep_negatives;
    int within_episode = 0;
    for (const auto& row : log) {
        if (row.episode < 0) throw std::invalid_argument("compute_metrics: negative episode index");
        if (static_cast<std::size_t>(row.episode) >= ep_steps.size()) {
            ep_power_sum.resize(static_cast<std::size_t>(row.episode) + 1, 0.0);
            ep_reward_sum.resize(static_cast<std::size_t>(row.episode) + 1, 0.0);
            ep_steps.resize(static_cast<std::size_t>(row.episode) + 1, 0);
            ep_negatives.resize(static_cast<std::size_t>(row.episode) + 1, 0);
            within_episode = 0;
        }
        const auto e = static_cast<std::size_t>(row.episode);
        ep_power_sum[e] += row.total_w / p_norm_w;
        ep_reward_sum[e] += row.reward;
        ep_steps[e] += 1;
        if (row.reward < 0.0) ep_negatives[e] += 1;
        if (trace != nullptr && !trace->empty()) {
            const auto& s = (*trace)[(static_cast<std::size_t>(within_episode) + 1) % trace->size()];
            int hour = static_cast<int>(std::floor(s.time_of_day_h)) % 24;
            if (hour < 0) hour += 24;
            if (row.split >= 0 && row.split < 7) {
                m.option_by_hour[static_cast<std::size_t>(hour)][static_cast<std::size_t>(row.split)] += 1;
            }
        }
        ++within_episode;
    }
    m.has_option_by_hour = trace != nullptr;
    m.episodes = static_cast<int>(ep_steps.size());

    double reward_total = 0.0;
    long steps_total = 0, negatives_total = 0;
    std::vector<double> window_rewards;  // per-episode sums inside the short-term window
    std::vector<long> window_steps;
    for (std::size_t e = 0; e < ep_steps.size(); ++e) {
        if (ep_steps[e] == 0) throw std::invalid_argument("compute_metrics: episode with no steps");
        m.episode_norm_power.push_back(ep_power_sum[e] / static_cast<double>(ep_steps[e]));
        m.episode_mean_reward.push_back(ep_reward_sum[e] / static_cast<double>(ep_steps[e]));

        reward_total += ep_reward_sum[e];
        steps_total += ep_steps[e];
        negatives_total += ep_negatives[e];
        m.long_term_reward.push_back(reward_total / static_cast<double>(steps_total));
        m.negative_fraction_running.push_back(static_cast<double>(negatives_total) /
                                              static_cast<double>(steps_total));

        window_rewards.push_back(ep_reward_sum[e]);
        window_steps.push_back(ep_steps[e]);
        if (window_rewards.size() > static_cast<std::size_t>(kShortTermWindow)) {
            window_rewards.erase(window_rewards.begin());
            window_steps.erase(window_steps.begin());
        }
        double wr = 0.0;
        long ws = 0;
        for (std::size_t i = 0; i < window_rewards.size(); ++i) {
            wr += window_rewards[i];
            ws += window_steps[i];
        }
        m.short_term_reward.push_back(wr / static_cast<double>(ws));
    }
    m.negative_fraction = static_cast<double>(negatives_total) / static_cast<double>(steps_total);
    return m;
}

inline double negative_fraction_tail(const std::vector<TrainStepLog>& log, double tail_fraction) {
    if (log.empty()) throw std::invalid_argument("negative_fraction_tail: empty log");
    if (!(tail_fraction > 0.0) || tail_fraction > 1.0) {
        throw std::invalid_argument("negative_fraction_tail: fraction must be in (0,1]");
    }
    const std::size_t start =
        log.size() - static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(log.size())));
    long neg = 0;
    for (std::size_t i = start; i < log.size(); ++i) {
        if (log[i].reward < 0.0) ++neg;
    }
    return static_cast<double>(neg) / static_cast<double>(log.size() - start);
}

inline constexpr const char* kMetricsCsvHeader =
    "episode,mean_norm_power,mean_reward,short_term_reward,long_term_reward,"
    "negative_fraction_running,p_norm_w";

inline void emit_csv(const RunMetrics& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << kMetricsCsvHeader << "\n";
    for (int e = 0; e < m.episodes; ++e) {
        const auto i = static_cast<std::size_t>(e);
        f << e << ',' << format_double(m.episode_norm_power[i]) << ','
          << format_double(m.episode_mean_reward[i]) << ','
          << format_double(m.short_term_reward[i]) << ','
          << format_double(m.long_term_reward[i]) << ','
          << format_double(m.negative_fraction_running[i]) << ','
          << format_double(m.p_norm_w) << "\n";
    }
    if (!f) throw std::runtime_error("write failed for " + path);
}

inline void emit_jsonl(const RunMetrics& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    for (int e = 0; e < m.episodes; ++e) {
        const auto i = static_cast<std::size_t>(e);
        nlohmann::json j;
        j["schema_version"] = 1;
        j["episode"] = e;
        j["mean_norm_power"] = m.episode_norm_power[i];
        j["mean_reward"] = m.episode_mean_reward[i];
        j["short_term_reward"] = m.short_term_reward[i];
        j["long_term_reward"] = m.long_term_reward[i];
        j["negative_fraction_running"] = m.negative_fraction_running[i];
        j["p_norm_w"] = m.p_norm_w;
        f << j.dump() << "\n";
    }
    if (!f) throw std::runtime_error("write failed for " + path);
}

namespace detail {

inline void svg_series(std::ofstream& f, const std::vector<double>& ys, double x0, double y0,
                       double width, double height, const std::string& label) {
    double lo = ys.empty() ? 0.0 : ys[0];
    double hi = lo;
    for (const double y : ys) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    if (hi - lo < 1e-12) {
        hi = lo + 1.0;  // flat series: draw a horizontal line mid-box
        lo -= 1.0;
    }
    f << "<rect x=\"" << format_double(x0) << "\" y=\"" << format_double(y0) << "\" width=\""
      << format_double(width) << "\" height=\"" << format_double(height)
      << "\" fill=\"none\" stroke=\"#999\"/>\n";
    f << "<text x=\"" << format_double(x0 + 4.0) << "\" y=\"" << format_double(y0 + 14.0)
      << "\" font-size=\"11\" font-family=\"monospace\">" << label << "</text>\n";
    f << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" points=\"";
    const std::size_t n = ys.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double px = x0 + (n == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n - 1)) * width;
        const double py = y0 + height - (ys[i] - lo) / (hi - lo) * height;
        if (i > 0) f << ' ';
        f << format_double(px) << ',' << format_double(py);
    }
    f << "\"/>\n";
}

}  // namespace detail

// One stacked chart per series; plain hand-emitted SVG, no style dependencies.
inline void emit_svg(const RunMetrics& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    const double w = 640.0, h = 120.0, pad = 10.0;
    const int charts = 4;
    f << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(w + 2 * pad)
      << "\" height=\"" << format_double(charts * (h + pad) + pad) << "\">\n";
    double y = pad;
    detail::svg_series(f, m.episode_norm_power, pad, y, w, h, "normalized power per episode");
    y += h + pad;
    detail::svg_series(f, m.short_term_reward, pad, y, w, h, "short-term reward (50-episode window)");
    y += h + pad;
    detail::svg_series(f, m.long_term_reward, pad, y, w, h, "long-term reward");
    y += h + pad;
    detail::svg_series(f, m.negative_fraction_running, pad, y, w, h, "negative reward fraction");
    f << "</svg>\n";
    if (!f) throw std::runtime_error("write failed for " + path);
}

enum class MetricsFormat { Csv, Jsonl, Svg };

inline void emit(const RunMetrics& m, MetricsFormat format, const std::string& path) {
    switch (format) {
        case MetricsFormat::Csv: emit_csv(m, path); return;
        case MetricsFormat::Jsonl: emit_jsonl(m, path); return;
        case MetricsFormat::Svg: emit_svg(m, path); return;
    }
    throw std::invalid_argument("unknown metrics format");
}

inline constexpr const char* kTrainingLogCsvHeader =
    "step,episode,epsilon,reward,loss,action,placement,split,total_w";

inline void write_training_log_csv(const std::vector<TrainStepLog>& log, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << kTrainingLogCsvHeader << "\n";
    for (const auto& r : log) {
        f << r.step << ',' << r.episode << ',' << format_double(r.epsilon) << ','
          << format_double(r.reward) << ',' << format_double(r.loss) << ',' << r.action << ','
          << r.placement << ',' << r.split << ',' << format_double(r.total_w) << "\n";
    }
    if (!f) throw std::runtime_error("write failed for " + path);
}

inline std::string training_log_csv_text(const std::vector<TrainStepLog>& log) {
    std::string out(kTrainingLogCsvHeader);
    out += "\n";
    for (const auto& r : log) {
        out += std::to_string(r.step);
        out += ',';
        out += std::to_string(r.episode);
        out += ',';
        out += format_double(r.epsilon);
        out += ',';
        out += format_double(r.reward);
        out += ',';
        out += format_double(r.loss);
        out += ',';
        out += std::to_string(r.action);
        out += ',';
        out += std::to_string(r.placement);
        out += ',';
        out += std::to_string(r.split);
        out += ',';
        out += format_double(r.total_w);
        out += "\n";
    }
    return out;
}

}  // namespace orbitsplit

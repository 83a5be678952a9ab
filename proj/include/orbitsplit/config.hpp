#pragma once

// Experiment configuration: an INI-style file with sections mirroring the
// module layout ([model], [traffic], [reward], [agent], [run]). Unknown
// sections or keys are rejected; every run can be reproduced from the
// resolved snapshot this module serializes.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "orbitsplit/dqn.hpp"
#include "orbitsplit/env.hpp"
#include "orbitsplit/format.hpp"
#include "orbitsplit/model.hpp"
#include "orbitsplit/traffic.hpp"

namespace orbitsplit {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrafficConfig {
    std::string profile = "business";  // business | residential | custom
    double peak_mbps = 200.0;
    double mean_mbps = 100.0;
    double peak_hour = -1.0;  // < 0 means "profile default"
    double noise_std_mbps = 5.0;
    int steps_per_day = 96;
    int days = 1;
    std::uint64_t seed = 1;
    std::string trace_path;  // when set, load this file instead of generating

    TrafficProfile resolve_profile() const {
        TrafficProfile p;
        if (profile == "business") {
            p = TrafficProfile::business(seed);
        } else if (profile == "residential") {
            p = TrafficProfile::residential(seed);
        } else if (profile == "custom") {
            p.kind = TrafficProfile::Kind::Custom;
            p.seed = seed;
            if (peak_hour < 0.0) {
                throw ConfigError("traffic.peak_hour is required for the custom profile");
            }
        } else {
            throw ConfigError("traffic.profile must be business, residential or custom");
        }
        p.peak_mbps = peak_mbps;
        p.mean_mbps = mean_mbps;
        p.noise_std_mbps = noise_std_mbps;
        if (peak_hour >= 0.0) p.peak_hour = peak_hour;
        return p;
    }
};

struct RunConfig {
    std::string out_dir = "out";
    int episode_length = 100;
    bool oracle_compare = true;  // print the oracle gap in train summaries
};

struct ExperimentConfig {
    ModelParams model = ModelParams::defaults();
    TrafficConfig traffic;
    RewardWeights reward;
    AgentHyperparams agent;
    RunConfig run;

    void validate() const {
        for (const auto& n : model.nodes) {
            if (!(n.idle_power_w >= 0.0)) throw ConfigError("model: idle power must be non-negative");
            if (!(n.epo_j_per_to >= 0.0)) throw ConfigError("model: epo must be non-negative");
            if (!(n.comp_max_gops > 0.0)) throw ConfigError("model: compute capacity must be positive");
        }
        for (const auto& l : model.links) {
            if (!(l.distance_m > 0.0)) throw ConfigError("model: link distance must be positive");
            if (!(l.capacity_mbps > 0.0)) throw ConfigError("model: link capacity must be positive");
            if (!(l.tx_power_w >= 0.0)) throw ConfigError("model: link tx power must be non-negative");
        }
        for (const double l : model.split_latency_ms) {
            if (!(l > 0.0)) throw ConfigError("model: split latency requirements must be positive");
        }
        if (!(model.speed_of_light_m_per_s > 0.0)) {
            throw ConfigError("model.speed_of_light_m_per_s must be positive");
        }
        const auto& loads = model.loads;
        if (loads.comp_phy_gops < 0.0 || loads.comp_mac_gops < 0.0 || loads.comp_rlc_gops < 0.0 ||
            loads.comp_pdcp_gops < 0.0) {
            throw ConfigError("model: function loads must be non-negative");
        }
        if (loads.mac_low_fraction < 0.0 || loads.mac_low_fraction > 1.0) {
            throw ConfigError("model.mac_low_fraction must be in [0,1]");
        }
        if (loads.rlc_low_fraction < 0.0 || loads.rlc_low_fraction > 1.0) {
            throw ConfigError("model.rlc_low_fraction must be in [0,1]");
        }

        if (traffic.trace_path.empty()) {
            try {
                traffic.resolve_profile().validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("traffic: ") + e.what());
            }
            if (traffic.steps_per_day < 1) throw ConfigError("traffic.steps_per_day must be >= 1");
            if (traffic.days < 1) throw ConfigError("traffic.days must be >= 1");
        }

        try {
            reward.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("reward: ") + e.what());
        }
        try {
            agent.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("agent: ") + e.what());
        }
        if (run.episode_length < 1) throw ConfigError("run.episode_length must be >= 1");
        if (run.out_dir.empty()) throw ConfigError("run.out_dir must not be empty");
    }
};

namespace detail {

inline double cfg_double(const std::string& v, const std::string& where) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ConfigError(where + ": expected a number, got '" + v + "'");
    }
    return out;
}

inline long long cfg_int(const std::string& v, const std::string& where) {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ConfigError(where + ": expected an integer, got '" + v + "'");
    }
    return out;
}

inline bool cfg_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(where + ": expected a boolean, got '" + v + "'");
}

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return s.substr(a, b - a);
}

}  // namespace detail

// Applies "section.key = value"; throws ConfigError on unknown names.
inline void apply_config_value(ExperimentConfig& cfg, const std::string& section,
                               const std::string& key, const std::string& value) {
    using detail::cfg_bool;
    using detail::cfg_double;
    using detail::cfg_int;
    const std::string where = section + "." + key;

    if (section == "model") {
        auto& m = cfg.model;
        if (key == "gat_idle_w") m.node(NodeId::GAT).idle_power_w = cfg_double(value, where);
        else if (key == "gat_epo_j_per_to") m.node(NodeId::GAT).epo_j_per_to = cfg_double(value, where);
        else if (key == "gat_comp_max_gops") m.node(NodeId::GAT).comp_max_gops = cfg_double(value, where);
        else if (key == "sat_idle_w") m.node(NodeId::SAT).idle_power_w = cfg_double(value, where);
        else if (key == "sat_epo_j_per_to") m.node(NodeId::SAT).epo_j_per_to = cfg_double(value, where);
        else if (key == "sat_comp_max_gops") m.node(NodeId::SAT).comp_max_gops = cfg_double(value, where);
        else if (key == "hap_idle_w") m.node(NodeId::HAP).idle_power_w = cfg_double(value, where);
        else if (key == "hap_epo_j_per_to") m.node(NodeId::HAP).epo_j_per_to = cfg_double(value, where);
        else if (key == "hap_comp_max_gops") m.node(NodeId::HAP).comp_max_gops = cfg_double(value, where);
        else if (key == "sat_link_distance_m") m.links[0].distance_m = cfg_double(value, where);
        else if (key == "sat_link_capacity_mbps") m.links[0].capacity_mbps = cfg_double(value, where);
        else if (key == "sat_link_tx_power_w") m.links[0].tx_power_w = cfg_double(value, where);
        else if (key == "hap_link_distance_m") m.links[1].distance_m = cfg_double(value, where);
        else if (key == "hap_link_capacity_mbps") m.links[1].capacity_mbps = cfg_double(value, where);
        else if (key == "hap_link_tx_power_w") m.links[1].tx_power_w = cfg_double(value, where);
        else if (key == "phy_gops") m.loads.comp_phy_gops = cfg_double(value, where);
        else if (key == "mac_gops") m.loads.comp_mac_gops = cfg_double(value, where);
        else if (key == "rlc_gops") m.loads.comp_rlc_gops = cfg_double(value, where);
        else if (key == "pdcp_gops") m.loads.comp_pdcp_gops = cfg_double(value, where);
        else if (key == "mac_low_fraction") m.loads.mac_low_fraction = cfg_double(value, where);
        else if (key == "rlc_low_fraction") m.loads.rlc_low_fraction = cfg_double(value, where);
        else if (key == "speed_of_light_m_per_s") m.speed_of_light_m_per_s = cfg_double(value, where);
        else if (key == "backhaul_mode") m.backhaul_mode = cfg_bool(value, where);
        else if (key == "latency_req_split0_ms") m.split_latency_ms[0] = cfg_double(value, where);
        else if (key == "latency_req_split1_ms") m.split_latency_ms[1] = cfg_double(value, where);
        else if (key == "latency_req_split2_ms") m.split_latency_ms[2] = cfg_double(value, where);
        else if (key == "latency_req_split3_ms") m.split_latency_ms[3] = cfg_double(value, where);
        else if (key == "latency_req_split4_ms") m.split_latency_ms[4] = cfg_double(value, where);
        else if (key == "latency_req_split5_ms") m.split_latency_ms[5] = cfg_double(value, where);
        else if (key == "latency_req_split6_ms") m.split_latency_ms[6] = cfg_double(value, where);
        else throw ConfigError("unknown key '" + key + "' in section [model]");
    } else if (section == "traffic") {
        auto& t = cfg.traffic;
        if (key == "profile") t.profile = value;
        else if (key == "peak_mbps") t.peak_mbps = cfg_double(value, where);
        else if (key == "mean_mbps") t.mean_mbps = cfg_double(value, where);
        else if (key == "peak_hour") t.peak_hour = cfg_double(value, where);
        else if (key == "noise_std_mbps") t.noise_std_mbps = cfg_double(value, where);
        else if (key == "steps_per_day") t.steps_per_day = static_cast<int>(cfg_int(value, where));
        else if (key == "days") t.days = static_cast<int>(cfg_int(value, where));
        else if (key == "seed") t.seed = static_cast<std::uint64_t>(cfg_int(value, where));
        else if (key == "trace") t.trace_path = value;
        else throw ConfigError("unknown key '" + key + "' in section [traffic]");
    } else if (section == "reward") {
        auto& r = cfg.reward;
        if (key == "nu1") r.nu1 = cfg_double(value, where);
        else if (key == "nu2") r.nu2 = cfg_double(value, where);
        else if (key == "nu3") r.nu3 = cfg_double(value, where);
        else if (key == "nu4") r.nu4 = cfg_double(value, where);
        else if (key == "nu5") r.nu5 = cfg_double(value, where);
        else if (key == "nu6") r.nu6 = cfg_double(value, where);
        else throw ConfigError("unknown key '" + key + "' in section [reward]");
    } else if (section == "agent") {
        auto& a = cfg.agent;
        if (key == "discount") a.mu = cfg_double(value, where);
        else if (key == "learning_rate") a.learning_rate = cfg_double(value, where);
        else if (key == "epsilon0") a.epsilon0 = cfg_double(value, where);
        else if (key == "epsilon_decay") a.epsilon_decay = cfg_double(value, where);
        else if (key == "epsilon_min") a.epsilon_min = cfg_double(value, where);
        else if (key == "batch_size") a.batch_size = static_cast<int>(cfg_int(value, where));
        else if (key == "target_sync_period") a.target_sync_period = static_cast<int>(cfg_int(value, where));
        else if (key == "replay_capacity") a.replay_capacity = static_cast<std::size_t>(cfg_int(value, where));
        else if (key == "rms_decay") a.rms_decay = cfg_double(value, where);
        else if (key == "rms_epsilon") a.rms_epsilon = cfg_double(value, where);
        else if (key == "grad_clip_norm") a.grad_clip_norm = cfg_double(value, where);
        else if (key == "episodes") a.episodes = static_cast<int>(cfg_int(value, where));
        else if (key == "seed") a.seed = static_cast<std::uint64_t>(cfg_int(value, where));
        else throw ConfigError("unknown key '" + key + "' in section [agent]");
    } else if (section == "run") {
        auto& r = cfg.run;
        if (key == "out_dir") r.out_dir = value;
        else if (key == "episode_length") r.episode_length = static_cast<int>(cfg_int(value, where));
        else if (key == "oracle_compare") r.oracle_compare = cfg_bool(value, where);
        else throw ConfigError("unknown key '" + key + "' in section [run]");
    } else {
        throw ConfigError("unknown section [" + section + "]");
    }
}

inline ExperimentConfig parse_config_text(const std::string& text,
                                          const std::string& origin = "<config>") {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = detail::trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3) {
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section header");
            }
            section = detail::trim(s.substr(1, s.size() - 2));
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string value = detail::trim(s.substr(eq + 1));
        if (section.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": key outside any section");
        }
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        try {
            apply_config_value(cfg, section, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

// Serializes every resolved value; parsing this text back yields an
// equivalent configuration.
inline std::string resolved_config_text(const ExperimentConfig& cfg) {
    std::ostringstream o;
    const auto& m = cfg.model;
    o << "[model]\n";
    o << "gat_idle_w = " << format_double(m.nodes[0].idle_power_w) << "\n";
    o << "gat_epo_j_per_to = " << format_double(m.nodes[0].epo_j_per_to) << "\n";
    o << "gat_comp_max_gops = " << format_double(m.nodes[0].comp_max_gops) << "\n";
    o << "sat_idle_w = " << format_double(m.nodes[1].idle_power_w) << "\n";
    o << "sat_epo_j_per_to = " << format_double(m.nodes[1].epo_j_per_to) << "\n";
    o << "sat_comp_max_gops = " << format_double(m.nodes[1].comp_max_gops) << "\n";
    o << "hap_idle_w = " << format_double(m.nodes[2].idle_power_w) << "\n";
    o << "hap_epo_j_per_to = " << format_double(m.nodes[2].epo_j_per_to) << "\n";
    o << "hap_comp_max_gops = " << format_double(m.nodes[2].comp_max_gops) << "\n";
    o << "sat_link_distance_m = " << format_double(m.links[0].distance_m) << "\n";
    o << "sat_link_capacity_mbps = " << format_double(m.links[0].capacity_mbps) << "\n";
    o << "sat_link_tx_power_w = " << format_double(m.links[0].tx_power_w) << "\n";
    o << "hap_link_distance_m = " << format_double(m.links[1].distance_m) << "\n";
    o << "hap_link_capacity_mbps = " << format_double(m.links[1].capacity_mbps) << "\n";
    o << "hap_link_tx_power_w = " << format_double(m.links[1].tx_power_w) << "\n";
    o << "phy_gops = " << format_double(m.loads.comp_phy_gops) << "\n";
    o << "mac_gops = " << format_double(m.loads.comp_mac_gops) << "\n";
    o << "rlc_gops = " << format_double(m.loads.comp_rlc_gops) << "\n";
    o << "pdcp_gops = " << format_double(m.loads.comp_pdcp_gops) << "\n";
    o << "mac_low_fraction = " << format_double(m.loads.mac_low_fraction) << "\n";
    o << "rlc_low_fraction = " << format_double(m.loads.rlc_low_fraction) << "\n";
    o << "speed_of_light_m_per_s = " << format_double(m.speed_of_light_m_per_s) << "\n";
    o << "backhaul_mode = " << (m.backhaul_mode ? "true" : "false") << "\n";
    for (int i = 0; i < kNumSplits; ++i) {
        o << "latency_req_split" << i << "_ms = "
          << format_double(m.split_latency_ms[static_cast<std::size_t>(i)]) << "\n";
    }
    const auto& t = cfg.traffic;
    o << "\n[traffic]\n";
    o << "profile = " << t.profile << "\n";
    o << "peak_mbps = " << format_double(t.peak_mbps) << "\n";
    o << "mean_mbps = " << format_double(t.mean_mbps) << "\n";
    o << "peak_hour = " << format_double(t.peak_hour) << "\n";
    o << "noise_std_mbps = " << format_double(t.noise_std_mbps) << "\n";
    o << "steps_per_day = " << t.steps_per_day << "\n";
    o << "days = " << t.days << "\n";
    o << "seed = " << t.seed << "\n";
    if (!t.trace_path.empty()) o << "trace = " << t.trace_path << "\n";
    const auto& r = cfg.reward;
    o << "\n[reward]\n";
    o << "nu1 = " << format_double(r.nu1) << "\n";
    o << "nu2 = " << format_double(r.nu2) << "\n";
    o << "nu3 = " << format_double(r.nu3) << "\n";
    o << "nu4 = " << format_double(r.nu4) << "\n";
    o << "nu5 = " << format_double(r.nu5) << "\n";
    o << "nu6 = " << format_double(r.nu6) << "\n";
    const auto& a = cfg.agent;
    o << "\n[agent]\n";
    o << "discount = " << format_double(a.mu) << "\n";
    o << "learning_rate = " << format_double(a.learning_rate) << "\n";
    o << "epsilon0 = " << format_double(a.epsilon0) << "\n";
    o << "epsilon_decay = " << format_double(a.epsilon_decay) << "\n";
    o << "epsilon_min = " << format_double(a.epsilon_min) << "\n";
    o << "batch_size = " << a.batch_size << "\n";
    o << "target_sync_period = " << a.target_sync_period << "\n";
    o << "replay_capacity = " << a.replay_capacity << "\n";
    o << "rms_decay = " << format_double(a.rms_decay) << "\n";
    o << "rms_epsilon = " << format_double(a.rms_epsilon) << "\n";
    o << "grad_clip_norm = " << format_double(a.grad_clip_norm) << "\n";
    o << "episodes = " << a.episodes << "\n";
    o << "seed = " << a.seed << "\n";
    const auto& run = cfg.run;
    o << "\n[run]\n";
    o << "out_dir = " << run.out_dir << "\n";
    o << "episode_length = " << run.episode_length << "\n";
    o << "oracle_compare = " << (run.oracle_compare ? "true" : "false") << "\n";
    return o.str();
}

}  // namespace orbitsplit

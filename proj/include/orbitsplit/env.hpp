#pragma once

// Deterministic MDP over the 35 CU/DU configurations, driven by a traffic
// trace. State encoding, 18-action space, constraint-based reward.

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "orbitsplit/model.hpp"
#include "orbitsplit/traffic.hpp"

namespace orbitsplit {

inline constexpr int kStateDim = 22;
inline constexpr int kNumActions = 18;
inline constexpr double kTrafficNormMbps = 2500.0;
inline constexpr double kLatencyNormMs = 10.0;

// a1: 0..4 pick that placement, 5 keeps the current one.
// a2: 0 moves the split up, 1 moves it down, 2 leaves it alone.
struct Action {
    int placement_action = 5;
    int split_action = 2;

    int index() const { return placement_action * 3 + split_action; }

    static Action from_index(int i) {
        if (i < 0 || i >= kNumActions) throw std::invalid_argument("action index out of range");
        return {i / 3, i % 3};
    }
};

struct RewardWeights {
    double nu1 = 1.0;
    double nu2 = 1.0;
    double nu3 = 1.0;
    double nu4 = 0.25;
    double nu5 = 0.25;
    // Weight of the power-shaping term (1 - P/P_norm). Zero recovers the
    // plain constraint/change reward.
    double nu6 = 1.0;

    void validate() const {
        if (!(nu1 > 0.0)) throw std::invalid_argument("reward weight nu1 must be positive");
        if (!(nu2 > 0.0)) throw std::invalid_argument("reward weight nu2 must be positive");
        if (!(nu3 > 0.0)) throw std::invalid_argument("reward weight nu3 must be positive");
        if (nu4 < 0.0) throw std::invalid_argument("reward weight nu4 must be non-negative");
        if (nu5 < 0.0) throw std::invalid_argument("reward weight nu5 must be non-negative");
        if (nu6 < 0.0) throw std::invalid_argument("reward weight nu6 must be non-negative");
    }
};

struct RewardBreakdown {
    double r1 = 0.0;  // latency constraint, +/-1
    double r2 = 0.0;  // traffic constraint, +/-1
    double r3 = 0.0;  // compute constraint, +/-1
    double r4 = 0.0;  // placement change, -1 or 0
    double r5 = 0.0;  // split change, -1 or 0
    double base = 0.0;
    double shaping = 0.0;  // 1 - P_total/P_norm
    double total = 0.0;
};

inline Configuration apply_action(const Configuration& cfg, const Action& a) {
    if (a.placement_action < 0 || a.placement_action > 5 || a.split_action < 0 ||
        a.split_action > 2) {
        throw std::invalid_argument("malformed action");
    }
    const Placement placement = a.placement_action < 5
                                    ? static_cast<Placement>(a.placement_action)
                                    : cfg.placement();
    int split = cfg.split;
    if (a.split_action == 0) split = std::min(split + 1, kNumSplits - 1);
    if (a.split_action == 1) split = std::max(split - 1, 0);
    return Configuration::from(placement, split);
}

inline RewardBreakdown compute_reward(const Configuration& prev, const Configuration& next,
                                      double lambda_mbps, const ModelParams& params,
                                      const RewardWeights& w, double p_norm_w) {
    const auto rep = check_constraints(next, lambda_mbps, params);
    RewardBreakdown r;
    r.r1 = rep.latency_ok ? 1.0 : -1.0;
    r.r2 = rep.traffic_ok ? 1.0 : -1.0;
    r.r3 = rep.compute_ok ? 1.0 : -1.0;
    r.r4 = next.placement() != prev.placement() ? -1.0 : 0.0;
    r.r5 = next.split != prev.split ? -1.0 : 0.0;
    r.base = w.nu1 * r.r1 + w.nu2 * r.r2 + w.nu3 * r.r3 + w.nu4 * r.r4 + w.nu5 * r.r5;
    r.shaping = 1.0 - total_power(next, lambda_mbps, params).total_w / p_norm_w;
    r.total = r.base + w.nu6 * r.shaping;
    return r;
}

struct EnvState {
    Configuration config;
    double lambda_mbps = 0.0;
    double time_of_day_h = 0.0;
    double tra_mbps = 0.0;
    double latency_req_ms = 0.0;
    double latency_ms = 0.0;
    PowerBreakdown power;
    double link_capacity_mbps = 0.0;  // 0 for monolithic placements
    double comp_cu_gops = 0.0;
    double comp_du_gops = 0.0;
    double comp_max_cu_gops = 0.0;
    double comp_max_du_gops = 0.0;
    int step_in_episode = 0;
    std::array<double, kStateDim> encoding{};
};

class Environment {
public:
    struct StepResult {
        EnvState state;
        RewardBreakdown reward;
        bool done = false;
    };

    Environment(std::vector<TrafficSample> trace, ModelParams params, RewardWeights weights,
                int episode_length = 100)
        : trace_(std::move(trace)),
          params_(std::move(params)),
          weights_(weights),
          episode_length_(episode_length) {
        if (trace_.empty()) throw std::invalid_argument("traffic trace must not be empty");
        if (episode_length_ < 1) throw std::invalid_argument("episode length must be >= 1");
        weights_.validate();
        p_norm_w_ = power_normalization_w(peak_lambda(trace_), params_);
        comp_norm_gops_ = 0.0;
        for (const auto& n : params_.nodes) {
            comp_norm_gops_ = std::max(comp_norm_gops_, n.comp_max_gops);
        }
    }

    const EnvState& reset(const Configuration& initial) {
        if (!valid_configuration(initial)) throw std::invalid_argument("invalid initial configuration");
        trace_idx_ = 0;
        steps_ = 0;
        done_ = false;
        started_ = true;
        fill_state(initial);
        return state_;
    }

    const EnvState& reset_random(std::mt19937_64& rng) {
        std::uniform_int_distribution<int> placement(0, kNumPlacements - 1);
        std::uniform_int_distribution<int> split(0, kNumSplits - 1);
        return reset(Configuration::from(static_cast<Placement>(placement(rng)), split(rng)));
    }

    StepResult step(const Action& a) {
        if (!started_) throw std::runtime_error("step() before reset()");
        if (done_) throw std::runtime_error("step() after episode end");
        const Configuration prev = state_.config;
        const Configuration next = apply_action(prev, a);
        trace_idx_ = (trace_idx_ + 1) % trace_.size();
        const RewardBreakdown reward = compute_reward(prev, next, trace_[trace_idx_].lambda_ru_mbps,
                                                      params_, weights_, p_norm_w_);
        ++steps_;
        fill_state(next);
        done_ = steps_ >= episode_length_;
        return {state_, reward, done_};
    }

    const EnvState& state() const { return state_; }
    bool done() const { return done_; }
    int episode_length() const { return episode_length_; }
    double power_norm_w() const { return p_norm_w_; }
    const std::vector<TrafficSample>& trace() const { return trace_; }
    const ModelParams& params() const { return params_; }
    const RewardWeights& weights() const { return weights_; }

private:
    void fill_state(const Configuration& cfg) {
        const TrafficSample& sample = trace_[trace_idx_];
        EnvState s;
        s.config = cfg;
        s.lambda_mbps = sample.lambda_ru_mbps;
        s.time_of_day_h = sample.time_of_day_h;
        s.tra_mbps = traffic_demand(cfg.split, s.lambda_mbps);
        s.latency_req_ms = params_.split_latency_ms[static_cast<std::size_t>(cfg.split)];
        s.latency_ms = propagation_latency_ms(cfg, params_);
        s.power = total_power(cfg, s.lambda_mbps, params_);
        if (cfg.monolithic()) {
            s.link_capacity_mbps = 0.0;
        } else {
            const LinkParams* link = params_.link_between(cfg.cu, cfg.du);
            if (link == nullptr) throw std::runtime_error("no link parameters for placement");
            s.link_capacity_mbps = link->capacity_mbps;
        }
        const FunctionLoads& loads = params_.loads;
        s.comp_cu_gops = computational_load(cfg.split, Side::CU, loads);
        s.comp_du_gops = computational_load(cfg.split, Side::DU, loads);
        s.comp_max_cu_gops = params_.node(cfg.cu).comp_max_gops;
        s.comp_max_du_gops = params_.node(cfg.du).comp_max_gops;
        s.step_in_episode = steps_;

        s.encoding.fill(0.0);
        s.encoding[static_cast<std::size_t>(cfg.split)] = 1.0;
        s.encoding[7 + static_cast<std::size_t>(cfg.placement())] = 1.0;
        s.encoding[12] = s.tra_mbps / kTrafficNormMbps;
        s.encoding[13] = s.latency_req_ms / kLatencyNormMs;
        s.encoding[14] = s.lambda_mbps / kTrafficNormMbps;
        s.encoding[15] = s.power.total_w / p_norm_w_;
        s.encoding[16] = s.latency_ms / kLatencyNormMs;
        s.encoding[17] = s.link_capacity_mbps / kTrafficNormMbps;
        s.encoding[18] = s.comp_cu_gops / comp_norm_gops_;
        s.encoding[19] = s.comp_du_gops / comp_norm_gops_;
        s.encoding[20] = s.comp_max_cu_gops / comp_norm_gops_;
        s.encoding[21] = s.comp_max_du_gops / comp_norm_gops_;
        state_ = s;
    }

    std::vector<TrafficSample> trace_;
    ModelParams params_;
    RewardWeights weights_;
    int episode_length_;
    double p_norm_w_ = 1.0;
    double comp_norm_gops_ = 1.0;
    std::size_t trace_idx_ = 0;
    int steps_ = 0;
    bool done_ = false;
    bool started_ = false;
    EnvState state_;
};

}  // namespace orbitsplit

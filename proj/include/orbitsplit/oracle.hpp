#pragma once

// Exact reference solvers: per-step exhaustive power minimizer and a
// finite-horizon DP that maximizes cumulative discounted reward over the
// 35-configuration deterministic MDP.

#include <array>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "orbitsplit/env.hpp"
#include "orbitsplit/model.hpp"
#include "orbitsplit/traffic.hpp"

namespace orbitsplit {

struct SolveOptions {
    std::array<bool, kNumPlacements> allowed_placements{true, true, true, true, true};
    double tie_eps = 1e-9;
};

struct StepChoice {
    bool feasible = false;
    Configuration config;
    PowerBreakdown power;
    FeasibilityReport report;
    double lambda_mbps = 0.0;
};

// Enumerates the 35 candidates split-major so that near-ties (within tie_eps)
// resolve to the lowest split index first, then the lowest placement code.
inline StepChoice solve_step(double lambda_mbps, const ModelParams& params,
                             const SolveOptions& opt = {}) {
    StepChoice best_feasible;
    StepChoice best_any;
    double feasible_w = std::numeric_limits<double>::infinity();
    double any_w = std::numeric_limits<double>::infinity();

    for (int split = 0; split < kNumSplits; ++split) {
        for (int p = 0; p < kNumPlacements; ++p) {
            if (!opt.allowed_placements[static_cast<std::size_t>(p)]) continue;
            const Configuration cfg = Configuration::from(static_cast<Placement>(p), split);
            StepChoice cand;
            cand.config = cfg;
            cand.power = total_power(cfg, lambda_mbps, params);
            cand.report = check_constraints(cfg, lambda_mbps, params);
            cand.lambda_mbps = lambda_mbps;
            cand.feasible = cand.report.all_ok();
            if (cand.power.total_w < any_w - opt.tie_eps) {
                any_w = cand.power.total_w;
                best_any = cand;
            }
            if (cand.feasible && cand.power.total_w < feasible_w - opt.tie_eps) {
                feasible_w = cand.power.total_w;
                best_feasible = cand;
            }
        }
    }
    if (feasible_w < std::numeric_limits<double>::infinity()) return best_feasible;
    best_any.feasible = false;
    return best_any;
}

struct TraceOracle {
    std::vector<StepChoice> steps;
    double total_power_w = 0.0;
    double mean_norm_power = 0.0;
    double p_norm_w = 0.0;
    int infeasible_steps = 0;
};

inline TraceOracle solve_trace(const std::vector<TrafficSample>& trace, const ModelParams& params,
                               const SolveOptions& opt = {}) {
    if (trace.empty()) throw std::invalid_argument("traffic trace must not be empty");
    TraceOracle out;
    out.p_norm_w = power_normalization_w(peak_lambda(trace), params);
    out.steps.reserve(trace.size());
    for (const auto& s : trace) {
        StepChoice c = solve_step(s.lambda_ru_mbps, params, opt);
        out.total_power_w += c.power.total_w;
        out.mean_norm_power += c.power.total_w / out.p_norm_w;
        if (!c.feasible) ++out.infeasible_steps;
        out.steps.push_back(std::move(c));
    }
    out.mean_norm_power /= static_cast<double>(trace.size());
    return out;
}

struct DpResult {
    double return_value = 0.0;               // sum of mu^k * r_k
    std::vector<Action> actions;              // length horizon
    std::vector<Configuration> configs;       // length horizon + 1, incl. initial
    std::vector<double> rewards;              // per-step totals
};

// Backward induction over configuration index; the reward at step k evaluates
// the post-action configuration at trace[(k+1) mod N], matching Environment.
inline DpResult solve_trajectory_dp(const std::vector<TrafficSample>& trace, int horizon,
                                    const Configuration& initial, const ModelParams& params,
                                    const RewardWeights& weights, double mu, double p_norm_w) {
    if (trace.empty()) throw std::invalid_argument("traffic trace must not be empty");
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (!valid_configuration(initial)) throw std::invalid_argument("invalid initial configuration");

    const auto all = all_configurations();
    const std::size_t n_cfg = all.size();

    std::vector<std::array<double, kNumConfigurations>> value(
        static_cast<std::size_t>(horizon) + 1);
    std::vector<std::array<int, kNumConfigurations>> choice(static_cast<std::size_t>(horizon));
    value[static_cast<std::size_t>(horizon)].fill(0.0);

    for (int k = horizon - 1; k >= 0; --k) {
        const double lambda = trace[(static_cast<std::size_t>(k) + 1) % trace.size()].lambda_ru_mbps;
        for (std::size_t c = 0; c < n_cfg; ++c) {
            double best = -std::numeric_limits<double>::infinity();
            int best_a = 0;
            for (int a = 0; a < kNumActions; ++a) {
                const Configuration next = apply_action(all[c], Action::from_index(a));
                const RewardBreakdown r =
                    compute_reward(all[c], next, lambda, params, weights, p_norm_w);
                const double q =
                    r.total + mu * value[static_cast<std::size_t>(k) + 1]
                                        [static_cast<std::size_t>(configuration_index(next))];
                if (q > best) {
                    best = q;
                    best_a = a;
                }
            }
            value[static_cast<std::size_t>(k)][c] = best;
            choice[static_cast<std::size_t>(k)][c] = best_a;
        }
    }

    DpResult out;
    out.configs.push_back(initial);
    double discount = 1.0;
    Configuration cur = initial;
    for (int k = 0; k < horizon; ++k) {
        const int a = choice[static_cast<std::size_t>(k)]
                            [static_cast<std::size_t>(configuration_index(cur))];
        const Action action = Action::from_index(a);
        const Configuration next = apply_action(cur, action);
        const double lambda = trace[(static_cast<std::size_t>(k) + 1) % trace.size()].lambda_ru_mbps;
        const RewardBreakdown r = compute_reward(cur, next, lambda, params, weights, p_norm_w);
        out.actions.push_back(action);
        out.configs.push_back(next);
        out.rewards.push_back(r.total);
        out.return_value += discount * r.total;
        discount *= mu;
        cur = next;
    }
    return out;
}

// Rolls out a policy over configurations with the same timing/reward as
// Environment and DP, for baseline comparisons. The policy sees the current
// configuration and the upcoming lambda.
using ConfigPolicy = std::function<Action(const Configuration&, double next_lambda)>;

inline DpResult rollout_config_policy(const std::vector<TrafficSample>& trace, int horizon,
                                      const Configuration& initial, const ModelParams& params,
                                      const RewardWeights& weights, double mu, double p_norm_w,
                                      const ConfigPolicy& policy) {
    if (trace.empty()) throw std::invalid_argument("traffic trace must not be empty");
    DpResult out;
    out.configs.push_back(initial);
    double discount = 1.0;
    Configuration cur = initial;
    for (int k = 0; k < horizon; ++k) {
        const double lambda = trace[(static_cast<std::size_t>(k) + 1) % trace.size()].lambda_ru_mbps;
        const Action action = policy(cur, lambda);
        const Configuration next = apply_action(cur, action);
        const RewardBreakdown r = compute_reward(cur, next, lambda, params, weights, p_norm_w);
        out.actions.push_back(action);
        out.configs.push_back(next);
        out.rewards.push_back(r.total);
        out.return_value += discount * r.total;
        discount *= mu;
        cur = next;
    }
    return out;
}

inline ConfigPolicy random_policy(std::mt19937_64& rng) {
    return [&rng](const Configuration&, double) {
        std::uniform_int_distribution<int> d(0, kNumActions - 1);
        return Action::from_index(d(rng));
    };
}

// Picks the action with the best immediate reward; ties to the lowest index.
inline ConfigPolicy greedy_myopic_policy(const ModelParams& params, const RewardWeights& weights,
                                         double p_norm_w) {
    return [params, weights, p_norm_w](const Configuration& cur, double lambda) {
        double best = -std::numeric_limits<double>::infinity();
        int best_a = 0;
        for (int a = 0; a < kNumActions; ++a) {
            const Configuration next = apply_action(cur, Action::from_index(a));
            const RewardBreakdown r = compute_reward(cur, next, lambda, params, weights, p_norm_w);
            if (r.total > best) {
                best = r.total;
                best_a = a;
            }
        }
        return Action::from_index(best_a);
    };
}

}  // namespace orbitsplit

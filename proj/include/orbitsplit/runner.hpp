#pragma once

// Subcommand orchestration shared by the CLI: builds traces and environments
// from an ExperimentConfig, runs training / evaluation / oracles, and writes
// all artifacts into the run directory.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "orbitsplit/config.hpp"
#include "orbitsplit/dqn.hpp"
#include "orbitsplit/env.hpp"
#include "orbitsplit/log.hpp"
#include "orbitsplit/nn.hpp"
#include "orbitsplit/oracle.hpp"
#include "orbitsplit/reporting.hpp"
#include "orbitsplit/traffic.hpp"

namespace orbitsplit {

inline std::vector<TrafficSample> build_trace(const ExperimentConfig& cfg) {
    if (!cfg.traffic.trace_path.empty()) {
        auto trace = load_trace(cfg.traffic.trace_path);
        if (trace.empty()) {
            throw ConfigError("traffic trace " + cfg.traffic.trace_path + " is empty");
        }
        return trace;
    }
    return generate(cfg.traffic.resolve_profile(), cfg.traffic.steps_per_day, cfg.traffic.days);
}

inline Environment build_env(const ExperimentConfig& cfg, std::vector<TrafficSample> trace) {
    return Environment(std::move(trace), cfg.model, cfg.reward, cfg.run.episode_length);
}

inline void prepare_out_dir(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.run.out_dir);
    std::ofstream f(cfg.run.out_dir + "/resolved_config.ini", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write resolved config in " + cfg.run.out_dir);
    f << resolved_config_text(cfg);
}

inline constexpr const char* kEvalCsvHeader =
    "step,time_of_day_h,lambda_mbps,action,placement,split,reward,reward_base,total_w,"
    "norm_power,feasible";

inline void write_eval_csv(const std::vector<EvalStep>& steps, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << kEvalCsvHeader << "\n";
    for (const auto& s : steps) {
        f << s.step << ',' << format_double(s.time_of_day_h) << ','
          << format_double(s.lambda_mbps) << ',' << s.action << ',' << s.placement << ','
          << s.split << ',' << format_double(s.reward_total) << ','
          << format_double(s.reward_base) << ',' << format_double(s.total_w) << ','
          << format_double(s.norm_power) << ',' << (s.feasible ? 1 : 0) << "\n";
    }
}

struct TrainSummary {
    long steps = 0;
    int episodes = 0;
    double final_long_term_reward = 0.0;
    double mean_norm_power_last50 = 0.0;
    double negative_fraction = 0.0;
    double oracle_mean_norm_power = 0.0;
    bool oracle_compared = false;
};

inline TrainSummary run_training(const ExperimentConfig& cfg) {
    cfg.validate();
    prepare_out_dir(cfg);
    auto trace = build_trace(cfg);
    save_trace(trace, cfg.run.out_dir + "/trace.csv");
    Environment env = build_env(cfg, trace);

    log_info("training: " + std::to_string(cfg.agent.episodes) + " episodes x " +
             std::to_string(cfg.run.episode_length) + " steps");
    TrainingArtifacts art = train(env, cfg.agent);

    write_training_log_csv(art.log, cfg.run.out_dir + "/training_log.csv");
    art.net.save(cfg.run.out_dir + "/checkpoint.json");

    const RunMetrics metrics = compute_metrics(art.log, env.power_norm_w(), &trace);
    emit_csv(metrics, cfg.run.out_dir + "/metrics.csv");
    emit_jsonl(metrics, cfg.run.out_dir + "/metrics.jsonl");
    emit_svg(metrics, cfg.run.out_dir + "/metrics.svg");

    TrainSummary s;
    s.steps = art.total_steps;
    s.episodes = metrics.episodes;
    s.final_long_term_reward = metrics.long_term_reward.back();
    const std::size_t tail =
        std::min<std::size_t>(metrics.episode_norm_power.size(), kShortTermWindow);
    for (std::size_t i = metrics.episode_norm_power.size() - tail;
         i < metrics.episode_norm_power.size(); ++i) {
        s.mean_norm_power_last50 += metrics.episode_norm_power[i];
    }
    s.mean_norm_power_last50 /= static_cast<double>(tail);
    s.negative_fraction = metrics.negative_fraction;
    if (cfg.run.oracle_compare) {
        s.oracle_mean_norm_power = solve_trace(trace, cfg.model).mean_norm_power;
        s.oracle_compared = true;
    }
    return s;
}

inline int cmd_train(const ExperimentConfig& cfg) {
    const TrainSummary s = run_training(cfg);
    std::cout << "episodes: " << s.episodes << "\n";
    std::cout << "steps: " << s.steps << "\n";
    std::cout << "final_long_term_reward: " << format_double(s.final_long_term_reward) << "\n";
    std::cout << "mean_norm_power_last50: " << format_double(s.mean_norm_power_last50) << "\n";
    std::cout << "negative_fraction: " << format_double(s.negative_fraction) << "\n";
    if (s.oracle_compared) {
        std::cout << "oracle_mean_norm_power: " << format_double(s.oracle_mean_norm_power) << "\n";
        const double gap = (s.mean_norm_power_last50 - s.oracle_mean_norm_power) /
                           s.oracle_mean_norm_power * 100.0;
        std::cout << "oracle_power_gap_percent: " << format_double(gap) << "\n";
    }
    return 0;
}

inline int cmd_evaluate(const ExperimentConfig& cfg, const std::string& checkpoint_path) {
    cfg.validate();
    if (checkpoint_path.empty()) throw ConfigError("evaluate requires --checkpoint");
    prepare_out_dir(cfg);
    const QNetwork net = QNetwork::load(checkpoint_path);
    auto trace = build_trace(cfg);
    Environment env = build_env(cfg, trace);

    const Configuration initial = Configuration::from(Placement::MonoGat, 0);
    const EvalResult res = rollout_greedy(env, net, initial, cfg.agent.mu);
    write_eval_csv(res.steps, cfg.run.out_dir + "/eval_log.csv");

    std::cout << "eval_steps: " << res.steps.size() << "\n";
    std::cout << "discounted_return: " << format_double(res.discounted_return) << "\n";
    std::cout << "sum_reward: " << format_double(res.sum_reward) << "\n";
    std::cout << "mean_norm_power: " << format_double(res.mean_norm_power) << "\n";
    return 0;
}

inline int cmd_oracle(const ExperimentConfig& cfg) {
    cfg.validate();
    prepare_out_dir(cfg);
    auto trace = build_trace(cfg);

    const TraceOracle oracle = solve_trace(trace, cfg.model);
    {
        std::ofstream f(cfg.run.out_dir + "/oracle_steps.csv", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write oracle_steps.csv");
        f << "step,time_of_day_h,lambda_mbps,placement,split,total_w,norm_power,feasible\n";
        for (std::size_t i = 0; i < oracle.steps.size(); ++i) {
            const auto& c = oracle.steps[i];
            f << trace[i].step << ',' << format_double(trace[i].time_of_day_h) << ','
              << format_double(c.lambda_mbps) << ',' << static_cast<int>(c.config.placement())
              << ',' << c.config.split << ',' << format_double(c.power.total_w) << ','
              << format_double(c.power.total_w / oracle.p_norm_w) << ',' << (c.feasible ? 1 : 0)
              << "\n";
        }
    }
    {
        std::ofstream f(cfg.run.out_dir + "/oracle_steps.jsonl", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write oracle_steps.jsonl");
        for (std::size_t i = 0; i < oracle.steps.size(); ++i) {
            const auto& c = oracle.steps[i];
            nlohmann::json j;
            j["schema_version"] = 1;
            j["step"] = trace[i].step;
            j["time_of_day_h"] = trace[i].time_of_day_h;
            j["lambda_mbps"] = c.lambda_mbps;
            j["placement"] = to_string(c.config.placement());
            j["split"] = c.config.split;
            j["total_w"] = c.power.total_w;
            j["norm_power"] = c.power.total_w / oracle.p_norm_w;
            j["feasible"] = c.feasible;
            f << j.dump() << "\n";
        }
    }

    const Configuration initial = Configuration::from(Placement::MonoGat, 0);
    const double p_norm = power_normalization_w(peak_lambda(trace), cfg.model);
    const DpResult dp = solve_trajectory_dp(trace, cfg.run.episode_length, initial, cfg.model,
                                            cfg.reward, cfg.agent.mu, p_norm);
    {
        std::ofstream f(cfg.run.out_dir + "/dp_trajectory.csv", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write dp_trajectory.csv");
        f << "step,action,placement,split,reward\n";
        for (std::size_t k = 0; k < dp.actions.size(); ++k) {
            f << k << ',' << dp.actions[k].index() << ','
              << static_cast<int>(dp.configs[k + 1].placement()) << ',' << dp.configs[k + 1].split
              << ',' << format_double(dp.rewards[k]) << "\n";
        }
    }

    std::cout << "oracle_steps: " << oracle.steps.size() << "\n";
    std::cout << "oracle_mean_norm_power: " << format_double(oracle.mean_norm_power) << "\n";
    std::cout << "oracle_infeasible_steps: " << oracle.infeasible_steps << "\n";
    std::cout << "dp_return: " << format_double(dp.return_value) << "\n";
    return 0;
}

inline int cmd_compare(const ExperimentConfig& cfg, const std::string& checkpoint_path) {
    cfg.validate();
    if (checkpoint_path.empty()) throw ConfigError("compare requires --checkpoint");
    prepare_out_dir(cfg);
    const QNetwork net = QNetwork::load(checkpoint_path);
    auto trace = build_trace(cfg);
    Environment env = build_env(cfg, trace);

    const Configuration initial = Configuration::from(Placement::MonoGat, 0);
    const EvalResult res = rollout_greedy(env, net, initial, cfg.agent.mu);
    const DpResult dp = solve_trajectory_dp(trace, cfg.run.episode_length, initial, cfg.model,
                                            cfg.reward, cfg.agent.mu, env.power_norm_w());

    double oracle_mean_norm_power = 0.0;
    {
        std::ofstream f(cfg.run.out_dir + "/report.csv", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write report.csv");
        f << "step,time_of_day_h,lambda_mbps,policy_placement,policy_split,policy_total_w,"
             "oracle_placement,oracle_split,oracle_total_w\n";
        for (const auto& s : res.steps) {
            const StepChoice c = solve_step(s.lambda_mbps, cfg.model);
            oracle_mean_norm_power += c.power.total_w / env.power_norm_w();
            f << s.step << ',' << format_double(s.time_of_day_h) << ','
              << format_double(s.lambda_mbps) << ',' << s.placement << ',' << s.split << ','
              << format_double(s.total_w) << ',' << static_cast<int>(c.config.placement()) << ','
              << c.config.split << ',' << format_double(c.power.total_w) << "\n";
        }
        oracle_mean_norm_power /= static_cast<double>(res.steps.size());
    }
    {
        std::ofstream f(cfg.run.out_dir + "/option_by_hour.csv", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write option_by_hour.csv");
        f << "hour,split0,split1,split2,split3,split4,split5,split6,modal_split\n";
        std::array<std::array<long, 7>, 24> hist{};
        for (const auto& s : res.steps) {
            int hour = static_cast<int>(s.time_of_day_h) % 24;
            if (hour < 0) hour += 24;
            hist[static_cast<std::size_t>(hour)][static_cast<std::size_t>(s.split)] += 1;
        }
        for (int h = 0; h < 24; ++h) {
            const auto& row = hist[static_cast<std::size_t>(h)];
            int modal = 0;
            for (int o = 1; o < 7; ++o) {
                if (row[static_cast<std::size_t>(o)] > row[static_cast<std::size_t>(modal)]) modal = o;
            }
            f << h;
            for (int o = 0; o < 7; ++o) f << ',' << row[static_cast<std::size_t>(o)];
            f << ',' << modal << "\n";
        }
    }

    const double return_gap =
        (dp.return_value - res.discounted_return) / std::abs(dp.return_value) * 100.0;
    const double power_gap = (res.mean_norm_power - oracle_mean_norm_power) /
                             oracle_mean_norm_power * 100.0;
    std::cout << "policy_return: " << format_double(res.discounted_return) << "\n";
    std::cout << "dp_return: " << format_double(dp.return_value) << "\n";
    std::cout << "return_gap_percent: " << format_double(return_gap) << "\n";
    std::cout << "policy_mean_norm_power: " << format_double(res.mean_norm_power) << "\n";
    std::cout << "oracle_mean_norm_power: " << format_double(oracle_mean_norm_power) << "\n";
    std::cout << "power_gap_percent: " << format_double(power_gap) << "\n";
    return 0;
}

inline int cmd_sweep(const ExperimentConfig& base, const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw ConfigError("sweep requires at least one seed");
    base.validate();
    std::filesystem::create_directories(base.run.out_dir);
    std::ofstream summary(base.run.out_dir + "/sweep_summary.csv", std::ios::binary);
    if (!summary) throw std::runtime_error("cannot write sweep_summary.csv");
    summary << "seed,final_long_term_reward,mean_norm_power_last50,negative_fraction\n";
    for (const std::uint64_t seed : seeds) {
        ExperimentConfig cfg = base;
        cfg.agent.seed = seed;
        cfg.run.out_dir = base.run.out_dir + "/seed_" + std::to_string(seed);
        const TrainSummary s = run_training(cfg);
        summary << seed << ',' << format_double(s.final_long_term_reward) << ','
                << format_double(s.mean_norm_power_last50) << ','
                << format_double(s.negative_fraction) << "\n";
        std::cout << "seed " << seed << ": final_long_term_reward "
                  << format_double(s.final_long_term_reward) << ", mean_norm_power_last50 "
                  << format_double(s.mean_norm_power_last50) << "\n";
    }
    return 0;
}

}  // namespace orbitsplit

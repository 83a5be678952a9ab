#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "orbitsplit/config.hpp"
#include "orbitsplit/log.hpp"
#include "orbitsplit/runner.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string trace_path;
    std::int64_t seed = -1;
    int episodes = -1;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "experiment config file (INI)");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--trace", flags.trace_path, "traffic trace CSV (overrides generation)");
    cmd->add_option("--seed", flags.seed, "agent seed override");
    cmd->add_option("--episodes", flags.episodes, "training episode count override");
}

orbitsplit::ExperimentConfig resolve(const CommonFlags& flags) {
    orbitsplit::ExperimentConfig cfg;
    if (!flags.config_path.empty()) cfg = orbitsplit::load_config(flags.config_path);
    if (!flags.out_dir.empty()) cfg.run.out_dir = flags.out_dir;
    if (!flags.trace_path.empty()) cfg.traffic.trace_path = flags.trace_path;
    if (flags.seed >= 0) cfg.agent.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.episodes >= 0) cfg.agent.episodes = flags.episodes;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orbitsplit: CU/DU split and placement simulator with a DQN agent"};
    app.require_subcommand(1);

    CommonFlags train_flags, eval_flags, oracle_flags, compare_flags, sweep_flags;
    std::string eval_checkpoint, compare_checkpoint;
    std::vector<std::uint64_t> sweep_seeds{1, 2, 3};

    CLI::App* train = app.add_subcommand("train", "train the DQN agent and write artifacts");
    add_common_flags(train, train_flags);

    CLI::App* evaluate = app.add_subcommand("evaluate", "greedy rollout of a trained checkpoint");
    add_common_flags(evaluate, eval_flags);
    evaluate->add_option("--checkpoint", eval_checkpoint, "checkpoint.json to evaluate")
        ->required();

    CLI::App* oracle = app.add_subcommand("oracle", "exact per-step and DP reference solutions");
    add_common_flags(oracle, oracle_flags);

    CLI::App* compare = app.add_subcommand("compare", "trained policy vs DP and myopic oracle");
    add_common_flags(compare, compare_flags);
    compare->add_option("--checkpoint", compare_checkpoint, "checkpoint.json to compare")
        ->required();

    CLI::App* sweep = app.add_subcommand("sweep", "train across seeds, one run directory each");
    add_common_flags(sweep, sweep_flags);
    sweep->add_option("--seeds", sweep_seeds, "seeds to sweep")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return orbitsplit::cmd_train(resolve(train_flags));
        if (evaluate->parsed()) return orbitsplit::cmd_evaluate(resolve(eval_flags), eval_checkpoint);
        if (oracle->parsed()) return orbitsplit::cmd_oracle(resolve(oracle_flags));
        if (compare->parsed()) return orbitsplit::cmd_compare(resolve(compare_flags), compare_checkpoint);
        if (sweep->parsed()) return orbitsplit::cmd_sweep(resolve(sweep_flags), sweep_seeds);
    } catch (const orbitsplit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

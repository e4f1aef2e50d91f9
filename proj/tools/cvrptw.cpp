#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace cvrptw;
using namespace cvrptw::cli;

int main(int argc, char **argv)
{
    CLI::App app{"CVRP-TW solver: value-network rollouts with exact sub-tour optimization"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");

    RunConfig rc;
    std::uint64_t seed = 0;

    app.add_option("--instances", rc.instances, "Solomon files or directories of them")->delimiter(',');
    app.add_option("--model", rc.model, "Checkpoint to read (solve/bench/sweep) or write (train)");
    app.add_option("--kappa", rc.kappas, "Rollout branches; a comma list for sweep")->delimiter(',')->check(CLI::PositiveNumber);
    app.add_option("--delta", rc.delta, "Forward optimizer position-shift budget")->check(CLI::NonNegativeNumber);
    app.add_option("--delta-tighten", rc.delta_tighten, "Tightening position-shift budget")->check(CLI::NonNegativeNumber);
    app.add_option("--timeout-ms", rc.timeout_ms, "Optimizer time budget per call")->check(CLI::PositiveNumber);
    app.add_option("--cluster-n", rc.cluster_n, "Neighbours added per member while growing clusters")->check(CLI::PositiveNumber);
    app.add_option("--gamma", rc.gamma, "Terminal reward discount")->check(CLI::Range(0.0, 1.0));
    app.add_option("--episodes", rc.episodes, "Training episodes")->check(CLI::PositiveNumber);
    app.add_option("--sat-from-episode", rc.sat_from_episode, "Episode from which logged training distances are tightened");
    auto *seed_opt = app.add_option("--seed", seed, "Master seed");
    app.add_option("--out", rc.out, "Output directory");
    app.add_option("--temperature", rc.temperature, "Softmax temperature")->check(CLI::PositiveNumber);
    app.add_option("--rollouts-per-branch", rc.rollouts_per_branch, "Rollouts per branch")->check(CLI::PositiveNumber);

    app.add_option("--lr", rc.learning_rate, "SGD learning rate")->check(CLI::PositiveNumber);
    app.add_option("--momentum", rc.momentum, "SGD momentum, 0 = plain SGD")->check(CLI::Range(0.0, 1.0));
    app.add_option("--epsilon-decay", rc.epsilon_decay, "Per-episode exploration decay")->check(CLI::Range(0.0, 1.0));
    app.add_option("--batch-size", rc.batch_size, "Training batch size")->check(CLI::PositiveNumber);
    app.add_option("--train-every", rc.train_every, "Decisions between training steps")->check(CLI::PositiveNumber);
    app.add_option("--max-subtour", rc.max_subtour, "Longest continuation committed per outer step")->check(CLI::PositiveNumber);
    app.add_option("--max-optional", rc.max_optional, "Opportunistic customers offered to the forward optimizer")->check(CLI::NonNegativeNumber);
    app.add_flag("--no-forward-opt", rc.no_forward_opt, "Skip forward sub-tour optimization");
    app.add_flag("--no-tighten", rc.no_tighten, "Skip final route tightening");
    app.add_option("--jobs", rc.jobs, "Instances solved concurrently by bench")->check(CLI::PositiveNumber);
    app.add_flag("--trace", rc.trace, "Write per-instance decision and optimizer logs");
    app.add_option("--dump-features", rc.dump_features, "Write feature vectors of all feasible pairs at this decision step");
    app.add_option("--size", rc.size, "Customers per generated instance")->check(CLI::PositiveNumber);

    for (const char *name : {"train", "solve", "bench", "sweep", "generate"})
        app.add_subcommand(name)->fallthrough()->callback([&rc, name]
                                                         { rc.mode = name; });
    app.get_subcommand("train")->description("Train the value network");
    app.get_subcommand("solve")->description("Solve instances and write solution files");
    app.get_subcommand("bench")->description("Group table against best-known means");
    app.get_subcommand("sweep")->description("Distance/time over a kappa list");
    app.get_subcommand("generate")->description("Write the 56-instance surrogate suite");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return kUsage;
    }
    if (*seed_opt)
        rc.seed = seed;

    try
    {
        if (rc.mode == "train")
            return cmd_train(rc);
        if (rc.mode == "solve")
            return cmd_solve(rc);
        if (rc.mode == "bench")
            return cmd_bench(rc);
        if (rc.mode == "sweep")
            return cmd_sweep(rc);
        return cmd_generate(rc);
    }
    catch (const DataError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
    catch (const ParseError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    }
    catch (const std::exception &e)
    {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

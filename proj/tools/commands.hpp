#pragma once

#include "cvrptw/solver.hpp"
#include "cvrptw/trainer.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvrptw::cli
{
    enum ExitCode
    {
        kOk = 0,
        kUsage = 1,
        kDataError = 2,
        kInternalError = 3,
    };

    /// Bad or missing input files, empty instance lists.
    struct DataError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct RunConfig
    {
        std::string mode;
        std::vector<std::string> instances;
        std::string model;
        std::vector<int> kappas;
        int delta = kDefaultForwardDelta;
        int delta_tighten = kDefaultTightenDelta;
        int timeout_ms = kDefaultTimeoutMs;
        int cluster_n = kDefaultClusterN;
        double gamma = 0.9;
        std::size_t episodes = 6000;
        std::size_t sat_from_episode = 4000;
        std::optional<std::uint64_t> seed;
        std::string out = "out";
        double temperature = 1.0;
        int rollouts_per_branch = 1;

        double learning_rate = 0.001;
        double momentum = 0.0;
        double epsilon_decay = 0.9995;
        std::size_t batch_size = 4096;
        std::size_t train_every = 10;
        int max_subtour = 8;
        int max_optional = 4;
        bool no_forward_opt = false;
        bool no_tighten = false;
        int jobs = 1;
        bool trace = false;
        std::optional<std::size_t> dump_features;
        int size = 25; // generate

        SolveConfig solve_config(int kappa) const;
    };

    /// Files as given; directories expand to their regular files sorted by name.
    std::vector<std::string> expand_instance_paths(const std::vector<std::string> &inputs);

    int cmd_train(const RunConfig &config);
    int cmd_solve(const RunConfig &config);
    int cmd_bench(const RunConfig &config);
    int cmd_sweep(const RunConfig &config);
    int cmd_generate(const RunConfig &config);
}

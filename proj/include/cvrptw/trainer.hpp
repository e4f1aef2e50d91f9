#pragma once

#include "cvrptw/episode.hpp"
#include "cvrptw/value_net.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cvrptw
{
    struct TrainOptions
    {
        TrainConfig config;
        std::size_t episodes = 6000;
        std::size_t sat_from_episode = 4000; // 1-based; logged distances are tightened from this episode on
        std::uint64_t seed = 0;
        double temperature = 1.0;
        int delta_tighten = 3;
        int timeout_ms = 1000;
        std::optional<NetworkParams> initial; // fresh init_network(seed) when empty
    };

    struct EpisodeLog
    {
        std::size_t episode = 0; // 1-based
        std::string instance;
        double distance = 0.0;     // tightened from sat_from_episode on
        double raw_distance = 0.0; // the episode as played
        double reward_mean = 0.0;
        double epsilon = 0.0;
        std::optional<double> loss; // mean pre-step loss of the updates made during the episode
        std::size_t decisions = 0;
    };

    struct TrainResult
    {
        NetworkParams params;
        std::vector<EpisodeLog> log;
        std::size_t updates = 0;
    };

    /// Cycles through `problems` in order, one episode each, with per-decision epsilon-random
    /// exploration and softmax exploitation. Rewards of a finished episode enter the replay
    /// buffer; a batch is trained every `train_every` decisions once the buffer is non-empty.
    /// When `log_out` is set, rows are written as episodes complete.
    TrainResult train(const std::vector<std::shared_ptr<const ProblemData>> &problems, const TrainOptions &options,
                      std::ostream *log_out = nullptr);

    void write_train_log_header(std::ostream &out);
    void write_train_log_row(std::ostream &out, const EpisodeLog &row);

    /// Mean of `values` over the trailing window ending at each index.
    std::vector<double> moving_average(const std::vector<double> &values, std::size_t window);
}

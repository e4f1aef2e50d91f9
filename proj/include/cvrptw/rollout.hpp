#pragma once

#include "cvrptw/episode.hpp"
#include "cvrptw/value_net.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace cvrptw
{
    /// Softmax temperatures below this are treated as greedy argmax.
    inline constexpr double kGreedyTemperature = 1e-6;

    std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

    struct ScoredPairs
    {
        std::vector<Decision> pairs;
        Vector values;
    };

    /// Feasible pairs of `state` with their network values, in (vehicle, customer) order.
    ScoredPairs score_pairs(const EpisodeState &state, const NetworkParams &params);

    /// Index of the largest value; ties go to the lowest index.
    std::size_t argmax_index(const Vector &values);

    /// Samples an index from softmax(values / temperature).
    std::size_t softmax_index(const Vector &values, double temperature, std::mt19937_64 &rng);

    struct RolloutConfig
    {
        int kappa = 5;
        int rollouts_per_branch = 1;
        double temperature = 1.0;
        std::uint64_t seed = 0;
        int max_subtour = 8; // cap on the committed continuation taken from the winning branch

        void validate() const;
    };

    struct BranchResult
    {
        Decision first;
        double distance = 0.0;        // completed-solution distance, all return legs included
        std::vector<int> continuation; // chosen vehicle's customers from `first` on, capped at max_subtour
        int branch = 0;
        int repetition = 0;
        std::size_t nodes = 0; // decisions simulated
        Solution solution;     // the completed rollout
    };

    struct Selection
    {
        BranchResult winner;
        std::vector<BranchResult> branches;
        std::size_t nodes = 0;
    };

    /// Top min(kappa, count) feasible pairs by value, ties by (vehicle, customer).
    std::vector<Decision> shortlist(const EpisodeState &state, const NetworkParams &params, int kappa);

    /// Completes a private copy of `state` after forcing `first`, sampling the rest from the
    /// softmax policy on a stream keyed by (seed, step, branch, repetition).
    BranchResult rollout_branch(const EpisodeState &state, const NetworkParams &params, Decision first,
                                const RolloutConfig &config, int branch, int repetition = 0);

    /// Index of the lowest distance; ties go to the earliest entry.
    std::size_t best_branch(const std::vector<BranchResult> &branches);

    /// Lowest completed distance over all branches and repetitions; ties go to the earlier branch.
    /// Branch b uses the same stream for every kappa > b, so the candidates for kappa are a
    /// prefix of those for kappa + 1.
    Selection select(const EpisodeState &state, const NetworkParams &params, const RolloutConfig &config);
}

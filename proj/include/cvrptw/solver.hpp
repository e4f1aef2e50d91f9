#pragma once

#include "cvrptw/episode.hpp"
#include "cvrptw/rollout.hpp"
#include "cvrptw/subtour.hpp"
#include "cvrptw/value_net.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>

namespace cvrptw
{
    enum class PolicyMode
    {
        Explore, // epsilon-random, otherwise softmax
        Greedy,  // argmax
        Rollout, // top-kappa rollouts with sub-tour optimization
    };

    struct SolveConfig
    {
        RolloutConfig rollout;
        bool forward_opt = true;
        bool tighten = true;
        int delta = kDefaultForwardDelta;
        int delta_tighten = kDefaultTightenDelta;
        int timeout_ms = kDefaultTimeoutMs;
        int max_optional = 4; // cap on opportunistic customers per forward optimization
        std::function<void(const EpisodeState &)> observer; // called before every rollout selection

        void validate() const;
    };

    struct SolveStats
    {
        double wall_ms = 0.0;
        std::size_t nodes = 0;           // decisions simulated in rollouts
        std::size_t outer_steps = 0;
        std::size_t optimizer_calls = 0;
        std::size_t optimizer_timeouts = 0;
        double distance_before_tighten = 0.0;
        double first_best = 0.0; // winner distance of the first rollout selection
    };

    struct EpisodeOptions
    {
        PolicyMode mode = PolicyMode::Greedy;
        double epsilon = 0.0;
        double temperature = 1.0;
        std::uint64_t seed = 0;
        bool record_features = false;
        SolveConfig solve; // used by PolicyMode::Rollout
        std::ostream *trace = nullptr;   // one line per decision
        std::ostream *opt_log = nullptr; // one line per optimizer call
        std::function<void(EpisodeState &)> after_step; // called after every committed decision
    };

    struct EpisodeResult
    {
        EpisodeState state;
        Solution solution;
        SolveStats stats;
    };

    /// Runs one full episode. Explore/Greedy take single-step decisions; Rollout runs the
    /// solving pipeline (rollout selection, forward optimization, final tightening).
    EpisodeResult run_episode(std::shared_ptr<const ProblemData> data, const NetworkParams &params, const EpisodeOptions &options);

    EpisodeResult solve(std::shared_ptr<const ProblemData> data, const NetworkParams &params, const SolveConfig &config,
                        std::ostream *opt_log = nullptr, std::ostream *trace = nullptr);

    /// Unserved customers clustered with any committed customer, nearest to R first, capped.
    std::vector<int> opportunistic_set(const EpisodeState &state, const std::vector<int> &committed, int cap);

    /// Re-sequences every route with the tightening optimizer; never lengthens a route.
    Solution tighten_solution(const ProblemData &data, const Solution &sol, int delta, int timeout_ms, SolveStats *stats = nullptr, std::ostream *opt_log = nullptr);
}

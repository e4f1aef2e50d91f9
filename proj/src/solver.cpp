#include "cvrptw/solver.hpp"

#include "cvrptw/format.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <random>
#include <stdexcept>

namespace cvrptw
{
    namespace
    {
        using Clock = std::chrono::steady_clock;

        void trace_line(std::ostream *out, const Decision &d, double value, bool explored)
        {
            if (out)
                *out << "vehicle=" << d.vehicle << " customer=" << d.customer << " value=" << format_number(value)
                     << " explore=" << (explored ? 1 : 0) << '\n';
        }

        EpisodeResult run_policy(std::shared_ptr<const ProblemData> data, const NetworkParams &params, const EpisodeOptions &options)
        {
            EpisodeResult result{EpisodeState(data, options.record_features), {}, {}};
            EpisodeState &state = result.state;
            std::mt19937_64 rng(options.seed);
            std::uniform_real_distribution<double> coin(0.0, 1.0);
            const auto t0 = Clock::now();

            while (!state.done())
            {
                Decision pick;
                double value = 0.0;
                bool explored = false;
                if (options.mode == PolicyMode::Explore && coin(rng) < options.epsilon)
                {
                    const auto pairs = state.feasible_pairs();
                    if (pairs.empty())
                        throw ContractViolation("episode stuck: unserved customers remain but no vehicle can reach them");
                    std::uniform_int_distribution<std::size_t> any(0, pairs.size() - 1);
                    pick = pairs[any(rng)];
                    explored = true;
                }
                else
                {
                    const ScoredPairs scored = score_pairs(state, params);
                    if (scored.pairs.empty())
                        throw ContractViolation("episode stuck: unserved customers remain but no vehicle can reach them");
                    const std::size_t i = options.mode == PolicyMode::Greedy
                                              ? argmax_index(scored.values)
                                              : softmax_index(scored.values, options.temperature, rng);
                    pick = scored.pairs[i];
                    value = scored.values(static_cast<Eigen::Index>(i));
                }
                trace_line(options.trace, pick, value, explored);
                state.apply(pick);
                if (options.after_step)
                    options.after_step(state);
            }
            state.finish_all();
            result.solution = state.solution();
            result.stats.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
            result.stats.distance_before_tighten = result.solution.total_distance;
            return result;
        }
    }

    void SolveConfig::validate() const
    {
        rollout.validate();
        if (delta < 0 || delta_tighten < 0)
            throw std::invalid_argument("delta values must be >= 0");
        if (timeout_ms < 1)
            throw std::invalid_argument("optimizer timeout must be >= 1 ms");
        if (max_optional < 0)
            throw std::invalid_argument("opportunistic cap must be >= 0");
    }

    std::vector<int> opportunistic_set(const EpisodeState &state, const std::vector<int> &committed, int cap)
    {
        const auto &summary = state.summary();
        const auto &dist = state.dist();
        std::vector<std::pair<double, int>> found;
        for (int c : state.unserved())
        {
            if (std::find(committed.begin(), committed.end(), c) != committed.end())
                continue;
            double nearest = -1.0;
            for (int r : committed)
                if (summary.cluster_of[static_cast<std::size_t>(r)] == summary.cluster_of[static_cast<std::size_t>(c)])
                {
                    const double d = dist(r, c);
                    if (nearest < 0.0 || d < nearest)
                        nearest = d;
                }
            if (nearest >= 0.0)
                found.emplace_back(nearest, c);
        }
        std::sort(found.begin(), found.end());
        std::vector<int> out;
        for (std::size_t i = 0; i < found.size() && out.size() < static_cast<std::size_t>(std::max(cap, 0)); ++i)
            out.push_back(found[i].second);
        return out;
    }

    Solution tighten_solution(const ProblemData &data, const Solution &sol, int delta, int timeout_ms, SolveStats *stats, std::ostream *opt_log)
    {
        Solution out;
        out.instance = sol.instance;
        for (const auto &route : sol.routes)
        {
            std::vector<int> ids;
            for (const auto &s : route.stops)
                ids.push_back(s.customer);
            if (ids.size() < 2 || ids.size() > 63)
            {
                out.routes.push_back(route);
                continue;
            }
            SubtourProblem problem;
            problem.committed = ids;
            problem.delta = delta;
            problem.budget = std::chrono::milliseconds{timeout_ms};
            const SubtourSolution opt = optimize(data.instance, data.dist, problem);
            if (stats)
            {
                ++stats->optimizer_calls;
                if (!opt.proven_optimal || opt.delta_used != delta)
                    ++stats->optimizer_timeouts;
            }
            if (opt_log)
                write_log_line(*opt_log, problem, opt);
            out.routes.push_back({route.vehicle, schedule_route(data.instance, data.dist, opt.order)});
        }
        out.total_distance = solution_distance(data.dist, out);
        return out;
    }

    EpisodeResult solve(std::shared_ptr<const ProblemData> data, const NetworkParams &params, const SolveConfig &config,
                        std::ostream *opt_log, std::ostream *trace)
    {
        config.validate();
        const auto t0 = Clock::now();
        EpisodeResult result{EpisodeState(data, false), {}, {}};
        EpisodeState &state = result.state;
        SolveStats &stats = result.stats;

        while (!state.done())
        {
            if (config.observer)
                config.observer(state);
            const Selection sel = select(state, params, config.rollout);
            stats.nodes += sel.nodes;
            if (stats.outer_steps == 0)
                stats.first_best = sel.winner.distance;
            ++stats.outer_steps;

            const int vehicle = sel.winner.first.vehicle;
            std::vector<int> sequence = sel.winner.continuation;
            if (config.forward_opt && !sequence.empty())
            {
                const VehicleState &v = state.vehicle(vehicle);
                SubtourProblem problem;
                problem.start = v.location;
                problem.clock = v.clock;
                problem.load = v.load;
                problem.committed = sequence;
                problem.optional = opportunistic_set(state, sequence, config.max_optional);
                problem.delta = config.delta;
                problem.skip_penalty = state.summary().d_max;
                problem.budget = std::chrono::milliseconds{config.timeout_ms};
                const SubtourSolution opt = optimize(data->instance, data->dist, problem);
                ++stats.optimizer_calls;
                if (!opt.proven_optimal || opt.delta_used != config.delta)
                    ++stats.optimizer_timeouts;
                if (opt_log)
                    write_log_line(*opt_log, problem, opt);
                sequence = opt.order;
            }
            for (int c : sequence)
            {
                trace_line(trace, {vehicle, c}, sel.winner.distance, false);
                state.apply({vehicle, c});
            }
        }
        state.finish_all();
        result.solution = state.solution();
        stats.distance_before_tighten = result.solution.total_distance;
        if (config.tighten)
            result.solution = tighten_solution(*data, result.solution, config.delta_tighten, config.timeout_ms, &stats, opt_log);
        stats.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        return result;
    }

    EpisodeResult run_episode(std::shared_ptr<const ProblemData> data, const NetworkParams &params, const EpisodeOptions &options)
    {
        if (options.mode == PolicyMode::Rollout)
            return solve(std::move(data), params, options.solve, options.opt_log, options.trace);
        return run_policy(std::move(data), params, options);
    }
}

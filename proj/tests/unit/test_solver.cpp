#include "helpers.hpp"

#include "cvrptw/solver.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace cvrptw;
using test_support::make_instance;

namespace
{
    std::size_t line_count(const std::string &s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }
}

TEST_SUITE("solver")
{
    TEST_CASE("one customer in every mode")
    {
        const auto data = ProblemData::make(make_instance({0, 0}, {{3, 4, 1, 0, 100, 0}}));
        const NetworkParams p = init_network(1);
        for (PolicyMode mode : {PolicyMode::Explore, PolicyMode::Greedy, PolicyMode::Rollout})
        {
            EpisodeOptions opt;
            opt.mode = mode;
            opt.epsilon = 0.5;
            const auto r = run_episode(data, p, opt);
            REQUIRE(r.solution.routes.size() == 1);
            CHECK(r.solution.routes[0].stops == std::vector<Stop>{{1, 5.0}});
            CHECK(r.solution.total_distance == 10.0);
        }
    }

    TEST_CASE("greedy episodes are deterministic and feasible")
    {
        const auto data = test_support::c101_25();
        const NetworkParams p = init_network(4);
        EpisodeOptions opt;
        opt.mode = PolicyMode::Greedy;
        const auto a = run_episode(data, p, opt);
        opt.seed = 999; // greedy ignores the seed
        const auto b = run_episode(data, p, opt);
        CHECK(a.solution.routes == b.solution.routes);
        CHECK(check_feasible(data->instance, a.solution).ok());
    }

    TEST_CASE("explore episodes depend on the seed only")
    {
        const auto data = test_support::c101_25();
        const NetworkParams p = init_network(4);
        EpisodeOptions opt;
        opt.mode = PolicyMode::Explore;
        opt.epsilon = 0.5;
        opt.seed = 1;
        std::size_t steps = 0;
        opt.after_step = [&](EpisodeState &) { ++steps; };
        const auto a = run_episode(data, p, opt);
        const auto b = run_episode(data, p, opt);
        CHECK(a.solution.routes == b.solution.routes);
        CHECK(steps == 50);
        opt.seed = 2;
        const auto c = run_episode(data, p, opt);
        CHECK_FALSE(a.solution.routes == c.solution.routes);
        CHECK(check_feasible(data->instance, c.solution).ok());
    }

    TEST_CASE("rollout solve: feasible, reproducible, tightening never lengthens")
    {
        const auto data = test_support::c101_25();
        const NetworkParams p = init_network(6);
        SolveConfig cfg;
        cfg.rollout.kappa = 3;
        cfg.rollout.seed = 17;
        std::size_t observed = 0;
        cfg.observer = [&](const EpisodeState &) { ++observed; };
        std::ostringstream log, trace;
        const auto a = solve(data, p, cfg, &log, &trace);
        const auto report = check_feasible(data->instance, a.solution);
        CHECK_MESSAGE(report.ok(), report.summary());
        CHECK(a.solution.total_distance <= a.stats.distance_before_tighten + 1e-9);
        CHECK(observed == a.stats.outer_steps);
        CHECK(a.stats.outer_steps <= 25);
        CHECK(a.stats.optimizer_calls >= a.stats.outer_steps);
        CHECK(a.stats.nodes > 0);
        CHECK(line_count(trace.str()) == 25);
        CHECK(line_count(log.str()) == a.stats.optimizer_calls);

        const auto b = solve(data, p, cfg);
        CHECK(a.solution.routes == b.solution.routes);
        CHECK(a.stats.nodes == b.stats.nodes);
    }

    TEST_CASE("without forward optimization each step commits the winner's continuation")
    {
        const auto data = test_support::c101_25();
        const NetworkParams p = init_network(6);
        SolveConfig cfg;
        cfg.forward_opt = false;
        cfg.tighten = false;
        cfg.rollout.kappa = 2;
        cfg.rollout.max_subtour = 1;
        const auto r = solve(data, p, cfg);
        CHECK(r.stats.outer_steps == 25); // one customer per step
        CHECK(r.stats.optimizer_calls == 0);
        CHECK(r.solution.total_distance == r.stats.distance_before_tighten);
        CHECK(check_feasible(data->instance, r.solution).ok());
    }

    TEST_CASE("opportunistic set: unserved cluster-mates, nearest first, capped")
    {
        const auto data = test_support::c101_25();
        const EpisodeState state(data);
        const auto &s = data->summary;
        int big = 0;
        for (std::size_t k = 0; k < s.clusters.size(); ++k)
            if (s.clusters[k].members.size() > s.clusters[static_cast<std::size_t>(big)].members.size())
                big = static_cast<int>(k);
        const auto &members = s.clusters[static_cast<std::size_t>(big)].members;
        REQUIRE(members.size() >= 3);
        const int r = members.front();
        const auto set = opportunistic_set(state, {r}, 100);
        CHECK(set.size() == members.size() - 1);
        for (std::size_t i = 0; i < set.size(); ++i)
        {
            CHECK(s.cluster_of[static_cast<std::size_t>(set[i])] == big);
            CHECK(set[i] != r);
            if (i > 0)
                CHECK(data->dist(r, set[i - 1]) <= data->dist(r, set[i]));
        }
        CHECK(opportunistic_set(state, {r}, 1).size() == 1);
        CHECK(opportunistic_set(state, {r}, 0).empty());
    }

    TEST_CASE("tighten_solution repairs a scrambled route")
    {
        const auto data = ProblemData::make(make_instance({0, 0}, {{10, 0, 1, 0, 500, 0}, {10, 10, 1, 0, 500, 0}, {0, 10, 1, 0, 500, 0}}));
        Solution sol;
        sol.instance = "T";
        sol.routes.push_back({0, schedule_route(data->instance, data->dist, {2, 1, 3})});
        sol.total_distance = solution_distance(data->dist, sol);
        SolveStats stats;
        const Solution fixed = tighten_solution(*data, sol, 3, 1000, &stats);
        CHECK(fixed.total_distance == doctest::Approx(40.0));
        CHECK(stats.optimizer_calls == 1);
        CHECK(check_feasible(data->instance, fixed).ok());
    }

    TEST_CASE("config validation")
    {
        SolveConfig c;
        CHECK_NOTHROW(c.validate());
        c.delta = -1;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
        c = SolveConfig{};
        c.timeout_ms = 0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
        c = SolveConfig{};
        c.rollout.kappa = 0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
}

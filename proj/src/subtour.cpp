#include "cvrptw/subtour.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace cvrptw
{
    namespace
    {
        constexpr double kInfinity = std::numeric_limits<double>::infinity();
        constexpr double kImprovement = 1e-9;

        using Clock = std::chrono::steady_clock;

        struct Label
        {
            double cost;
            double time; // service completion at `last`
            int item;    // -1 = start node
            int parent;  // index into the label pool, -1 for the root
        };

        // (committed placed mask, optional placed mask, last item)
        using StateKey = std::tuple<std::uint64_t, std::uint32_t, int>;

        struct Search
        {
            const Instance &inst;
            const DistanceMatrix &dist;
            const SubtourProblem &problem;
            std::vector<int> node;      // item -> customer id
            std::vector<double> demand; // item -> demand
            int r = 0;
            int a = 0;

            Search(const Instance &i, const DistanceMatrix &d, const SubtourProblem &p) : inst(i), dist(d), problem(p)
            {
                r = static_cast<int>(p.committed.size());
                a = static_cast<int>(p.optional.size());
                for (int c : p.committed)
                    node.push_back(c);
                for (int c : p.optional)
                    node.push_back(c);
                for (int c : node)
                    demand.push_back(inst.customer(c).demand);
            }

            int at(int item) const { return item < 0 ? problem.start : node[static_cast<std::size_t>(item)]; }

            struct Outcome
            {
                bool completed = false;
                double objective = kInfinity;
                std::vector<int> items;
                std::size_t labels = 0;
            };

            // Label-setting DP over positions. Within a state (placed sets, last item) only
            // labels that are Pareto-optimal in (cost, completion time) are kept: later
            // feasibility is monotone in time and the remaining cost does not depend on it.
            Outcome run(int delta, double incumbent, Clock::time_point deadline) const
            {
                Outcome out;
                out.objective = incumbent;
                const std::uint64_t all_committed = r == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << r) - 1;
                std::vector<Label> pool;
                pool.push_back({0.0, problem.clock, -1, -1});
                std::map<StateKey, std::vector<int>> layer;
                layer[{0, 0, -1}] = {0};
                int best_label = -1;

                const int total = r + a;
                for (int k = 0; k <= total && !layer.empty(); ++k)
                {
                    std::map<StateKey, std::vector<int>> next;
                    for (const auto &[key, labels] : layer)
                    {
                        const auto [rmask, amask, last] = key;
                        double load = problem.load;
                        for (int i = 0; i < total; ++i)
                        {
                            const bool placed = i < r ? (rmask >> i) & 1U : (amask >> (i - r)) & 1U;
                            if (placed)
                                load += demand[static_cast<std::size_t>(i)];
                        }
                        const int skipped = a - std::popcount(amask);

                        for (int li : labels)
                        {
                            const Label lab = pool[static_cast<std::size_t>(li)];
                            if (rmask == all_committed)
                            {
                                const double j = lab.cost + dist(at(last), 0) + problem.skip_penalty * skipped;
                                if (j < out.objective - kImprovement)
                                {
                                    out.objective = j;
                                    best_label = li;
                                }
                            }
                            if (k == total)
                                continue;
                            const int pos = k + 1;
                            for (int i = 0; i < total; ++i)
                            {
                                const bool is_committed = i < r;
                                const bool placed = is_committed ? (rmask >> i) & 1U : (amask >> (i - r)) & 1U;
                                if (placed)
                                    continue;
                                if (is_committed && std::abs(pos - (i + 1)) > delta)
                                    continue;
                                if (load + demand[static_cast<std::size_t>(i)] > inst.capacity)
                                    continue;
                                const std::uint64_t nr = is_committed ? rmask | (std::uint64_t{1} << i) : rmask;
                                const std::uint32_t na = is_committed ? amask : amask | (1U << (i - r));
                                // Every committed customer still unplaced must fit at a later position.
                                bool dead = false;
                                for (int j = 0; j < r && !dead; ++j)
                                    if (!((nr >> j) & 1U) && j + 1 + delta < pos + 1)
                                        dead = true;
                                if (dead)
                                    continue;

                                const int cid = node[static_cast<std::size_t>(i)];
                                const Customer &c = inst.customer(cid);
                                const double leg = dist(at(last), cid);
                                const double start = std::max(lab.time + leg / inst.speed, c.ready);
                                if (start > c.due)
                                    continue;
                                const Label cand{lab.cost + leg, start + c.service, i, li};

                                auto &bucket = next[{nr, na, i}];
                                bool dominated = false;
                                for (int other : bucket)
                                {
                                    const Label &o = pool[static_cast<std::size_t>(other)];
                                    if (o.cost <= cand.cost && o.time <= cand.time)
                                    {
                                        dominated = true;
                                        break;
                                    }
                                }
                                if (dominated)
                                    continue;
                                std::erase_if(bucket, [&](int other)
                                              {
                                                  const Label &o = pool[static_cast<std::size_t>(other)];
                                                  return cand.cost <= o.cost && cand.time <= o.time; });
                                bucket.push_back(static_cast<int>(pool.size()));
                                pool.push_back(cand);
                                ++out.labels;
                                if ((problem.label_limit > 0 && out.labels > problem.label_limit) ||
                                    ((out.labels & 0xFFF) == 0 && Clock::now() > deadline))
                                    return out;
                            }
                        }
                    }
                    layer = std::move(next);
                }
                out.completed = true;
                for (int li = best_label; li >= 0 && pool[static_cast<std::size_t>(li)].item >= 0; li = pool[static_cast<std::size_t>(li)].parent)
                    out.items.push_back(pool[static_cast<std::size_t>(li)].item);
                std::reverse(out.items.begin(), out.items.end());
                return out;
            }
        };

        SubtourSolution make_solution(const Instance &inst, const DistanceMatrix &dist, const SubtourProblem &problem, const std::vector<int> &order)
        {
            SubtourSolution sol;
            sol.order = order;
            sol.committed_pos.assign(problem.committed.size(), -1);
            sol.optional_pos.assign(problem.optional.size(), -1);
            int prev = problem.start;
            double time = problem.clock;
            for (std::size_t p = 0; p < order.size(); ++p)
            {
                const int cid = order[p];
                const double start = earliest_start(inst, dist, prev, time, cid);
                sol.starts.push_back(start);
                sol.travel += dist(prev, cid);
                prev = cid;
                time = start + inst.customer(cid).service;
                if (auto it = std::find(problem.committed.begin(), problem.committed.end(), cid); it != problem.committed.end())
                    sol.committed_pos[static_cast<std::size_t>(it - problem.committed.begin())] = static_cast<int>(p + 1);
                else if (auto jt = std::find(problem.optional.begin(), problem.optional.end(), cid); jt != problem.optional.end())
                    sol.optional_pos[static_cast<std::size_t>(jt - problem.optional.begin())] = static_cast<int>(p + 1);
            }
            sol.travel += dist(prev, 0);
            sol.skipped = static_cast<int>(std::count(sol.optional_pos.begin(), sol.optional_pos.end(), -1));
            sol.objective = sol.travel + problem.skip_penalty * sol.skipped;
            return sol;
        }

        // Delta = 0 fallback: committed order fixed, optional customers appended one at a time
        // while that lowers the objective.
        std::vector<int> greedy_append(const Instance &inst, const DistanceMatrix &dist, const SubtourProblem &problem)
        {
            std::vector<int> order = problem.committed;
            std::vector<int> pool = problem.optional;
            double best = subtour_objective(inst, dist, problem, order, 0);
            bool improved = true;
            while (improved && !pool.empty())
            {
                improved = false;
                std::size_t pick = pool.size();
                for (std::size_t i = 0; i < pool.size(); ++i)
                {
                    auto trial = order;
                    trial.push_back(pool[i]);
                    const double j = subtour_objective(inst, dist, problem, trial, 0);
                    if (j < best - kImprovement)
                    {
                        best = j;
                        pick = i;
                    }
                }
                if (pick < pool.size())
                {
                    order.push_back(pool[pick]);
                    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
                    improved = true;
                }
            }
            return order;
        }
    }

    double subtour_objective(const Instance &inst, const DistanceMatrix &dist, const SubtourProblem &problem, const std::vector<int> &order, int delta)
    {
        double load = problem.load;
        double time = problem.clock;
        double cost = 0.0;
        int prev = problem.start;
        std::vector<char> seen(inst.size() + 1, 0);
        int optional_served = 0;
        for (std::size_t p = 0; p < order.size(); ++p)
        {
            const int cid = order[p];
            if (cid < 1 || static_cast<std::size_t>(cid) > inst.size() || seen[static_cast<std::size_t>(cid)])
                return kInfinity;
            seen[static_cast<std::size_t>(cid)] = 1;
            if (auto it = std::find(problem.committed.begin(), problem.committed.end(), cid); it != problem.committed.end())
            {
                const auto home = static_cast<int>(it - problem.committed.begin()) + 1;
                if (std::abs(static_cast<int>(p + 1) - home) > delta)
                    return kInfinity;
            }
            else if (std::find(problem.optional.begin(), problem.optional.end(), cid) != problem.optional.end())
                ++optional_served;
            else
                return kInfinity;
            const Customer &c = inst.customer(cid);
            load += c.demand;
            if (load > inst.capacity)
                return kInfinity;
            const double start = std::max(time + dist(prev, cid) / inst.speed, c.ready);
            if (start > c.due)
                return kInfinity;
            cost += dist(prev, cid);
            time = start + c.service;
            prev = cid;
        }
        for (int cid : problem.committed)
            if (!seen[static_cast<std::size_t>(cid)])
                return kInfinity;
        const auto skipped = static_cast<int>(problem.optional.size()) - optional_served;
        return cost + dist(prev, 0) + problem.skip_penalty * skipped;
    }

    SubtourSolution optimize(const Instance &inst, const DistanceMatrix &dist, const SubtourProblem &problem)
    {
        if (problem.committed.empty())
            throw std::invalid_argument("optimize: committed sub-tour must not be empty");
        if (problem.committed.size() > 63 || problem.optional.size() > 31)
            throw std::invalid_argument("optimize: sub-tour too large");
        if (problem.delta < 0)
            throw std::invalid_argument("optimize: delta must be >= 0");
        for (int c : problem.optional)
            if (std::find(problem.committed.begin(), problem.committed.end(), c) != problem.committed.end())
                throw std::invalid_argument("optimize: committed and optional sets overlap");

        const auto t0 = Clock::now();
        const double base = subtour_objective(inst, dist, problem, problem.committed, 0);
        if (!(base < kInfinity))
            throw ContractViolation("optimize: the committed order is not feasible from the start state");

        const Search search(inst, dist, problem);
        std::size_t labels = 0;
        for (int delta = problem.delta; delta >= 0; --delta)
        {
            const auto outcome = search.run(delta, base, Clock::now() + problem.budget);
            labels += outcome.labels;
            if (!outcome.completed)
                continue;
            std::vector<int> order = problem.committed;
            if (!outcome.items.empty())
            {
                order.clear();
                for (int item : outcome.items)
                    order.push_back(search.node[static_cast<std::size_t>(item)]);
            }
            SubtourSolution sol = make_solution(inst, dist, problem, order);
            sol.proven_optimal = true;
            sol.delta_used = delta;
            sol.labels = labels;
            sol.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
            return sol;
        }

        SubtourSolution sol = make_solution(inst, dist, problem, greedy_append(inst, dist, problem));
        sol.proven_optimal = false;
        sol.delta_used = 0;
        sol.labels = labels;
        sol.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        return sol;
    }

    SubtourSolution tighten(const Instance &inst, const DistanceMatrix &dist, const std::vector<int> &route, int delta, std::chrono::milliseconds budget)
    {
        SubtourProblem problem;
        problem.start = 0;
        problem.clock = 0.0;
        problem.load = 0.0;
        problem.committed = route;
        problem.delta = delta;
        problem.budget = budget;
        return optimize(inst, dist, problem);
    }

    void write_log_line(std::ostream &out, const SubtourProblem &problem, const SubtourSolution &solution)
    {
        out << "subtour |R|=" << problem.committed.size() << " |A|=" << problem.optional.size()
            << " delta=" << solution.delta_used << " labels=" << solution.labels
            << " ms=" << solution.elapsed_ms << " optimal=" << (solution.proven_optimal ? 1 : 0) << '\n';
    }
}

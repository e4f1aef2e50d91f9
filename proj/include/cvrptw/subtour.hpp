#pragma once

#include "cvrptw/instance.hpp"

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace cvrptw
{
    inline constexpr int kDefaultForwardDelta = 2;
    inline constexpr int kDefaultTightenDelta = 3;
    inline constexpr int kDefaultTimeoutMs = 1000;

    /// Re-sequencing problem for one vehicle's pending sub-tour.
    ///
    /// Customers in `committed` (R) must all be served and each may move at most `delta`
    /// positions away from its place in `committed` (positions are 1-based and count every
    /// served customer, opportunistic ones included). Customers in `optional` (A) may be
    /// served anywhere or skipped at `skip_penalty` each.
    struct SubtourProblem
    {
        int start = 0;      // node the vehicle is at, 0 = depot
        double clock = 0.0; // time the vehicle may leave `start`
        double load = 0.0;  // load already on board
        std::vector<int> committed;
        std::vector<int> optional;
        int delta = kDefaultForwardDelta;
        double skip_penalty = 0.0;
        std::chrono::milliseconds budget{kDefaultTimeoutMs}; // per attempt at a given delta
        std::size_t label_limit = 0;                         // 0 = no limit; deterministic budget for tests
    };

    struct SubtourSolution
    {
        std::vector<int> order;           // served customers in sequence
        std::vector<double> starts;       // service start per entry of `order`
        std::vector<int> committed_pos;   // O_i for committed[i]
        std::vector<int> optional_pos;    // O_i for optional[i], -1 when skipped
        double objective = 0.0;           // legs + skip penalties + return leg
        double travel = 0.0;              // legs + return leg only
        int skipped = 0;
        bool proven_optimal = false;
        int delta_used = 0;
        std::size_t labels = 0;           // search effort across attempts
        double elapsed_ms = 0.0;
    };

    /// Objective of serving `order` (all of R plus any subset of A), or +infinity when `order`
    /// breaks a window, the capacity or the position-shift limit `delta`.
    double subtour_objective(const Instance &inst, const DistanceMatrix &dist, const SubtourProblem &problem, const std::vector<int> &order, int delta);

    /// Exact minimum of the objective under the constraints, shrinking delta when an attempt
    /// runs out of budget. Precondition: `committed` in its given order is feasible.
    SubtourSolution optimize(const Instance &inst, const DistanceMatrix &dist, const SubtourProblem &problem);

    /// Re-sequences a complete depot-to-depot route.
    SubtourSolution tighten(const Instance &inst, const DistanceMatrix &dist, const std::vector<int> &route,
                            int delta = kDefaultTightenDelta, std::chrono::milliseconds budget = std::chrono::milliseconds{kDefaultTimeoutMs});

    /// One log line: |R|, |A|, delta used, labels, time, proven flag.
    void write_log_line(std::ostream &out, const SubtourProblem &problem, const SubtourSolution &solution);
}

#pragma once

#include "cvrptw/episode.hpp"
#include "cvrptw/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cvrptw
{
    /// "C1-25" style label from the instance name prefix and customer count, if the name
    /// follows the Solomon naming (C1xx, R2xx, RC1xx, ...).
    std::optional<std::string> group_label(const Instance &inst);

    /// Best-known group mean distance, from published benchmark tables (sizes 25, 50, 100).
    std::optional<double> best_known_mean(const std::string &group);

    /// 64-bit FNV-1a.
    std::uint64_t fnv1a(std::string_view text);

    /// Seed for one instance, derived from the master seed and the instance name.
    std::uint64_t instance_seed(std::uint64_t master, const std::string &name);

    struct InstanceRun
    {
        std::string instance;
        std::string group;
        bool ok = false;
        std::string error;
        Solution solution;
        SolveStats stats;
        std::size_t vehicles = 0;
    };

    struct BenchRow
    {
        std::string group;
        std::size_t instances = 0;
        std::size_t failures = 0;
        double mean_distance = 0.0;
        double mean_wall_ms = 0.0;
        double mean_vehicles = 0.0;
        std::optional<double> best_known;
    };

    /// Solves every problem with its own derived seed; failures are recorded, not thrown.
    /// Returned solutions have already passed check_feasible.
    std::vector<InstanceRun> run_instances(const std::vector<std::shared_ptr<const ProblemData>> &problems, const NetworkParams &params,
                                           const SolveConfig &config, std::uint64_t seed, int jobs = 1);

    /// Group rows in first-seen order; failed instances count only in `failures`.
    std::vector<BenchRow> aggregate(const std::vector<InstanceRun> &runs);

    void write_bench_csv(std::ostream &out, const std::vector<BenchRow> &rows);
    void write_bench_timing_csv(std::ostream &out, const std::vector<BenchRow> &rows);
    void write_detail_csv(std::ostream &out, const std::vector<InstanceRun> &runs);
    void write_detail_timing_csv(std::ostream &out, const std::vector<InstanceRun> &runs);

    struct SweepRow
    {
        int kappa = 0;
        double mean_distance = 0.0;
        double mean_best_found = 0.0; // best completed rollout at the first decision
        double mean_wall_ms = 0.0;
        std::size_t nodes = 0;
        std::size_t failures = 0;
        std::vector<InstanceRun> runs;
    };

    std::vector<SweepRow> run_sweep(const std::vector<std::shared_ptr<const ProblemData>> &problems, const NetworkParams &params,
                                    const SolveConfig &config, const std::vector<int> &kappas, std::uint64_t seed);

    void write_sweep_csv(std::ostream &out, const std::vector<SweepRow> &rows);
    void write_sweep_timing_csv(std::ostream &out, const std::vector<SweepRow> &rows);
    void write_sweep_detail_csv(std::ostream &out, const std::vector<SweepRow> &rows);
}

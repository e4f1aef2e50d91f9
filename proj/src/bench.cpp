#include "cvrptw/bench.hpp"

#include "cvrptw/format.hpp"
#include "cvrptw/rollout.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>
#include <ostream>
#include <regex>
#include <thread>

namespace cvrptw
{
    namespace
    {
        // Best-known group means (distance), sizes 25 / 50 / 100.
        const std::map<std::string, double> kBestKnown{
            {"C1-25", 191}, {"R1-25", 464}, {"RC1-25", 350}, {"C2-25", 216}, {"R2-25", 382}, {"RC2-25", 319},
            {"C1-50", 362}, {"R1-50", 766}, {"RC1-50", 730}, {"C2-50", 357}, {"R2-50", 634}, {"RC2-50", 585},
            {"C1-100", 826}, {"R1-100", 1210}, {"RC1-100", 1384}, {"C2-100", 587}, {"R2-100", 902}, {"RC2-100", 1063},
        };

        std::string optional_number(const std::optional<double> &v)
        {
            return v ? format_number(*v) : std::string();
        }

        InstanceRun solve_one(const std::shared_ptr<const ProblemData> &data, const NetworkParams &params, SolveConfig config, std::uint64_t seed)
        {
            InstanceRun run;
            run.instance = data->instance.name;
            run.group = group_label(data->instance).value_or("other-" + std::to_string(data->instance.size()));
            config.rollout.seed = instance_seed(seed, run.instance);
            try
            {
                EpisodeResult r = solve(data, params, config);
                const FeasibilityReport report = check_feasible(data->instance, data->dist, r.solution);
                if (!report.ok())
                    throw ContractViolation("infeasible solution: " + report.summary());
                run.solution = std::move(r.solution);
                run.stats = r.stats;
                run.vehicles = run.solution.vehicle_count();
                run.ok = true;
            }
            catch (const std::exception &e)
            {
                run.error = e.what();
            }
            return run;
        }
    }

    std::optional<std::string> group_label(const Instance &inst)
    {
        static const std::regex pattern(R"(^(RC|R|C)([12])\d\d(s?)\b)", std::regex::icase);
        std::smatch m;
        if (!std::regex_search(inst.name, m, pattern))
            return std::nullopt;
        std::string cls = m[1].str();
        std::transform(cls.begin(), cls.end(), cls.begin(), [](unsigned char c)
                       { return static_cast<char>(std::toupper(c)); });
        // generated surrogates keep their "s" so they never meet the real reference means
        return cls + m[2].str() + "-" + std::to_string(inst.size()) + (m[3].length() ? "s" : "");
    }

    std::optional<double> best_known_mean(const std::string &group)
    {
        const auto it = kBestKnown.find(group);
        if (it == kBestKnown.end())
            return std::nullopt;
        return it->second;
    }

    std::uint64_t fnv1a(std::string_view text)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : text)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    std::uint64_t instance_seed(std::uint64_t master, const std::string &name)
    {
        return mix_seed({master, fnv1a(name)});
    }

    std::vector<InstanceRun> run_instances(const std::vector<std::shared_ptr<const ProblemData>> &problems, const NetworkParams &params,
                                           const SolveConfig &config, std::uint64_t seed, int jobs)
    {
        config.validate();
        std::vector<InstanceRun> runs(problems.size());
        const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, std::max(1, static_cast<int>(problems.size()))));
        if (workers == 1)
        {
            for (std::size_t i = 0; i < problems.size(); ++i)
                runs[i] = solve_one(problems[i], params, config, seed);
            return runs;
        }
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&]
                              {
                for (std::size_t i = next++; i < problems.size(); i = next++)
                    runs[i] = solve_one(problems[i], params, config, seed); });
        pool.clear();
        return runs;
    }

    std::vector<BenchRow> aggregate(const std::vector<InstanceRun> &runs)
    {
        std::vector<BenchRow> rows;
        for (const auto &run : runs)
        {
            auto it = std::find_if(rows.begin(), rows.end(), [&](const BenchRow &r)
                                   { return r.group == run.group; });
            if (it == rows.end())
            {
                rows.push_back({});
                rows.back().group = run.group;
                rows.back().best_known = best_known_mean(run.group);
                it = rows.end() - 1;
            }
            if (!run.ok)
            {
                ++it->failures;
                continue;
            }
            ++it->instances;
            it->mean_distance += run.solution.total_distance;
            it->mean_wall_ms += run.stats.wall_ms;
            it->mean_vehicles += static_cast<double>(run.vehicles);
        }
        for (auto &r : rows)
            if (r.instances)
            {
                const auto n = static_cast<double>(r.instances);
                r.mean_distance /= n;
                r.mean_wall_ms /= n;
                r.mean_vehicles /= n;
            }
        return rows;
    }

    void write_bench_csv(std::ostream &out, const std::vector<BenchRow> &rows)
    {
        out << "group,instances,failures,mean_distance,mean_vehicles,best_known,gap_pct\n";
        for (const auto &r : rows)
        {
            std::optional<double> gap;
            if (r.best_known && r.instances)
                gap = 100.0 * (r.mean_distance - *r.best_known) / *r.best_known;
            out << r.group << ',' << r.instances << ',' << r.failures << ','
                << (r.instances ? format_number(r.mean_distance) : std::string()) << ','
                << (r.instances ? format_number(r.mean_vehicles) : std::string()) << ','
                << optional_number(r.best_known) << ',' << optional_number(gap) << '\n';
        }
    }

    void write_bench_timing_csv(std::ostream &out, const std::vector<BenchRow> &rows)
    {
        out << "group,mean_wall_ms\n";
        for (const auto &r : rows)
            out << r.group << ',' << format_number(r.mean_wall_ms) << '\n';
    }

    void write_detail_csv(std::ostream &out, const std::vector<InstanceRun> &runs)
    {
        out << "instance,group,status,distance,distance_before_tighten,vehicles,nodes,optimizer_calls,optimizer_timeouts,error\n";
        for (const auto &r : runs)
        {
            out << r.instance << ',' << r.group << ',' << (r.ok ? "ok" : "failed") << ',';
            if (r.ok)
                out << format_number(r.solution.total_distance) << ',' << format_number(r.stats.distance_before_tighten) << ','
                    << r.vehicles << ',' << r.stats.nodes << ',' << r.stats.optimizer_calls << ',' << r.stats.optimizer_timeouts << ',';
            else
                out << ",,,,,,";
            std::string err = r.error;
            std::replace(err.begin(), err.end(), ',', ';');
            std::replace(err.begin(), err.end(), '\n', ' ');
            out << err << '\n';
        }
    }

    void write_detail_timing_csv(std::ostream &out, const std::vector<InstanceRun> &runs)
    {
        out << "instance,wall_ms\n";
        for (const auto &r : runs)
            out << r.instance << ',' << (r.ok ? format_number(r.stats.wall_ms) : std::string()) << '\n';
    }

    std::vector<SweepRow> run_sweep(const std::vector<std::shared_ptr<const ProblemData>> &problems, const NetworkParams &params,
                                    const SolveConfig &config, const std::vector<int> &kappas, std::uint64_t seed)
    {
        std::vector<SweepRow> rows;
        for (int kappa : kappas)
        {
            SolveConfig c = config;
            c.rollout.kappa = kappa;
            SweepRow row;
            row.kappa = kappa;
            row.runs = run_instances(problems, params, c, seed);
            std::size_t solved = 0;
            for (const auto &r : row.runs)
            {
                if (!r.ok)
                {
                    ++row.failures;
                    continue;
                }
                ++solved;
                row.mean_distance += r.solution.total_distance;
                row.mean_best_found += r.stats.first_best;
                row.mean_wall_ms += r.stats.wall_ms;
                row.nodes += r.stats.nodes;
            }
            if (solved)
            {
                row.mean_distance /= static_cast<double>(solved);
                row.mean_best_found /= static_cast<double>(solved);
                row.mean_wall_ms /= static_cast<double>(solved);
            }
            rows.push_back(std::move(row));
        }
        return rows;
    }

    void write_sweep_csv(std::ostream &out, const std::vector<SweepRow> &rows)
    {
        out << "kappa,instances,failures,mean_distance,best_found,nodes\n";
        for (const auto &r : rows)
            out << r.kappa << ',' << r.runs.size() - r.failures << ',' << r.failures << ',' << format_number(r.mean_distance) << ','
                << format_number(r.mean_best_found) << ',' << r.nodes << '\n';
    }

    void write_sweep_timing_csv(std::ostream &out, const std::vector<SweepRow> &rows)
    {
        out << "kappa,mean_wall_ms\n";
        for (const auto &r : rows)
            out << r.kappa << ',' << format_number(r.mean_wall_ms) << '\n';
    }

    void write_sweep_detail_csv(std::ostream &out, const std::vector<SweepRow> &rows)
    {
        out << "kappa,instance,status,distance,best_found,nodes\n";
        for (const auto &row : rows)
            for (const auto &r : row.runs)
                out << row.kappa << ',' << r.instance << ',' << (r.ok ? "ok" : "failed") << ','
                    << (r.ok ? format_number(r.solution.total_distance) : std::string()) << ','
                    << (r.ok ? format_number(r.stats.first_best) : std::string()) << ',' << r.stats.nodes << '\n';
    }
}

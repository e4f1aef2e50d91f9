#include "commands.hpp"

#include "cvrptw/bench.hpp"
#include "cvrptw/format.hpp"
#include "cvrptw/generator.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace cvrptw::cli
{
    namespace
    {
        std::ofstream open_out(const fs::path &path)
        {
            if (path.has_parent_path())
                fs::create_directories(path.parent_path());
            std::ofstream out(path, std::ios::binary);
            if (!out)
                throw DataError("cannot write " + path.string());
            return out;
        }

        std::vector<std::shared_ptr<const ProblemData>> load_problems(const RunConfig &config)
        {
            std::vector<std::shared_ptr<const ProblemData>> problems;
            for (const auto &path : expand_instance_paths(config.instances))
            {
                try
                {
                    problems.push_back(ProblemData::make(load_solomon(path), config.cluster_n));
                }
                catch (const ParseError &e)
                {
                    throw DataError(path + ": " + e.what());
                }
            }
            if (problems.empty())
                throw DataError("no instances given (--instances)");
            return problems;
        }

        NetworkParams load_model(const RunConfig &config)
        {
            if (config.model.empty())
                throw DataError("--model is required");
            try
            {
                return load_network(config.model);
            }
            catch (const std::runtime_error &e)
            {
                throw DataError(config.model + ": " + e.what());
            }
        }

        std::uint64_t require_seed(const RunConfig &config)
        {
            if (!config.seed)
                throw std::invalid_argument("--seed is required for " + config.mode);
            return *config.seed;
        }

        int single_kappa(const RunConfig &config)
        {
            if (config.kappas.empty())
                return 5;
            if (config.kappas.size() != 1)
                throw std::invalid_argument(config.mode + " takes a single --kappa value");
            return config.kappas.front();
        }

        void write_solution_files(const fs::path &dir, const Solution &sol)
        {
            open_out(dir / (sol.instance + ".json")) << solution_to_json(sol) << '\n';
            open_out(dir / (sol.instance + ".csv")) << solution_to_csv(sol);
        }
    }

    SolveConfig RunConfig::solve_config(int kappa) const
    {
        SolveConfig c;
        c.rollout.kappa = kappa;
        c.rollout.rollouts_per_branch = rollouts_per_branch;
        c.rollout.temperature = temperature;
        c.rollout.seed = seed.value_or(0);
        c.rollout.max_subtour = max_subtour;
        c.forward_opt = !no_forward_opt;
        c.tighten = !no_tighten;
        c.delta = delta;
        c.delta_tighten = delta_tighten;
        c.timeout_ms = timeout_ms;
        c.max_optional = max_optional;
        c.validate();
        return c;
    }

    std::vector<std::string> expand_instance_paths(const std::vector<std::string> &inputs)
    {
        std::vector<std::string> out;
        for (const auto &in : inputs)
        {
            const fs::path p(in);
            if (fs::is_directory(p))
            {
                std::vector<std::string> files;
                for (const auto &entry : fs::directory_iterator(p))
                    if (entry.is_regular_file())
                        files.push_back(entry.path().string());
                std::sort(files.begin(), files.end());
                out.insert(out.end(), files.begin(), files.end());
            }
            else if (fs::is_regular_file(p))
                out.push_back(in);
            else
                throw DataError("no such instance file or directory: " + in);
        }
        return out;
    }

    int cmd_train(const RunConfig &config)
    {
        const auto problems = load_problems(config);
        TrainOptions opts;
        opts.config.learning_rate = config.learning_rate;
        opts.config.momentum = config.momentum;
        opts.config.batch_size = config.batch_size;
        opts.config.train_every = config.train_every;
        opts.config.epsilon_decay = config.epsilon_decay;
        opts.config.gamma = config.gamma;
        opts.episodes = config.episodes;
        opts.sat_from_episode = config.sat_from_episode;
        opts.seed = config.seed.value_or(0);
        opts.temperature = config.temperature;
        opts.delta_tighten = config.delta_tighten;
        opts.timeout_ms = config.timeout_ms;

        const fs::path out_dir(config.out);
        auto log = open_out(out_dir / "train_log.csv");
        const TrainResult result = train(problems, opts, &log);
        const std::string model = config.model.empty() ? (out_dir / "model.bin").string() : config.model;
        if (fs::path(model).has_parent_path())
            fs::create_directories(fs::path(model).parent_path());
        save_network(result.params, model);

        const auto &last = result.log.back();
        std::cout << "trained " << result.log.size() << " episodes, " << result.updates << " updates; last distance "
                  << format_number(last.distance) << ", epsilon " << format_number(last.epsilon) << "\nmodel: " << model << '\n';
        return kOk;
    }

    int cmd_solve(const RunConfig &config)
    {
        const auto problems = load_problems(config);
        const NetworkParams params = load_model(config);
        SolveConfig sc = config.solve_config(single_kappa(config));
        const std::uint64_t seed = config.seed.value_or(0);
        const fs::path out_dir(config.out);

        auto summary = open_out(out_dir / "solve_summary.csv");
        auto timing = open_out(out_dir / "solve_timing.csv");
        summary << "instance,distance,vehicles,distance_before_tighten\n";
        timing << "instance,wall_ms\n";
        for (const auto &data : problems)
        {
            const std::string name = data->instance.name;
            SolveConfig c = sc;
            c.rollout.seed = instance_seed(seed, name);
            std::ofstream features;
            if (config.dump_features)
            {
                features = open_out(out_dir / (name + "_features.csv"));
                write_features_csv_header(features);
                const std::size_t at = *config.dump_features;
                c.observer = [&features, at](const EpisodeState &s)
                {
                    if (s.decision_count() != at)
                        return;
                    for (const auto &d : s.feasible_pairs())
                        write_features_csv_row(features, s.decision_count(), d.vehicle, d.customer, extract(s, d.vehicle, d.customer));
                };
            }
            std::ofstream trace, opt_log;
            if (config.trace)
            {
                trace = open_out(out_dir / (name + "_trace.log"));
                opt_log = open_out(out_dir / (name + "_opt.log"));
            }
            EpisodeResult r = solve(data, params, c, config.trace ? &opt_log : nullptr, config.trace ? &trace : nullptr);
            const FeasibilityReport report = check_feasible(data->instance, data->dist, r.solution);
            if (!report.ok())
                throw ContractViolation(name + ": solver produced an infeasible solution: " + report.summary());
            write_solution_files(out_dir, r.solution);
            summary << name << ',' << format_number(r.solution.total_distance) << ',' << r.solution.vehicle_count() << ','
                    << format_number(r.stats.distance_before_tighten) << '\n';
            timing << name << ',' << format_number(r.stats.wall_ms) << '\n';
            std::cout << name << " distance " << format_number(r.solution.total_distance) << " vehicles "
                      << r.solution.vehicle_count() << " time_ms " << format_number(r.stats.wall_ms) << '\n';
        }
        return kOk;
    }

    int cmd_bench(const RunConfig &config)
    {
        const std::uint64_t seed = require_seed(config);
        const fs::path out_dir(config.out);
        std::vector<std::shared_ptr<const ProblemData>> problems;
        try
        {
            problems = load_problems(config);
        }
        catch (const DataError &)
        {
            // the table is still emitted, empty, so downstream tooling sees a well-formed file
            auto table = open_out(out_dir / "bench.csv");
            write_bench_csv(table, {});
            throw;
        }
        const NetworkParams params = load_model(config);
        const auto runs = run_instances(problems, params, config.solve_config(single_kappa(config)), seed, config.jobs);
        const auto rows = aggregate(runs);

        for (const auto &r : runs)
            if (r.ok)
                write_solution_files(out_dir / "solutions", r.solution);
        auto table = open_out(out_dir / "bench.csv");
        write_bench_csv(table, rows);
        auto table_timing = open_out(out_dir / "bench_timing.csv");
        write_bench_timing_csv(table_timing, rows);
        auto detail = open_out(out_dir / "bench_detail.csv");
        write_detail_csv(detail, runs);
        auto detail_timing = open_out(out_dir / "bench_detail_timing.csv");
        write_detail_timing_csv(detail_timing, runs);

        write_bench_csv(std::cout, rows);
        const bool failed = std::any_of(runs.begin(), runs.end(), [](const InstanceRun &r)
                                        { return !r.ok; });
        if (failed)
        {
            for (const auto &r : runs)
                if (!r.ok)
                    std::cerr << r.instance << ": " << r.error << '\n';
            return kInternalError;
        }
        return kOk;
    }

    int cmd_sweep(const RunConfig &config)
    {
        const std::uint64_t seed = require_seed(config);
        const auto problems = load_problems(config);
        const NetworkParams params = load_model(config);
        const std::vector<int> kappas = config.kappas.empty() ? std::vector<int>{1, 2, 4, 8} : config.kappas;
        const auto rows = run_sweep(problems, params, config.solve_config(kappas.front()), kappas, seed);

        const fs::path out_dir(config.out);
        auto table = open_out(out_dir / "sweep.csv");
        write_sweep_csv(table, rows);
        auto timing = open_out(out_dir / "sweep_timing.csv");
        write_sweep_timing_csv(timing, rows);
        auto detail = open_out(out_dir / "sweep_detail.csv");
        write_sweep_detail_csv(detail, rows);
        write_sweep_csv(std::cout, rows);
        for (const auto &row : rows)
            if (row.failures)
                return kInternalError;
        return kOk;
    }

    int cmd_generate(const RunConfig &config)
    {
        const fs::path out_dir(config.out);
        for (const auto &inst : generate_suite(config.size, config.seed.value_or(0)))
        {
            auto out = open_out(out_dir / (inst.name + ".txt"));
            write_solomon(out, inst);
        }
        std::cout << "wrote 56 instances of " << config.size << " customers to " << out_dir.string() << '\n';
        return kOk;
    }
}

#include "cvrptw/trainer.hpp"

#include "cvrptw/format.hpp"
#include "cvrptw/rollout.hpp"
#include "cvrptw/solver.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <stdexcept>

namespace cvrptw
{
    TrainResult train(const std::vector<std::shared_ptr<const ProblemData>> &problems, const TrainOptions &options,
                      std::ostream *log_out)
    {
        options.config.validate();
        if (problems.empty())
            throw std::invalid_argument("training needs at least one instance");

        TrainResult result;
        result.params = options.initial ? *options.initial : init_network(options.seed);
        NetworkParams &params = result.params;
        ReplayBuffer buffer;
        SgdTrainer trainer(options.config);
        std::mt19937_64 sampler(mix_seed({options.seed, 0x5A3D1EULL}));

        if (log_out)
            write_train_log_header(*log_out);

        std::size_t steps = 0;
        for (std::size_t e = 0; e < options.episodes; ++e)
        {
            const auto &data = problems[e % problems.size()];
            EpisodeLog row;
            row.episode = e + 1;
            row.instance = data->instance.name;
            row.epsilon = epsilon_after(options.config, e);

            double loss_sum = 0.0;
            std::size_t loss_count = 0;

            EpisodeOptions ep;
            ep.mode = PolicyMode::Explore;
            ep.epsilon = row.epsilon;
            ep.temperature = options.temperature;
            ep.seed = mix_seed({options.seed, static_cast<std::uint64_t>(e)});
            ep.record_features = true;
            ep.after_step = [&](EpisodeState &)
            {
                ++steps;
                if (steps % options.config.train_every != 0 || buffer.empty())
                    return;
                const auto batch = buffer.sample(options.config.batch_size, sampler);
                loss_sum += trainer.step(params, batch);
                ++loss_count;
                ++result.updates;
            };
            EpisodeResult run = run_episode(data, params, ep);

            double reward_sum = 0.0;
            std::size_t reward_count = 0;
            for (const auto &v : run.state.vehicles())
            {
                if (v.legs.empty())
                    continue;
                const auto rewards = compute_rewards(v.legs, v.return_distance, data->summary, options.config.gamma);
                for (std::size_t p = 0; p < rewards.size(); ++p)
                {
                    buffer.push({v.legs[p].features, rewards[p]});
                    reward_sum += rewards[p];
                    ++reward_count;
                }
            }

            row.decisions = run.state.decision_count();
            row.reward_mean = reward_count ? reward_sum / static_cast<double>(reward_count) : 0.0;
            row.raw_distance = run.solution.total_distance;
            row.distance = row.raw_distance;
            if (row.episode >= options.sat_from_episode)
                row.distance = tighten_solution(*data, run.solution, options.delta_tighten, options.timeout_ms).total_distance;
            if (loss_count)
                row.loss = loss_sum / static_cast<double>(loss_count);

            if (log_out)
            {
                write_train_log_row(*log_out, row);
                log_out->flush();
            }
            result.log.push_back(std::move(row));
        }
        return result;
    }

    void write_train_log_header(std::ostream &out)
    {
        out << "episode,instance,distance,raw_distance,reward_mean,epsilon,loss\n";
    }

    void write_train_log_row(std::ostream &out, const EpisodeLog &row)
    {
        out << row.episode << ',' << row.instance << ',' << format_number(row.distance) << ',' << format_number(row.raw_distance) << ','
            << format_number(row.reward_mean) << ',' << format_number(row.epsilon) << ','
            << (row.loss ? format_number(*row.loss) : std::string()) << '\n';
    }

    std::vector<double> moving_average(const std::vector<double> &values, std::size_t window)
    {
        if (window == 0)
            throw std::invalid_argument("moving average window must be >= 1");
        std::vector<double> out(values.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
        {
            sum += values[i];
            if (i >= window)
                sum -= values[i - window];
            out[i] = sum / static_cast<double>(std::min(i + 1, window));
        }
        return out;
    }
}

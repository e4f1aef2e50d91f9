#include "cvrptw/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cvrptw
{
    std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts)
    {
        // splitmix64 finalizer folded over the parts
        std::uint64_t h = 0x9E3779B97F4A7C15ULL;
        for (std::uint64_t p : parts)
        {
            std::uint64_t z = h ^ (p + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2));
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            h = z ^ (z >> 31);
        }
        return h;
    }

    ScoredPairs score_pairs(const EpisodeState &state, const NetworkParams &params)
    {
        ScoredPairs out;
        out.pairs = state.feasible_pairs();
        if (out.pairs.empty())
            return out;
        Matrix inputs(static_cast<Eigen::Index>(out.pairs.size()), static_cast<Eigen::Index>(kFeatureCount));
        for (std::size_t i = 0; i < out.pairs.size(); ++i)
        {
            const FeatureVector f = extract(state, out.pairs[i].vehicle, out.pairs[i].customer);
            for (std::size_t c = 0; c < kFeatureCount; ++c)
                inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = f[c];
        }
        out.values = forward_batch(params, inputs);
        return out;
    }

    std::size_t argmax_index(const Vector &values)
    {
        if (values.size() == 0)
            throw std::invalid_argument("argmax of an empty value vector");
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < values.size(); ++i)
            if (values(i) > values(best))
                best = i;
        return static_cast<std::size_t>(best);
    }

    std::size_t softmax_index(const Vector &values, double temperature, std::mt19937_64 &rng)
    {
        if (values.size() == 0)
            throw std::invalid_argument("softmax over an empty value vector");
        if (temperature < kGreedyTemperature)
            return argmax_index(values);
        const double top = values.maxCoeff();
        std::vector<double> weights(static_cast<std::size_t>(values.size()));
        for (Eigen::Index i = 0; i < values.size(); ++i)
            weights[static_cast<std::size_t>(i)] = std::exp((values(i) - top) / temperature);
        std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
        return pick(rng);
    }

    void RolloutConfig::validate() const
    {
        if (kappa < 1)
            throw std::invalid_argument("kappa must be >= 1");
        if (rollouts_per_branch < 1)
            throw std::invalid_argument("rollouts per branch must be >= 1");
        if (!(temperature > 0.0))
            throw std::invalid_argument("temperature must be positive");
        if (max_subtour < 1)
            throw std::invalid_argument("maximum sub-tour length must be >= 1");
    }

    std::vector<Decision> shortlist(const EpisodeState &state, const NetworkParams &params, int kappa)
    {
        const ScoredPairs scored = score_pairs(state, params);
        std::vector<std::size_t> idx(scored.pairs.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        // Pairs arrive in (vehicle, customer) order, so a stable sort keeps that as the tie-break.
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b)
                         { return scored.values(static_cast<Eigen::Index>(a)) > scored.values(static_cast<Eigen::Index>(b)); });
        const auto take = std::min<std::size_t>(idx.size(), static_cast<std::size_t>(std::max(kappa, 0)));
        std::vector<Decision> out;
        out.reserve(take);
        for (std::size_t i = 0; i < take; ++i)
            out.push_back(scored.pairs[idx[i]]);
        return out;
    }

    BranchResult rollout_branch(const EpisodeState &state, const NetworkParams &params, Decision first,
                                const RolloutConfig &config, int branch, int repetition)
    {
        EpisodeState sim = state;
        const std::size_t already = sim.vehicle(first.vehicle).route.size();
        sim.apply(first);

        BranchResult result;
        result.first = first;
        result.branch = branch;
        result.repetition = repetition;
        result.nodes = 1;

        std::mt19937_64 rng(mix_seed({config.seed, static_cast<std::uint64_t>(state.decision_count()),
                                      static_cast<std::uint64_t>(branch), static_cast<std::uint64_t>(repetition)}));
        while (!sim.done())
        {
            const ScoredPairs scored = score_pairs(sim, params);
            if (scored.pairs.empty())
                throw ContractViolation("rollout stuck: unserved customers remain but no vehicle can reach them");
            sim.apply(scored.pairs[softmax_index(scored.values, config.temperature, rng)]);
            ++result.nodes;
        }
        sim.finish_all();

        result.solution = sim.solution();
        result.distance = result.solution.total_distance;
        const auto &route = sim.vehicle(first.vehicle).route;
        for (std::size_t i = already; i < route.size() && result.continuation.size() < static_cast<std::size_t>(config.max_subtour); ++i)
            result.continuation.push_back(route[i].customer);
        return result;
    }

    std::size_t best_branch(const std::vector<BranchResult> &branches)
    {
        if (branches.empty())
            throw std::invalid_argument("best_branch: no branches");
        std::size_t best = 0;
        for (std::size_t i = 1; i < branches.size(); ++i)
            if (branches[i].distance < branches[best].distance)
                best = i;
        return best;
    }

    Selection select(const EpisodeState &state, const NetworkParams &params, const RolloutConfig &config)
    {
        config.validate();
        const auto candidates = shortlist(state, params, config.kappa);
        if (candidates.empty())
            throw ContractViolation("select: no feasible vehicle-customer pair");
        Selection sel;
        for (std::size_t b = 0; b < candidates.size(); ++b)
            for (int rep = 0; rep < config.rollouts_per_branch; ++rep)
            {
                BranchResult r = rollout_branch(state, params, candidates[b], config, static_cast<int>(b), rep);
                sel.nodes += r.nodes;
                sel.branches.push_back(std::move(r));
            }
        sel.winner = sel.branches[best_branch(sel.branches)];
        return sel;
    }
}

#include "cvrptw/preprocess.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace cvrptw
{
    namespace
    {
        // n nearest customers to `from` among all other customers, by (distance, id).
        std::vector<int> nearest_customers(const DistanceMatrix &dist, int customer_count, int from, int n)
        {
            std::vector<int> ids;
            ids.reserve(static_cast<std::size_t>(customer_count));
            for (int j = 1; j <= customer_count; ++j)
                if (j != from)
                    ids.push_back(j);
            const auto take = std::min<std::size_t>(static_cast<std::size_t>(n), ids.size());
            std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(take), ids.end(), [&](int a, int b)
                              {
                                  const double da = dist(from, a), db = dist(from, b);
                                  return da != db ? da < db : a < b; });
            ids.resize(take);
            return ids;
        }
    }

    std::vector<Cluster> build_clusters(const Instance &inst, const DistanceMatrix &dist, int n)
    {
        if (n < 1)
            throw std::invalid_argument("cluster neighbour count n must be >= 1");
        const int count = static_cast<int>(inst.size());
        std::vector<int> mapping(static_cast<std::size_t>(count) + 1, -1);
        std::vector<std::vector<int>> neighbours(static_cast<std::size_t>(count) + 1);
        for (int i = 1; i <= count; ++i)
            neighbours[static_cast<std::size_t>(i)] = nearest_customers(dist, count, i, n);

        std::vector<Cluster> clusters;
        int mapped = 0;
        while (mapped < count)
        {
            int seed = -1;
            for (int i = 1; i <= count; ++i)
                if (mapping[static_cast<std::size_t>(i)] < 0 && (seed < 0 || dist(0, i) < dist(0, seed)))
                    seed = i;

            Cluster cluster;
            cluster.id = static_cast<int>(clusters.size());
            auto add = [&](int c)
            {
                mapping[static_cast<std::size_t>(c)] = cluster.id;
                cluster.members.push_back(c);
                ++mapped;
            };
            add(seed);

            bool grew = true;
            while (grew)
            {
                grew = false;
                const std::vector<int> snapshot = cluster.members;
                for (int member : snapshot)
                    for (int nb : neighbours[static_cast<std::size_t>(member)])
                        if (mapping[static_cast<std::size_t>(nb)] < 0)
                        {
                            add(nb);
                            grew = true;
                        }
            }

            for (std::size_t a = 0; a < cluster.members.size(); ++a)
                for (std::size_t b = a + 1; b < cluster.members.size(); ++b)
                    cluster.diameter = std::max(cluster.diameter, dist(cluster.members[a], cluster.members[b]));
            clusters.push_back(std::move(cluster));
        }
        return clusters;
    }

    PreprocessSummary summarize(const Instance &inst, const DistanceMatrix &dist, std::vector<Cluster> clusters, int n)
    {
        PreprocessSummary s;
        s.n = n;
        const std::size_t count = inst.size();
        s.cluster_of.assign(count + 1, -1);
        for (const auto &c : clusters)
            for (int m : c.members)
            {
                if (m < 1 || static_cast<std::size_t>(m) > count || s.cluster_of[static_cast<std::size_t>(m)] >= 0)
                    throw std::invalid_argument("clusters do not partition the customers");
                s.cluster_of[static_cast<std::size_t>(m)] = c.id;
            }
        for (std::size_t i = 1; i <= count; ++i)
            if (s.cluster_of[i] < 0)
                throw std::invalid_argument("clusters do not partition the customers");

        double largest = 0.0;
        for (const auto &c : clusters)
            largest = std::max(largest, c.diameter);
        s.rho = largest / 2.0;

        std::vector<double> pair_times;
        pair_times.reserve(count * (count > 0 ? count - 1 : 0) / 2);
        for (std::size_t i = 1; i <= count; ++i)
            for (std::size_t j = i + 1; j <= count; ++j)
            {
                const double d = dist(static_cast<int>(i), static_cast<int>(j));
                s.d_max = std::max(s.d_max, d);
                pair_times.push_back(d / inst.speed);
            }
        if (!pair_times.empty())
        {
            const std::size_t mid = pair_times.size() / 2;
            std::nth_element(pair_times.begin(), pair_times.begin() + static_cast<std::ptrdiff_t>(mid), pair_times.end());
            const double upper = pair_times[mid];
            if (pair_times.size() % 2 == 1)
                s.tau = upper;
            else
            {
                const double lower = *std::max_element(pair_times.begin(), pair_times.begin() + static_cast<std::ptrdiff_t>(mid));
                s.tau = (lower + upper) / 2.0;
            }
        }
        for (const auto &c : inst.customers)
            s.t_max = std::max(s.t_max, c.due);

        s.nearest_outside.assign(count + 1, -1.0);
        s.mean_within.assign(count + 1, 0.0);
        s.cluster_demand.assign(clusters.size(), 0.0);
        for (std::size_t i = 1; i <= count; ++i)
        {
            const int ci = s.cluster_of[i];
            double sum = 0.0;
            for (std::size_t j = 1; j <= count; ++j)
            {
                if (j == i)
                    continue;
                const double d = dist(static_cast<int>(i), static_cast<int>(j));
                if (s.cluster_of[j] == ci)
                    sum += d;
                else if (s.nearest_outside[i] < 0.0 || d < s.nearest_outside[i])
                    s.nearest_outside[i] = d;
            }
            const auto size = clusters[static_cast<std::size_t>(ci)].members.size();
            s.mean_within[i] = size > 1 ? sum / static_cast<double>(size - 1) : 0.0;
            s.cluster_demand[static_cast<std::size_t>(ci)] += inst.customer(static_cast<int>(i)).demand;
        }
        s.clusters = std::move(clusters);
        return s;
    }

    void write_clusters_csv(std::ostream &out, const PreprocessSummary &summary)
    {
        out << "customer,cluster\n";
        for (std::size_t i = 1; i < summary.cluster_of.size(); ++i)
            out << i << ',' << summary.cluster_of[i] << '\n';
    }
}

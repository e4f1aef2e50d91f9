#pragma once

#include "cvrptw/instance.hpp"

#include <iosfwd>
#include <vector>

namespace cvrptw
{
    struct Cluster
    {
        int id = 0;
        std::vector<int> members; // customer ids, in insertion order
        double diameter = 0.0;    // max pairwise member distance
    };

    /// Dataset characterization used for feature normalization and reward scales.
    struct PreprocessSummary
    {
        std::vector<Cluster> clusters;
        std::vector<int> cluster_of; // indexed by customer id; entry 0 (depot) is -1
        double rho = 0.0;            // half the largest cluster diameter
        double tau = 0.0;            // median pairwise travel time
        double d_max = 0.0;          // max pairwise inter-customer distance
        double t_max = 0.0;          // max window close over customers
        int n = 0;

        // Static per-customer quantities derived from the clustering.
        std::vector<double> nearest_outside;    // distance to the nearest customer outside the own cluster, -1 if none
        std::vector<double> mean_within;        // mean distance to the other members of the own cluster, 0 for singletons
        std::vector<double> cluster_demand;     // total demand of the cluster, per cluster id

        const Cluster &cluster_for(int customer) const { return clusters[static_cast<std::size_t>(cluster_of[static_cast<std::size_t>(customer)])]; }
    };

    inline constexpr int kDefaultClusterN = 3;

    /// Greedy cluster growing: seed with the unmapped customer nearest the depot, then add the
    /// n nearest neighbours (over all customers, keeping only unmapped ones) of every member in
    /// repeated passes until a pass adds nobody. Ties break on smaller distance, then smaller id.
    std::vector<Cluster> build_clusters(const Instance &inst, const DistanceMatrix &dist, int n);

    PreprocessSummary summarize(const Instance &inst, const DistanceMatrix &dist, std::vector<Cluster> clusters, int n = kDefaultClusterN);

    inline PreprocessSummary preprocess(const Instance &inst, const DistanceMatrix &dist, int n = kDefaultClusterN)
    {
        return summarize(inst, dist, build_clusters(inst, dist, n), n);
    }

    /// `customer,cluster` rows for inspection.
    void write_clusters_csv(std::ostream &out, const PreprocessSummary &summary);
}

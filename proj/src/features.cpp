#include "cvrptw/features.hpp"

#include "cvrptw/episode.hpp"
#include "cvrptw/format.hpp"

#include <algorithm>
#include <ostream>

namespace cvrptw
{
    namespace
    {
        double clamp_input(double v) { return std::clamp(v, kClampLow, kClampHigh); }
        double indicator(bool b) { return b ? 1.0 : 0.0; }
    }

    Normalizers Normalizers::from(const PreprocessSummary &summary)
    {
        Normalizers n;
        auto pick = [&n](double v)
        {
            if (v > 0.0)
                return v;
            n.degenerate = true;
            return 1.0;
        };
        n.rho = pick(summary.rho);
        n.tau = pick(summary.tau);
        n.d_max = pick(summary.d_max);
        n.t_max = pick(summary.t_max);
        return n;
    }

    FeatureVector extract(const EpisodeState &state, int vehicle, int customer)
    {
        const ProblemData &data = state.data();
        const Instance &inst = data.instance;
        const DistanceMatrix &dist = data.dist;
        const PreprocessSummary &s = data.summary;
        const Normalizers &norm = data.norm;

        const VehicleState &v = state.vehicle(vehicle);
        const Customer &c = inst.customer(customer);
        const int loc = v.location;
        const double now = v.clock;
        const double leg = dist(loc, customer);
        const double arrival = now + leg / inst.speed;
        const double start = std::max(arrival, c.ready);
        const double gap = start - now;

        const int own_cluster = s.cluster_of[static_cast<std::size_t>(customer)];
        const int loc_cluster = loc == 0 ? -1 : s.cluster_of[static_cast<std::size_t>(loc)];
        const bool same_cluster = loc_cluster >= 0 && loc_cluster == own_cluster;
        const auto &members = s.clusters[static_cast<std::size_t>(own_cluster)].members;
        const auto cluster_size = static_cast<double>(members.size());

        FeatureVector f{};
        f[kDist] = clamp_input(leg / norm.d_max);
        f[kDistShort] = indicator(leg < norm.rho);
        f[kTimeGap] = clamp_input(gap / norm.t_max);
        f[kTimeShort] = indicator(gap < norm.tau);
        f[kSameCluster] = indicator(same_cluster);

        if (same_cluster)
        {
            const double outside = s.nearest_outside[static_cast<std::size_t>(customer)];
            // No customer outside the cluster: treat as maximally isolated.
            f[kNonMemberDist] = clamp_input(outside < 0.0 ? 1.0 : outside / norm.d_max);
        }
        else if (loc_cluster >= 0)
        {
            std::vector<int> dropped;
            for (int j : s.clusters[static_cast<std::size_t>(loc_cluster)].members)
                if (!state.is_served(j))
                    dropped.push_back(j);
            if (!dropped.empty())
            {
                f[kClusterLeft] = 1.0;
                const double loc_to_depot = dist(loc, 0);
                f[kDropFar] = indicator(std::all_of(dropped.begin(), dropped.end(), [&](int j)
                                                    { return dist(j, 0) > loc_to_depot; }));
                f[kDropClose] = indicator(std::all_of(dropped.begin(), dropped.end(), [&](int j)
                                                      { return dist(loc, j) <= s.rho; }));
                f[kDropLong] = indicator(std::all_of(dropped.begin(), dropped.end(), [&](int j)
                                                     {
                                                         const double outside = s.nearest_outside[static_cast<std::size_t>(j)];
                                                         return outside < 0.0 || outside > dist(loc, j); }));
            }
        }

        int served_here = 0;
        double unserved_demand = 0.0;
        int hops = 0;
        bool all_reachable = true;
        const double depart_c = start + c.service;
        for (int j : members)
        {
            if (state.served_by(j) == vehicle)
                ++served_here;
            if (state.is_served(j))
                continue;
            const Customer &cj = inst.customer(j);
            unserved_demand += cj.demand;
            if (j == customer)
                continue;

            const double start_j = std::max(now + dist(loc, j) / inst.speed, cj.ready);
            if (v.load + cj.demand + c.demand <= inst.capacity && start_j <= cj.due &&
                start_j + cj.service + dist(j, customer) / inst.speed <= c.due)
                ++hops;

            if (std::max(depart_c + dist(customer, j) / inst.speed, cj.ready) > cj.due)
                all_reachable = false;
        }

        f[kServed] = clamp_input(served_here / cluster_size);
        f[kClusterDemand] = indicator(inst.capacity - v.load >= unserved_demand);
        f[kHops] = clamp_input(hops / cluster_size);
        f[kClusterTime] = indicator(all_reachable);
        f[kUrgency] = clamp_input((c.due - arrival) / norm.t_max);
        f[kDemandFraction] = ((gap + c.service) / norm.t_max) / std::max(c.demand / inst.capacity, kDemandEpsilon);
        f[kRemote] = s.mean_within[static_cast<std::size_t>(customer)] / norm.d_max;
        return f;
    }

    void check_guards(const FeatureVector &f)
    {
        const bool ngb = f[kSameCluster] != 0.0;
        const bool dropped_any = f[kDropFar] != 0.0 || f[kDropClose] != 0.0 || f[kDropLong] != 0.0;
        if (ngb && (f[kClusterLeft] != 0.0 || dropped_any))
            throw ContractViolation("feature guard: ngb=1 but c_left/drop_* set");
        if (!ngb && f[kNonMemberDist] != 0.0)
            throw ContractViolation("feature guard: ngb=0 but non_d set");
        if (f[kClusterLeft] == 0.0 && dropped_any)
            throw ContractViolation("feature guard: c_left=0 but drop_* set");
    }

    void write_features_csv_header(std::ostream &out)
    {
        out << "step,vehicle,customer";
        for (auto name : kFeatureNames)
            out << ',' << name;
        out << '\n';
    }

    void write_features_csv_row(std::ostream &out, std::size_t step, int vehicle, int customer, const FeatureVector &f)
    {
        out << step << ',' << vehicle << ',' << customer;
        for (double v : f)
            out << ',' << format_number(v);
        out << '\n';
    }
}

#pragma once

#include "cvrptw/features.hpp"
#include "cvrptw/instance.hpp"
#include "cvrptw/preprocess.hpp"

#include <compare>
#include <memory>
#include <vector>

namespace cvrptw
{
    /// Everything about an instance that stays fixed during search. Shared read-only by all
    /// episode copies.
    struct ProblemData
    {
        Instance instance;
        DistanceMatrix dist;
        PreprocessSummary summary;
        Normalizers norm;

        static std::shared_ptr<const ProblemData> make(Instance instance, int cluster_n = kDefaultClusterN);
    };

    struct Decision
    {
        int vehicle = -1;
        int customer = -1;

        auto operator<=>(const Decision &) const = default;
    };

    /// One served customer as seen by the vehicle that served it.
    struct Leg
    {
        FeatureVector features{};
        double distance = 0.0; // previous location -> customer
        double time = 0.0;     // previous service completion -> service start
    };

    enum class VehicleStatus
    {
        Idle,     // waiting at the depot, has not left yet
        Active,   // on the road, may take further customers
        Finished, // returned to the depot
    };

    struct VehicleState
    {
        int id = 0;
        int location = 0;   // node id, 0 = depot
        double clock = 0.0; // service completion time at `location`
        double load = 0.0;
        VehicleStatus status = VehicleStatus::Idle;
        std::vector<Stop> route;
        std::vector<Leg> legs;
        double return_distance = 0.0; // set when finished

        bool at_depot() const noexcept { return location == 0; }
    };

    /// Mutable world of one episode. Copying is cheap enough for per-branch snapshots.
    /// There is always exactly one idle vehicle at the depot; the fleet grows when it leaves.
    class EpisodeState
    {
    public:
        explicit EpisodeState(std::shared_ptr<const ProblemData> data, bool record_features = false);

        const ProblemData &data() const noexcept { return *_data; }
        const std::shared_ptr<const ProblemData> &shared_data() const noexcept { return _data; }
        const Instance &instance() const noexcept { return _data->instance; }
        const DistanceMatrix &dist() const noexcept { return _data->dist; }
        const PreprocessSummary &summary() const noexcept { return _data->summary; }

        const std::vector<VehicleState> &vehicles() const noexcept { return _vehicles; }
        const VehicleState &vehicle(int id) const;
        int idle_vehicle() const noexcept { return _idle; }

        /// Unserved customer ids, ascending.
        const std::vector<int> &unserved() const noexcept { return _unserved; }
        bool is_served(int customer) const { return _served_by[static_cast<std::size_t>(customer)] >= 0; }
        int served_by(int customer) const { return _served_by[static_cast<std::size_t>(customer)]; }
        bool done() const noexcept { return _unserved.empty(); }
        std::size_t decision_count() const noexcept { return _decisions; }
        bool records_features() const noexcept { return _record_features; }

        /// Earliest service start of `customer` for `vehicle` from its current position.
        double service_start(int vehicle, int customer) const;
        double service_start(const VehicleState &v, int customer) const;
        bool is_feasible(int vehicle, int customer) const;

        std::vector<Decision> feasible_pairs() const;

        /// Moves the vehicle, records the leg, spawns a replacement when the depot vehicle leaves
        /// and finishes vehicles left without any feasible customer. Throws ContractViolation on
        /// an infeasible pair.
        const Leg &apply(Decision d);

        void finish_vehicle(int vehicle);

        /// Finishes every vehicle still on the road; idempotent.
        void finish_all();

        Solution solution() const;
        double total_distance() const;

    private:
        bool has_any_feasible(const VehicleState &v) const;

        std::shared_ptr<const ProblemData> _data;
        std::vector<VehicleState> _vehicles;
        std::vector<int> _unserved;
        std::vector<int> _served_by;
        int _idle = 0;
        std::size_t _decisions = 0;
        bool _record_features = false;
    };

    std::vector<Decision> feasible_pairs(const EpisodeState &state);
    const Leg &apply_decision(EpisodeState &state, int vehicle, int customer);
    void finish_vehicle(EpisodeState &state, int vehicle);

    /// Per-decision realized rewards of one vehicle trajectory:
    /// R_term = 2 rho - (sum d_p + D_return) / (P + 1),
    /// R_p = (rho - d_p) / d_max + (tau - t_p) / t_max + gamma^(P - p) R_term.
    std::vector<double> compute_rewards(const std::vector<Leg> &legs, double return_distance, const PreprocessSummary &summary, double gamma);
}

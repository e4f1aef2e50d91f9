#include "cvrptw/episode.hpp"

#include <algorithm>
#include <cmath>

namespace cvrptw
{
    std::shared_ptr<const ProblemData> ProblemData::make(Instance instance, int cluster_n)
    {
        instance.validate();
        auto data = std::make_shared<ProblemData>();
        data->dist = DistanceMatrix(instance);
        data->summary = preprocess(instance, data->dist, cluster_n);
        data->norm = Normalizers::from(data->summary);
        data->instance = std::move(instance);
        return data;
    }

    EpisodeState::EpisodeState(std::shared_ptr<const ProblemData> data, bool record_features)
        : _data(std::move(data)), _record_features(record_features)
    {
        const std::size_t n = _data->instance.size();
        _unserved.reserve(n);
        for (std::size_t i = 1; i <= n; ++i)
            _unserved.push_back(static_cast<int>(i));
        _served_by.assign(n + 1, -1);
        _vehicles.push_back(VehicleState{});
        _idle = 0;
    }

    const VehicleState &EpisodeState::vehicle(int id) const
    {
        if (id < 0 || static_cast<std::size_t>(id) >= _vehicles.size())
            throw ContractViolation("unknown vehicle " + std::to_string(id));
        return _vehicles[static_cast<std::size_t>(id)];
    }

    double EpisodeState::service_start(const VehicleState &v, int customer) const
    {
        return earliest_start(instance(), dist(), v.location, v.clock, customer);
    }

    double EpisodeState::service_start(int vehicle, int customer) const
    {
        return service_start(this->vehicle(vehicle), customer);
    }

    bool EpisodeState::is_feasible(int vehicle, int customer) const
    {
        if (vehicle < 0 || static_cast<std::size_t>(vehicle) >= _vehicles.size())
            return false;
        if (customer < 1 || static_cast<std::size_t>(customer) > instance().size() || is_served(customer))
            return false;
        const VehicleState &v = _vehicles[static_cast<std::size_t>(vehicle)];
        if (v.status == VehicleStatus::Finished)
            return false;
        const Customer &c = instance().customer(customer);
        return v.load + c.demand <= instance().capacity && service_start(v, customer) <= c.due;
    }

    std::vector<Decision> EpisodeState::feasible_pairs() const
    {
        std::vector<Decision> out;
        for (const auto &v : _vehicles)
        {
            if (v.status == VehicleStatus::Finished)
                continue;
            for (int c : _unserved)
                if (is_feasible(v.id, c))
                    out.push_back({v.id, c});
        }
        return out;
    }

    bool EpisodeState::has_any_feasible(const VehicleState &v) const
    {
        return std::any_of(_unserved.begin(), _unserved.end(), [&](int c)
                           { return is_feasible(v.id, c); });
    }

    const Leg &EpisodeState::apply(Decision d)
    {
        if (!is_feasible(d.vehicle, d.customer))
            throw ContractViolation("infeasible decision: vehicle " + std::to_string(d.vehicle) + " -> customer " + std::to_string(d.customer));

        Leg leg;
        if (_record_features)
            leg.features = extract(*this, d.vehicle, d.customer);

        auto &v = _vehicles[static_cast<std::size_t>(d.vehicle)];
        const Customer &c = instance().customer(d.customer);
        const double start = service_start(v, d.customer);
        leg.distance = dist()(v.location, d.customer);
        leg.time = start - v.clock;

        const bool left_depot = v.status == VehicleStatus::Idle;
        v.status = VehicleStatus::Active;
        v.location = d.customer;
        v.clock = start + c.service;
        v.load += c.demand;
        v.route.push_back({d.customer, start});
        v.legs.push_back(leg);

        _served_by[static_cast<std::size_t>(d.customer)] = d.vehicle;
        _unserved.erase(std::lower_bound(_unserved.begin(), _unserved.end(), d.customer));
        ++_decisions;

        if (left_depot)
        {
            VehicleState fresh;
            fresh.id = static_cast<int>(_vehicles.size());
            _idle = fresh.id;
            _vehicles.push_back(std::move(fresh));
        }

        for (auto &other : _vehicles)
            if (other.status == VehicleStatus::Active && !has_any_feasible(other))
                finish_vehicle(other.id);

        return _vehicles[static_cast<std::size_t>(d.vehicle)].legs.back();
    }

    void EpisodeState::finish_vehicle(int vehicle)
    {
        auto &v = _vehicles.at(static_cast<std::size_t>(vehicle));
        if (v.status != VehicleStatus::Active)
            return;
        v.return_distance = dist()(v.location, 0);
        v.location = 0;
        v.status = VehicleStatus::Finished;
    }

    void EpisodeState::finish_all()
    {
        for (auto &v : _vehicles)
            finish_vehicle(v.id);
    }

    Solution EpisodeState::solution() const
    {
        Solution sol;
        sol.instance = instance().name;
        for (const auto &v : _vehicles)
            if (!v.route.empty())
                sol.routes.push_back({v.id, v.route});
        sol.total_distance = solution_distance(dist(), sol);
        return sol;
    }

    double EpisodeState::total_distance() const
    {
        double total = 0.0;
        for (const auto &v : _vehicles)
        {
            if (v.route.empty())
                continue;
            std::vector<int> ids;
            for (const auto &s : v.route)
                ids.push_back(s.customer);
            total += route_distance(dist(), ids);
        }
        return total;
    }

    std::vector<Decision> feasible_pairs(const EpisodeState &state) { return state.feasible_pairs(); }

    const Leg &apply_decision(EpisodeState &state, int vehicle, int customer) { return state.apply({vehicle, customer}); }

    void finish_vehicle(EpisodeState &state, int vehicle) { state.finish_vehicle(vehicle); }

    std::vector<double> compute_rewards(const std::vector<Leg> &legs, double return_distance, const PreprocessSummary &summary, double gamma)
    {
        if (legs.empty())
            return {};
        const Normalizers norm = Normalizers::from(summary);
        const double legs_total = [&]
        {
            double s = 0.0;
            for (const auto &l : legs)
                s += l.distance;
            return s;
        }();
        const auto count = static_cast<double>(legs.size());
        const double terminal = 2.0 * summary.rho - (legs_total + return_distance) / (count + 1.0);

        std::vector<double> rewards;
        rewards.reserve(legs.size());
        for (std::size_t p = 0; p < legs.size(); ++p)
        {
            const double discount = std::pow(gamma, static_cast<double>(legs.size() - 1 - p));
            rewards.push_back((summary.rho - legs[p].distance) / norm.d_max + (summary.tau - legs[p].time) / norm.t_max + discount * terminal);
        }
        return rewards;
    }
}

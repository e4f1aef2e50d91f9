#pragma once

#include "cvrptw/episode.hpp"
#include "cvrptw/generator.hpp"
#include "cvrptw/instance.hpp"

#include <initializer_list>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace test_support
{
    struct Row
    {
        double x, y, demand, ready, due, service;
    };

    // Customers get ids 1..n in the given order.
    inline cvrptw::Instance make_instance(cvrptw::Point depot, std::initializer_list<Row> rows, double capacity = 100.0, std::string name = "T")
    {
        cvrptw::Instance inst;
        inst.name = std::move(name);
        inst.depot = depot;
        inst.capacity = capacity;
        inst.horizon = 1000.0;
        inst.fleet_size = 10;
        int id = 1;
        for (const Row &r : rows)
            inst.customers.push_back({id++, r.x, r.y, r.demand, r.ready, r.due, r.service});
        return inst;
    }

    inline std::shared_ptr<const cvrptw::ProblemData> c101_25()
    {
        return cvrptw::ProblemData::make(cvrptw::parse_solomon(cvrptw::embedded_c101_25()));
    }

    // Integer coordinates on a 0..100 grid, loose windows so everything is feasible.
    inline cvrptw::Instance random_instance(std::mt19937_64 &rng, int customers, double window_scale = 1.0)
    {
        std::uniform_int_distribution<int> coord(0, 100), demand(1, 30), open(0, 150);
        std::uniform_int_distribution<int> width(30, 300);
        cvrptw::Instance inst;
        inst.name = "RND";
        inst.depot = {50, 50};
        inst.capacity = 100;
        inst.horizon = 2000;
        for (int i = 1; i <= customers; ++i)
        {
            cvrptw::Customer c;
            c.id = i;
            c.x = coord(rng);
            c.y = coord(rng);
            c.demand = demand(rng);
            const double reach = std::hypot(c.x - 50.0, c.y - 50.0);
            c.ready = open(rng) * window_scale;
            c.due = std::max(c.ready + width(rng) * window_scale, reach + 1.0);
            c.service = 10;
            inst.customers.push_back(c);
        }
        return inst;
    }
}

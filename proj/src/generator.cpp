#include "cvrptw/generator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace cvrptw
{
    namespace
    {
        struct ClassShape
        {
            Point depot;
            double horizon;
            double capacity;
            double service;
            bool clustered;
            bool mixed;
        };

        ClassShape shape_of(InstanceClass cls)
        {
            switch (cls)
            {
            case InstanceClass::C1: return {{40, 50}, 1236, 200, 90, true, false};
            case InstanceClass::C2: return {{40, 50}, 3390, 700, 90, true, false};
            case InstanceClass::R1: return {{35, 35}, 230, 200, 10, false, false};
            case InstanceClass::R2: return {{35, 35}, 1000, 1000, 10, false, false};
            case InstanceClass::RC1: return {{40, 50}, 240, 200, 10, true, true};
            case InstanceClass::RC2: return {{40, 50}, 960, 1000, 10, true, true};
            }
            throw std::invalid_argument("unknown instance class");
        }
    }

    std::string class_name(InstanceClass cls)
    {
        switch (cls)
        {
        case InstanceClass::C1: return "C1";
        case InstanceClass::R1: return "R1";
        case InstanceClass::RC1: return "RC1";
        case InstanceClass::C2: return "C2";
        case InstanceClass::R2: return "R2";
        case InstanceClass::RC2: return "RC2";
        }
        throw std::invalid_argument("unknown instance class");
    }

    int class_count(InstanceClass cls)
    {
        switch (cls)
        {
        case InstanceClass::C1: return 9;
        case InstanceClass::R1: return 12;
        case InstanceClass::RC1: return 8;
        case InstanceClass::C2: return 8;
        case InstanceClass::R2: return 11;
        case InstanceClass::RC2: return 8;
        }
        throw std::invalid_argument("unknown instance class");
    }

    Instance generate_instance(InstanceClass cls, int index, int customers, std::uint64_t seed)
    {
        if (index < 1 || customers < 0)
            throw std::invalid_argument("generate_instance: index must be >= 1 and customers >= 0");
        const ClassShape shape = shape_of(cls);
        std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(cls) * 1009ULL + static_cast<std::uint64_t>(index) * 7919ULL + static_cast<std::uint64_t>(customers));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        auto uniform_int = [&](int lo, int hi)
        { return std::uniform_int_distribution<int>(lo, hi)(rng); };

        Instance inst;
        char number[24];
        std::snprintf(number, sizeof number, "%d%02d", cls >= InstanceClass::C2 ? 2 : 1, index);
        std::string label = class_name(cls);
        label.pop_back();
        inst.name = label + number + "s";
        inst.depot = shape.depot;
        inst.horizon = shape.horizon;
        inst.capacity = shape.capacity;
        inst.fleet_size = 25;

        std::vector<Point> centers;
        if (shape.clustered)
        {
            const int k = std::max(2, customers / 10);
            for (int i = 0; i < k; ++i)
                centers.push_back({static_cast<double>(uniform_int(5, 95)), static_cast<double>(uniform_int(5, 95))});
        }
        std::normal_distribution<double> spread(0.0, 4.0);

        // Later indices in a class get fewer and wider windows.
        const double windowed_fraction = std::array{1.0, 0.75, 0.5, 0.25}[static_cast<std::size_t>((index - 1) % 4)];
        const double width = (shape.horizon * (cls >= InstanceClass::C2 ? 0.12 : 0.08)) * (1.0 + static_cast<double>((index - 1) / 4));

        for (int id = 1; id <= customers; ++id)
        {
            Customer c;
            c.id = id;
            const bool in_cluster = shape.clustered && (!shape.mixed || id % 2 == 0);
            if (in_cluster)
            {
                const Point &centre = centers[static_cast<std::size_t>(uniform_int(0, static_cast<int>(centers.size()) - 1))];
                c.x = std::clamp(std::round(centre.x + spread(rng)), 0.0, 100.0);
                c.y = std::clamp(std::round(centre.y + spread(rng)), 0.0, 100.0);
            }
            else
            {
                c.x = uniform_int(0, 100);
                c.y = uniform_int(0, 100);
            }
            c.demand = shape.clustered && !shape.mixed ? 10.0 * uniform_int(1, 4) : uniform_int(1, 41);
            c.service = shape.service;

            const double out = std::ceil(std::hypot(c.x - shape.depot.x, c.y - shape.depot.y));
            const double latest = shape.horizon - out - c.service; // last start that still gets home
            if (unit(rng) < windowed_fraction && latest > out + 1.0)
            {
                const double centre = out + unit(rng) * (latest - out);
                const double half = std::max(5.0, std::round(width * (0.5 + unit(rng)) / 2.0));
                c.ready = std::max(0.0, std::floor(centre - half));
                c.due = std::min(std::floor(latest), std::ceil(centre + half));
            }
            else
            {
                c.ready = 0.0;
                c.due = std::max(std::floor(latest), out + 1.0);
            }
            if (c.ready >= c.due)
                c.ready = std::max(0.0, c.due - 10.0);
            inst.customers.push_back(c);
        }
        inst.validate();
        return inst;
    }

    std::vector<Instance> generate_suite(int customers, std::uint64_t seed)
    {
        std::vector<Instance> out;
        for (InstanceClass cls : {InstanceClass::C1, InstanceClass::R1, InstanceClass::RC1, InstanceClass::C2, InstanceClass::R2, InstanceClass::RC2})
            for (int i = 1; i <= class_count(cls); ++i)
                out.push_back(generate_instance(cls, i, customers, seed));
        return out;
    }
}

#pragma once

#include "cvrptw/instance.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cvrptw
{
    enum class InstanceClass
    {
        C1,
        R1,
        RC1,
        C2,
        R2,
        RC2,
    };

    std::string class_name(InstanceClass cls);

    /// Instances per class in the published 56-instance layout.
    int class_count(InstanceClass cls);

    /// Solomon-style random instance: coordinates on [0,100]^2, clustered (C), uniform (R) or
    /// mixed (RC) placement, short (type 1) or long (type 2) horizon. Every customer is
    /// reachable from the depot and back within the horizon. Named like "C104s" (s = surrogate).
    Instance generate_instance(InstanceClass cls, int index, int customers, std::uint64_t seed = 0);

    /// All 56 instances of one size, in class then index order.
    std::vector<Instance> generate_suite(int customers, std::uint64_t seed = 0);

    /// C101 rows 0..25 in Solomon text layout (identical to data/solomon/C101_25.txt).
    std::string_view embedded_c101_25();
}

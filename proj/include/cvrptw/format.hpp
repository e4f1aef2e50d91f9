#pragma once

#include <charconv>
#include <string>

namespace cvrptw
{
    /// Shortest decimal text that round-trips to the same double.
    inline std::string format_number(double v)
    {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, ec == std::errc() ? ptr : buf);
    }

    inline std::string format_number(int v) { return std::to_string(v); }
}

#include "cvrptw/instance.hpp"

#include "cvrptw/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cvrptw
{
    namespace
    {
        constexpr double kTimeTolerance = 1e-9;

        std::string trim(std::string_view s)
        {
            const auto first = s.find_first_not_of(" \t\r\n");
            if (first == std::string_view::npos)
                return {};
            const auto last = s.find_last_not_of(" \t\r\n");
            return std::string(s.substr(first, last - first + 1));
        }

        std::string upper(std::string s)
        {
            std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c)
                           { return static_cast<char>(std::toupper(c)); });
            return s;
        }

        std::vector<std::string> split_ws(const std::string &line)
        {
            std::vector<std::string> out;
            std::istringstream ss(line);
            std::string tok;
            while (ss >> tok)
                out.push_back(tok);
            return out;
        }

        double parse_number(const std::string &tok, std::size_t line, const char *field)
        {
            double value = 0.0;
            const char *begin = tok.data();
            if (!tok.empty() && tok.front() == '+')
                ++begin;
            const char *end = tok.data() + tok.size();
            auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc() || ptr != end || !std::isfinite(value))
                throw ParseError(line, std::string("non-numeric ") + field + " field '" + tok + "'");
            return value;
        }

        // Reads the next non-blank line; returns false at end of stream.
        bool next_line(std::istream &in, std::string &line, std::size_t &lineno)
        {
            std::string raw;
            while (std::getline(in, raw))
            {
                ++lineno;
                line = trim(raw);
                if (!line.empty())
                    return true;
            }
            return false;
        }
    }

    ParseError::ParseError(std::size_t line, const std::string &what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), _line(line)
    {
    }

    Point Instance::location(int node) const
    {
        if (node == 0)
            return depot;
        const Customer &c = customer(node);
        return {c.x, c.y};
    }

    const Customer &Instance::customer(int id) const
    {
        if (id < 1 || static_cast<std::size_t>(id) > customers.size())
            throw ContractViolation("customer id " + std::to_string(id) + " out of range");
        return customers[static_cast<std::size_t>(id - 1)];
    }

    void Instance::validate() const
    {
        if (!(capacity > 0.0))
            throw ContractViolation("vehicle capacity must be positive");
        if (!(speed > 0.0))
            throw ContractViolation("speed must be positive");
        for (std::size_t i = 0; i < customers.size(); ++i)
        {
            const Customer &c = customers[i];
            if (c.id != static_cast<int>(i + 1))
                throw ContractViolation("customer ids must be contiguous from 1");
            if (!(c.ready < c.due))
                throw ContractViolation("customer " + std::to_string(c.id) + " has an empty time window");
            if (c.demand < 0.0 || c.service < 0.0)
                throw ContractViolation("customer " + std::to_string(c.id) + " has negative demand or service time");
        }
    }

    DistanceMatrix::DistanceMatrix(const Instance &inst) : _n(inst.node_count()), _d(_n * _n, 0.0)
    {
        std::vector<Point> pts;
        pts.reserve(_n);
        pts.push_back(inst.depot);
        for (const auto &c : inst.customers)
            pts.push_back({c.x, c.y});
        for (std::size_t i = 0; i < _n; ++i)
            for (std::size_t j = i + 1; j < _n; ++j)
            {
                const double d = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
                _d[i * _n + j] = d;
                _d[j * _n + i] = d;
            }
    }

    double earliest_start(const Instance &inst, const DistanceMatrix &dist, int from, double departure, int to)
    {
        const double arrival = departure + dist(from, to) / inst.speed;
        return std::max(arrival, inst.customer(to).ready);
    }

    std::size_t Solution::vehicle_count() const
    {
        return static_cast<std::size_t>(std::count_if(routes.begin(), routes.end(), [](const Route &r)
                                                       { return !r.stops.empty(); }));
    }

    std::string_view to_string(Violation::Kind kind)
    {
        switch (kind)
        {
        case Violation::Kind::Window:
            return "window";
        case Violation::Kind::Capacity:
            return "capacity";
        case Violation::Kind::TravelTime:
            return "travel-time";
        case Violation::Kind::Coverage:
            return "coverage";
        }
        return "unknown";
    }

    std::size_t FeasibilityReport::count(Violation::Kind kind) const
    {
        return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(), [kind](const Violation &v)
                                                      { return v.kind == kind; }));
    }

    std::string FeasibilityReport::summary() const
    {
        if (ok())
            return "OK";
        std::ostringstream ss;
        ss << violations.size() << " violation(s)";
        for (const auto &v : violations)
            ss << "\n  [" << to_string(v.kind) << "] vehicle " << v.vehicle << " customer " << v.customer << ": " << v.detail;
        return ss.str();
    }

    Instance parse_solomon(std::istream &in)
    {
        Instance inst;
        std::string line;
        std::size_t lineno = 0;

        if (!next_line(in, line, lineno))
            throw ParseError(0, "empty input: missing instance name");
        inst.name = line;

        if (!next_line(in, line, lineno) || upper(line) != "VEHICLE")
            throw ParseError(lineno, "expected VEHICLE section");
        if (!next_line(in, line, lineno))
            throw ParseError(lineno, "missing VEHICLE header");
        {
            const auto u = upper(line);
            if (u.find("NUMBER") == std::string::npos || u.find("CAPACITY") == std::string::npos)
                throw ParseError(lineno, "malformed VEHICLE header, expected NUMBER and CAPACITY");
        }
        if (!next_line(in, line, lineno))
            throw ParseError(lineno, "missing VEHICLE values");
        {
            const auto toks = split_ws(line);
            if (toks.size() != 2)
                throw ParseError(lineno, "expected two VEHICLE values (NUMBER CAPACITY)");
            const double number = parse_number(toks[0], lineno, "NUMBER");
            inst.fleet_size = static_cast<int>(number);
            inst.capacity = parse_number(toks[1], lineno, "CAPACITY");
            if (!(inst.capacity > 0.0))
                throw ParseError(lineno, "CAPACITY must be positive");
        }

        if (!next_line(in, line, lineno) || upper(line) != "CUSTOMER")
            throw ParseError(lineno, "expected CUSTOMER section");
        if (!next_line(in, line, lineno) || upper(line).rfind("CUST", 0) != 0)
            throw ParseError(lineno, "malformed CUSTOMER header");

        static constexpr const char *kFields[] = {"CUST NO.", "XCOORD.", "YCOORD.", "DEMAND", "READY TIME", "DUE DATE", "SERVICE TIME"};
        bool have_depot = false;
        std::set<int> seen;
        while (next_line(in, line, lineno))
        {
            const auto toks = split_ws(line);
            if (toks.size() != 7)
                throw ParseError(lineno, "expected 7 columns, found " + std::to_string(toks.size()));
            double v[7];
            for (int k = 0; k < 7; ++k)
                v[k] = parse_number(toks[static_cast<std::size_t>(k)], lineno, kFields[k]);
            if (v[0] != std::floor(v[0]) || v[0] < 0)
                throw ParseError(lineno, "customer number must be a non-negative integer");
            const int id = static_cast<int>(v[0]);
            if (!seen.insert(id).second)
                throw ParseError(lineno, "duplicate customer id " + std::to_string(id));
            if (!have_depot)
            {
                if (id != 0)
                    throw ParseError(lineno, "first row must be the depot (id 0)");
                if (v[3] != 0.0)
                    throw ParseError(lineno, "depot has nonzero demand");
                if (v[6] != 0.0)
                    throw ParseError(lineno, "depot has nonzero service time");
                inst.depot = {v[1], v[2]};
                inst.horizon = v[5];
                have_depot = true;
                continue;
            }
            if (id != static_cast<int>(inst.customers.size()) + 1)
                throw ParseError(lineno, "non-contiguous customer id " + std::to_string(id));
            Customer c{id, v[1], v[2], v[3], v[4], v[5], v[6]};
            if (c.demand < 0.0)
                throw ParseError(lineno, "negative demand");
            if (c.service < 0.0)
                throw ParseError(lineno, "negative service time");
            if (!(c.ready < c.due))
                throw ParseError(lineno, "READY TIME must be before DUE DATE");
            inst.customers.push_back(c);
        }
        if (!have_depot)
            throw ParseError(lineno, "CUSTOMER table has no depot row");
        return inst;
    }

    Instance parse_solomon(std::string_view text)
    {
        std::istringstream in{std::string(text)};
        return parse_solomon(in);
    }

    Instance load_solomon(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ParseError(0, "cannot open " + path);
        return parse_solomon(in);
    }

    void write_solomon(std::ostream &out, const Instance &inst)
    {
        out << inst.name << "\n\nVEHICLE\nNUMBER     CAPACITY\n"
            << "  " << format_number(inst.fleet_size) << "         " << format_number(inst.capacity) << "\n\n"
            << "CUSTOMER\n"
            << "CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME\n\n";
        auto row = [&out](int id, double x, double y, double m, double a, double b, double s)
        {
            out << "  " << id;
            for (double v : {x, y, m, a, b, s})
                out << "  " << format_number(v);
            out << "\n";
        };
        row(0, inst.depot.x, inst.depot.y, 0.0, 0.0, inst.horizon, 0.0);
        for (const auto &c : inst.customers)
            row(c.id, c.x, c.y, c.demand, c.ready, c.due, c.service);
    }

    FeasibilityReport check_feasible(const Instance &inst, const Solution &sol)
    {
        return check_feasible(inst, DistanceMatrix(inst), sol);
    }

    FeasibilityReport check_feasible(const Instance &inst, const DistanceMatrix &dist, const Solution &sol)
    {
        FeasibilityReport report;
        auto add = [&report](Violation::Kind k, int vehicle, int customer, std::string detail)
        {
            report.violations.push_back({k, vehicle, customer, std::move(detail)});
        };
        std::vector<int> visits(inst.size() + 1, 0);
        for (const auto &route : sol.routes)
        {
            double load = 0.0;
            int prev = 0;
            double prev_done = 0.0;
            for (const auto &stop : route.stops)
            {
                if (stop.customer < 1 || static_cast<std::size_t>(stop.customer) > inst.size())
                {
                    add(Violation::Kind::Coverage, route.vehicle, stop.customer, "unknown customer id");
                    continue;
                }
                ++visits[static_cast<std::size_t>(stop.customer)];
                const Customer &c = inst.customer(stop.customer);
                load += c.demand;
                if (stop.service_start < c.ready - kTimeTolerance || stop.service_start > c.due + kTimeTolerance)
                    add(Violation::Kind::Window, route.vehicle, c.id,
                        "service start " + format_number(stop.service_start) + " outside [" + format_number(c.ready) + ", " + format_number(c.due) + "]");
                const double earliest = prev_done + dist(prev, c.id) / inst.speed;
                if (stop.service_start < earliest - kTimeTolerance)
                    add(Violation::Kind::TravelTime, route.vehicle, c.id,
                        "service start " + format_number(stop.service_start) + " before earliest arrival " + format_number(earliest));
                prev = c.id;
                prev_done = stop.service_start + c.service;
            }
            if (load > inst.capacity + 1e-9)
                add(Violation::Kind::Capacity, route.vehicle, -1,
                    "load " + format_number(load) + " exceeds capacity " + format_number(inst.capacity));
        }
        for (std::size_t id = 1; id < visits.size(); ++id)
        {
            if (visits[id] == 0)
                add(Violation::Kind::Coverage, -1, static_cast<int>(id), "customer not served");
            else if (visits[id] > 1)
                add(Violation::Kind::Coverage, -1, static_cast<int>(id), "customer served " + std::to_string(visits[id]) + " times");
        }
        return report;
    }

    double route_distance(const DistanceMatrix &dist, const std::vector<int> &customers)
    {
        if (customers.empty())
            return 0.0;
        double total = dist(0, customers.front());
        for (std::size_t i = 1; i < customers.size(); ++i)
            total += dist(customers[i - 1], customers[i]);
        return total + dist(customers.back(), 0);
    }

    double solution_distance(const DistanceMatrix &dist, const Solution &sol)
    {
        double total = 0.0;
        for (const auto &route : sol.routes)
        {
            std::vector<int> ids;
            ids.reserve(route.stops.size());
            for (const auto &s : route.stops)
                ids.push_back(s.customer);
            total += route_distance(dist, ids);
        }
        return total;
    }

    double solution_distance(const Instance &inst, const Solution &sol)
    {
        return solution_distance(DistanceMatrix(inst), sol);
    }

    std::vector<Stop> schedule_route(const Instance &inst, const DistanceMatrix &dist, const std::vector<int> &customers)
    {
        std::vector<Stop> stops;
        stops.reserve(customers.size());
        int prev = 0;
        double done = 0.0;
        for (int id : customers)
        {
            const double start = earliest_start(inst, dist, prev, done, id);
            stops.push_back({id, start});
            prev = id;
            done = start + inst.customer(id).service;
        }
        return stops;
    }

    std::string solution_to_json(const Solution &sol)
    {
        nlohmann::ordered_json j;
        j["instance"] = sol.instance;
        j["total_distance"] = sol.total_distance;
        j["routes"] = nlohmann::ordered_json::array();
        for (const auto &r : sol.routes)
        {
            nlohmann::ordered_json jr;
            jr["vehicle"] = r.vehicle;
            jr["stops"] = nlohmann::ordered_json::array();
            for (const auto &s : r.stops)
                jr["stops"].push_back({{"customer", s.customer}, {"service_start", s.service_start}});
            j["routes"].push_back(std::move(jr));
        }
        return j.dump(2) + "\n";
    }

    Solution solution_from_json(std::string_view text)
    {
        Solution sol;
        try
        {
            const auto j = nlohmann::json::parse(text);
            sol.instance = j.at("instance").get<std::string>();
            sol.total_distance = j.at("total_distance").get<double>();
            for (const auto &jr : j.at("routes"))
            {
                Route r;
                r.vehicle = jr.at("vehicle").get<int>();
                for (const auto &js : jr.at("stops"))
                    r.stops.push_back({js.at("customer").get<int>(), js.at("service_start").get<double>()});
                sol.routes.push_back(std::move(r));
            }
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ParseError(0, std::string("malformed solution JSON: ") + e.what());
        }
        return sol;
    }

    std::string solution_to_csv(const Solution &sol)
    {
        std::ostringstream out;
        out << "vehicle,position,customer,service_start\n";
        for (const auto &r : sol.routes)
            for (std::size_t p = 0; p < r.stops.size(); ++p)
                out << r.vehicle << ',' << (p + 1) << ',' << r.stops[p].customer << ',' << format_number(r.stops[p].service_start) << '\n';
        return out.str();
    }
}

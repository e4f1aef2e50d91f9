#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cvrptw
{
    /// Thrown by the Solomon reader; `line()` is 1-based, 0 when the error is not tied to a line.
    class ParseError : public std::runtime_error
    {
    public:
        ParseError(std::size_t line, const std::string &what);

        std::size_t line() const noexcept { return _line; }

    private:
        std::size_t _line;
    };

    /// A caller broke an operation's precondition (e.g. applying an infeasible decision).
    class ContractViolation : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    struct Point
    {
        double x = 0.0;
        double y = 0.0;
    };

    struct Customer
    {
        int id = 0;
        double x = 0.0;
        double y = 0.0;
        double demand = 0.0;
        double ready = 0.0;   // earliest service start
        double due = 0.0;     // latest service start
        double service = 0.0; // service duration
    };

    struct Instance
    {
        std::string name;
        Point depot;
        double horizon = 0.0; // depot due date, kept for round-tripping; not enforced
        int fleet_size = 0;   // VEHICLE NUMBER, informational
        double capacity = 0.0;
        double speed = 1.0;
        std::vector<Customer> customers; // customers[i - 1].id == i

        std::size_t size() const noexcept { return customers.size(); }
        std::size_t node_count() const noexcept { return customers.size() + 1; }

        /// Node 0 is the depot, node i the customer with id i.
        Point location(int node) const;
        const Customer &customer(int id) const;

        /// Throws ContractViolation when the structural invariants do not hold.
        void validate() const;
    };

    /// Dense symmetric Euclidean matrix over nodes (0 = depot).
    class DistanceMatrix
    {
    public:
        DistanceMatrix() = default;
        explicit DistanceMatrix(const Instance &inst);

        double operator()(int i, int j) const noexcept { return _d[static_cast<std::size_t>(i) * _n + static_cast<std::size_t>(j)]; }
        std::size_t size() const noexcept { return _n; }

    private:
        std::size_t _n = 0;
        std::vector<double> _d;
    };

    inline DistanceMatrix distance_matrix(const Instance &inst) { return DistanceMatrix(inst); }

    /// Earliest service start at `to` when leaving `from` at `departure` (waiting allowed).
    double earliest_start(const Instance &inst, const DistanceMatrix &dist, int from, double departure, int to);

    struct Stop
    {
        int customer = 0;
        double service_start = 0.0;

        bool operator==(const Stop &) const = default;
    };

    struct Route
    {
        int vehicle = 0;
        std::vector<Stop> stops;

        bool operator==(const Route &) const = default;
    };

    struct Solution
    {
        std::string instance;
        std::vector<Route> routes;
        double total_distance = 0.0;

        std::size_t vehicle_count() const;
    };

    struct Violation
    {
        enum class Kind
        {
            Window,
            Capacity,
            TravelTime,
            Coverage,
        };

        Kind kind;
        int vehicle = -1;
        int customer = -1;
        std::string detail;
    };

    std::string_view to_string(Violation::Kind kind);

    struct FeasibilityReport
    {
        std::vector<Violation> violations;

        bool ok() const noexcept { return violations.empty(); }
        std::size_t count(Violation::Kind kind) const;
        std::string summary() const;
    };

    Instance parse_solomon(std::istream &in);
    Instance parse_solomon(std::string_view text);
    Instance load_solomon(const std::string &path);
    void write_solomon(std::ostream &out, const Instance &inst);

    FeasibilityReport check_feasible(const Instance &inst, const Solution &sol);
    FeasibilityReport check_feasible(const Instance &inst, const DistanceMatrix &dist, const Solution &sol);

    double solution_distance(const Instance &inst, const Solution &sol);
    double solution_distance(const DistanceMatrix &dist, const Solution &sol);
    double route_distance(const DistanceMatrix &dist, const std::vector<int> &customers);

    /// Recomputes earliest service starts for an ordered customer list leaving the depot at 0.
    std::vector<Stop> schedule_route(const Instance &inst, const DistanceMatrix &dist, const std::vector<int> &customers);

    std::string solution_to_json(const Solution &sol);
    Solution solution_from_json(std::string_view text);
    std::string solution_to_csv(const Solution &sol);
}

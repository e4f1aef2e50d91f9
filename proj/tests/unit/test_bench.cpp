#include "helpers.hpp"

#include "cvrptw/bench.hpp"
#include "cvrptw/format.hpp"
#include "cvrptw/generator.hpp"

#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

using namespace cvrptw;
using test_support::make_instance;

namespace
{
    Instance named(const std::string &name, int customers)
    {
        Instance inst = make_instance({0, 0}, {});
        inst.name = name;
        for (int i = 1; i <= customers; ++i)
            inst.customers.push_back({i, 1.0, 1.0, 1.0, 0.0, 10.0, 0.0});
        return inst;
    }

    std::vector<std::shared_ptr<const ProblemData>> small_suite()
    {
        std::vector<std::shared_ptr<const ProblemData>> out;
        for (auto cls : {InstanceClass::C1, InstanceClass::R2, InstanceClass::RC1})
            for (int i = 1; i <= 2; ++i)
                out.push_back(ProblemData::make(generate_instance(cls, i, 10, 5)));
        return out;
    }

    bool same_points(const Instance &a, const Instance &b)
    {
        if (a.size() != b.size())
            return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a.customers[i].x != b.customers[i].x || a.customers[i].y != b.customers[i].y || a.customers[i].due != b.customers[i].due)
                return false;
        return true;
    }
}

TEST_SUITE("bench")
{
    TEST_CASE("group labels follow the Solomon naming")
    {
        CHECK(group_label(named("C101", 25)) == "C1-25");
        CHECK(group_label(named("rc208", 50)) == "RC2-50");
        CHECK(group_label(named("R112", 100)) == "R1-100");
        CHECK(group_label(named("C104s", 25)) == "C1-25s");
        CHECK_FALSE(group_label(named("X101", 25)).has_value());
        CHECK_FALSE(group_label(named("C301", 25)).has_value());
        CHECK_FALSE(group_label(named("C1", 25)).has_value());
    }

    TEST_CASE("reference means exist only for real groups")
    {
        CHECK(best_known_mean("C1-25") == 191.0);
        CHECK(best_known_mean("RC2-100") == 1063.0);
        CHECK_FALSE(best_known_mean("C1-25s").has_value());
        CHECK_FALSE(best_known_mean("C1-30").has_value());
    }

    TEST_CASE("FNV-1a reference vectors and seed derivation")
    {
        CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
        CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
        CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
        CHECK(instance_seed(1, "C101") == instance_seed(1, "C101"));
        CHECK(instance_seed(1, "C101") != instance_seed(1, "C102"));
        CHECK(instance_seed(1, "C101") != instance_seed(2, "C101"));
    }

    TEST_CASE("generated suite: layout and direct reachability")
    {
        const auto suite = generate_suite(25, 3);
        REQUIRE(suite.size() == 56);
        std::map<std::string, int> per_class;
        std::set<std::string> names;
        for (const auto &inst : suite)
        {
            names.insert(inst.name);
            const auto label = group_label(inst);
            REQUIRE(label.has_value());
            ++per_class[label->substr(0, label->find('-'))];
            CHECK(inst.size() == 25);
            CHECK_NOTHROW(inst.validate());
            const DistanceMatrix d(inst);
            for (const auto &c : inst.customers)
            {
                CHECK(c.demand <= inst.capacity);
                const double start = std::max(d(0, c.id), c.ready);
                CHECK(start <= c.due);
                CHECK(start + c.service + d(c.id, 0) <= inst.horizon);
            }
        }
        CHECK(names.size() == 56);
        CHECK(per_class == std::map<std::string, int>{{"C1", 9}, {"R1", 12}, {"RC1", 8}, {"C2", 8}, {"R2", 11}, {"RC2", 8}});
        CHECK(same_points(generate_suite(25, 3)[7], suite[7]));
        CHECK_FALSE(same_points(generate_suite(25, 4)[7], suite[7]));
    }

    TEST_CASE("run_instances: feasible, seed-derived, independent of the job count")
    {
        const auto suite = small_suite();
        const NetworkParams p = init_network(2);
        SolveConfig cfg;
        cfg.rollout.kappa = 2;
        const auto one = run_instances(suite, p, cfg, 7, 1);
        const auto two = run_instances(suite, p, cfg, 7, 3);
        REQUIRE(one.size() == suite.size());
        for (std::size_t i = 0; i < one.size(); ++i)
        {
            CHECK(one[i].ok);
            CHECK(one[i].instance == suite[i]->instance.name);
            CHECK(one[i].solution.routes == two[i].solution.routes);
            CHECK(one[i].vehicles == one[i].solution.routes.size());
            CHECK(check_feasible(suite[i]->instance, one[i].solution).ok());
        }

        const auto rows = aggregate(one);
        REQUIRE(rows.size() == 3);
        CHECK(rows[0].group == "C1-10s");
        CHECK(rows[1].group == "R2-10s");
        CHECK(rows[2].group == "RC1-10s");
        for (std::size_t g = 0; g < 3; ++g)
        {
            CHECK(rows[g].instances == 2);
            CHECK(rows[g].failures == 0);
            const double mean = (one[2 * g].solution.total_distance + one[2 * g + 1].solution.total_distance) / 2.0;
            CHECK(rows[g].mean_distance == doctest::Approx(mean).epsilon(1e-14));
            CHECK_FALSE(rows[g].best_known.has_value());
        }
    }

    TEST_CASE("a failing instance is recorded, not thrown")
    {
        // customer 2 cannot be reached before its window closes
        const auto bad = ProblemData::make(make_instance({0, 0}, {{3, 4, 1, 0, 100, 0}, {60, 80, 1, 0, 20, 0}}, 100, "BAD"));
        const auto good = ProblemData::make(make_instance({0, 0}, {{3, 4, 1, 0, 100, 0}}, 100, "GOOD"));
        const auto runs = run_instances({bad, good}, init_network(1), SolveConfig{}, 1);
        CHECK_FALSE(runs[0].ok);
        CHECK_FALSE(runs[0].error.empty());
        CHECK(runs[1].ok);
        const auto rows = aggregate(runs);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].group == "other-2");
        CHECK(rows[0].instances == 0);
        CHECK(rows[0].failures == 1);
        CHECK(rows[1].group == "other-1");
        CHECK(rows[1].instances == 1);
        CHECK(rows[1].mean_distance == 10.0);
    }

    TEST_CASE("bench CSV layout")
    {
        BenchRow real{"C1-25", 2, 1, 200.0, 0.0, 3.5, 191.0};
        BenchRow none{"other-5", 0, 2, 0.0, 0.0, 0.0, std::nullopt};
        std::ostringstream out;
        write_bench_csv(out, {real, none});
        const std::string expect = "group,instances,failures,mean_distance,mean_vehicles,best_known,gap_pct\n"
                                   "C1-25,2,1,200,3.5,191," +
                                   format_number(100.0 * 9.0 / 191.0) + "\nother-5,0,2,,,,\n";
        CHECK(out.str() == expect);
    }

    TEST_CASE("sweep produces one row per kappa over the same instances")
    {
        const auto suite = small_suite();
        SolveConfig cfg;
        const auto rows = run_sweep(suite, init_network(2), cfg, {1, 3}, 5);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].kappa == 1);
        CHECK(rows[1].kappa == 3);
        for (const auto &r : rows)
        {
            CHECK(r.failures == 0);
            CHECK(r.runs.size() == suite.size());
            CHECK(r.nodes > 0);
        }
        // nested branch streams: the first-decision minimum can only improve with kappa
        for (std::size_t i = 0; i < suite.size(); ++i)
            CHECK(rows[1].runs[i].stats.first_best <= rows[0].runs[i].stats.first_best);
        std::ostringstream out;
        write_sweep_csv(out, rows);
        CHECK(out.str().rfind("kappa,instances,failures,mean_distance,best_found,nodes\n1,6,0,", 0) == 0);
    }
}

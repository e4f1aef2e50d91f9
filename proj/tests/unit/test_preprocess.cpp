#include "helpers.hpp"

#include "cvrptw/preprocess.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace cvrptw;
using test_support::make_instance;

TEST_SUITE("preprocess")
{
    TEST_CASE("single customer is a singleton cluster with rho 0")
    {
        const Instance inst = make_instance({0, 0}, {{5, 5, 1, 0, 100, 0}});
        const DistanceMatrix d(inst);
        for (int n : {1, 3, 10})
        {
            const auto s = preprocess(inst, d, n);
            REQUIRE(s.clusters.size() == 1);
            CHECK(s.clusters[0].members == std::vector<int>{1});
            CHECK(s.rho == 0.0);
            CHECK(s.tau == 0.0);
            CHECK(s.d_max == 0.0);
        }
    }

    TEST_CASE("two separated triples with n = 1 give two clusters of three")
    {
        // Hand simulation: seed 1 (nearest the depot); 1's nearest is 2, 2's nearest is 3
        // (1 < 2), 3's nearest is 2. The second triple repeats the pattern.
        const Instance inst = make_instance({0, 0}, {{10, 0, 1, 0, 100, 0}, {12, 0, 1, 0, 100, 0}, {13, 0, 1, 0, 100, 0}, {50, 0, 1, 0, 100, 0}, {52, 0, 1, 0, 100, 0}, {53, 0, 1, 0, 100, 0}});
        const DistanceMatrix d(inst);
        const auto clusters = build_clusters(inst, d, 1);
        REQUIRE(clusters.size() == 2);
        CHECK(clusters[0].members == std::vector<int>{1, 2, 3});
        CHECK(clusters[1].members == std::vector<int>{4, 5, 6});
        CHECK(clusters[0].diameter == 3.0);
        const auto s = summarize(inst, d, clusters, 1);
        CHECK(s.rho == 1.5);
        CHECK(s.d_max == 43.0);
    }

    TEST_CASE("C101-25 clusters partition the customers")
    {
        const auto data = test_support::c101_25();
        const auto &s = data->summary;
        std::vector<int> count(26, 0);
        for (const auto &c : s.clusters)
        {
            CHECK_FALSE(c.members.empty());
            for (int m : c.members)
            {
                ++count[static_cast<std::size_t>(m)];
                CHECK(s.cluster_of[static_cast<std::size_t>(m)] == c.id);
            }
            CHECK(c.diameter <= s.d_max);
            CHECK(2.0 * s.rho >= c.diameter);
        }
        for (int i = 1; i <= 25; ++i)
            CHECK(count[static_cast<std::size_t>(i)] == 1);
        CHECK(s.cluster_of[0] == -1);
        CHECK(s.clusters.size() <= 25);
    }

    TEST_CASE("clustering is deterministic")
    {
        const Instance inst = generate_instance(InstanceClass::RC1, 2, 25, 3);
        const DistanceMatrix d(inst);
        const auto a = build_clusters(inst, d, 3);
        const auto b = build_clusters(inst, d, 3);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i].members == b[i].members);
    }

    TEST_CASE("ties break on the smaller id")
    {
        // 1 and 4 are both 10 from the depot, so 1 seeds; 2 and 3 are both 5 from 1, so 2 joins.
        const Instance inst = make_instance({0, 0}, {{10, 0, 1, 0, 100, 0}, {10, 5, 1, 0, 100, 0}, {10, -5, 1, 0, 100, 0}, {0, 10, 1, 0, 100, 0}});
        const DistanceMatrix d(inst);
        const auto clusters = build_clusters(inst, d, 1);
        REQUIRE(clusters.size() == 3);
        CHECK(clusters[0].members == std::vector<int>{1, 2});
        CHECK(clusters[1].members == std::vector<int>{4});
        CHECK(clusters[2].members == std::vector<int>{3});
    }

    TEST_CASE("two customers at distance 10")
    {
        const Instance inst = make_instance({0, 0}, {{0, 10, 1, 0, 70, 0}, {0, 20, 1, 0, 90, 0}});
        const auto s = preprocess(inst, DistanceMatrix(inst));
        CHECK(s.tau == 10.0);
        CHECK(s.d_max == 10.0);
        CHECK(s.t_max == 90.0);
    }

    TEST_CASE("collinear 0, 10, 30 has median 20")
    {
        const Instance inst = make_instance({0, -5}, {{0, 0, 1, 0, 100, 0}, {10, 0, 1, 0, 100, 0}, {30, 0, 1, 0, 100, 0}});
        const auto s = preprocess(inst, DistanceMatrix(inst));
        CHECK(s.tau == 20.0);
        CHECK(s.d_max == 30.0);
    }

    TEST_CASE("even pair count uses the mean of the two middle values")
    {
        // 4 points on a line at 0, 1, 3, 7: pairs 1, 3, 7, 2, 6, 4 -> sorted 1 2 3 4 6 7 -> 3.5
        const Instance inst = make_instance({0, -5}, {{0, 0, 1, 0, 100, 0}, {1, 0, 1, 0, 100, 0}, {3, 0, 1, 0, 100, 0}, {7, 0, 1, 0, 100, 0}});
        const auto s = preprocess(inst, DistanceMatrix(inst));
        CHECK(s.tau == 3.5);
    }

    TEST_CASE("unit square in one cluster: diameter sqrt 2, rho sqrt 2 / 2")
    {
        const Instance inst = make_instance({5, 5}, {{0, 0, 1, 0, 100, 0}, {1, 0, 1, 0, 100, 0}, {0, 1, 1, 0, 100, 0}, {1, 1, 1, 0, 100, 0}});
        const DistanceMatrix d(inst);
        std::vector<Cluster> one{{0, {1, 2, 3, 4}, std::sqrt(2.0)}};
        const auto s = summarize(inst, d, one);
        CHECK(s.rho == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
        CHECK(s.d_max == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
        CHECK(s.nearest_outside[1] == -1.0);
        CHECK(s.mean_within[1] == doctest::Approx((1.0 + 1.0 + std::sqrt(2.0)) / 3.0));
    }

    TEST_CASE("zero customers gives an all-zero summary")
    {
        const Instance inst = make_instance({0, 0}, {});
        const auto s = preprocess(inst, DistanceMatrix(inst));
        CHECK(s.clusters.empty());
        CHECK(s.rho == 0.0);
        CHECK(s.tau == 0.0);
        CHECK(s.d_max == 0.0);
        CHECK(s.t_max == 0.0);
    }

    TEST_CASE("non-partition input and bad n are rejected")
    {
        const Instance inst = make_instance({0, 0}, {{1, 0, 1, 0, 100, 0}, {2, 0, 1, 0, 100, 0}});
        const DistanceMatrix d(inst);
        CHECK_THROWS_AS(build_clusters(inst, d, 0), std::invalid_argument);
        CHECK_THROWS_AS(summarize(inst, d, {{0, {1}, 0.0}}), std::invalid_argument);
        CHECK_THROWS_AS(summarize(inst, d, {{0, {1, 2}, 1.0}, {1, {2}, 0.0}}), std::invalid_argument);
    }

    TEST_CASE("cluster CSV dump")
    {
        const auto data = test_support::c101_25();
        std::ostringstream out;
        write_clusters_csv(out, data->summary);
        const std::string s = out.str();
        CHECK(s.rfind("customer,cluster\n", 0) == 0);
        CHECK(std::count(s.begin(), s.end(), '\n') == 26);
    }
}

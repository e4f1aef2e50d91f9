#include "cvrptw/value_net.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace cvrptw;

namespace
{
    // Plain loops, no Eigen expressions: independent of the implementation under test.
    double loop_forward(const NetworkParams &p, const FeatureVector &x)
    {
        std::vector<double> a(x.begin(), x.end());
        for (std::size_t l = 0; l < kLayerCount; ++l)
        {
            const auto &layer = p.layers[l];
            const auto out = static_cast<std::size_t>(kLayerDims[l + 1]);
            std::vector<double> z(out);
            for (std::size_t j = 0; j < out; ++j)
            {
                double s = layer.bias(static_cast<Eigen::Index>(j));
                for (std::size_t i = 0; i < a.size(); ++i)
                    s += a[i] * layer.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                z[j] = l + 1 < kLayerCount ? std::tanh(s) : s;
            }
            a = std::move(z);
        }
        return a[0];
    }

    FeatureVector random_features(std::mt19937_64 &rng, double lo = -1.0, double hi = 2.0)
    {
        std::uniform_real_distribution<double> u(lo, hi);
        FeatureVector f;
        for (double &v : f)
            v = u(rng);
        return f;
    }

    std::vector<Sample> random_batch(std::mt19937_64 &rng, std::size_t n)
    {
        std::normal_distribution<double> target(0.0, 1.0);
        std::vector<Sample> batch(n);
        for (auto &s : batch)
        {
            s.features = random_features(rng);
            s.target = target(rng);
        }
        return batch;
    }

    // Mutable access to parameter k in a flat layout: layer by layer, weights then bias.
    double &param(NetworkParams &p, std::size_t k)
    {
        for (auto &layer : p.layers)
        {
            const auto w = static_cast<std::size_t>(layer.weights.size());
            if (k < w)
                return layer.weights.data()[k];
            k -= w;
            const auto b = static_cast<std::size_t>(layer.bias.size());
            if (k < b)
                return layer.bias.data()[k];
            k -= b;
        }
        throw std::out_of_range("param index");
    }

    std::filesystem::path temp_file(const std::string &name)
    {
        const auto dir = std::filesystem::temp_directory_path() / "cvrptw_unit";
        std::filesystem::create_directories(dir);
        return dir / name;
    }
}

TEST_SUITE("value_net")
{
    TEST_CASE("layer shapes and parameter count")
    {
        const NetworkParams p = init_network(1);
        std::size_t expected = 0;
        for (std::size_t l = 0; l < kLayerCount; ++l)
        {
            CHECK(p.layers[l].weights.rows() == kLayerDims[l]);
            CHECK(p.layers[l].weights.cols() == kLayerDims[l + 1]);
            CHECK(p.layers[l].bias.size() == kLayerDims[l + 1]);
            expected += static_cast<std::size_t>(kLayerDims[l] * kLayerDims[l + 1] + kLayerDims[l + 1]);
        }
        CHECK(p.parameter_count() == expected);
        CHECK(expected == 17 * 128 + 128 + 128 * 64 + 64 + 64 * 32 + 32 + 32 * 8 + 8 + 8 + 1);
    }

    TEST_CASE("initialization: deterministic, seed-sensitive, bounded, zero biases")
    {
        const NetworkParams a = init_network(42), b = init_network(42), c = init_network(43);
        CHECK(a == b);
        CHECK_FALSE(a == c);
        for (std::size_t l = 0; l < kLayerCount; ++l)
        {
            const double bound = 1.0 / std::sqrt(static_cast<double>(kLayerDims[l]));
            CHECK(a.layers[l].weights.cwiseAbs().maxCoeff() <= bound);
            CHECK(a.layers[l].weights.cwiseAbs().maxCoeff() > 0.5 * bound);
            CHECK(a.layers[l].bias.isZero(0.0));
        }
        CHECK(a.all_finite());
    }

    TEST_CASE("zero network outputs 0; output bias passes straight through")
    {
        NetworkParams p = zero_network();
        std::mt19937_64 rng(5);
        const FeatureVector x = random_features(rng);
        CHECK(forward(p, x) == 0.0);
        p.layers.back().bias(0) = 0.75;
        CHECK(forward(p, x) == 0.75);
    }

    TEST_CASE("forward agrees with an independent loop implementation")
    {
        std::mt19937_64 rng(11);
        for (std::uint64_t seed = 0; seed < 10; ++seed)
        {
            NetworkParams p = init_network(seed);
            // non-zero biases so they are exercised too
            std::uniform_real_distribution<double> u(-0.3, 0.3);
            for (auto &layer : p.layers)
                for (Eigen::Index j = 0; j < layer.bias.size(); ++j)
                    layer.bias(j) = u(rng);
            Matrix inputs(20, static_cast<Eigen::Index>(kFeatureCount));
            std::vector<FeatureVector> xs;
            for (Eigen::Index r = 0; r < 20; ++r)
            {
                xs.push_back(random_features(rng));
                for (std::size_t i = 0; i < kFeatureCount; ++i)
                    inputs(r, static_cast<Eigen::Index>(i)) = xs.back()[i];
            }
            const Vector batch = forward_batch(p, inputs);
            for (std::size_t r = 0; r < xs.size(); ++r)
            {
                const double want = loop_forward(p, xs[r]);
                CHECK(std::abs(forward(p, xs[r]) - want) <= 1e-10);
                CHECK(std::abs(batch(static_cast<Eigen::Index>(r)) - want) <= 1e-10);
            }
        }
    }

    TEST_CASE("non-finite input is rejected")
    {
        const NetworkParams p = init_network(1);
        FeatureVector x{};
        x[3] = std::nan("");
        CHECK_THROWS_AS(forward(p, x), std::invalid_argument);
        x[3] = INFINITY;
        CHECK_THROWS_AS(forward(p, x), std::invalid_argument);
    }

    TEST_CASE("gradient matches central finite differences")
    {
        constexpr double h = 1e-5;
        constexpr double tolerance = 1e-4;
        std::mt19937_64 rng(2024);
        for (std::uint64_t config = 0; config < 10; ++config)
        {
            NetworkParams p = init_network(100 + config);
            const auto batch = random_batch(rng, 1 + config * 3);
            const LossGradient lg = loss_gradient(p, batch);
            CHECK(lg.loss == doctest::Approx(mse_loss(p, batch)).epsilon(1e-12));

            NetworkParams g = lg.grad;
            const std::size_t total = p.parameter_count();
            std::uniform_int_distribution<std::size_t> pick(0, total - 1);
            double worst = 0.0;
            for (int trial = 0; trial < 150; ++trial)
            {
                // the whole output layer plus random parameters elsewhere
                const std::size_t k = trial < 9 ? total - 9 + static_cast<std::size_t>(trial) : pick(rng);
                const double saved = param(p, k);
                param(p, k) = saved + h;
                const double up = mse_loss(p, batch);
                param(p, k) = saved - h;
                const double down = mse_loss(p, batch);
                param(p, k) = saved;
                const double numeric = (up - down) / (2.0 * h);
                const double analytic = param(g, k);
                const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
                worst = std::max(worst, rel);
            }
            INFO("config ", config);
            CHECK(worst < tolerance);
        }
    }

    TEST_CASE("a sample the network already fits leaves parameters unchanged")
    {
        NetworkParams p = init_network(3);
        std::mt19937_64 rng(3);
        Sample s{random_features(rng), 0.0};
        s.target = forward(p, s.features);
        const NetworkParams before = p;
        const double loss = train_batch(p, std::span<const Sample>(&s, 1), 0.001);
        CHECK(loss == 0.0);
        CHECK(p == before);
    }

    TEST_CASE("overfits a single sample with monotone loss")
    {
        NetworkParams p = init_network(8);
        std::mt19937_64 rng(8);
        const Sample s{random_features(rng), 1.7};
        double previous = INFINITY;
        double loss = INFINITY;
        int steps = 0;
        for (; steps < 10000; ++steps)
        {
            loss = train_batch(p, std::span<const Sample>(&s, 1), 0.001);
            REQUIRE(loss <= previous);
            previous = loss;
            if (loss < 1e-6)
                break;
        }
        CHECK(loss < 1e-6);
        MESSAGE("steps to 1e-6: ", steps);
    }

    TEST_CASE("learns y = mean(features)")
    {
        NetworkParams p = init_network(77);
        std::mt19937_64 rng(77);
        auto make = [&](std::size_t n)
        {
            std::vector<Sample> b(n);
            for (auto &s : b)
            {
                s.features = random_features(rng, 0.0, 1.0);
                double sum = 0.0;
                for (double v : s.features)
                    sum += v;
                s.target = sum / static_cast<double>(kFeatureCount);
            }
            return b;
        };
        const auto held_out = make(2000);
        const double initial = mse_loss(p, held_out);
        SgdTrainer trainer(TrainConfig{.learning_rate = 0.01, .momentum = 0.9, .batch_size = 128});
        for (int i = 0; i < 2000; ++i)
            trainer.step(p, make(128));
        const double final_loss = mse_loss(p, held_out);
        MESSAGE("held-out MSE ", initial, " -> ", final_loss);
        CHECK(final_loss <= 0.1 * initial);
    }

    TEST_CASE("divergence is reported, not hidden")
    {
        NetworkParams p = init_network(1);
        std::vector<Sample> batch{{FeatureVector{}, 1e200}};
        batch[0].features.fill(1.0);
        CHECK_THROWS_AS(train_batch(p, batch, 1e10), TrainingDivergence);
    }

    TEST_CASE("train config validation")
    {
        CHECK_NOTHROW(TrainConfig{}.validate());
        CHECK_THROWS_AS(TrainConfig{.learning_rate = 0.0}.validate(), std::invalid_argument);
        CHECK_THROWS_AS(TrainConfig{.batch_size = 0}.validate(), std::invalid_argument);
        CHECK_THROWS_AS(TrainConfig{.momentum = 1.0}.validate(), std::invalid_argument);
        CHECK_THROWS_AS(TrainConfig{.gamma = 1.5}.validate(), std::invalid_argument);
    }

    TEST_CASE("epsilon schedule")
    {
        const TrainConfig c;
        CHECK(epsilon_after(c, 0) == 1.0);
        CHECK(epsilon_after(c, 1) == doctest::Approx(0.9995));
        CHECK(epsilon_after(c, 2000) == doctest::Approx(std::pow(0.9995, 2000)));
        CHECK(epsilon_after(c, 2000) == doctest::Approx(0.3678).epsilon(1e-3));
        CHECK(epsilon_after(c, 6000) < 0.05);
    }

    TEST_CASE("replay buffer: FIFO eviction at capacity")
    {
        ReplayBuffer buf;
        CHECK(buf.capacity() == 65536);
        for (std::size_t i = 0; i < 65537; ++i)
            buf.push({FeatureVector{}, static_cast<double>(i)});
        CHECK(buf.size() == 65536);
        CHECK(buf.at(0).target == 1.0);
        CHECK(buf.at(65535).target == 65536.0);
        CHECK_THROWS_AS(buf.at(65536), std::out_of_range);
    }

    TEST_CASE("replay buffer: empty and invalid sampling")
    {
        ReplayBuffer buf(4);
        std::mt19937_64 rng(1);
        CHECK(buf.empty());
        CHECK_THROWS_AS(buf.sample(1, rng), std::logic_error);
        buf.push({});
        CHECK_THROWS_AS(buf.sample(0, rng), std::invalid_argument);
        CHECK(buf.sample(3, rng).size() == 3); // with replacement
        CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
    }

    TEST_CASE("replay buffer: uniform draws and permutation without replacement")
    {
        ReplayBuffer buf(100);
        for (int i = 0; i < 100; ++i)
            buf.push({FeatureVector{}, static_cast<double>(i)});
        std::mt19937_64 rng(123);
        std::vector<int> counts(100, 0);
        const int draws = 100000;
        for (int i = 0; i < draws; ++i)
            ++counts[static_cast<std::size_t>(buf.sample(1, rng)[0].target)];
        double chi2 = 0.0;
        const double expected = draws / 100.0;
        for (int c : counts)
        {
            chi2 += (c - expected) * (c - expected) / expected;
            CHECK(std::abs(c - expected) <= 4.0 * std::sqrt(expected));
        }
        CHECK(chi2 < 148.2); // 99 degrees of freedom, p = 0.001

        const auto all = buf.sample(100, rng);
        std::vector<int> seen(100, 0);
        for (const auto &s : all)
            ++seen[static_cast<std::size_t>(s.target)];
        CHECK(std::all_of(seen.begin(), seen.end(), [](int c)
                          { return c == 1; }));
    }

    TEST_CASE("checkpoint round trip is exact")
    {
        const auto path = temp_file("roundtrip.bin").string();
        NetworkParams p = init_network(9);
        p.layers[2].bias(5) = -0.123456789012345;
        save_network(p, path);
        CHECK(load_network(path) == p);
        CHECK(std::filesystem::file_size(path) == 8 + 4 + 4 + 4 * 6 + 8 * p.parameter_count());
    }

    TEST_CASE("corrupt checkpoints are rejected")
    {
        const auto path = temp_file("good.bin");
        save_network(init_network(1), path.string());
        const auto size = std::filesystem::file_size(path);

        const auto truncated = temp_file("truncated.bin");
        std::filesystem::copy_file(path, truncated, std::filesystem::copy_options::overwrite_existing);
        std::filesystem::resize_file(truncated, size - 8);
        CHECK_THROWS_AS(load_network(truncated.string()), CheckpointError);

        const auto bad_magic = temp_file("magic.bin");
        std::filesystem::copy_file(path, bad_magic, std::filesystem::copy_options::overwrite_existing);
        {
            std::fstream f(bad_magic, std::ios::in | std::ios::out | std::ios::binary);
            f.write("XXXX", 4);
        }
        CHECK_THROWS_AS(load_network(bad_magic.string()), CheckpointError);

        const auto bad_dims = temp_file("dims.bin");
        std::filesystem::copy_file(path, bad_dims, std::filesystem::copy_options::overwrite_existing);
        {
            std::fstream f(bad_dims, std::ios::in | std::ios::out | std::ios::binary);
            f.seekp(8 + 4 + 4 + 4); // second dimension
            const std::uint32_t wrong = 127;
            f.write(reinterpret_cast<const char *>(&wrong), 4);
        }
        CHECK_THROWS_AS(load_network(bad_dims.string()), CheckpointError);

        const auto trailing = temp_file("trailing.bin");
        std::filesystem::copy_file(path, trailing, std::filesystem::copy_options::overwrite_existing);
        {
            std::ofstream f(trailing, std::ios::app | std::ios::binary);
            f.put('\0');
        }
        CHECK_THROWS_AS(load_network(trailing.string()), CheckpointError);
        CHECK_THROWS_AS(load_network(temp_file("missing.bin").string() + ".nope"), CheckpointError);
    }
}

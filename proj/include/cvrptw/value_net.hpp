#pragma once

#include "cvrptw/features.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvrptw
{
    class TrainingDivergence : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class CheckpointError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using Vector = Eigen::VectorXd;

    /// 17 -> 128 -> 64 -> 32 -> 8 -> 1, tanh on the hidden layers, linear output.
    inline constexpr std::array<int, 6> kLayerDims{static_cast<int>(kFeatureCount), 128, 64, 32, 8, 1};
    inline constexpr std::size_t kLayerCount = kLayerDims.size() - 1;

    struct DenseLayer
    {
        Matrix weights; // fan_in x fan_out
        Vector bias;    // fan_out
    };

    struct NetworkParams
    {
        std::array<DenseLayer, kLayerCount> layers;

        std::size_t parameter_count() const;
        bool all_finite() const;
        bool operator==(const NetworkParams &other) const;
    };

    NetworkParams zero_network();

    /// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero biases; deterministic in `seed`.
    NetworkParams init_network(std::uint64_t seed);

    double forward(const NetworkParams &params, const FeatureVector &x);

    /// One value per row of `inputs` (rows are feature vectors).
    Vector forward_batch(const NetworkParams &params, const Matrix &inputs);

    struct Sample
    {
        FeatureVector features{};
        double target = 0.0;
    };

    struct LossGradient
    {
        double loss = 0.0;
        NetworkParams grad;
    };

    double mse_loss(const NetworkParams &params, std::span<const Sample> batch);

    /// Mean squared error over the batch and its gradient with respect to every parameter.
    LossGradient loss_gradient(const NetworkParams &params, std::span<const Sample> batch);

    struct TrainConfig
    {
        double learning_rate = 0.001;
        double momentum = 0.0; // plain SGD when 0
        std::size_t batch_size = 4096;
        std::size_t train_every = 10; // decision steps
        double epsilon_start = 1.0;
        double epsilon_decay = 0.9995; // per episode
        double gamma = 0.9;

        void validate() const;
    };

    /// Exploration rate in effect after `episodes` completed episodes.
    double epsilon_after(const TrainConfig &config, std::size_t episodes);

    /// SGD (optionally with momentum) on the MSE loss; returns the loss before the step.
    class SgdTrainer
    {
    public:
        explicit SgdTrainer(TrainConfig config);

        double step(NetworkParams &params, std::span<const Sample> batch);

        const TrainConfig &config() const noexcept { return _config; }

    private:
        TrainConfig _config;
        NetworkParams _velocity;
    };

    /// Plain SGD step at `learning_rate`; returns the pre-step loss.
    double train_batch(NetworkParams &params, std::span<const Sample> batch, double learning_rate);

    /// FIFO ring of training samples.
    class ReplayBuffer
    {
    public:
        static constexpr std::size_t kDefaultCapacity = std::size_t{1} << 16;

        explicit ReplayBuffer(std::size_t capacity = kDefaultCapacity);

        void push(const Sample &sample);
        std::size_t size() const noexcept { return _count; }
        std::size_t capacity() const noexcept { return _items.size(); }
        bool empty() const noexcept { return _count == 0; }

        /// Oldest-first access, i in [0, size()).
        const Sample &at(std::size_t i) const;

        /// With replacement while fewer than k items are stored, without replacement otherwise.
        std::vector<Sample> sample(std::size_t k, std::mt19937_64 &rng) const;

    private:
        std::vector<Sample> _items;
        std::size_t _cursor = 0;
        std::size_t _count = 0;
    };

    /// Checkpoint: "CVRPTWVN" magic, u32 version, u32 layer count, u32 dims, then per layer the
    /// fan_in x fan_out weights row-major followed by the biases, all little-endian f64.
    void save_network(const NetworkParams &params, const std::string &path);
    NetworkParams load_network(const std::string &path);
}

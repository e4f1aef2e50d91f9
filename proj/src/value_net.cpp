#include "cvrptw/value_net.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

namespace cvrptw
{
    namespace
    {
        constexpr char kMagic[8] = {'C', 'V', 'R', 'P', 'T', 'W', 'V', 'N'};
        constexpr std::uint32_t kVersion = 1;

        static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

        Matrix to_matrix(std::span<const Sample> batch)
        {
            Matrix x(static_cast<Eigen::Index>(batch.size()), static_cast<Eigen::Index>(kFeatureCount));
            for (std::size_t r = 0; r < batch.size(); ++r)
                for (std::size_t c = 0; c < kFeatureCount; ++c)
                    x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = batch[r].features[c];
            return x;
        }

        void put_u32(std::ofstream &out, std::uint32_t v) { out.write(reinterpret_cast<const char *>(&v), sizeof v); }

        void put_f64s(std::ofstream &out, const double *data, std::size_t n)
        {
            out.write(reinterpret_cast<const char *>(data), static_cast<std::streamsize>(n * sizeof(double)));
        }
    }

    std::size_t NetworkParams::parameter_count() const
    {
        std::size_t n = 0;
        for (const auto &l : layers)
            n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
        return n;
    }

    bool NetworkParams::all_finite() const
    {
        for (const auto &l : layers)
            if (!l.weights.allFinite() || !l.bias.allFinite())
                return false;
        return true;
    }

    bool NetworkParams::operator==(const NetworkParams &other) const
    {
        for (std::size_t l = 0; l < kLayerCount; ++l)
            if (layers[l].weights != other.layers[l].weights || layers[l].bias != other.layers[l].bias)
                return false;
        return true;
    }

    NetworkParams zero_network()
    {
        NetworkParams p;
        for (std::size_t l = 0; l < kLayerCount; ++l)
        {
            p.layers[l].weights = Matrix::Zero(kLayerDims[l], kLayerDims[l + 1]);
            p.layers[l].bias = Vector::Zero(kLayerDims[l + 1]);
        }
        return p;
    }

    NetworkParams init_network(std::uint64_t seed)
    {
        NetworkParams p = zero_network();
        std::mt19937_64 rng(seed);
        for (std::size_t l = 0; l < kLayerCount; ++l)
        {
            const double bound = 1.0 / std::sqrt(static_cast<double>(kLayerDims[l]));
            std::uniform_real_distribution<double> u(-bound, bound);
            auto &w = p.layers[l].weights;
            for (Eigen::Index r = 0; r < w.rows(); ++r)
                for (Eigen::Index c = 0; c < w.cols(); ++c)
                    w(r, c) = u(rng);
        }
        return p;
    }

    Vector forward_batch(const NetworkParams &params, const Matrix &inputs)
    {
        if (inputs.cols() != kLayerDims[0])
            throw std::invalid_argument("forward: expected " + std::to_string(kLayerDims[0]) + " input columns");
        if (!inputs.allFinite())
            throw std::invalid_argument("forward: non-finite input");
        Matrix a = inputs;
        for (std::size_t l = 0; l < kLayerCount; ++l)
        {
            Matrix z = a * params.layers[l].weights;
            z.rowwise() += params.layers[l].bias.transpose();
            if (l + 1 < kLayerCount)
                a = z.array().tanh().matrix();
            else
                a = std::move(z);
        }
        return a.col(0);
    }

    double forward(const NetworkParams &params, const FeatureVector &x)
    {
        Matrix in(1, static_cast<Eigen::Index>(kFeatureCount));
        for (std::size_t c = 0; c < kFeatureCount; ++c)
            in(0, static_cast<Eigen::Index>(c)) = x[c];
        return forward_batch(params, in)(0);
    }

    double mse_loss(const NetworkParams &params, std::span<const Sample> batch)
    {
        if (batch.empty())
            throw std::invalid_argument("mse_loss: empty batch");
        const Vector out = forward_batch(params, to_matrix(batch));
        double sum = 0.0;
        for (std::size_t i = 0; i < batch.size(); ++i)
        {
            const double e = out(static_cast<Eigen::Index>(i)) - batch[i].target;
            sum += e * e;
        }
        return sum / static_cast<double>(batch.size());
    }

    LossGradient loss_gradient(const NetworkParams &params, std::span<const Sample> batch)
    {
        if (batch.empty())
            throw std::invalid_argument("loss_gradient: empty batch");
        const auto rows = static_cast<Eigen::Index>(batch.size());

        std::array<Matrix, kLayerCount + 1> act;
        act[0] = to_matrix(batch);
        if (!act[0].allFinite())
            throw std::invalid_argument("loss_gradient: non-finite input");
        for (std::size_t l = 0; l < kLayerCount; ++l)
        {
            Matrix z = act[l] * params.layers[l].weights;
            z.rowwise() += params.layers[l].bias.transpose();
            act[l + 1] = l + 1 < kLayerCount ? Matrix(z.array().tanh().matrix()) : std::move(z);
        }

        LossGradient out;
        Matrix delta(rows, 1);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < rows; ++i)
        {
            const double e = act[kLayerCount](i, 0) - batch[static_cast<std::size_t>(i)].target;
            sum += e * e;
            delta(i, 0) = 2.0 * e / static_cast<double>(rows);
        }
        out.loss = sum / static_cast<double>(rows);

        for (std::size_t l = kLayerCount; l-- > 0;)
        {
            out.grad.layers[l].weights = act[l].transpose() * delta;
            out.grad.layers[l].bias = delta.colwise().sum().transpose();
            if (l > 0)
            {
                Matrix back = delta * params.layers[l].weights.transpose();
                delta = (back.array() * (1.0 - act[l].array().square())).matrix();
            }
        }
        return out;
    }

    void TrainConfig::validate() const
    {
        if (!(learning_rate > 0.0) || batch_size == 0 || train_every == 0)
            throw std::invalid_argument("learning rate, batch size and training period must be positive");
        if (momentum < 0.0 || momentum >= 1.0)
            throw std::invalid_argument("momentum must lie in [0, 1)");
        if (!(epsilon_start > 0.0) || !(epsilon_decay > 0.0) || epsilon_decay > 1.0)
            throw std::invalid_argument("epsilon schedule must be positive with decay in (0, 1]");
        if (gamma < 0.0 || gamma > 1.0)
            throw std::invalid_argument("gamma must lie in [0, 1]");
    }

    double epsilon_after(const TrainConfig &config, std::size_t episodes)
    {
        return config.epsilon_start * std::pow(config.epsilon_decay, static_cast<double>(episodes));
    }

    SgdTrainer::SgdTrainer(TrainConfig config) : _config(config), _velocity(zero_network())
    {
        _config.validate();
    }

    double SgdTrainer::step(NetworkParams &params, std::span<const Sample> batch)
    {
        LossGradient lg = loss_gradient(params, batch);
        if (!std::isfinite(lg.loss) || !lg.grad.all_finite())
            throw TrainingDivergence("training diverged: loss = " + std::to_string(lg.loss) + " on a batch of " + std::to_string(batch.size()));
        const double lr = _config.learning_rate;
        const double mu = _config.momentum;
        for (std::size_t l = 0; l < kLayerCount; ++l)
        {
            auto &v = _velocity.layers[l];
            const auto &g = lg.grad.layers[l];
            if (mu > 0.0)
            {
                v.weights = mu * v.weights + g.weights;
                v.bias = mu * v.bias + g.bias;
                params.layers[l].weights -= lr * v.weights;
                params.layers[l].bias -= lr * v.bias;
            }
            else
            {
                params.layers[l].weights -= lr * g.weights;
                params.layers[l].bias -= lr * g.bias;
            }
        }
        return lg.loss;
    }

    double train_batch(NetworkParams &params, std::span<const Sample> batch, double learning_rate)
    {
        TrainConfig config;
        config.learning_rate = learning_rate;
        SgdTrainer trainer(config);
        return trainer.step(params, batch);
    }

    ReplayBuffer::ReplayBuffer(std::size_t capacity) : _items(capacity)
    {
        if (capacity == 0)
            throw std::invalid_argument("replay buffer capacity must be positive");
    }

    void ReplayBuffer::push(const Sample &sample)
    {
        _items[_cursor] = sample;
        _cursor = (_cursor + 1) % _items.size();
        if (_count < _items.size())
            ++_count;
    }

    const Sample &ReplayBuffer::at(std::size_t i) const
    {
        if (i >= _count)
            throw std::out_of_range("replay buffer index out of range");
        const std::size_t oldest = _count < _items.size() ? 0 : _cursor;
        return _items[(oldest + i) % _items.size()];
    }

    std::vector<Sample> ReplayBuffer::sample(std::size_t k, std::mt19937_64 &rng) const
    {
        if (k == 0)
            throw std::invalid_argument("sample size must be >= 1");
        if (_count == 0)
            throw std::logic_error("cannot sample from an empty replay buffer");
        std::vector<Sample> out;
        out.reserve(k);
        if (_count < k)
        {
            std::uniform_int_distribution<std::size_t> pick(0, _count - 1);
            for (std::size_t i = 0; i < k; ++i)
                out.push_back(at(pick(rng)));
            return out;
        }
        // Partial Fisher-Yates over stored positions.
        std::vector<std::size_t> idx(_count);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t i = 0; i < k; ++i)
        {
            std::uniform_int_distribution<std::size_t> pick(i, _count - 1);
            std::swap(idx[i], idx[pick(rng)]);
            out.push_back(at(idx[i]));
        }
        return out;
    }

    void save_network(const NetworkParams &params, const std::string &path)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw CheckpointError("cannot write checkpoint " + path);
        out.write(kMagic, sizeof kMagic);
        put_u32(out, kVersion);
        put_u32(out, static_cast<std::uint32_t>(kLayerCount));
        for (int d : kLayerDims)
            put_u32(out, static_cast<std::uint32_t>(d));
        for (const auto &l : params.layers)
        {
            put_f64s(out, l.weights.data(), static_cast<std::size_t>(l.weights.size()));
            put_f64s(out, l.bias.data(), static_cast<std::size_t>(l.bias.size()));
        }
        if (!out)
            throw CheckpointError("failed writing checkpoint " + path);
    }

    NetworkParams load_network(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw CheckpointError("cannot open checkpoint " + path);
        const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::size_t pos = 0;
        auto need = [&](std::size_t n)
        {
            if (pos + n > bytes.size())
                throw CheckpointError("truncated checkpoint " + path);
        };
        auto get_u32 = [&]
        {
            need(4);
            std::uint32_t v;
            std::memcpy(&v, bytes.data() + pos, 4);
            pos += 4;
            return v;
        };

        need(sizeof kMagic);
        if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
            throw CheckpointError("bad magic in checkpoint " + path);
        pos += sizeof kMagic;
        if (const auto version = get_u32(); version != kVersion)
            throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
        if (get_u32() != kLayerCount)
            throw CheckpointError("layer count mismatch in checkpoint " + path);
        for (int d : kLayerDims)
            if (get_u32() != static_cast<std::uint32_t>(d))
                throw CheckpointError("layer dimension mismatch in checkpoint " + path);

        NetworkParams p = zero_network();
        auto get_f64s = [&](double *dst, Eigen::Index count)
        {
            const auto n = static_cast<std::size_t>(count) * sizeof(double);
            need(n);
            std::memcpy(dst, bytes.data() + pos, n);
            pos += n;
        };
        for (auto &l : p.layers)
        {
            get_f64s(l.weights.data(), l.weights.size());
            get_f64s(l.bias.data(), l.bias.size());
        }
        if (pos != bytes.size())
            throw CheckpointError("trailing bytes in checkpoint " + path);
        return p;
    }
}

#pragma once

// Q-value network: 22 -> 128 -> 128 -> resblock(2x128) -> resblock(2x128) -> 18.
// All six hidden layers are ReLU; the residual shortcut adds the block input
// to the activated block output, so zeroed block weights give the identity.
// Forward/backward are written out explicitly; Eigen only supplies the
// matrix arithmetic.

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace orbitsplit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct DenseLayer {
    Matrix w;  // out x in
    Vector b;  // out
};

class QNetwork {
public:
    static constexpr int kInputDim = 22;
    static constexpr int kHiddenDim = 128;
    static constexpr int kOutputDim = 18;
    static constexpr int kNumLayers = 7;

    QNetwork() {
        const auto shapes = layer_shapes();
        for (int i = 0; i < kNumLayers; ++i) {
            layers_[static_cast<std::size_t>(i)].w =
                Matrix::Zero(shapes[static_cast<std::size_t>(i)].first,
                             shapes[static_cast<std::size_t>(i)].second);
            layers_[static_cast<std::size_t>(i)].b =
                Vector::Zero(shapes[static_cast<std::size_t>(i)].first);
        }
    }

    static std::array<std::pair<int, int>, kNumLayers> layer_shapes() {
        return {{{kHiddenDim, kInputDim},
                 {kHiddenDim, kHiddenDim},
                 {kHiddenDim, kHiddenDim},
                 {kHiddenDim, kHiddenDim},
                 {kHiddenDim, kHiddenDim},
                 {kHiddenDim, kHiddenDim},
                 {kOutputDim, kHiddenDim}}};
    }

    // Uniform fan-in init, zero biases.
    static QNetwork random_init(std::uint64_t seed) {
        QNetwork net;
        std::mt19937_64 rng(seed);
        for (auto& layer : net.layers_) {
            const double limit = std::sqrt(6.0 / static_cast<double>(layer.w.cols()));
            std::uniform_real_distribution<double> dist(-limit, limit);
            for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
                for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
                    layer.w(r, c) = dist(rng);
                }
            }
            layer.b.setZero();
        }
        return net;
    }

    struct Tape {
        Matrix x;
        Matrix z0, h0;
        Matrix z1, h1;
        Matrix z2, a2, z3, a3, h2;
        Matrix z4, a4, z5, a5, h3;
        Matrix q;
    };

    Matrix forward(const Matrix& x, Tape& t) const {
        if (x.rows() != kInputDim) throw std::invalid_argument("QNetwork input must have 22 rows");
        const auto& L = layers_;
        t.x = x;
        t.z0 = (L[0].w * x).colwise() + L[0].b;
        t.h0 = t.z0.cwiseMax(0.0);
        t.z1 = (L[1].w * t.h0).colwise() + L[1].b;
        t.h1 = t.z1.cwiseMax(0.0);
        t.z2 = (L[2].w * t.h1).colwise() + L[2].b;
        t.a2 = t.z2.cwiseMax(0.0);
        t.z3 = (L[3].w * t.a2).colwise() + L[3].b;
        t.a3 = t.z3.cwiseMax(0.0);
        t.h2 = t.h1 + t.a3;
        t.z4 = (L[4].w * t.h2).colwise() + L[4].b;
        t.a4 = t.z4.cwiseMax(0.0);
        t.z5 = (L[5].w * t.a4).colwise() + L[5].b;
        t.a5 = t.z5.cwiseMax(0.0);
        t.h3 = t.h2 + t.a5;
        t.q = (L[6].w * t.h3).colwise() + L[6].b;
        return t.q;
    }

    Matrix forward(const Matrix& x) const {
        Tape t;
        return forward(x, t);
    }

    Vector forward_one(const Vector& x) const { return forward(Matrix(x)).col(0); }

    // Accumulates dL/dparams into grad given dL/dq; grad must be zeroed by the
    // caller if accumulation is not intended.
    void backward(const Tape& t, const Matrix& dq, QNetwork& grad) const {
        const auto& L = layers_;
        auto& G = grad.layers_;

        const auto relu_mask = [](const Matrix& z) {
            return (z.array() > 0.0).cast<double>().matrix();
        };

        G[6].w += dq * t.h3.transpose();
        G[6].b += dq.rowwise().sum();
        Matrix dh3 = L[6].w.transpose() * dq;

        Matrix dz5 = (dh3.array() * relu_mask(t.z5).array()).matrix();
        G[5].w += dz5 * t.a4.transpose();
        G[5].b += dz5.rowwise().sum();
        Matrix da4 = L[5].w.transpose() * dz5;
        Matrix dz4 = (da4.array() * relu_mask(t.z4).array()).matrix();
        G[4].w += dz4 * t.h2.transpose();
        G[4].b += dz4.rowwise().sum();
        Matrix dh2 = dh3 + L[4].w.transpose() * dz4;

        Matrix dz3 = (dh2.array() * relu_mask(t.z3).array()).matrix();
        G[3].w += dz3 * t.a2.transpose();
        G[3].b += dz3.rowwise().sum();
        Matrix da2 = L[3].w.transpose() * dz3;
        Matrix dz2 = (da2.array() * relu_mask(t.z2).array()).matrix();
        G[2].w += dz2 * t.h1.transpose();
        G[2].b += dz2.rowwise().sum();
        Matrix dh1 = dh2 + L[2].w.transpose() * dz2;

        Matrix dz1 = (dh1.array() * relu_mask(t.z1).array()).matrix();
        G[1].w += dz1 * t.h0.transpose();
        G[1].b += dz1.rowwise().sum();
        Matrix dh0 = L[1].w.transpose() * dz1;

        Matrix dz0 = (dh0.array() * relu_mask(t.z0).array()).matrix();
        G[0].w += dz0 * t.x.transpose();
        G[0].b += dz0.rowwise().sum();
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers_) {
            n += static_cast<std::size_t>(l.w.size()) + static_cast<std::size_t>(l.b.size());
        }
        return n;
    }

    std::array<DenseLayer, kNumLayers>& layers() { return layers_; }
    const std::array<DenseLayer, kNumLayers>& layers() const { return layers_; }

    void set_zero() {
        for (auto& l : layers_) {
            l.w.setZero();
            l.b.setZero();
        }
    }

    double squared_norm() const {
        double n = 0.0;
        for (const auto& l : layers_) {
            n += l.w.squaredNorm() + l.b.squaredNorm();
        }
        return n;
    }

    void scale(double k) {
        for (auto& l : layers_) {
            l.w *= k;
            l.b *= k;
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["input_dim"] = kInputDim;
        j["hidden_dim"] = kHiddenDim;
        j["output_dim"] = kOutputDim;
        nlohmann::json layers = nlohmann::json::array();
        for (const auto& l : layers_) {
            nlohmann::json jl;
            jl["out"] = l.w.rows();
            jl["in"] = l.w.cols();
            std::vector<double> w;
            w.reserve(static_cast<std::size_t>(l.w.size()));
            for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
                for (Eigen::Index c = 0; c < l.w.cols(); ++c) {
                    w.push_back(l.w(r, c));
                }
            }
            jl["w"] = std::move(w);
            jl["b"] = std::vector<double>(l.b.data(), l.b.data() + l.b.size());
            layers.push_back(std::move(jl));
        }
        j["layers"] = std::move(layers);
        return j;
    }

    static QNetwork from_json(const nlohmann::json& j) {
        if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1) {
            throw std::runtime_error("checkpoint: unsupported schema version");
        }
        if (j.at("input_dim").get<int>() != kInputDim ||
            j.at("hidden_dim").get<int>() != kHiddenDim ||
            j.at("output_dim").get<int>() != kOutputDim) {
            throw std::runtime_error("checkpoint: architecture mismatch");
        }
        const auto& jl = j.at("layers");
        if (!jl.is_array() || jl.size() != kNumLayers) {
            throw std::runtime_error("checkpoint: wrong layer count");
        }
        QNetwork net;
        const auto shapes = layer_shapes();
        for (std::size_t i = 0; i < kNumLayers; ++i) {
            const auto& layer = jl[i];
            const int out = layer.at("out").get<int>();
            const int in = layer.at("in").get<int>();
            if (out != shapes[i].first || in != shapes[i].second) {
                throw std::runtime_error("checkpoint: layer " + std::to_string(i) +
                                         " shape mismatch");
            }
            const auto w = layer.at("w").get<std::vector<double>>();
            const auto b = layer.at("b").get<std::vector<double>>();
            if (w.size() != static_cast<std::size_t>(out) * static_cast<std::size_t>(in) ||
                b.size() != static_cast<std::size_t>(out)) {
                throw std::runtime_error("checkpoint: layer " + std::to_string(i) +
                                         " payload size mismatch");
            }
            auto& dst = net.layers_[i];
            std::size_t k = 0;
            for (int r = 0; r < out; ++r) {
                for (int c = 0; c < in; ++c) {
                    dst.w(r, c) = w[k++];
                }
            }
            for (int r = 0; r < out; ++r) dst.b(r) = b[static_cast<std::size_t>(r)];
        }
        return net;
    }

    void save(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + path + " for writing");
        f << to_json().dump();
        if (!f) throw std::runtime_error("write failed for " + path);
    }

    static QNetwork load(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open checkpoint " + path);
        nlohmann::json j;
        f >> j;
        return from_json(j);
    }

private:
    std::array<DenseLayer, kNumLayers> layers_;
};

inline int argmax_q(const Vector& q) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(q.size()); ++i) {
        if (q(i) > q(best)) best = i;
    }
    return best;
}

}  // namespace orbitsplit

// SPDX-License-Identifier: Apache-2.0
//
// ris-skg: physical-layer key generation under man-in-the-middle RIS attacks
// Copyright (C) 2026 The ris-skg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "risskg/core.hpp"

namespace risskg {

enum class Activation { relu, sine, linear };

std::string to_string(Activation act);
Activation activation_from_string(const std::string &name);

namespace detail {
inline std::uint64_t next_param_stamp()
{
    static std::atomic<std::uint64_t> counter{0};
    return ++counter;
}
} // namespace detail

/// Dense feed-forward network. Batches are stored column-wise: an input
/// batch is (input_dim x batch), the output is (output_dim x batch).
template <typename Scalar>
class BasicMlp {
  public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    struct Layer {
        Matrix weight; // out x in
        Vector bias;   // out
        Activation act = Activation::linear;
    };

    /// Per-layer inputs and pre-activations of one forward pass.
    struct Cache {
        std::vector<Matrix> inputs;
        std::vector<Matrix> pre;
        Matrix output;
        std::uint64_t stamp = 0;
    };

    struct Gradients {
        std::vector<Matrix> weight;
        std::vector<Vector> bias;
        Matrix input; // dL/d(input batch)
    };

    BasicMlp() = default;

    /// Zero-initialized network with dims.size()-1 layers.
    BasicMlp(const std::vector<int> &dims, const std::vector<Activation> &acts)
    {
        if (dims.size() < 2)
            throw std::invalid_argument("Mlp: need at least an input and an output dimension");
        if (acts.size() != dims.size() - 1)
            throw std::invalid_argument("Mlp: one activation per layer required");
        for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
            if (dims[l] < 1 || dims[l + 1] < 1)
                throw std::invalid_argument("Mlp: layer dimensions must be positive");
            layers_.push_back({Matrix::Zero(dims[l + 1], dims[l]), Vector::Zero(dims[l + 1]), acts[l]});
        }
    }

    /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
    static BasicMlp glorot(const std::vector<int> &dims, const std::vector<Activation> &acts, Rng &rng)
    {
        BasicMlp net(dims, acts);
        for (auto &layer : net.layers_) {
            const double bound = std::sqrt(6.0 / static_cast<double>(layer.weight.rows() + layer.weight.cols()));
            std::uniform_real_distribution<double> dist(-bound, bound);
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
                for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
                    layer.weight(r, c) = static_cast<Scalar>(dist(rng));
        }
        return net;
    }

    /// Hidden layers use `hidden_act`, the last layer uses `output_act`.
    static std::vector<Activation> activations(std::size_t num_layers, Activation hidden_act, Activation output_act)
    {
        std::vector<Activation> acts(num_layers, hidden_act);
        acts.back() = output_act;
        return acts;
    }

    std::size_t num_layers() const { return layers_.size(); }
    int input_dim() const { return static_cast<int>(layers_.front().weight.cols()); }
    int output_dim() const { return static_cast<int>(layers_.back().weight.rows()); }
    const Layer &layer(std::size_t l) const { return layers_.at(l); }
    const std::vector<Layer> &layers() const { return layers_; }

    /// Mutable access invalidates every cache taken before it.
    Layer &mutable_layer(std::size_t l)
    {
        stamp_ = detail::next_param_stamp();
        return layers_.at(l);
    }

    std::vector<int> dims() const
    {
        std::vector<int> d{input_dim()};
        for (const auto &layer : layers_)
            d.push_back(static_cast<int>(layer.weight.rows()));
        return d;
    }

    std::size_t num_parameters() const
    {
        std::size_t n = 0;
        for (const auto &layer : layers_)
            n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
        return n;
    }

    Matrix forward(const Matrix &x) const
    {
        check_input(x);
        Matrix a = x;
        for (const auto &layer : layers_) {
            Matrix z = (layer.weight * a).colwise() + layer.bias;
            a = activate(z, layer.act);
        }
        return a;
    }

    Matrix forward(const Matrix &x, Cache &cache) const
    {
        check_input(x);
        cache.inputs.clear();
        cache.pre.clear();
        Matrix a = x;
        for (const auto &layer : layers_) {
            cache.inputs.push_back(a);
            cache.pre.push_back((layer.weight * a).colwise() + layer.bias);
            a = activate(cache.pre.back(), layer.act);
        }
        cache.output = a;
        cache.stamp = stamp_;
        return a;
    }

    /// Output pre-activation (the value fed to the last activation).
    Matrix pre_activation(const Matrix &x) const
    {
        Cache cache;
        forward(x, cache);
        return cache.pre.back();
    }

    Gradients backward(const Cache &cache, const Matrix &upstream) const
    {
        if (cache.stamp != stamp_ || cache.pre.size() != layers_.size())
            throw std::logic_error("Mlp::backward: cache does not belong to the current parameters");
        if (upstream.rows() != cache.output.rows() || upstream.cols() != cache.output.cols())
            throw std::invalid_argument("Mlp::backward: upstream gradient shape mismatch");
        Gradients g;
        g.weight.resize(layers_.size());
        g.bias.resize(layers_.size());
        Matrix delta = upstream;
        for (std::size_t k = layers_.size(); k-- > 0;) {
            const Matrix dz = delta.cwiseProduct(derivative(cache.pre[k], layers_[k].act));
            g.weight[k] = dz * cache.inputs[k].transpose();
            g.bias[k] = dz.rowwise().sum();
            delta = layers_[k].weight.transpose() * dz;
        }
        g.input = std::move(delta);
        return g;
    }

    /// All parameters flattened layer by layer, weights column-major then bias.
    Vector parameters() const
    {
        Vector p(static_cast<Eigen::Index>(num_parameters()));
        Eigen::Index at = 0;
        for (const auto &layer : layers_) {
            p.segment(at, layer.weight.size()) = layer.weight.reshaped();
            at += layer.weight.size();
            p.segment(at, layer.bias.size()) = layer.bias;
            at += layer.bias.size();
        }
        return p;
    }

    void set_parameters(const Vector &p)
    {
        if (p.size() != static_cast<Eigen::Index>(num_parameters()))
            throw std::invalid_argument("Mlp::set_parameters: size mismatch");
        stamp_ = detail::next_param_stamp();
        Eigen::Index at = 0;
        for (auto &layer : layers_) {
            layer.weight.reshaped() = p.segment(at, layer.weight.size());
            at += layer.weight.size();
            layer.bias = p.segment(at, layer.bias.size());
            at += layer.bias.size();
        }
    }

    static Vector flatten(const Gradients &g)
    {
        Eigen::Index n = 0;
        for (std::size_t k = 0; k < g.weight.size(); ++k)
            n += g.weight[k].size() + g.bias[k].size();
        Vector p(n);
        Eigen::Index at = 0;
        for (std::size_t k = 0; k < g.weight.size(); ++k) {
            p.segment(at, g.weight[k].size()) = g.weight[k].reshaped();
            at += g.weight[k].size();
            p.segment(at, g.bias[k].size()) = g.bias[k];
            at += g.bias[k].size();
        }
        return p;
    }

    bool operator==(const BasicMlp &other) const
    {
        if (layers_.size() != other.layers_.size())
            return false;
        for (std::size_t k = 0; k < layers_.size(); ++k) {
            const auto &a = layers_[k];
            const auto &b = other.layers_[k];
            if (a.act != b.act || a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols() ||
                a.weight != b.weight || a.bias != b.bias)
                return false;
        }
        return true;
    }

  private:
    void check_input(const Matrix &x) const
    {
        if (layers_.empty())
            throw std::logic_error("Mlp: empty network");
        if (x.rows() != input_dim())
            throw std::invalid_argument("Mlp::forward: expected " + std::to_string(input_dim()) + " inputs, got " +
                                        std::to_string(x.rows()));
    }

    static Matrix activate(const Matrix &z, Activation act)
    {
        switch (act) {
        case Activation::relu:
            return z.cwiseMax(Scalar(0));
        case Activation::sine:
            return z.array().sin().matrix();
        case Activation::linear:
            break;
        }
        return z;
    }

    static Matrix derivative(const Matrix &z, Activation act)
    {
        switch (act) {
        case Activation::relu:
            return (z.array() > Scalar(0)).template cast<Scalar>().matrix();
        case Activation::sine:
            return z.array().cos().matrix();
        case Activation::linear:
            break;
        }
        return Matrix::Ones(z.rows(), z.cols());
    }

    std::vector<Layer> layers_;
    std::uint64_t stamp_ = detail::next_param_stamp();
};

using Mlp = BasicMlp<double>;

/// Bias-corrected Adam moments for one network.
template <typename Scalar>
struct BasicAdamState {
    using Net = BasicMlp<Scalar>;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::vector<typename Net::Matrix> m_w, v_w;
    std::vector<typename Net::Vector> m_b, v_b;

    BasicAdamState() = default;
    explicit BasicAdamState(const Net &net)
    {
        for (const auto &layer : net.layers()) {
            m_w.push_back(Net::Matrix::Zero(layer.weight.rows(), layer.weight.cols()));
            v_w.push_back(m_w.back());
            m_b.push_back(Net::Vector::Zero(layer.bias.size()));
            v_b.push_back(m_b.back());
        }
    }
};

using AdamState = BasicAdamState<double>;

template <typename Scalar>
void adam_step(BasicMlp<Scalar> &net, BasicAdamState<Scalar> &state, const typename BasicMlp<Scalar>::Gradients &grads,
               double lr)
{
    if (state.m_w.size() != net.num_layers() || grads.weight.size() != net.num_layers())
        throw std::invalid_argument("adam_step: layer count mismatch");
    ++state.step;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    const auto b1 = static_cast<Scalar>(state.beta1);
    const auto b2 = static_cast<Scalar>(state.beta2);
    auto update = [&](auto &param, auto &m, auto &v, const auto &g) {
        if (g.rows() != param.rows() || g.cols() != param.cols() || m.rows() != param.rows() || m.cols() != param.cols())
            throw std::invalid_argument("adam_step: gradient shape mismatch");
        m = b1 * m + (Scalar(1) - b1) * g;
        v = b2 * v + (Scalar(1) - b2) * g.cwiseAbs2();
        param.array() -= static_cast<Scalar>(lr) * (m.array() / static_cast<Scalar>(c1)) /
                         ((v.array() / static_cast<Scalar>(c2)).sqrt() + static_cast<Scalar>(state.eps));
    };
    for (std::size_t k = 0; k < net.num_layers(); ++k) {
        auto &layer = net.mutable_layer(k);
        update(layer.weight, state.m_w[k], state.v_w[k], grads.weight[k]);
        update(layer.bias, state.m_b[k], state.v_b[k], grads.bias[k]);
    }
}

} // namespace risskg

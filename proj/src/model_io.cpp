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

#include "risskg/model_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace risskg {

std::string to_string(Activation act)
{
    switch (act) {
    case Activation::relu:
        return "relu";
    case Activation::sine:
        return "sine";
    case Activation::linear:
        break;
    }
    return "linear";
}

Activation activation_from_string(const std::string &name)
{
    if (name == "relu")
        return Activation::relu;
    if (name == "sine")
        return Activation::sine;
    if (name == "linear")
        return Activation::linear;
    throw std::invalid_argument("unknown activation '" + name + "'");
}

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string &token)
{
    double v = 0.0;
    const char *end = token.data() + token.size();
    const auto res = std::from_chars(token.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw std::runtime_error("malformed number '" + token + "'");
    return v;
}

void write_mlp(const Mlp &net, std::ostream &os)
{
    os << "mlpv1 " << net.num_layers() << '\n';
    for (const auto &layer : net.layers()) {
        os << "dims " << layer.weight.cols() << ' ' << layer.weight.rows() << ' ' << to_string(layer.act) << '\n';
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
                os << (c ? " " : "") << format_double(layer.weight(r, c));
            os << '\n';
        }
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r)
            os << (r ? " " : "") << format_double(layer.bias[r]);
        os << '\n';
    }
}

Mlp read_mlp(std::istream &is)
{
    std::string magic;
    std::size_t num_layers = 0;
    if (!(is >> magic >> num_layers) || magic != "mlpv1")
        throw std::runtime_error("read_mlp: missing 'mlpv1' header");
    if (num_layers == 0)
        throw std::runtime_error("read_mlp: zero layers");

    std::vector<int> dims;
    std::vector<Activation> acts;
    std::vector<Mlp::Matrix> weights;
    std::vector<Mlp::Vector> biases;
    std::string token;
    auto next = [&]() {
        if (!(is >> token))
            throw std::runtime_error("read_mlp: truncated file");
        return parse_double(token);
    };
    for (std::size_t k = 0; k < num_layers; ++k) {
        std::string tag, act;
        int in = 0, out = 0;
        if (!(is >> tag >> in >> out >> act) || tag != "dims")
            throw std::runtime_error("read_mlp: malformed layer header " + std::to_string(k));
        if (k == 0)
            dims.push_back(in);
        else if (dims.back() != in)
            throw std::runtime_error("read_mlp: inconsistent dims at layer " + std::to_string(k));
        dims.push_back(out);
        acts.push_back(activation_from_string(act));
        Mlp::Matrix w(out, in);
        for (int r = 0; r < out; ++r)
            for (int c = 0; c < in; ++c)
                w(r, c) = next();
        Mlp::Vector b(out);
        for (int r = 0; r < out; ++r)
            b[r] = next();
        weights.push_back(std::move(w));
        biases.push_back(std::move(b));
    }
    Mlp net(dims, acts);
    for (std::size_t k = 0; k < num_layers; ++k) {
        auto &layer = net.mutable_layer(k);
        layer.weight = std::move(weights[k]);
        layer.bias = std::move(biases[k]);
    }
    return net;
}

void save_mlp(const Mlp &net, const std::filesystem::path &path)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("save_mlp: cannot open " + path.string());
    write_mlp(net, os);
    if (!os)
        throw std::runtime_error("save_mlp: write failed for " + path.string());
}

Mlp load_mlp(const std::filesystem::path &path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("load_mlp: cannot open " + path.string());
    return read_mlp(is);
}

} // namespace risskg

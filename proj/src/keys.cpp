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

#include "risskg/keys.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace risskg {

void QuantizerConfig::validate() const
{
    if (!(gamma >= 0))
        throw std::invalid_argument("QuantizerConfig: gamma must be >= 0");
}

Thresholds quantizer_thresholds(const Eigen::VectorXd &features, const QuantizerConfig &cfg)
{
    cfg.validate();
    if (features.size() < 2)
        throw std::invalid_argument("quantize: need at least two features");
    const double mean = features.mean();
    const double var = (features.array() - mean).square().mean();
    const double spread = cfg.spread == SpreadMode::variance ? var : std::sqrt(var);
    return {mean - cfg.gamma * spread, mean + cfg.gamma * spread};
}

KeyStream quantize(const Eigen::VectorXd &features, const QuantizerConfig &cfg)
{
    const Thresholds t = quantizer_thresholds(features, cfg);
    KeyStream ks;
    ks.retained.resize(static_cast<std::size_t>(features.size()));
    for (Eigen::Index i = 0; i < features.size(); ++i) {
        const double f = features[i];
        bool keep = true;
        if (f >= t.upper)
            ks.bits.push_back(1);
        else if (f <= t.lower)
            ks.bits.push_back(0);
        else
            keep = false;
        ks.retained[static_cast<std::size_t>(i)] = keep;
    }
    return ks;
}

namespace {

std::vector<std::uint8_t> bits_at(const KeyStream &ks, const std::vector<bool> &common)
{
    std::vector<std::uint8_t> out;
    std::size_t next = 0;
    for (std::size_t i = 0; i < ks.retained.size(); ++i) {
        if (!ks.retained[i])
            continue;
        if (common[i])
            out.push_back(ks.bits.at(next));
        ++next;
    }
    return out;
}

void check_stream(const KeyStream &ks)
{
    std::size_t kept = 0;
    for (bool r : ks.retained)
        kept += r ? 1 : 0;
    if (kept != ks.bits.size())
        throw std::invalid_argument("align_streams: bit count does not match the retention mask");
}

} // namespace

AlignedBits align_streams(const KeyStream &ks_a, const KeyStream &ks_b)
{
    if (ks_a.retained.size() != ks_b.retained.size())
        throw std::invalid_argument("align_streams: streams cover different index ranges");
    check_stream(ks_a);
    check_stream(ks_b);
    std::vector<bool> common(ks_a.retained.size());
    AlignedBits out;
    for (std::size_t i = 0; i < common.size(); ++i) {
        common[i] = ks_a.retained[i] && ks_b.retained[i];
        if (common[i])
            out.indices.push_back(i);
    }
    out.a = bits_at(ks_a, common);
    out.b = bits_at(ks_b, common);
    return out;
}

AlignedBits align_streams(const KeyStream &ks_a, const KeyStream &ks_b, const KeyStream &ks_e)
{
    if (ks_a.retained.size() != ks_b.retained.size() || ks_a.retained.size() != ks_e.retained.size())
        throw std::invalid_argument("align_streams: streams cover different index ranges");
    check_stream(ks_a);
    check_stream(ks_b);
    check_stream(ks_e);
    std::vector<bool> common(ks_a.retained.size());
    AlignedBits out;
    for (std::size_t i = 0; i < common.size(); ++i) {
        common[i] = ks_a.retained[i] && ks_b.retained[i] && ks_e.retained[i];
        if (common[i])
            out.indices.push_back(i);
    }
    out.a = bits_at(ks_a, common);
    out.b = bits_at(ks_b, common);
    out.e = bits_at(ks_e, common);
    return out;
}

double key_agreement_rate(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("key_agreement_rate: length mismatch");
    if (a.empty())
        throw std::invalid_argument("key_agreement_rate: empty pairing");
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        same += a[i] == b[i] ? 1 : 0;
    return static_cast<double>(same) / static_cast<double>(a.size());
}

double key_agreement_rate(const AlignedBits &pair) { return key_agreement_rate(pair.a, pair.b); }

double available_key_rate(const AlignedBits &triple)
{
    if (triple.a.empty())
        throw std::invalid_argument("available_key_rate: empty alignment");
    if (triple.b.size() != triple.a.size() || triple.e.size() != triple.a.size())
        throw std::invalid_argument("available_key_rate: needs a three-party alignment");
    std::size_t good = 0;
    for (std::size_t i = 0; i < triple.a.size(); ++i)
        good += (triple.a[i] == triple.b[i] && triple.a[i] != triple.e[i]) ? 1 : 0;
    return static_cast<double>(good) / static_cast<double>(triple.a.size());
}

double available_key_rate(const KeyStream &ks_a, const KeyStream &ks_b, const KeyStream &ks_e)
{
    return available_key_rate(align_streams(ks_a, ks_b, ks_e));
}

KeyMetrics key_metrics(const Eigen::VectorXd &fa, const Eigen::VectorXd &fb, const Eigen::VectorXd &fe,
                       const QuantizerConfig &cfg)
{
    const AlignedBits t = align_streams(quantize(fa, cfg), quantize(fb, cfg), quantize(fe, cfg));
    KeyMetrics m;
    m.aligned = t.a.size();
    if (t.a.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        m.kar_ab = m.kar_ae = m.kar_be = m.akr = nan;
        return m;
    }
    m.kar_ab = key_agreement_rate(t.a, t.b);
    m.kar_ae = key_agreement_rate(t.a, t.e);
    m.kar_be = key_agreement_rate(t.b, t.e);
    m.akr = available_key_rate(t);
    return m;
}

} // namespace risskg

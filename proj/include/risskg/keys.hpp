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

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace risskg {

/// Guard band spread: the variance (literal two-threshold rule) or the
/// standard deviation.
enum class SpreadMode { variance, std_dev };

struct QuantizerConfig {
    double gamma = 0.1;
    SpreadMode spread = SpreadMode::variance;

    void validate() const;
};

/// Bits of the retained features plus the per-feature retention mask.
struct KeyStream {
    std::vector<std::uint8_t> bits;
    std::vector<bool> retained;
};

struct Thresholds {
    double lower = 0.0;
    double upper = 0.0;
};

/// mean -+ gamma * spread. Spread uses the population (1/n) moments.
Thresholds quantizer_thresholds(const Eigen::VectorXd &features, const QuantizerConfig &cfg);

/// 1 at or above the upper threshold, 0 at or below the lower one, dropped in
/// between. With gamma = 0 both thresholds equal the mean and a feature
/// exactly at the mean maps to 1.
KeyStream quantize(const Eigen::VectorXd &features, const QuantizerConfig &cfg);

/// Bits at the indices retained by every stream, in index order.
struct AlignedBits {
    std::vector<std::uint8_t> a;
    std::vector<std::uint8_t> b;
    std::vector<std::uint8_t> e; ///< empty for two-party alignment
    std::vector<std::size_t> indices;
};

AlignedBits align_streams(const KeyStream &ks_a, const KeyStream &ks_b);
AlignedBits align_streams(const KeyStream &ks_a, const KeyStream &ks_b, const KeyStream &ks_e);

/// Fraction of positions where the two bit vectors agree.
double key_agreement_rate(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
double key_agreement_rate(const AlignedBits &pair);

/// Pr{k_A = k_B != k_E} over the three-party alignment.
double available_key_rate(const KeyStream &ks_a, const KeyStream &ks_b, const KeyStream &ks_e);
double available_key_rate(const AlignedBits &triple);

/// One row of the key-metric table.
struct KeyMetrics {
    double kar_ab = 0.0;
    double kar_ae = 0.0;
    double kar_be = 0.0;
    double akr = 0.0;
    std::size_t aligned = 0;
};

/// Quantizes the three feature vectors and evaluates all rates over the
/// three-party alignment. Rates are NaN when nothing survives alignment.
KeyMetrics key_metrics(const Eigen::VectorXd &fa, const Eigen::VectorXd &fb, const Eigen::VectorXd &fe,
                       const QuantizerConfig &cfg);

} // namespace risskg

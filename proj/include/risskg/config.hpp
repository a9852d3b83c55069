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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "risskg/chansim.hpp"
#include "risskg/keys.hpp"
#include "risskg/training.hpp"

namespace risskg {

/// Flat `key = value` text. `[section]` lines prefix the keys that follow
/// with `section.`; `#` starts a comment. Later keys override earlier ones.
class ConfigFile {
  public:
    static ConfigFile parse(const std::string &text);
    static ConfigFile load(const std::filesystem::path &path);

    bool has(const std::string &key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string> &values() const { return values_; }
    void set(const std::string &key, const std::string &value) { values_[key] = value; }

  private:
    std::map<std::string, std::string> values_;
};

enum class Scheme { csi, crossmult, nn, poly, baseline };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string &name);

/// Inclusive sweep lo:hi:steps with evenly spaced points.
struct SweepRange {
    double lo = -115.0;
    double hi = -90.0;
    int steps = 6;

    std::vector<double> points() const;
    static SweepRange parse(const std::string &text);
};

struct EveSettings {
    int max_epochs = 20000;
    std::size_t num_rounds = 100000;
    std::vector<int> hidden{128, 64};
    double learning_rate = 1e-3;
};

struct SkrSettings {
    double d_ar = 5.0;
    double d_br = 5.0;
    std::size_t samples = 20000;
    /// Surface reach and Alice-Bob distance for the deceptive-channel
    /// condition; d_ab = 2 d_max is the worst case for users within reach.
    double d_max = 5.0;
    double d_ab = 10.0;
};

struct ExperimentConfig {
    std::string scale = "desk";
    SystemParams params = SystemParams::desk();
    GridSpec grid;
    std::size_t num_rounds = 100000;
    std::size_t eval_rounds = 20000;
    TrainConfig train;
    EveSettings eve;
    FeatureConditioning cond;
    QuantizerConfig quant;
    SweepRange sigma2_db;
    std::vector<double> lambdas{0.2, 0.4, 0.6, 0.8, 1.0};
    SkrSettings skr;
    Scheme scheme = Scheme::nn;
    std::uint64_t seed = 1;

    static ExperimentConfig desk();
    static ExperimentConfig paper();
    static ExperimentConfig preset(const std::string &scale);

    /// Applies every recognised key; unknown keys are an error. Keys with a
    /// `_db` suffix take dB (dBW for powers) and are converted to linear.
    void apply(const ConfigFile &file);
    void validate() const;

    /// Canonical `key = value` listing of every setting, used for manifests.
    std::string to_text() const;
};

} // namespace risskg

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

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <vector>

#include "risskg/attacks.hpp"
#include "risskg/config.hpp"
#include "risskg/featgen.hpp"
#include "risskg/keys.hpp"
#include "risskg/skr.hpp"
#include "risskg/training.hpp"

namespace risskg {

/// 64-bit FNV-1a digest as 16 hex digits.
std::string content_hash(const std::string &bytes);

/// Record of one run: the exact configuration, seed, a digest of the inputs
/// and wall-clock time per stage.
struct RunManifest {
    std::string command;
    std::string config_text;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> stage_seconds;
    std::vector<std::string> artifacts;

    std::string input_hash() const;
    /// `manifest <hash>` comment placed on the first line of every CSV.
    std::string csv_comment() const;
    void write(const std::filesystem::path &path) const;
};

/// Runs a named stage, appending its timing; exceptions are rethrown with
/// the stage name prepended.
template <typename F>
auto run_stage(RunManifest &manifest, const std::string &stage, F &&body);

/// Features of one scheme on one set of rounds: Alice, Bob and Eve.
struct SchemeFeatures {
    Eigen::VectorXd fa;
    Eigen::VectorXd fb;
    Eigen::VectorXd fe;
};

/// Legacy features use the real part of the complex estimate.
SchemeFeatures legacy_features(LegacyScheme scheme, std::span<const ProbeRound> rounds, const SystemParams &params);

struct RhoRow {
    std::string scheme;
    double sigma2_db = 0.0;
    double rho_ab = 0.0;
    double rho_ae = 0.0;
    double rho_be = 0.0;
};

struct KeyRow {
    std::string scheme;
    double sigma2_db = 0.0;
    KeyMetrics metrics;
};

struct ScenarioResult {
    std::vector<RhoRow> rho;
    std::vector<KeyRow> keys;
    RunManifest manifest;
};

/// gen-data -> train (learned schemes) -> Eve -> sigma^2 sweep of features,
/// correlations and key metrics. Writes models, logs, rho_vs_sigma2.csv,
/// keys.csv, features.csv and manifest.txt into `out_dir`.
ScenarioResult run_scenario(const ExperimentConfig &cfg, const std::filesystem::path &out_dir);

struct LambdaRow {
    double lambda = 0.0;
    bool ok = false;
    std::string error;
    RhoTriple held_out;
    double final_loss_gen = 0.0;
    double final_loss_adv = 0.0;
};

/// One independent adversarial training run per lambda, evaluated on a
/// shared held-out set. Runs execute concurrently up to default_workers().
/// Writes train_log_lambda_<l>.csv per run and lambda_sweep.csv.
std::vector<LambdaRow> sweep_lambda(const ExperimentConfig &cfg, const std::filesystem::path &out_dir);

struct AblationRow {
    LossKind loss_kind = LossKind::corr_adversarial;
    double mse_ab = 0.0;
    RhoTriple held_out;
};

/// MSE-loss training next to a correlation-loss control with the same seed.
/// Writes mse_ablation.csv.
std::vector<AblationRow> mse_ablation(const ExperimentConfig &cfg, const std::filesystem::path &out_dir);

struct AttackRow {
    std::string scheme;
    double sigma2_db = 0.0;
    std::string part; ///< "re" or "im"
    double rho_ab = 0.0;
    double rho_ea = 0.0;
    double rho_eb = 0.0;
};

/// Monte Carlo correlations of both legacy schemes and their MITM-RIS
/// reconstructions over the sigma^2 sweep. Writes attack_report.csv.
std::vector<AttackRow> attack_report(const ExperimentConfig &cfg, const std::filesystem::path &out_dir);

struct SkrRow {
    double sigma2_db = 0.0;
    SkrBreakdown breakdown;
    bool condition_ok = false;
};

/// Closed-form gap over the sigma^2 sweep with a simulated covariance model.
std::vector<SkrRow> skr_sweep(const ExperimentConfig &cfg, const SweepRange &sigma2_db);
void write_skr_csv(const std::vector<SkrRow> &rows, const RunManifest &manifest, std::ostream &os);

/// Polynomial refit of both generators on validation rounds.
struct PolyPair {
    PolyGenerator alice;
    PolyGenerator bob;
};
PolyPair refit_poly(const AdversarialModels &models, std::span<const ProbeRound> rounds, const SystemParams &params);
TargetFn poly_target(const PolyPair &poly, const SystemParams &params, const FeatureConditioning &cond = {});

/// Distills every selected hidden unit of a generator over validation rounds.
DistillReport distill_generator(const Mlp &generator, const Eigen::MatrixXd &validation_inputs,
                                const TermLibrary &library = {}, const DistillOptions &opts = {});

/// Key metrics from a features CSV {scheme, sigma2_dbw, index, f_a, f_b, f_e}.
std::vector<KeyRow> keys_from_features_csv(std::istream &is, const QuantizerConfig &quant);
void write_keys_csv(const std::vector<KeyRow> &rows, const RunManifest &manifest, std::ostream &os);

/// Training configuration for Eve from the experiment settings.
TrainConfig eve_train_config(const ExperimentConfig &cfg);

// ------------------------------------------------------------------------

template <typename F>
auto run_stage(RunManifest &manifest, const std::string &stage, F &&body)
{
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] {
        manifest.stage_seconds.emplace_back(
            stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    };
    try {
        if constexpr (std::is_void_v<decltype(body())>) {
            body();
            finish();
        } else {
            auto r = body();
            finish();
            return r;
        }
    } catch (const std::exception &e) {
        throw std::runtime_error("[" + stage + "] " + e.what());
    }
}

} // namespace risskg

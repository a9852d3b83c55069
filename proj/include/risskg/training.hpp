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

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "risskg/chansim.hpp"
#include "risskg/correlation.hpp"
#include "risskg/mlp.hpp"

namespace risskg {

/// How received signals are scaled before entering a network.
///   agc:  per-round normalization. Legitimate inputs become (x / sqrt(Pt),
///         y / |y|); each RIS vector is rescaled to norm sqrt(M). Path loss
///         spans many decades over the geometry grid and would otherwise
///         dominate every batch.
///   none: raw SI-unit values (x / sqrt(Pt), y unchanged).
enum class SignalNorm { agc, none };

/// Layout of the 6M RIS-side inputs.
///   phase_compensated: [y_R^(A), w o y_R^(B), w / sqrt(A_E)] (re then im parts)
///   raw:               [y_R^(A), y_R^(B), w / sqrt(A_E)]
/// Both carry the same information; the first exposes the product that the
/// combined channel is built from.
enum class RisLayout { phase_compensated, raw };

struct FeatureConditioning {
    SignalNorm norm = SignalNorm::agc;
    RisLayout layout = RisLayout::phase_compensated;
};

/// 4 x N matrix of Alice's observations (x_A, y_A), real parts then imaginary.
Eigen::MatrixXd alice_inputs(std::span<const ProbeRound> rounds, const SystemParams &params,
                             const FeatureConditioning &cond = {});
/// 4 x N matrix of Bob's observations (x_B, y_B).
Eigen::MatrixXd bob_inputs(std::span<const ProbeRound> rounds, const SystemParams &params,
                           const FeatureConditioning &cond = {});
/// 6M x N matrix of what the RIS observes and controls.
Eigen::MatrixXd ris_inputs(std::span<const ProbeRound> rounds, const SystemParams &params,
                           const FeatureConditioning &cond = {});

enum class LossKind { corr_adversarial, corr_only, mse_adversarial };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string &name);

struct TrainConfig {
    double learning_rate = 1e-5;
    int batch_size = 64;
    int max_epochs = 20000;
    double lambda = 0.8;
    LossKind loss_kind = LossKind::corr_adversarial;
    std::uint64_t seed = 0;
    std::vector<int> generator_hidden{64, 32};
    std::vector<int> adversary_hidden{128, 64};
    /// Adversary (Mallory or Eve) updates per epoch.
    int adversary_steps = 1;
    /// Adversary learning rate; 0 means learning_rate.
    double adversary_learning_rate = 0.0;

    void validate() const;
    double adversary_lr() const { return adversary_learning_rate > 0 ? adversary_learning_rate : learning_rate; }
};

struct TrainLogRow {
    int epoch = 0;
    double loss_gen = 0.0;
    double loss_adv = 0.0;
    double rho_ab = 0.0;
    double rho_am = 0.0;
    double rho_bm = 0.0;
};

struct AdversarialModels {
    Mlp alice;
    Mlp bob;
    Mlp mallory;
    FeatureConditioning cond;
    std::vector<TrainLogRow> log;
    AdamState opt_alice;
    AdamState opt_bob;
    AdamState opt_mallory;
};

/// Negates a network's output. Exact for odd output activations (sine,
/// linear); the matching Adam first moments are negated with it.
void negate_output(Mlp &net, AdamState *opt = nullptr);

/// Generator and Mallory networks for a given configuration, Glorot
/// initialized from `seed`.
AdversarialModels init_adversarial(int num_elements, const TrainConfig &cfg, const FeatureConditioning &cond = {});

/// One batch per epoch: Mallory is updated against detached generator
/// features, then both generators against Mallory's pre-update features.
/// Uses only the train split. Throws TrainingDiverged on non-finite losses.
/// Mallory always maximizes |rho(f_A,f_M)| + |rho(f_B,f_M)|; the loss kind
/// only selects the generator loss. The correlation losses only see |rho|,
/// so training may settle on f_B ~ -f_A; for those kinds Bob's output is
/// negated at the end if rho(f_A, f_B) < 0 on the train split, so quantized
/// keys agree instead of being complementary.
AdversarialModels train_adversarial(const Dataset &data, const TrainConfig &cfg, const FeatureConditioning &cond = {});

/// Runs `epochs` more epochs on prepared input matrices, continuing the log
/// and optimizer state.
void train_adversarial_epochs(AdversarialModels &models, const Eigen::MatrixXd &in_a, const Eigen::MatrixXd &in_b,
                              const Eigen::MatrixXd &in_m, const TrainConfig &cfg, int epochs, Rng &rng);

/// Single-output network applied to a batch; returns the outputs as a vector.
/// Mallory's adversary_steps updates against fixed generator features; the
/// generators are not touched. Returns the loss before the first update.
double adversary_update(AdversarialModels &models, const Eigen::VectorXd &fa, const Eigen::VectorXd &fb,
                        const Eigen::MatrixXd &xm, const TrainConfig &cfg);
/// One Alice/Bob update against a fixed Mallory feature; Mallory is not touched.
double generator_update(AdversarialModels &models, const Eigen::MatrixXd &xa, const Eigen::MatrixXd &xb,
                        const Eigen::VectorXd &fm, const TrainConfig &cfg);

Eigen::VectorXd mlp_features(const Mlp &net, const Eigen::MatrixXd &inputs);
/// Output before the final activation.
Eigen::VectorXd mlp_pre_features(const Mlp &net, const Eigen::MatrixXd &inputs);

struct FeatureSet {
    Eigen::VectorXd fa;
    Eigen::VectorXd fb;
    Eigen::VectorXd fm;
};

FeatureSet evaluate_features(const AdversarialModels &models, std::span<const ProbeRound> rounds,
                             const SystemParams &params);

/// |rho| of the three pairs on a feature set.
struct RhoTriple {
    double ab = 0.0;
    double am = 0.0;
    double bm = 0.0;
};
RhoTriple abs_correlations(const FeatureSet &f);

/// The legitimate features Eve tries to imitate, computed per round.
using TargetFn = std::function<std::pair<Eigen::VectorXd, Eigen::VectorXd>(std::span<const ProbeRound>)>;

/// Cross-multiplication common feature after gain normalization:
/// cos(arg(x_A y_A)) and cos(arg(x_B y_B)).
TargetFn crossmult_target();
/// Features of a trained generator pair.
TargetFn generator_target(const Mlp &alice, const Mlp &bob, const SystemParams &params,
                          const FeatureConditioning &cond = {});

struct EveLogRow {
    int epoch = 0;
    double loss = 0.0;
    double rho_ea = 0.0;
    double rho_eb = 0.0;
};

struct EveModel {
    Mlp eve;
    FeatureConditioning cond;
    std::vector<EveLogRow> log;
};

/// Worst-case Eve: simulates n assumed rounds over `grid`, labels them with
/// the target features and fits a 6M-input network maximizing
/// |rho(fE,fA)| + |rho(fE,fB)|, then orients its output so that
/// rho(fE, fA) >= 0 on the simulated rounds. Uses cfg.adversary_hidden, cfg.learning_rate
/// (or adversary_learning_rate), cfg.batch_size, cfg.max_epochs and cfg.seed.
EveModel train_eve(const TargetFn &target, const SystemParams &params, const GridSpec &grid, std::size_t n,
                   const TrainConfig &cfg, const FeatureConditioning &cond = {});

Eigen::VectorXd eve_features(const EveModel &eve, std::span<const ProbeRound> rounds, const SystemParams &params);

} // namespace risskg

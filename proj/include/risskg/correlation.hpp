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

#include <Eigen/Dense>

namespace risskg {

/// Pearson correlation of two equal-length vectors. Throws on length
/// mismatch, fewer than two samples, or a zero-variance input.
double corr_coef(const Eigen::VectorXd &x, const Eigen::VectorXd &y);

/// Pearson correlation with its gradient. A zero-variance input yields
/// rho = 0 with zero gradients and `degenerate` set.
struct Correlation {
    double rho = 0.0;
    Eigen::VectorXd d_x;
    Eigen::VectorXd d_y;
    bool degenerate = false;
};

Correlation pearson(const Eigen::VectorXd &x, const Eigen::VectorXd &y);

/// Loss value with gradients with respect to the three feature vectors.
/// Gradients of detached inputs are left as zero vectors.
struct FeatureLoss {
    double value = 0.0;
    Eigen::VectorXd d_fa;
    Eigen::VectorXd d_fb;
    Eigen::VectorXd d_fm;
};

/// -|rho(fA,fB)| + lambda (|rho(fA,fM)| + |rho(fB,fM)|); fM detached.
FeatureLoss generator_loss(const Eigen::VectorXd &fa, const Eigen::VectorXd &fb, const Eigen::VectorXd &fm,
                           double lambda);

/// -|rho(fA,fB)| alone.
FeatureLoss correlation_only_loss(const Eigen::VectorXd &fa, const Eigen::VectorXd &fb);

/// -|rho(fA,fM)| - |rho(fB,fM)|; fA and fB detached.
FeatureLoss adversary_loss(const Eigen::VectorXd &fa, const Eigen::VectorXd &fb, const Eigen::VectorXd &fm);

/// MSE(fA,fB) - lambda (MSE(fA,fM) + MSE(fB,fM)); fM detached.
FeatureLoss mse_adversarial_loss(const Eigen::VectorXd &fa, const Eigen::VectorXd &fb, const Eigen::VectorXd &fm,
                                 double lambda);

/// Eve's loss -|rho(fE,fA)| - |rho(fE,fB)|; gradient returned in d_fm.
FeatureLoss eve_loss(const Eigen::VectorXd &fe, const Eigen::VectorXd &fa, const Eigen::VectorXd &fb);

double mean_squared_error(const Eigen::VectorXd &x, const Eigen::VectorXd &y);

} // namespace risskg

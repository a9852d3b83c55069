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

#include <span>
#include <vector>

#include "risskg/chansim.hpp"

namespace risskg {

/// Second-order statistics of the Alice-RIS channel and of the combined
/// scalar channel g. Eigenvalues are ascending and non-negative.
struct CovarianceModel {
    double sigma_g2 = 0.0;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXcd covariance;
    double dist_ar = 1.0;
};

/// Zero-mean sample covariance (1/n) sum g g^H, symmetrized, eigenvalues
/// clipped at zero. sigma_g2 is the mean |g|^2 of the combined samples.
/// Needs at least 10 * M channel samples.
CovarianceModel estimate_covariance(std::span<const Eigen::VectorXcd> channel_samples,
                                    std::span<const Complex> combined_samples, double dist_ar);

/// Model from a known covariance matrix.
CovarianceModel covariance_model(const Eigen::MatrixXcd &sigma, double sigma_g2, double dist_ar);

/// Per-element variance of zeta = y_R^(B) o w:  Pt A_E C0 d^-alpha + A_E sigma^2.
double sigma_zeta_sq(const SystemParams &params, double d_ar);

/// Differential entropies (bits) entering the mutual-information gap.
struct SkrBreakdown {
    double h_yb = 0.0;          ///< h(y_B)
    double h_yra = 0.0;         ///< h(y_R^(A))
    double h_cond_joint = 0.0;  ///< h(y_A, y_R^(A) | x_A, y_R^(B), w)
    double h_cond_pair = 0.0;   ///< h(y_A, y_B | x_A, x_B)
    double gap = 0.0;           ///< I(legit) - I(leak), bits
    double sigma_zeta2 = 0.0;
    double leakage_sum = 0.0;   ///< sigma_zeta^2 sum_m lambda_m / (Pt lambda_m + sigma^2)
    double eta_bar = 0.0;       ///< mean_m Pt lambda_m / (Pt lambda_m + sigma^2)

    /// h_yb - h_yra + h_cond_joint - h_cond_pair.
    double entropy_combination() const { return h_yb - h_yra + h_cond_joint - h_cond_pair; }
};

/// Closed-form gap
///   0.5 log2(Pt sg2 + s2) + 0.5 log2(leakage_sum + 1) - 0.5 log2(2 Pt sg2 + s2)
/// together with the four entropies it is assembled from. Eigenvalues below
/// 1e-15 * max are raised to that floor before any inversion.
SkrBreakdown skr_gap(const CovarianceModel &cov, const SystemParams &params, double d_ar);

/// zeta^H S zeta + s2 - Pt zeta^H S (Pt S + s2 I)^-1 S zeta, evaluated directly.
double quadratic_form_direct(const Eigen::MatrixXcd &sigma, const Eigen::VectorXcd &zeta, double pt, double sigma2);

/// The same quantity through S = U diag(lambda) U^H:
///   zeta^H U diag(lambda s2 / (Pt lambda + s2)) U^H zeta + s2.
double quadratic_form_spectral(const Eigen::MatrixXcd &sigma, const Eigen::VectorXcd &zeta, double pt, double sigma2);

/// Covariance of (y_A, y_R^(A)) conditioned on x_A, y_R^(B), w.
Eigen::MatrixXcd conditional_covariance(const Eigen::MatrixXcd &sigma, const Eigen::VectorXcd &zeta, Complex x_a,
                                        double pt, double sigma2);

/// Schur-complement factorization of det(conditional_covariance):
///   quadratic_form_direct * det(Pt S + s2 I).
double determinant_factored(const Eigen::MatrixXcd &sigma, const Eigen::VectorXcd &zeta, double pt, double sigma2);

struct QuadraticIdentityCheck {
    double mc_mean = 0.0;
    double closed_form = 0.0;
    double relative_deviation = 0.0;   ///< |mc_mean - closed_form| / closed_form
    double max_spectral_residual = 0.0; ///< worst per-draw |direct - spectral| / direct
};

/// Draws zeta ~ CN(0, sigma_zeta2 I) and compares the Monte Carlo mean of the
/// quadratic form with sigma_zeta2 sum_m lambda_m s2 / (Pt lambda_m + s2) + s2.
QuadraticIdentityCheck verify_quadratic_identity(const CovarianceModel &cov, const SystemParams &params,
                                                 double sigma_zeta2, std::size_t trials, Rng &rng);

struct PositivityCheck {
    bool holds = false;
    double lhs = 0.0;    ///< A_E M C0 d^-2 alpha
    double rhs = 0.0;    ///< 100 d_AB^-alpha
    double margin = 0.0; ///< lhs / rhs
};

/// Sufficient condition for the MITM-RIS channel to override the direct
/// Alice-Bob link for every user within d_max of the surface.
PositivityCheck positivity_condition(const SystemParams &params, double d_max, double d_ab);

/// Monte Carlo covariance model at the given Alice-RIS / Bob-RIS distances
/// with uniformly drawn path angles and RIS phases.
CovarianceModel simulate_covariance(const SystemParams &params, double d_ar, double d_br, std::size_t samples,
                                    std::uint64_t seed);

} // namespace risskg

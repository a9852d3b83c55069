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

#include "risskg/skr.hpp"

#include <algorithm>
#include <cmath>

namespace risskg {

namespace {

constexpr double kEigenFloor = 1e-15;

Eigen::VectorXd floored(const Eigen::VectorXd &lambda)
{
    const double top = lambda.size() > 0 ? lambda.maxCoeff() : 0.0;
    const double floor = kEigenFloor * top;
    return lambda.unaryExpr([floor](double l) { return std::max(l, floor); });
}

void require_finite(double v, const char *what)
{
    if (!std::isfinite(v))
        throw std::domain_error(std::string("skr_gap: non-finite ") + what);
}

double log2_2pie() { return std::log2(kTwoPi * std::exp(1.0)); }

} // namespace

CovarianceModel covariance_model(const Eigen::MatrixXcd &sigma, double sigma_g2, double dist_ar)
{
    if (sigma.rows() != sigma.cols() || sigma.rows() == 0)
        throw std::invalid_argument("covariance_model: covariance must be square and non-empty");
    if (!(sigma_g2 > 0))
        throw std::invalid_argument("covariance_model: sigma_g2 must be positive");
    CovarianceModel cov;
    cov.covariance = 0.5 * (sigma + sigma.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov.covariance, Eigen::EigenvaluesOnly);
    cov.eigenvalues = es.eigenvalues().cwiseMax(0.0);
    cov.sigma_g2 = sigma_g2;
    cov.dist_ar = dist_ar;
    return cov;
}

CovarianceModel estimate_covariance(std::span<const Eigen::VectorXcd> channel_samples,
                                    std::span<const Complex> combined_samples, double dist_ar)
{
    if (channel_samples.empty())
        throw std::invalid_argument("estimate_covariance: no samples");
    const Eigen::Index m = channel_samples.front().size();
    if (channel_samples.size() < static_cast<std::size_t>(10 * m))
        throw std::invalid_argument("estimate_covariance: need at least 10*M samples");
    if (combined_samples.empty())
        throw std::invalid_argument("estimate_covariance: no combined-channel samples");

    // Rank-k updates over column blocks; per-sample rank-1 updates are
    // memory bound at M in the thousands.
    constexpr Eigen::Index kBlock = 256;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m, m);
    Eigen::MatrixXcd block(m, kBlock);
    Eigen::Index filled = 0;
    for (const auto &g : channel_samples) {
        if (g.size() != m)
            throw std::invalid_argument("estimate_covariance: sample lengths differ");
        block.col(filled++) = g;
        if (filled == kBlock) {
            acc.selfadjointView<Eigen::Lower>().rankUpdate(block);
            filled = 0;
        }
    }
    if (filled > 0)
        acc.selfadjointView<Eigen::Lower>().rankUpdate(block.leftCols(filled));
    Eigen::MatrixXcd sigma = acc.selfadjointView<Eigen::Lower>();
    sigma /= static_cast<double>(channel_samples.size());

    double sg2 = 0.0;
    for (Complex g : combined_samples)
        sg2 += std::norm(g);
    sg2 /= static_cast<double>(combined_samples.size());
    return covariance_model(sigma, sg2, dist_ar);
}

double sigma_zeta_sq(const SystemParams &params, double d_ar)
{
    if (!(d_ar >= 1.0))
        throw std::invalid_argument("sigma_zeta_sq: d_ar must be >= 1 m");
    return params.pt * params.amp_ae * params.c0 * std::pow(d_ar, -params.alpha) + params.amp_ae * params.sigma2;
}

SkrBreakdown skr_gap(const CovarianceModel &cov, const SystemParams &params, double d_ar)
{
    const double pt = params.pt;
    const double s2 = params.sigma2;
    const double sg2 = cov.sigma_g2;
    const auto m = static_cast<double>(cov.eigenvalues.size());
    const Eigen::VectorXd lambda = floored(cov.eigenvalues);

    SkrBreakdown out;
    out.sigma_zeta2 = sigma_zeta_sq(params, d_ar);

    const Eigen::ArrayXd denom = pt * lambda.array() + s2;
    out.leakage_sum = out.sigma_zeta2 * (lambda.array() / denom).sum();
    out.eta_bar = (pt * lambda.array() / denom).mean();
    const double log2_det = denom.log().sum() / std::log(2.0);

    out.h_yb = 0.5 * (log2_2pie() + std::log2(pt * sg2 + s2));
    out.h_yra = 0.5 * (m * log2_2pie() + log2_det);
    out.h_cond_joint = 0.5 * (m + 1) * log2_2pie() + 0.5 * log2_det + 0.5 * std::log2(s2 * out.leakage_sum + s2);
    out.h_cond_pair = 0.5 * (2 * log2_2pie() + std::log2(s2 * (2 * pt * sg2 + s2)));

    out.gap = 0.5 * std::log2(pt * sg2 + s2) + 0.5 * std::log2(out.leakage_sum + 1.0) -
              0.5 * std::log2(2 * pt * sg2 + s2);

    require_finite(out.h_yra, "h(y_R)");
    require_finite(out.h_cond_joint, "conditional joint entropy");
    require_finite(out.h_cond_pair, "conditional pair entropy");
    require_finite(out.gap, "gap");
    return out;
}

double quadratic_form_direct(const Eigen::MatrixXcd &sigma, const Eigen::VectorXcd &zeta, double pt, double sigma2)
{
    const Eigen::Index m = sigma.rows();
    const Eigen::MatrixXcd d = pt * sigma + sigma2 * Eigen::MatrixXcd::Identity(m, m);
    const Eigen::VectorXcd s_zeta = sigma * zeta;
    const Eigen::VectorXcd solved = d.partialPivLu().solve(s_zeta);
    const Complex q = zeta.dot(s_zeta) + sigma2 - pt * s_zeta.dot(solved);
    return q.real();
}

double quadratic_form_spectral(const Eigen::MatrixXcd &sigma, const Eigen::VectorXcd &zeta, double pt, double sigma2)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sigma);
    const Eigen::VectorXd lambda = es.eigenvalues();
    const Eigen::VectorXcd proj = es.eigenvectors().adjoint() * zeta;
    const Eigen::ArrayXd weights = lambda.array() * sigma2 / (pt * lambda.array() + sigma2);
    return (weights * proj.array().abs2()).sum() + sigma2;
}

Eigen::MatrixXcd conditional_covariance(const Eigen::MatrixXcd &sigma, const Eigen::VectorXcd &zeta, Complex x_a,
                                        double pt, double sigma2)
{
    const Eigen::Index m = sigma.rows();
    Eigen::MatrixXcd c(m + 1, m + 1);
    const Eigen::VectorXcd s_zeta = sigma * zeta;
    c(0, 0) = zeta.dot(s_zeta) + sigma2;
    c.block(1, 0, m, 1) = x_a * s_zeta;
    c.block(0, 1, 1, m) = (x_a * s_zeta).adjoint();
    c.block(1, 1, m, m) = pt * sigma + sigma2 * Eigen::MatrixXcd::Identity(m, m);
    return c;
}

double determinant_factored(const Eigen::MatrixXcd &sigma, const Eigen::VectorXcd &zeta, double pt, double sigma2)
{
    const Eigen::Index m = sigma.rows();
    const Eigen::MatrixXcd d = pt * sigma + sigma2 * Eigen::MatrixXcd::Identity(m, m);
    return quadratic_form_direct(sigma, zeta, pt, sigma2) * d.partialPivLu().determinant().real();
}

QuadraticIdentityCheck verify_quadratic_identity(const CovarianceModel &cov, const SystemParams &params,
                                                 double sigma_zeta2, std::size_t trials, Rng &rng)
{
    const Eigen::Index m = cov.covariance.rows();
    if (m > 64)
        throw std::invalid_argument("verify_quadratic_identity: M > 64");
    if (trials == 0)
        throw std::invalid_argument("verify_quadratic_identity: trials must be positive");
    const double pt = params.pt;
    const double s2 = params.sigma2;
    if (s2 <= 0 && cov.eigenvalues.minCoeff() <= 0)
        throw std::domain_error("verify_quadratic_identity: Pt S + s2 I is singular");

    QuadraticIdentityCheck out;
    out.closed_form = sigma_zeta2 * (cov.eigenvalues.array() * s2 / (pt * cov.eigenvalues.array() + s2)).sum() + s2;

    // One factorization for all draws.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov.covariance);
    const Eigen::ArrayXd weights = es.eigenvalues().array() * s2 / (pt * es.eigenvalues().array() + s2);
    const Eigen::MatrixXcd d = pt * cov.covariance + s2 * Eigen::MatrixXcd::Identity(m, m);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(d);

    double sum = 0.0;
    Eigen::VectorXcd zeta(m);
    for (std::size_t t = 0; t < trials; ++t) {
        for (Eigen::Index i = 0; i < m; ++i)
            zeta[i] = complex_gaussian(rng, sigma_zeta2);
        const Eigen::VectorXcd s_zeta = cov.covariance * zeta;
        const double direct = (zeta.dot(s_zeta) + s2 - pt * s_zeta.dot(lu.solve(s_zeta))).real();
        const double spectral = (weights * (es.eigenvectors().adjoint() * zeta).array().abs2()).sum() + s2;
        out.max_spectral_residual = std::max(out.max_spectral_residual, std::abs(direct - spectral) / std::abs(direct));
        sum += direct;
    }
    out.mc_mean = sum / static_cast<double>(trials);
    out.relative_deviation = std::abs(out.mc_mean - out.closed_form) / std::abs(out.closed_form);
    return out;
}

PositivityCheck positivity_condition(const SystemParams &params, double d_max, double d_ab)
{
    if (!(d_max >= 1.0) || !(d_ab >= 1.0))
        throw std::invalid_argument("positivity_condition: distances must be >= 1 m");
    PositivityCheck out;
    out.lhs = params.amp_ae * params.num_elements() * params.c0 * std::pow(d_max, -2 * params.alpha);
    out.rhs = 100.0 * std::pow(d_ab, -params.alpha);
    out.margin = out.lhs / out.rhs;
    out.holds = out.lhs > out.rhs;
    return out;
}

CovarianceModel simulate_covariance(const SystemParams &params, double d_ar, double d_br, std::size_t samples,
                                    std::uint64_t seed)
{
    Rng rng = make_rng(seed, 0xc0f);
    const GridSpec grid{};
    std::vector<Eigen::VectorXcd> g_ar(samples);
    std::vector<Complex> combined(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        LinkGeometry ga = sample_geometry(params, grid, GeometrySampling::uniform, rng);
        LinkGeometry gb = sample_geometry(params, grid, GeometrySampling::uniform, rng);
        ga.distance = d_ar;
        gb.distance = d_br;
        g_ar[i] = sample_direct_channel(params, ga, rng);
        const Eigen::VectorXcd g_br = sample_direct_channel(params, gb, rng);
        combined[i] = combined_channel(g_ar[i], g_br, sample_ris_phase(params, rng));
    }
    return estimate_covariance(g_ar, combined, d_ar);
}

} // namespace risskg

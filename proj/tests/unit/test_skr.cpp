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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include <limits>

#include "risskg/skr.hpp"

using namespace risskg;

namespace {

Eigen::MatrixXcd random_pd(int m, Rng &rng, double scale)
{
    Eigen::MatrixXcd a(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            a(i, j) = complex_gaussian(rng, 1.0);
    Eigen::MatrixXcd s = a * a.adjoint() / m + 0.1 * Eigen::MatrixXcd::Identity(m, m);
    return scale * s;
}

Eigen::VectorXcd random_vector(int m, Rng &rng, double var)
{
    Eigen::VectorXcd v(m);
    for (int i = 0; i < m; ++i)
        v[i] = complex_gaussian(rng, var);
    return v;
}

Eigen::MatrixXcd random_unitary(int m, Rng &rng)
{
    Eigen::MatrixXcd a(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            a(i, j) = complex_gaussian(rng, 1.0);
    return Eigen::HouseholderQR<Eigen::MatrixXcd>(a).householderQ();
}

} // namespace

TEST(SigmaZeta, WorkedArithmetic)
{
    SystemParams p;
    p.sigma2 = 1e-11;
    // 0.1 * 1e4 * 1e-3 * 10^-3 + 1e4 * 1e-11
    EXPECT_NEAR(sigma_zeta_sq(p, 10.0), 1.0001e-3, 1e-18);
    p.sigma2 = 0.0;
    EXPECT_DOUBLE_EQ(sigma_zeta_sq(p, 10.0), p.pt * p.amp_ae * p.c0 * 1e-3);
    EXPECT_NEAR(sigma_zeta_sq(p, 20.0), sigma_zeta_sq(p, 10.0) / 8.0, 1e-20);
    EXPECT_THROW(sigma_zeta_sq(p, 0.5), std::invalid_argument);
}

TEST(EstimateCovariance, RejectsEmptyAndShortInput)
{
    std::vector<Eigen::VectorXcd> none;
    std::vector<Complex> g{Complex(1.0, 0.0)};
    EXPECT_THROW(estimate_covariance(none, g, 5.0), std::invalid_argument);
    std::vector<Eigen::VectorXcd> few(15, Eigen::VectorXcd::Ones(2));
    EXPECT_THROW(estimate_covariance(few, g, 5.0), std::invalid_argument);
}

TEST(EstimateCovariance, RepeatedSampleIsRankOne)
{
    Rng rng = make_rng(1);
    const auto v = random_vector(4, rng, 1.0);
    std::vector<Eigen::VectorXcd> same(40, v);
    std::vector<Complex> g{Complex(0.5, 0.5)};
    const auto cov = estimate_covariance(same, g, 5.0);
    const double top = cov.eigenvalues.maxCoeff();
    EXPECT_NEAR(top, v.squaredNorm(), 1e-12 * top);
    int nonzero = 0;
    for (Eigen::Index i = 0; i < cov.eigenvalues.size(); ++i)
        nonzero += cov.eigenvalues[i] > 1e-12 * top;
    EXPECT_EQ(nonzero, 1);
    EXPECT_DOUBLE_EQ(cov.sigma_g2, 0.5);
}

TEST(EstimateCovariance, IidSamplesClusterAtGeneratorVariance)
{
    Rng rng = make_rng(2);
    constexpr int m = 8;
    constexpr double v = 3e-6;
    std::vector<Eigen::VectorXcd> s(20000);
    for (auto &x : s)
        x = random_vector(m, rng, v);
    std::vector<Complex> g{Complex(1e-3, 0.0)};
    const auto cov = estimate_covariance(s, g, 5.0);
    EXPECT_GE(cov.eigenvalues.minCoeff(), 0.0);
    EXPECT_NEAR(cov.eigenvalues.minCoeff() / v, 1.0, 0.1);
    EXPECT_NEAR(cov.eigenvalues.maxCoeff() / v, 1.0, 0.1);
}

TEST(SkrGap, BoundaryCaseIsZero)
{
    SystemParams p;
    p.sigma2 = 1e-30;
    // Isotropic Sigma = v I and sigma_zeta^2 = pt / M makes the leakage sum 1.
    const int m = p.num_elements();
    const double d = std::cbrt(static_cast<double>(m) * p.amp_ae * p.c0);
    const auto cov = covariance_model(2e-6 * Eigen::MatrixXcd::Identity(m, m), 4e-8, d);
    const auto s = skr_gap(cov, p, d);
    EXPECT_NEAR(s.leakage_sum, 1.0, 1e-12);
    EXPECT_NEAR(s.gap, 0.0, 1e-12);
    EXPECT_NEAR(s.eta_bar, 1.0, 1e-12);
}

TEST(SkrGap, AssembledFromEntropies)
{
    Rng rng = make_rng(3);
    SystemParams p;
    for (double db : {-115.0, -100.0, -90.0}) {
        p.sigma2 = db_to_linear(db);
        const auto cov = covariance_model(random_pd(16, rng, 1e-5), 3e-9, 5.0);
        const auto s = skr_gap(cov, p, 5.0);
        const double scale = std::max({std::abs(s.h_yb), std::abs(s.h_yra), std::abs(s.h_cond_joint)});
        EXPECT_NEAR(s.entropy_combination(), s.gap, 1e-12 * scale) << db;

        // Direct oracle for the closed form.
        double leak = 0.0;
        for (Eigen::Index i = 0; i < cov.eigenvalues.size(); ++i)
            leak += cov.eigenvalues[i] / (p.pt * cov.eigenvalues[i] + p.sigma2);
        leak *= sigma_zeta_sq(p, 5.0);
        const double gap = 0.5 * std::log2(p.pt * 3e-9 + p.sigma2) + 0.5 * std::log2(leak + 1) -
                           0.5 * std::log2(2 * p.pt * 3e-9 + p.sigma2);
        EXPECT_NEAR(s.gap, gap, 1e-12 * std::abs(gap));
    }
}

TEST(SkrGap, LargerLeakageVarianceIncreasesGap)
{
    Rng rng = make_rng(4);
    SystemParams p;
    const auto cov = covariance_model(random_pd(16, rng, 1e-5), 3e-9, 5.0);
    // d^-3 doubles when d shrinks by 2^(1/3); the sigma^2 term is unchanged.
    const double d = 8.0;
    EXPECT_GT(skr_gap(cov, p, d / std::cbrt(2.0)).gap, skr_gap(cov, p, d).gap);
}

TEST(SkrGap, InvariantUnderUnitaryRotation)
{
    Rng rng = make_rng(5);
    SystemParams p;
    const Eigen::MatrixXcd s = random_pd(16, rng, 1e-5);
    const Eigen::MatrixXcd u = random_unitary(16, rng);
    const auto a = skr_gap(covariance_model(s, 3e-9, 5.0), p, 5.0);
    const auto b = skr_gap(covariance_model(u * s * u.adjoint(), 3e-9, 5.0), p, 5.0);
    EXPECT_NEAR(a.gap, b.gap, 1e-9 * std::abs(a.gap));
    EXPECT_NEAR(a.h_yra, b.h_yra, 1e-9 * std::abs(a.h_yra));
}

TEST(SkrGap, PositiveAcrossNoiseSweep)
{
    SystemParams p;
    p.mx = 8;
    p.my = 8;
    const auto cov = simulate_covariance(p, 5.0, 5.0, 4000, 9);
    double prev = std::numeric_limits<double>::infinity();
    for (double db = -115.0; db <= -90.0; db += 5.0) {
        p.sigma2 = db_to_linear(db);
        const double gap = skr_gap(cov, p, 5.0).gap;
        EXPECT_GT(gap, 0.0) << db;
        EXPECT_LT(gap, prev) << db;
        prev = gap;
    }
}

TEST(SkrGap, SmallSurfaceLosesTheGapAtHighNoise)
{
    // With 16 elements A_E C0 d^-alpha M is only 1.28, so the leakage term
    // drops below one once half the spectrum sits under the noise floor.
    SystemParams p;
    const auto cov = simulate_covariance(p, 5.0, 5.0, 4000, 9);
    p.sigma2 = db_to_linear(-115.0);
    EXPECT_GT(skr_gap(cov, p, 5.0).gap, 0.0);
    p.sigma2 = db_to_linear(-90.0);
    const auto b = skr_gap(cov, p, 5.0);
    EXPECT_LT(b.leakage_sum, 1.0);
    EXPECT_LT(b.gap, 0.0);
}

TEST(SkrEntropies, MatchSampleLogDeterminants)
{
    Rng rng = make_rng(6);
    SystemParams p;
    p.sigma2 = 1e-9;
    constexpr int m = 6;
    const Eigen::MatrixXcd sigma = random_pd(m, rng, 1e-6);
    const Eigen::MatrixXcd chol = sigma.llt().matrixL();
    const double sg2 = 5e-8;
    const auto cov = covariance_model(sigma, sg2, 5.0);
    const auto s = skr_gap(cov, p, 5.0);

    constexpr int n = 100000;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m, m);
    double acc_b = 0.0;
    for (int i = 0; i < n; ++i) {
        const Complex x = std::polar(std::sqrt(p.pt), uniform(rng, 0.0, kTwoPi));
        const Eigen::VectorXcd y = chol * random_vector(m, rng, 1.0) * x + random_vector(m, rng, p.sigma2);
        acc += y * y.adjoint();
        const Complex y_b = complex_gaussian(rng, sg2) * x + complex_gaussian(rng, p.sigma2);
        acc_b += std::norm(y_b);
    }
    acc /= n;
    const double c = std::log2(kTwoPi * std::exp(1.0));
    const double h_yra = 0.5 * (m * c + std::log2(acc.determinant().real()));
    const double h_yb = 0.5 * (c + std::log2(acc_b / n));
    EXPECT_NEAR(h_yra / s.h_yra, 1.0, 0.02);
    EXPECT_NEAR(h_yb / s.h_yb, 1.0, 0.02);
}

TEST(DeterminantFactorization, MatchesBlockDeterminant)
{
    Rng rng = make_rng(7);
    const double pt = 0.1;
    for (int m : {1, 2, 5, 16}) {
        for (int t = 0; t < 10; ++t) {
            const Eigen::MatrixXcd sigma = random_pd(m, rng, 1.0);
            const Eigen::VectorXcd zeta = random_vector(m, rng, 1.0);
            const Complex x_a = std::polar(std::sqrt(pt), uniform(rng, 0.0, kTwoPi));
            const double s2 = 0.05;
            const Eigen::MatrixXcd c = conditional_covariance(sigma, zeta, x_a, pt, s2);
            const double direct = c.fullPivLu().determinant().real();
            EXPECT_NEAR(determinant_factored(sigma, zeta, pt, s2) / direct, 1.0, 1e-10) << m;
        }
    }
}

TEST(QuadraticIdentity, SpectralMatchesDirect)
{
    Rng rng = make_rng(8);
    const Eigen::MatrixXcd sigma = random_pd(16, rng, 1.0);
    for (int t = 0; t < 50; ++t) {
        const Eigen::VectorXcd zeta = random_vector(16, rng, 2.0);
        const double d = quadratic_form_direct(sigma, zeta, 0.1, 0.03);
        EXPECT_NEAR(quadratic_form_spectral(sigma, zeta, 0.1, 0.03) / d, 1.0, 1e-10);
    }
}

TEST(QuadraticIdentity, IsotropicClosedFormPerDraw)
{
    Rng rng = make_rng(9);
    const double v = 2.0, pt = 0.1, s2 = 0.3;
    const Eigen::MatrixXcd sigma = v * Eigen::MatrixXcd::Identity(8, 8);
    for (int t = 0; t < 20; ++t) {
        const Eigen::VectorXcd zeta = random_vector(8, rng, 1.0);
        const double expected = zeta.squaredNorm() * v * s2 / (pt * v + s2) + s2;
        EXPECT_NEAR(quadratic_form_direct(sigma, zeta, pt, s2), expected, 1e-12 * expected);
    }
}

TEST(QuadraticIdentity, ScalarCase)
{
    // M = 1: l z^2 + s2 - pt l^2 z^2 / (pt l + s2) = l s2 z^2 / (pt l + s2) + s2.
    Eigen::MatrixXcd sigma(1, 1);
    sigma(0, 0) = 1.5;
    Eigen::VectorXcd zeta(1);
    zeta[0] = {0.4, -1.2};
    const double z2 = std::norm(zeta[0]);
    const double expected = 1.5 * 0.2 * z2 / (0.1 * 1.5 + 0.2) + 0.2;
    EXPECT_NEAR(quadratic_form_direct(sigma, zeta, 0.1, 0.2), expected, 1e-15);
    EXPECT_NEAR(quadratic_form_spectral(sigma, zeta, 0.1, 0.2), expected, 1e-15);
}

TEST(QuadraticIdentity, MonteCarloMeanMatchesClosedForm)
{
    Rng rng = make_rng(10);
    SystemParams p;
    p.sigma2 = 1e-7;
    const auto cov = covariance_model(random_pd(16, rng, 1e-6), 1e-8, 5.0);
    const auto check = verify_quadratic_identity(cov, p, 1e-3, 100000, rng);
    EXPECT_LT(check.relative_deviation, 0.01);
    EXPECT_LT(check.max_spectral_residual, 1e-10);
}

TEST(QuadraticIdentity, SingularCovarianceWithoutNoiseThrows)
{
    SystemParams p;
    p.sigma2 = 0.0;
    Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(3, 3);
    sigma(0, 0) = 1.0;
    const auto cov = covariance_model(sigma, 1.0, 5.0);
    Rng rng = make_rng(11);
    EXPECT_THROW(verify_quadratic_identity(cov, p, 1.0, 10, rng), std::domain_error);
}

TEST(Positivity, WorkedExamples)
{
    SystemParams p = SystemParams::paper();
    const auto near = positivity_condition(p, 5.0, 10.0);
    EXPECT_NEAR(near.lhs, 1.024, 1e-12);
    EXPECT_NEAR(near.rhs, 0.1, 1e-15);
    EXPECT_TRUE(near.holds);

    const auto far = positivity_condition(p, 25.0, 50.0);
    EXPECT_NEAR(far.lhs, 6.5536e-5, 1e-15);
    EXPECT_NEAR(far.rhs, 8e-4, 1e-15);
    EXPECT_FALSE(far.holds);
    EXPECT_NEAR(far.margin, 6.5536e-5 / 8e-4, 1e-12);

    p.mx = p.my = 4000;
    EXPECT_TRUE(positivity_condition(p, 25.0, 50.0).holds);
}

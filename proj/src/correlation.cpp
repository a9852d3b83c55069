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

#include "risskg/correlation.hpp"

#include <cmath>
#include <stdexcept>

namespace risskg {

namespace {

void check_pair(const Eigen::VectorXd &x, const Eigen::VectorXd &y)
{
    if (x.size() != y.size())
        throw std::invalid_argument("correlation: length mismatch");
    if (x.size() < 2)
        throw std::invalid_argument("correlation: need at least two samples");
}

double sign_of(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

} // namespace

Correlation pearson(const Eigen::VectorXd &x, const Eigen::VectorXd &y)
{
    check_pair(x, y);
    const Eigen::VectorXd cx = x.array() - x.mean();
    const Eigen::VectorXd cy = y.array() - y.mean();
    const double sxx = cx.squaredNorm();
    const double syy = cy.squaredNorm();

    Correlation out;
    out.d_x = Eigen::VectorXd::Zero(x.size());
    out.d_y = Eigen::VectorXd::Zero(y.size());
    if (!(sxx > 0) || !(syy > 0)) {
        out.degenerate = true;
        return out;
    }
    const double root = std::sqrt(sxx * syy);
    out.rho = cx.dot(cy) / root;
    // The mean's dependence on x_i drops out because the centred vectors sum to zero.
    out.d_x = cy / root - out.rho * cx / sxx;
    out.d_y = cx / root - out.rho * cy / syy;
    return out;
}

double corr_coef(const Eigen::VectorXd &x, const Eigen::VectorXd &y)
{
    const Correlation c = pearson(x, y);
    if (c.degenerate)
        throw std::domain_error("corr_coef: zero-variance input");
    return c.rho;
}

double mean_squared_error(const Eigen::VectorXd &x, const Eigen::VectorXd &y)
{
    if (x.size() != y.size() || x.size() == 0)
        throw std::invalid_argument("mean_squared_error: length mismatch or empty input");
    return (x - y).squaredNorm() / static_cast<double>(x.size());
}

FeatureLoss generator_loss(const Eigen::VectorXd &fa, const Eigen::VectorXd &fb, const Eigen::VectorXd &fm,
                           double lambda)
{
    const Correlation ab = pearson(fa, fb);
    const Correlation am = pearson(fa, fm);
    const Correlation bm = pearson(fb, fm);
    FeatureLoss out;
    out.value = -std::abs(ab.rho) + lambda * (std::abs(am.rho) + std::abs(bm.rho));
    out.d_fa = -sign_of(ab.rho) * ab.d_x + lambda * sign_of(am.rho) * am.d_x;
    out.d_fb = -sign_of(ab.rho) * ab.d_y + lambda * sign_of(bm.rho) * bm.d_x;
    out.d_fm = Eigen::VectorXd::Zero(fm.size());
    return out;
}

FeatureLoss correlation_only_loss(const Eigen::VectorXd &fa, const Eigen::VectorXd &fb)
{
    const Correlation ab = pearson(fa, fb);
    FeatureLoss out;
    out.value = -std::abs(ab.rho);
    out.d_fa = -sign_of(ab.rho) * ab.d_x;
    out.d_fb = -sign_of(ab.rho) * ab.d_y;
    out.d_fm = Eigen::VectorXd::Zero(fa.size());
    return out;
}

FeatureLoss adversary_loss(const Eigen::VectorXd &fa, const Eigen::VectorXd &fb, const Eigen::VectorXd &fm)
{
    const Correlation am = pearson(fa, fm);
    const Correlation bm = pearson(fb, fm);
    FeatureLoss out;
    out.value = -std::abs(am.rho) - std::abs(bm.rho);
    out.d_fa = Eigen::VectorXd::Zero(fa.size());
    out.d_fb = Eigen::VectorXd::Zero(fb.size());
    out.d_fm = -sign_of(am.rho) * am.d_y - sign_of(bm.rho) * bm.d_y;
    return out;
}

FeatureLoss mse_adversarial_loss(const Eigen::VectorXd &fa, const Eigen::VectorXd &fb, const Eigen::VectorXd &fm,
                                 double lambda)
{
    const double n = static_cast<double>(fa.size());
    FeatureLoss out;
    out.value = mean_squared_error(fa, fb) - lambda * (mean_squared_error(fa, fm) + mean_squared_error(fb, fm));
    out.d_fa = (2.0 / n) * ((fa - fb) - lambda * (fa - fm));
    out.d_fb = (2.0 / n) * ((fb - fa) - lambda * (fb - fm));
    out.d_fm = Eigen::VectorXd::Zero(fm.size());
    return out;
}

FeatureLoss eve_loss(const Eigen::VectorXd &fe, const Eigen::VectorXd &fa, const Eigen::VectorXd &fb)
{
    return adversary_loss(fa, fb, fe);
}

} // namespace risskg

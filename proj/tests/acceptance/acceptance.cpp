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

// Acceptance runner: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "risskg/experiment.hpp"

using namespace risskg;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt3(double a) { return fmt("%.3f", a); }

constexpr std::uint64_t kEvalSeedOffset = 1000003;
const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5};

// ------------------------------------------------------------------------
// Shared desk-scale runs, trained on first use.

struct TrainedRun {
    AdversarialModels models;
    Dataset held_out;
    RhoTriple rho;
};

struct Cache {
    std::map<std::tuple<std::uint64_t, double, int>, TrainedRun> runs;
    std::map<std::pair<std::uint64_t, double>, EveModel> eves;
    std::map<std::uint64_t, Dataset> data;

    static ExperimentConfig config(std::uint64_t seed)
    {
        ExperimentConfig c = ExperimentConfig::desk();
        c.seed = seed;
        return c;
    }

    const Dataset &training_data(std::uint64_t seed)
    {
        auto it = data.find(seed);
        if (it == data.end()) {
            const ExperimentConfig c = config(seed);
            it = data.emplace(seed, generate_dataset(c.params, c.grid, c.num_rounds, c.seed)).first;
        }
        return it->second;
    }

    const TrainedRun &run(std::uint64_t seed, double lambda, LossKind kind = LossKind::corr_adversarial)
    {
        const auto key = std::make_tuple(seed, lambda, static_cast<int>(kind));
        auto it = runs.find(key);
        if (it != runs.end())
            return it->second;
        const ExperimentConfig c = config(seed);
        TrainConfig tc = c.train;
        tc.seed = seed;
        tc.lambda = lambda;
        tc.loss_kind = kind;
        TrainedRun r;
        r.models = train_adversarial(training_data(seed), tc, c.cond);
        r.held_out = generate_dataset(c.params, c.grid, c.eval_rounds, seed + kEvalSeedOffset, GeometrySampling::uniform);
        r.rho = abs_correlations(evaluate_features(r.models, r.held_out.rounds, r.held_out.params));
        std::printf("  trained seed %llu lambda %.1f %s: ab %.3f am %.3f bm %.3f\n",
                    static_cast<unsigned long long>(seed), lambda, to_string(kind).c_str(), r.rho.ab, r.rho.am,
                    r.rho.bm);
        std::fflush(stdout);
        return runs.emplace(key, std::move(r)).first->second;
    }

    const EveModel &eve(std::uint64_t seed, double lambda)
    {
        const auto key = std::make_pair(seed, lambda);
        auto it = eves.find(key);
        if (it != eves.end())
            return it->second;
        const ExperimentConfig c = config(seed);
        const TrainedRun &r = run(seed, lambda);
        EveModel e = train_eve(generator_target(r.models.alice, r.models.bob, c.params, c.cond), c.params, c.grid,
                               c.eve.num_rounds, eve_train_config(c), c.cond);
        return eves.emplace(key, std::move(e)).first->second;
    }
};

Cache cache;

// ------------------------------------------------------------------------
// 1. Gradients.

Eigen::MatrixXd random_batch(int rows, int cols, Rng &rng)
{
    Eigen::MatrixXd x(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            x(r, c) = uniform(rng, -1.0, 1.0);
    return x;
}

Mlp random_net(int in, Rng &rng)
{
    std::vector<int> dims{in};
    const int depth = 1 + static_cast<int>(rng() % 2);
    for (int l = 0; l < depth; ++l)
        dims.push_back(3 + static_cast<int>(rng() % 6));
    dims.push_back(1);
    Mlp net = Mlp::glorot(dims, Mlp::activations(dims.size() - 1, Activation::relu, Activation::sine), rng);
    // Nonzero biases keep pre-activations off the ReLU kink, where a dead
    // previous layer would otherwise leave them at exactly zero.
    Eigen::VectorXd p = net.parameters();
    for (Eigen::Index i = 0; i < p.size(); ++i)
        p[i] += uniform(rng, -0.1, 0.1);
    net.set_parameters(p);
    return net;
}

// Elementwise relative error with a floor at 1e-3 of the largest component,
// so that entries that are zero up to rounding do not dominate.
double max_relative_error(const Eigen::VectorXd &a, const Eigen::VectorXd &n)
{
    const double floor = 1e-3 * std::max(a.cwiseAbs().maxCoeff(), n.cwiseAbs().maxCoeff());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - n[i]) / std::max({std::abs(a[i]), std::abs(n[i]), floor, 1e-300}));
    return worst;
}

using LossFn = std::function<FeatureLoss(const Eigen::VectorXd &, const Eigen::VectorXd &, const Eigen::VectorXd &)>;
enum class Role { alice, bob, mallory };

// Analytic vs central-difference gradient of `loss` with respect to the
// parameters of the network playing `role`.
double gradient_error(Mlp &net, const Eigen::MatrixXd &x, Role role, const Eigen::VectorXd &fa,
                      const Eigen::VectorXd &fb, const Eigen::VectorXd &fm, const LossFn &loss)
{
    auto eval = [&](const Eigen::VectorXd &f) {
        switch (role) {
        case Role::alice:
            return loss(f, fb, fm);
        case Role::bob:
            return loss(fa, f, fm);
        default:
            return loss(fa, fb, f);
        }
    };
    Mlp::Cache c;
    const Eigen::VectorXd f = net.forward(x, c).row(0).transpose();
    const FeatureLoss l = eval(f);
    const Eigen::VectorXd &up = role == Role::alice ? l.d_fa : role == Role::bob ? l.d_fb : l.d_fm;
    const Eigen::VectorXd analytic = Mlp::flatten(net.backward(c, up.transpose()));

    const Eigen::VectorXd p0 = net.parameters();
    Eigen::VectorXd numeric(p0.size());
    constexpr double h = 1e-6;
    for (Eigen::Index i = 0; i < p0.size(); ++i) {
        Eigen::VectorXd p = p0;
        p[i] = p0[i] + h;
        net.set_parameters(p);
        const double plus = eval(net.forward(x).row(0).transpose()).value;
        p[i] = p0[i] - h;
        net.set_parameters(p);
        const double minus = eval(net.forward(x).row(0).transpose()).value;
        numeric[i] = (plus - minus) / (2 * h);
    }
    net.set_parameters(p0);
    return max_relative_error(analytic, numeric);
}

Outcome criterion_gradients()
{
    Rng rng = make_rng(101);
    double worst = 0.0;
    int checks = 0;
    for (int t = 0; t < 20; ++t) {
        const int batch = 16 + static_cast<int>(rng() % 17);
        Mlp alice = random_net(4, rng);
        Mlp bob = random_net(4, rng);
        Mlp mallory = random_net(6, rng);
        const Eigen::MatrixXd xa = random_batch(4, batch, rng);
        const Eigen::MatrixXd xb = random_batch(4, batch, rng);
        const Eigen::MatrixXd xm = random_batch(6, batch, rng);
        const Eigen::VectorXd fa = alice.forward(xa).row(0).transpose();
        const Eigen::VectorXd fb = bob.forward(xb).row(0).transpose();
        const Eigen::VectorXd fm = mallory.forward(xm).row(0).transpose();
        const double lambda = uniform(rng, 0.2, 1.0);
        for (LossKind kind : {LossKind::corr_adversarial, LossKind::corr_only, LossKind::mse_adversarial}) {
            LossFn gen;
            LossFn adv;
            switch (kind) {
            case LossKind::corr_adversarial:
                gen = [lambda](const auto &a, const auto &b, const auto &m) { return generator_loss(a, b, m, lambda); };
                adv = [](const auto &a, const auto &b, const auto &m) { return adversary_loss(a, b, m); };
                break;
            case LossKind::corr_only:
                gen = [](const auto &a, const auto &b, const auto &) { return correlation_only_loss(a, b); };
                break;
            case LossKind::mse_adversarial:
                gen = [lambda](const auto &a, const auto &b, const auto &m) {
                    return mse_adversarial_loss(a, b, m, lambda);
                };
                adv = [](const auto &a, const auto &b, const auto &m) { return adversary_loss(a, b, m); };
                break;
            }
            worst = std::max(worst, gradient_error(alice, xa, Role::alice, fa, fb, fm, gen));
            worst = std::max(worst, gradient_error(bob, xb, Role::bob, fa, fb, fm, gen));
            checks += 2;
            if (adv) {
                worst = std::max(worst, gradient_error(mallory, xm, Role::mallory, fa, fb, fm, adv));
                ++checks;
            }
        }
    }
    return {worst < 1e-4, std::to_string(checks) + " gradient checks, max rel err " + fmt("%.2e", worst)};
}

// ------------------------------------------------------------------------
// 2. Determinant factorization and quadratic-form identity.

Eigen::MatrixXcd random_pd(int m, Rng &rng)
{
    Eigen::MatrixXcd a(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            a(i, j) = complex_gaussian(rng, 1.0);
    return a * a.adjoint() / m + 0.1 * Eigen::MatrixXcd::Identity(m, m);
}

Eigen::VectorXcd random_cvec(int m, Rng &rng)
{
    Eigen::VectorXcd v(m);
    for (int i = 0; i < m; ++i)
        v[i] = complex_gaussian(rng, 1.0);
    return v;
}

Outcome criterion_algebra()
{
    Rng rng = make_rng(202);
    const double pt = 0.1;
    const double s2 = 0.05;
    double det_err = 0.0;
    double quad_err = 0.0;
    for (int m : {1, 4, 9, 16}) {
        for (int t = 0; t < 10; ++t) {
            const Eigen::MatrixXcd sigma = random_pd(m, rng);
            const Eigen::VectorXcd zeta = random_cvec(m, rng);
            const Complex x_a = std::polar(std::sqrt(pt), uniform(rng, 0.0, kTwoPi));
            const double direct = conditional_covariance(sigma, zeta, x_a, pt, s2).fullPivLu().determinant().real();
            det_err = std::max(det_err, std::abs(determinant_factored(sigma, zeta, pt, s2) / direct - 1.0));
            const double q = quadratic_form_direct(sigma, zeta, pt, s2);
            quad_err = std::max(quad_err, std::abs(quadratic_form_spectral(sigma, zeta, pt, s2) / q - 1.0));
        }
    }
    const ExperimentConfig c = ExperimentConfig::desk();
    const CovarianceModel cov = simulate_covariance(c.params, 5.0, 5.0, 20000, 1);
    Rng mc = make_rng(203);
    const auto check = verify_quadratic_identity(cov, c.params, sigma_zeta_sq(c.params, 5.0), 100000, mc);
    // On the simulated covariance Pt lambda / sigma^2 reaches ~1e5 and the
    // direct form loses digits to cancellation, so its per-draw residual is
    // reported but the 1e-10 bound applies to the well-conditioned draws.
    const bool pass = det_err < 1e-10 && quad_err < 1e-10 && check.relative_deviation < 0.01;
    return {pass, "det rel err " + fmt("%.1e", det_err) + ", spectral rel err " + fmt("%.1e", quad_err) +
                      ", MC mean deviation " + fmt("%.4f", check.relative_deviation) +
                      " (1e5 draws, M=16, per-draw residual " + fmt("%.1e", check.max_spectral_residual) + ")"};
}

// ------------------------------------------------------------------------
// 3. Secret key rate gap.

Outcome criterion_skr()
{
    ExperimentConfig c = ExperimentConfig::paper();
    c.skr.samples = 10 * static_cast<std::size_t>(c.params.num_elements());
    const auto rows = skr_sweep(c, SweepRange{-115.0, -90.0, 6});
    double worst = std::numeric_limits<double>::infinity();
    for (const auto &r : rows)
        worst = std::min(worst, r.breakdown.gap);
    return {worst > 0.0, "M=" + std::to_string(c.params.num_elements()) + ", gap " + fmt3(rows.front().breakdown.gap) +
                             " bits at -115 dBW, min " + fmt3(worst) + " bits over -115..-90 dBW"};
}

// ------------------------------------------------------------------------
// 4. MITM-RIS reconstruction of legacy features.

Outcome criterion_attacks()
{
    const ExperimentConfig c = ExperimentConfig::desk();
    SystemParams p = c.params;
    p.sigma2 = db_to_linear(-110.0);
    const Dataset d = generate_dataset(p, c.grid, 20000, 404, GeometrySampling::uniform);
    const auto csi = legacy_features(LegacyScheme::csi, d.rounds, d.params);
    const auto cm = legacy_features(LegacyScheme::crossmult, d.rounds, d.params);
    const double r_csi = std::abs(pearson(csi.fe, csi.fa).rho);
    const double r_cm = std::abs(pearson(cm.fe, cm.fa).rho);
    return {r_csi > 0.9 && r_cm > 0.9, "|rho(fE,fA)| csi " + fmt3(r_csi) + ", crossmult " + fmt3(r_cm)};
}

// ------------------------------------------------------------------------
// 5. Adversarial training.

bool resists(const RhoTriple &r) { return r.ab >= 0.9 && std::max(r.am, r.bm) <= 0.2; }

Outcome criterion_training()
{
    int ok = 0;
    std::string detail;
    for (auto s : kSeeds) {
        const RhoTriple &r = cache.run(s, 0.8).rho;
        ok += resists(r);
        detail += " s" + std::to_string(s) + "(" + fmt3(r.ab) + "/" + fmt3(std::max(r.am, r.bm)) + ")";
    }
    return {ok >= 4, std::to_string(ok) + "/5 seeds pass, ab/max(am,bm):" + detail};
}

// ------------------------------------------------------------------------
// 6. Eve against trained generators, with a cross-multiplication control.

double eve_rho(std::uint64_t seed, double lambda)
{
    const TrainedRun &r = cache.run(seed, lambda);
    const EveModel &e = cache.eve(seed, lambda);
    const FeatureSet f = evaluate_features(r.models, r.held_out.rounds, r.held_out.params);
    return std::abs(pearson(eve_features(e, r.held_out.rounds, r.held_out.params), f.fa).rho);
}

Outcome criterion_eve()
{
    int ok = 0;
    std::string detail;
    for (auto s : kSeeds) {
        const double rho = eve_rho(s, 0.8);
        ok += rho <= 0.3;
        detail += " s" + std::to_string(s) + " " + fmt3(rho);
    }
    const ExperimentConfig c = Cache::config(1);
    const EveModel control = train_eve(crossmult_target(), c.params, c.grid, c.eve.num_rounds, eve_train_config(c), c.cond);
    const Dataset &held = cache.run(1, 0.8).held_out;
    const auto [ta, tb] = crossmult_target()(held.rounds);
    const double rho_control = std::abs(pearson(eve_features(control, held.rounds, held.params), ta).rho);
    return {ok >= 4 && rho_control > 0.8, std::to_string(ok) + "/5 seeds with |rho(fE,fA)| <= 0.3:" + detail +
                                               "; crossmult control " + fmt3(rho_control)};
}

// ------------------------------------------------------------------------
// 7. Key metrics at -115 dBW.

KeyMetrics learned_keys(std::uint64_t seed, double lambda)
{
    const TrainedRun &r = cache.run(seed, lambda);
    const FeatureSet f = evaluate_features(r.models, r.held_out.rounds, r.held_out.params);
    const Eigen::VectorXd fe = eve_features(cache.eve(seed, lambda), r.held_out.rounds, r.held_out.params);
    return key_metrics(f.fa, f.fb, fe, Cache::config(seed).quant);
}

Outcome criterion_keys()
{
    const ExperimentConfig c = Cache::config(1);
    if (std::abs(linear_to_db(c.params.sigma2) + 115.0) > 1e-9)
        return {false, "desk noise power is not -115 dBW"};
    const KeyMetrics adv = learned_keys(1, 0.8);
    const KeyMetrics base = learned_keys(1, 0.0);

    const TrainedRun &r = cache.run(1, 0.8);
    const KeyStream ka = quantize(evaluate_features(r.models, r.held_out.rounds, r.held_out.params).fa, c.quant);
    Rng rng = make_rng(707);
    std::vector<std::uint8_t> guess(ka.bits.size());
    for (auto &b : guess)
        b = static_cast<std::uint8_t>(rng() & 1u);
    const double blind = key_agreement_rate(ka.bits, guess);

    const bool pass = adv.kar_ab >= 0.9 && std::abs(adv.kar_ae - 0.5) <= 0.05 && adv.akr > base.akr &&
                      std::abs(blind - 0.5) <= 0.02;
    return {pass, "KAR_AB " + fmt3(adv.kar_ab) + ", KAR_AE " + fmt3(adv.kar_ae) + ", AKR " + fmt3(adv.akr) +
                      " vs baseline " + fmt3(base.akr) + ", blind guess " + fmt3(blind)};
}

// ------------------------------------------------------------------------
// 8. Printed numeric vectors.

Eigen::VectorXd vec(std::initializer_list<double> v)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        out[i++] = x;
    return out;
}

// Agreement to `digits` decimals when both sides are printed values.
bool printed(double value, double expected, int digits)
{
    return std::abs(value - expected) <= 1.0001 * std::pow(10.0, -digits);
}

Outcome criterion_vectors()
{
    const auto fa_pre = vec({1.7785, -11.5793, -15.6173, 30.9349, -6.5427});
    const auto fb_pre = vec({1.6977, -12.0710, -15.3097, 30.7069, -7.0318});
    const auto fm_pre = vec({1.1545, -13.5137, -17.6408, 28.7752, -6.3973});
    const auto fa_mod = vec({1.7785, 0.9871, 3.2323, 5.8021, 6.0237});
    const auto fb_mod = vec({1.6977, 0.4953, 3.5398, 5.5741, 5.5345});
    const auto fm_mod = vec({1.1545, 5.3359, 1.2087, 3.6424, 6.1691});
    const auto fa_sin = vec({0.9785, 0.8344, -0.0906, -0.4627, -0.2566});
    const auto fb_sin = vec({0.9920, 0.4753, -0.3878, -0.6511, -0.6807});
    const auto fm_sin = vec({0.9146, -0.8119, 0.9352, -0.4801, -0.1138});

    int bad = 0;
    int total = 0;
    auto expect = [&](double v, double e, int digits) {
        ++total;
        bad += !printed(v, e, digits);
    };
    for (Eigen::Index i = 0; i < 5; ++i) {
        expect(mod_2pi(fa_pre[i]), fa_mod[i], 4);
        expect(mod_2pi(fb_pre[i]), fb_mod[i], 4);
        expect(mod_2pi(fm_pre[i]), fm_mod[i], 4);
        expect(std::sin(fa_pre[i]), fa_sin[i], 4);
        expect(std::sin(fb_pre[i]), fb_sin[i], 4);
        expect(std::sin(fm_pre[i]), fm_sin[i], 4);
    }
    expect(std::abs(corr_coef(fa_pre, fb_pre)), 0.9998, 4);
    expect(std::abs(corr_coef(fa_mod, fb_mod)), 0.989, 3);
    expect(std::abs(corr_coef(fa_mod, fm_mod)), 0.336, 3);
    expect(std::abs(corr_coef(fb_mod, fm_mod)), 0.208, 3);
    expect(std::abs(corr_coef(fa_sin, fb_sin)), 0.978, 3);
    return {bad == 0, std::to_string(total - bad) + "/" + std::to_string(total) + " printed values reproduced"};
}

// ------------------------------------------------------------------------
// 9. Explicit-formula pipeline.

Outcome criterion_explicit()
{
    Rng rng = make_rng(909);
    const int n = 2000;
    std::vector<Complex> xs(n);
    std::vector<Complex> ys(n);
    for (int i = 0; i < n; ++i) {
        xs[static_cast<std::size_t>(i)] = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
        ys[static_cast<std::size_t>(i)] = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
    }
    Eigen::VectorXd truth(kPolyTerms);
    for (Eigen::Index k = 0; k < kPolyTerms; ++k)
        truth[k] = uniform(rng, -2, 2);
    const Eigen::VectorXd fitted = fit_polynomial(design_matrix(xs, ys) * truth, xs, ys);
    const double round_trip = (fitted - truth).cwiseAbs().maxCoeff() / truth.cwiseAbs().maxCoeff();

    const TrainedRun &r = cache.run(1, 0.8);
    const ExperimentConfig c = Cache::config(1);
    const PolyPair poly = refit_poly(r.models, cache.training_data(1).split(Split::validation), c.params);
    const auto [ua, ub] = poly_target(poly, r.held_out.params, r.models.cond)(r.held_out.rounds);
    const double rho = std::abs(pearson(ua, ub).rho);
    return {round_trip < 1e-8 && rho >= 0.9,
            "round-trip rel err " + fmt("%.1e", round_trip) + ", refit |rho(UA,UB)| " + fmt3(rho) + " at -115 dBW"};
}

// ------------------------------------------------------------------------
// 10. Distillation histogram.

Outcome criterion_distill()
{
    const TrainedRun &r = cache.run(1, 0.8);
    const auto val = cache.training_data(1).split(Split::validation);
    const auto rounds = val.subspan(0, std::min<std::size_t>(val.size(), 5000));
    const Eigen::MatrixXd in = alice_inputs(rounds, cache.training_data(1).params, r.models.cond);
    const std::vector<DistillReport> reports{distill_generator(r.models.alice, in)};
    const auto freq = term_frequency(reports);
    TermCategory modal = TermCategory::other;
    std::size_t best = 0;
    std::string detail;
    for (const auto &[cat, count] : freq) {
        detail += " " + to_string(cat) + "=" + std::to_string(count);
        if (count > best) {
            best = count;
            modal = cat;
        }
    }
    return {best > 0 && modal == TermCategory::polynomial, "dominant terms:" + detail};
}

// ------------------------------------------------------------------------
// 11. Trade-off and loss ablations.

Outcome criterion_ablations()
{
    std::map<double, RhoTriple> mean;
    std::map<double, int> broken;
    for (double l : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        RhoTriple m;
        for (auto s : kSeeds) {
            const RhoTriple &r = cache.run(s, l).rho;
            m.ab += r.ab / kSeeds.size();
            m.am += std::max(r.am, r.bm) / kSeeds.size();
            broken[l] += std::max(r.am, r.bm) > 0.2;
        }
        mean[l] = m;
    }
    const bool low_fails = mean[0.2].am > 0.2;
    const bool high_degrades = mean[1.0].ab < mean[0.8].ab;

    const TrainedRun &mse = cache.run(1, 0.8, LossKind::mse_adversarial);
    const FeatureSet f = evaluate_features(mse.models, mse.held_out.rounds, mse.held_out.params);
    const double mse_ab = mean_squared_error(f.fa, f.fb);
    const double rho_mse = std::abs(pearson(f.fa, f.fb).rho);
    const bool mse_ok = mse_ab < 1e-4 && rho_mse < 0.3;

    std::string detail = "mean ab/max(am,bm), seeds Mallory > 0.2:";
    for (const auto &[l, m] : mean)
        detail += " l" + fmt("%.1f", l) + "(" + fmt("%.4f", m.ab) + "/" + fmt3(m.am) + ", " + std::to_string(broken[l]) +
                  ")";
    detail += "; MSE loss: mse " + fmt("%.2e", mse_ab) + " |rho| " + fmt3(rho_mse);
    return {low_fails && high_degrades && mse_ok, detail};
}

} // namespace

int main(int argc, char **argv)
{
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, criterion_gradients}, {2, criterion_algebra},  {3, criterion_skr},     {4, criterion_attacks},
        {5, criterion_training},  {6, criterion_eve},      {7, criterion_keys},    {8, criterion_vectors},
        {9, criterion_explicit},  {10, criterion_distill}, {11, criterion_ablations}};
    // Usage: acceptance [--strict] [--report file] [criterion ids...]
    // Without --strict only errors give a nonzero exit; FAIL lines are a
    // report, not a test failure.
    std::set<int> selected;
    bool strict = false;
    std::FILE *report = nullptr;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--strict") {
            strict = true;
        } else if (a == "--report" && i + 1 < argc) {
            report = std::fopen(argv[++i], "w");
            if (!report) {
                std::fprintf(stderr, "cannot write %s\n", argv[i]);
                return 2;
            }
        } else {
            selected.insert(std::stoi(a));
        }
    }

    auto emit = [&](const std::string &line) {
        std::printf("%s\n", line.c_str());
        std::fflush(stdout);
        if (report) {
            std::fprintf(report, "%s\n", line.c_str());
            std::fflush(report);
        }
    };
    int failed = 0;
    int errors = 0;
    int ran = 0;
    for (const auto &[id, fn] : criteria) {
        if (!selected.empty() && !selected.count(id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception &e) {
            o = {false, std::string("error: ") + e.what()};
            ++errors;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        emit(std::string(o.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(id) + ": " + o.detail + " [" +
             fmt("%.1f", secs) + "s]");
        ++ran;
        failed += !o.pass;
    }
    emit(std::to_string(ran - failed) + "/" + std::to_string(ran) + " criteria passed");
    if (report)
        std::fclose(report);
    return errors > 0 || (strict && failed > 0) ? 1 : 0;
}

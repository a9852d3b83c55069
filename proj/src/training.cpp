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

#include "risskg/training.hpp"

#include <cmath>
#include <string>

namespace risskg {

namespace {

Complex unit(Complex z)
{
    const double r = std::abs(z);
    return r > 0 ? z / r : Complex{};
}

Eigen::MatrixXd legit_inputs(std::span<const ProbeRound> rounds, const SystemParams &params,
                             const FeatureConditioning &cond, bool alice)
{
    const double sx = 1.0 / std::sqrt(params.pt);
    Eigen::MatrixXd in(4, static_cast<Eigen::Index>(rounds.size()));
    for (std::size_t i = 0; i < rounds.size(); ++i) {
        const ProbeRound &r = rounds[i];
        const Complex x = (alice ? r.x_a : r.x_b) * sx;
        const Complex y = cond.norm == SignalNorm::agc ? unit(alice ? r.y_a : r.y_b) : (alice ? r.y_a : r.y_b);
        const auto c = static_cast<Eigen::Index>(i);
        in(0, c) = x.real();
        in(1, c) = x.imag();
        in(2, c) = y.real();
        in(3, c) = y.imag();
    }
    return in;
}

Eigen::VectorXcd agc(const Eigen::VectorXcd &v)
{
    const double n = v.norm();
    if (!(n > 0))
        return Eigen::VectorXcd::Zero(v.size());
    return v * (std::sqrt(static_cast<double>(v.size())) / n);
}

Eigen::MatrixXd batch_columns(const Eigen::MatrixXd &m, const std::vector<Eigen::Index> &idx)
{
    return m(Eigen::all, idx);
}

void check_finite(double v, const char *what, int epoch)
{
    if (!std::isfinite(v))
        throw TrainingDiverged(std::string(what) + " became non-finite at epoch " + std::to_string(epoch));
}

Mlp make_net(int in, const std::vector<int> &hidden, Rng &rng)
{
    std::vector<int> dims{in};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(1);
    return Mlp::glorot(dims, Mlp::activations(dims.size() - 1, Activation::relu, Activation::sine), rng);
}

} // namespace

Eigen::MatrixXd alice_inputs(std::span<const ProbeRound> rounds, const SystemParams &params,
                             const FeatureConditioning &cond)
{
    return legit_inputs(rounds, params, cond, true);
}

Eigen::MatrixXd bob_inputs(std::span<const ProbeRound> rounds, const SystemParams &params,
                           const FeatureConditioning &cond)
{
    return legit_inputs(rounds, params, cond, false);
}

Eigen::MatrixXd ris_inputs(std::span<const ProbeRound> rounds, const SystemParams &params,
                           const FeatureConditioning &cond)
{
    const Eigen::Index m = params.num_elements();
    const double sw = 1.0 / std::sqrt(params.amp_ae);
    Eigen::MatrixXd in(6 * m, static_cast<Eigen::Index>(rounds.size()));
    for (std::size_t i = 0; i < rounds.size(); ++i) {
        const ProbeRound &r = rounds[i];
        if (r.y_r_a.size() != m || r.y_r_b.size() != m || r.w.size() != m)
            throw std::invalid_argument("ris_inputs: round does not match the surface size");
        Eigen::VectorXcd a = r.y_r_a;
        Eigen::VectorXcd b = cond.layout == RisLayout::phase_compensated ? Eigen::VectorXcd(r.w.cwiseProduct(r.y_r_b))
                                                                         : r.y_r_b;
        if (cond.norm == SignalNorm::agc) {
            a = agc(a);
            b = agc(b);
        }
        auto col = in.col(static_cast<Eigen::Index>(i));
        col.segment(0, m) = a.real();
        col.segment(m, m) = a.imag();
        col.segment(2 * m, m) = b.real();
        col.segment(3 * m, m) = b.imag();
        col.segment(4 * m, m) = r.w.real() * sw;
        col.segment(5 * m, m) = r.w.imag() * sw;
    }
    return in;
}

std::string to_string(LossKind kind)
{
    switch (kind) {
    case LossKind::corr_adversarial:
        return "corr_adversarial";
    case LossKind::corr_only:
        return "corr_only";
    case LossKind::mse_adversarial:
        break;
    }
    return "mse_adversarial";
}

LossKind loss_kind_from_string(const std::string &name)
{
    if (name == "corr_adversarial")
        return LossKind::corr_adversarial;
    if (name == "corr_only")
        return LossKind::corr_only;
    if (name == "mse_adversarial")
        return LossKind::mse_adversarial;
    throw std::invalid_argument("unknown loss kind '" + name + "'");
}

void TrainConfig::validate() const
{
    if (!(learning_rate > 0))
        throw std::invalid_argument("TrainConfig: learning_rate must be positive");
    if (adversary_learning_rate < 0)
        throw std::invalid_argument("TrainConfig: adversary_learning_rate must be >= 0");
    if (batch_size < 2)
        throw std::invalid_argument("TrainConfig: batch_size must be >= 2");
    if (max_epochs < 0)
        throw std::invalid_argument("TrainConfig: max_epochs must be >= 0");
    if (!(lambda >= 0))
        throw std::invalid_argument("TrainConfig: lambda must be >= 0");
    if (adversary_steps < 1)
        throw std::invalid_argument("TrainConfig: adversary_steps must be >= 1");
    for (int h : generator_hidden)
        if (h < 1)
            throw std::invalid_argument("TrainConfig: hidden widths must be positive");
    for (int h : adversary_hidden)
        if (h < 1)
            throw std::invalid_argument("TrainConfig: hidden widths must be positive");
}

void negate_output(Mlp &net, AdamState *opt)
{
    auto &last = net.mutable_layer(net.num_layers() - 1);
    last.weight = -last.weight;
    last.bias = -last.bias;
    if (opt && !opt->m_w.empty()) {
        opt->m_w.back() = -opt->m_w.back();
        opt->m_b.back() = -opt->m_b.back();
    }
}

AdversarialModels init_adversarial(int num_elements, const TrainConfig &cfg, const FeatureConditioning &cond)
{
    cfg.validate();
    AdversarialModels models;
    Rng rng = make_rng(cfg.seed, 1);
    models.alice = make_net(4, cfg.generator_hidden, rng);
    models.bob = make_net(4, cfg.generator_hidden, rng);
    models.mallory = make_net(6 * num_elements, cfg.adversary_hidden, rng);
    models.cond = cond;
    models.opt_alice = AdamState(models.alice);
    models.opt_bob = AdamState(models.bob);
    models.opt_mallory = AdamState(models.mallory);
    return models;
}

void train_adversarial_epochs(AdversarialModels &models, const Eigen::MatrixXd &in_a, const Eigen::MatrixXd &in_b,
                              const Eigen::MatrixXd &in_m, const TrainConfig &cfg, int epochs, Rng &rng)
{
    cfg.validate();
    const Eigen::Index n = in_a.cols();
    if (in_b.cols() != n || in_m.cols() != n)
        throw std::invalid_argument("train_adversarial: input column counts differ");
    if (n < 2)
        throw std::invalid_argument("train_adversarial: need at least two training rounds");

    if (models.opt_alice.m_w.empty()) {
        models.opt_alice = AdamState(models.alice);
        models.opt_bob = AdamState(models.bob);
        models.opt_mallory = AdamState(models.mallory);
    }
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(cfg.batch_size));

    const int first = models.log.empty() ? 1 : models.log.back().epoch + 1;
    for (int e = 0; e < epochs; ++e) {
        const int epoch = first + e;
        for (auto &i : idx)
            i = pick(rng);
        const Eigen::MatrixXd xa = batch_columns(in_a, idx);
        const Eigen::MatrixXd xb = batch_columns(in_b, idx);
        const Eigen::MatrixXd xm = batch_columns(in_m, idx);

        const Eigen::VectorXd fa = mlp_features(models.alice, xa);
        const Eigen::VectorXd fb = mlp_features(models.bob, xb);
        const Eigen::VectorXd fm = mlp_features(models.mallory, xm);

        TrainLogRow row;
        row.epoch = epoch;
        row.loss_adv = adversary_update(models, fa, fb, xm, cfg);
        check_finite(row.loss_adv, "adversary loss", epoch);
        row.loss_gen = generator_update(models, xa, xb, fm, cfg);
        check_finite(row.loss_gen, "generator loss", epoch);
        row.rho_ab = pearson(fa, fb).rho;
        row.rho_am = pearson(fa, fm).rho;
        row.rho_bm = pearson(fb, fm).rho;
        models.log.push_back(row);
    }
}

double adversary_update(AdversarialModels &models, const Eigen::VectorXd &fa, const Eigen::VectorXd &fb,
                        const Eigen::MatrixXd &xm, const TrainConfig &cfg)
{
    Mlp::Cache cm;
    double first = 0.0;
    for (int k = 0; k < cfg.adversary_steps; ++k) {
        const Eigen::VectorXd fm = models.mallory.forward(xm, cm).row(0).transpose();
        const FeatureLoss adv = adversary_loss(fa, fb, fm);
        if (!std::isfinite(adv.value))
            return adv.value;
        if (k == 0)
            first = adv.value;
        adam_step(models.mallory, models.opt_mallory, models.mallory.backward(cm, adv.d_fm.transpose()),
                  cfg.adversary_lr());
    }
    return first;
}

double generator_update(AdversarialModels &models, const Eigen::MatrixXd &xa, const Eigen::MatrixXd &xb,
                        const Eigen::VectorXd &fm, const TrainConfig &cfg)
{
    Mlp::Cache ca, cb;
    const Eigen::VectorXd fa = models.alice.forward(xa, ca).row(0).transpose();
    const Eigen::VectorXd fb = models.bob.forward(xb, cb).row(0).transpose();
    const double lambda = cfg.loss_kind == LossKind::corr_only ? 0.0 : cfg.lambda;
    const FeatureLoss gen = cfg.loss_kind == LossKind::mse_adversarial ? mse_adversarial_loss(fa, fb, fm, lambda)
                                                                      : generator_loss(fa, fb, fm, lambda);
    if (!std::isfinite(gen.value))
        return gen.value;
    adam_step(models.alice, models.opt_alice, models.alice.backward(ca, gen.d_fa.transpose()), cfg.learning_rate);
    adam_step(models.bob, models.opt_bob, models.bob.backward(cb, gen.d_fb.transpose()), cfg.learning_rate);
    return gen.value;
}

AdversarialModels train_adversarial(const Dataset &data, const TrainConfig &cfg, const FeatureConditioning &cond)
{
    const auto train = data.split(Split::train);
    AdversarialModels models = init_adversarial(data.params.num_elements(), cfg, cond);
    const Eigen::MatrixXd in_a = alice_inputs(train, data.params, cond);
    const Eigen::MatrixXd in_b = bob_inputs(train, data.params, cond);
    const Eigen::MatrixXd in_m = ris_inputs(train, data.params, cond);
    Rng rng = make_rng(cfg.seed, 2);
    models.log.reserve(static_cast<std::size_t>(cfg.max_epochs));
    train_adversarial_epochs(models, in_a, in_b, in_m, cfg, cfg.max_epochs, rng);
    if (cfg.loss_kind != LossKind::mse_adversarial &&
        pearson(mlp_features(models.alice, in_a), mlp_features(models.bob, in_b)).rho < 0)
        negate_output(models.bob, &models.opt_bob);
    return models;
}

Eigen::VectorXd mlp_features(const Mlp &net, const Eigen::MatrixXd &inputs)
{
    if (net.output_dim() != 1)
        throw std::invalid_argument("mlp_features: network must have one output");
    return net.forward(inputs).row(0).transpose();
}

Eigen::VectorXd mlp_pre_features(const Mlp &net, const Eigen::MatrixXd &inputs)
{
    if (net.output_dim() != 1)
        throw std::invalid_argument("mlp_pre_features: network must have one output");
    return net.pre_activation(inputs).row(0).transpose();
}

FeatureSet evaluate_features(const AdversarialModels &models, std::span<const ProbeRound> rounds,
                             const SystemParams &params)
{
    FeatureSet f;
    f.fa = mlp_features(models.alice, alice_inputs(rounds, params, models.cond));
    f.fb = mlp_features(models.bob, bob_inputs(rounds, params, models.cond));
    f.fm = mlp_features(models.mallory, ris_inputs(rounds, params, models.cond));
    return f;
}

RhoTriple abs_correlations(const FeatureSet &f)
{
    return {std::abs(pearson(f.fa, f.fb).rho), std::abs(pearson(f.fa, f.fm).rho), std::abs(pearson(f.fb, f.fm).rho)};
}

TargetFn crossmult_target()
{
    return [](std::span<const ProbeRound> rounds) {
        Eigen::VectorXd fa(static_cast<Eigen::Index>(rounds.size()));
        Eigen::VectorXd fb(fa.size());
        for (std::size_t i = 0; i < rounds.size(); ++i) {
            fa[static_cast<Eigen::Index>(i)] = std::cos(std::arg(rounds[i].x_a * rounds[i].y_a));
            fb[static_cast<Eigen::Index>(i)] = std::cos(std::arg(rounds[i].x_b * rounds[i].y_b));
        }
        return std::make_pair(fa, fb);
    };
}

TargetFn generator_target(const Mlp &alice, const Mlp &bob, const SystemParams &params,
                          const FeatureConditioning &cond)
{
    return [alice, bob, params, cond](std::span<const ProbeRound> rounds) {
        return std::make_pair(mlp_features(alice, alice_inputs(rounds, params, cond)),
                              mlp_features(bob, bob_inputs(rounds, params, cond)));
    };
}

EveModel train_eve(const TargetFn &target, const SystemParams &params, const GridSpec &grid, std::size_t n,
                   const TrainConfig &cfg, const FeatureConditioning &cond)
{
    cfg.validate();
    if (n < 2)
        throw std::invalid_argument("train_eve: need at least two rounds");
    const Dataset sim = generate_dataset(params, grid, n, cfg.seed ^ 0xe7e0000000000000ULL);
    const auto [ta, tb] = target(sim.rounds);
    const Eigen::MatrixXd in_e = ris_inputs(sim.rounds, params, cond);

    EveModel out;
    out.cond = cond;
    Rng rng = make_rng(cfg.seed, 3);
    out.eve = make_net(6 * params.num_elements(), cfg.adversary_hidden, rng);
    AdamState opt(out.eve);
    std::uniform_int_distribution<Eigen::Index> pick(0, in_e.cols() - 1);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(cfg.batch_size));
    Mlp::Cache cache;
    out.log.reserve(static_cast<std::size_t>(cfg.max_epochs));
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        for (auto &i : idx)
            i = pick(rng);
        const Eigen::VectorXd fa = ta(idx);
        const Eigen::VectorXd fb = tb(idx);
        const Eigen::VectorXd fe = out.eve.forward(batch_columns(in_e, idx), cache).row(0).transpose();
        const FeatureLoss loss = eve_loss(fe, fa, fb);
        check_finite(loss.value, "Eve loss", epoch);
        adam_step(out.eve, opt, out.eve.backward(cache, loss.d_fm.transpose()), cfg.adversary_lr());
        out.log.push_back({epoch, loss.value, pearson(fe, fa).rho, pearson(fe, fb).rho});
    }
    if (pearson(mlp_features(out.eve, in_e), ta).rho < 0)
        negate_output(out.eve);
    return out;
}

Eigen::VectorXd eve_features(const EveModel &eve, std::span<const ProbeRound> rounds, const SystemParams &params)
{
    return mlp_features(eve.eve, ris_inputs(rounds, params, eve.cond));
}

} // namespace risskg

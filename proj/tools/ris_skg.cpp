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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "risskg/experiment.hpp"
#include "risskg/model_io.hpp"

namespace fs = std::filesystem;
using namespace risskg;

namespace {

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string scale;
    std::string scheme;
};

void add_common(CLI::App *cmd, CommonOptions &o, const std::string &out_help)
{
    cmd->add_option("--config", o.config, "Config file (key = value, [section] headers)");
    cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
    cmd->add_option("--out", o.out, out_help)->required();
    cmd->add_option("--scale", o.scale, "Preset the config starts from")->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--scheme", o.scheme, "Feature scheme")
        ->check(CLI::IsMember({"csi", "crossmult", "nn", "poly", "baseline"}));
}

/// Preset (from --scale, else the file's `scale` key, else desk), then the
/// file, then command-line overrides.
ExperimentConfig load_config(const CommonOptions &o)
{
    ConfigFile file;
    if (!o.config.empty())
        file = ConfigFile::load(o.config);
    std::string scale = o.scale;
    if (scale.empty())
        scale = file.has("scale") ? file.values().at("scale") : "desk";
    ExperimentConfig cfg = ExperimentConfig::preset(scale);
    cfg.apply(file);
    if (o.seed)
        cfg.seed = *o.seed;
    if (!o.scheme.empty())
        cfg.scheme = scheme_from_string(o.scheme);
    cfg.validate();
    return cfg;
}

RunManifest manifest_for(const std::string &command, const ExperimentConfig &cfg)
{
    RunManifest m;
    m.command = command;
    m.config_text = cfg.to_text();
    m.seed = cfg.seed;
    return m;
}

std::ofstream open_out(const fs::path &path)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    return os;
}

AdversarialModels load_generators(const fs::path &dir, const ExperimentConfig &cfg)
{
    AdversarialModels m;
    m.alice = load_mlp(dir / "alice.mlp");
    m.bob = load_mlp(dir / "bob.mlp");
    if (fs::exists(dir / "mallory.mlp"))
        m.mallory = load_mlp(dir / "mallory.mlp");
    m.cond = cfg.cond;
    return m;
}

void cmd_gen_data(const CommonOptions &o)
{
    const ExperimentConfig cfg = load_config(o);
    const Dataset data = generate_dataset(cfg.params, cfg.grid, cfg.num_rounds, cfg.seed);
    write_dataset(data, o.out);
    std::printf("wrote %zu rounds (M=%d) to %s\n", data.rounds.size(), cfg.params.num_elements(), o.out.c_str());
}

void cmd_train(const CommonOptions &o, const std::string &data_path)
{
    const ExperimentConfig cfg = load_config(o);
    const fs::path dir = o.out;
    fs::create_directories(dir);
    RunManifest man = manifest_for("train", cfg);
    const Dataset data = run_stage(man, "gen-data", [&] {
        return data_path.empty() ? generate_dataset(cfg.params, cfg.grid, cfg.num_rounds, cfg.seed)
                                 : read_dataset(data_path);
    });
    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    if (cfg.scheme == Scheme::baseline)
        tc.lambda = 0.0;
    const AdversarialModels m = run_stage(man, "train", [&] { return train_adversarial(data, tc, cfg.cond); });
    save_mlp(m.alice, dir / "alice.mlp");
    save_mlp(m.bob, dir / "bob.mlp");
    save_mlp(m.mallory, dir / "mallory.mlp");
    auto os = open_out(dir / "train_log.csv");
    os << man.csv_comment() << "epoch,loss_gen,loss_adv,rho_ab,rho_am,rho_bm\n";
    for (const auto &r : m.log)
        os << r.epoch << ',' << format_double(r.loss_gen) << ',' << format_double(r.loss_adv) << ','
           << format_double(r.rho_ab) << ',' << format_double(r.rho_am) << ',' << format_double(r.rho_bm) << '\n';
    man.artifacts = {"alice.mlp", "bob.mlp", "mallory.mlp", "train_log.csv"};
    man.write(dir / "manifest.txt");
    const RhoTriple r = abs_correlations(evaluate_features(m, data.split(Split::test), data.params));
    std::printf("test split: |rho_ab| %.4f  |rho_am| %.4f  |rho_bm| %.4f\n", r.ab, r.am, r.bm);
}

void cmd_train_eve(const CommonOptions &o, const std::string &models_dir)
{
    const ExperimentConfig cfg = load_config(o);
    const fs::path dir = o.out;
    fs::create_directories(dir);
    RunManifest man = manifest_for("train-eve --scheme " + to_string(cfg.scheme), cfg);
    const fs::path src = models_dir.empty() ? dir : fs::path(models_dir);
    TargetFn target;
    switch (cfg.scheme) {
    case Scheme::crossmult:
        target = crossmult_target();
        break;
    case Scheme::poly:
        target = poly_target({load_poly(src / "poly_alice.poly"), load_poly(src / "poly_bob.poly")}, cfg.params,
                             cfg.cond);
        break;
    case Scheme::nn:
    case Scheme::baseline: {
        const AdversarialModels m = load_generators(src, cfg);
        target = generator_target(m.alice, m.bob, cfg.params, cfg.cond);
        break;
    }
    case Scheme::csi:
        throw std::invalid_argument("train-eve: the CSI scheme has an analytic attack; use attack-report");
    }
    const EveModel eve = run_stage(man, "train-eve", [&] {
        return train_eve(target, cfg.params, cfg.grid, cfg.eve.num_rounds, eve_train_config(cfg), cfg.cond);
    });
    save_mlp(eve.eve, dir / "eve.mlp");
    auto os = open_out(dir / "eve_log.csv");
    os << man.csv_comment() << "epoch,loss,rho_ea,rho_eb\n";
    for (const auto &r : eve.log)
        os << r.epoch << ',' << format_double(r.loss) << ',' << format_double(r.rho_ea) << ','
           << format_double(r.rho_eb) << '\n';
    man.artifacts = {"eve.mlp", "eve_log.csv"};
    man.write(dir / "manifest.txt");

    const Dataset held = generate_dataset(cfg.params, cfg.grid, cfg.eval_rounds, cfg.seed + 1000003,
                                          GeometrySampling::uniform);
    const auto [fa, fb] = target(held.rounds);
    const Eigen::VectorXd fe = eve_features(eve, held.rounds, held.params);
    std::printf("held out: |rho_ea| %.4f  |rho_eb| %.4f\n", std::abs(pearson(fe, fa).rho),
                std::abs(pearson(fe, fb).rho));
}

void cmd_attack_report(const CommonOptions &o)
{
    const ExperimentConfig cfg = load_config(o);
    for (const auto &r : attack_report(cfg, o.out))
        std::printf("%-9s %7.2f dBW %s  rho_ab %.4f  rho_ea %.4f  rho_eb %.4f\n", r.scheme.c_str(), r.sigma2_db,
                    r.part.c_str(), r.rho_ab, r.rho_ea, r.rho_eb);
}

void cmd_skr(const CommonOptions &o, const std::string &sweep)
{
    const ExperimentConfig cfg = load_config(o);
    SweepRange range = cfg.sigma2_db;
    if (!sweep.empty()) {
        const std::string prefix = "sigma2=";
        if (sweep.rfind(prefix, 0) != 0)
            throw std::invalid_argument("--sweep expects sigma2=<lo>:<hi>:<steps>");
        range = SweepRange::parse(sweep.substr(prefix.size()));
    }
    RunManifest man = manifest_for("skr", cfg);
    const auto rows = run_stage(man, "skr", [&] { return skr_sweep(cfg, range); });
    auto os = open_out(o.out);
    write_skr_csv(rows, man, os);
    for (const auto &r : rows)
        std::printf("%7.2f dBW  gap %.4f bits%s\n", r.sigma2_db, r.breakdown.gap,
                    r.condition_ok ? "" : "  (deceptive-channel condition not met)");
}

void cmd_distill(const CommonOptions &o, const std::string &models_dir)
{
    const ExperimentConfig cfg = load_config(o);
    const fs::path dir = o.out;
    fs::create_directories(dir);
    RunManifest man = manifest_for("distill", cfg);
    const AdversarialModels m = load_generators(models_dir.empty() ? dir : fs::path(models_dir), cfg);
    const Dataset data = generate_dataset(cfg.params, cfg.grid, cfg.num_rounds, cfg.seed);
    const auto val = data.split(Split::validation);

    std::vector<DistillReport> reports;
    run_stage(man, "distill", [&] {
        reports.push_back(distill_generator(m.alice, alice_inputs(val, cfg.params, cfg.cond)));
        reports.push_back(distill_generator(m.bob, bob_inputs(val, cfg.params, cfg.cond)));
    });
    const char *names[] = {"distill_alice.csv", "distill_bob.csv"};
    for (std::size_t i = 0; i < 2; ++i) {
        auto os = open_out(dir / names[i]);
        os << man.csv_comment();
        write_distill_csv(reports[i], os);
        man.artifacts.push_back(names[i]);
    }
    auto os = open_out(dir / "term_frequency.csv");
    os << man.csv_comment() << "category,count\n";
    for (const auto &[cat, count] : term_frequency(reports)) {
        os << to_string(cat) << ',' << count << '\n';
        std::printf("%-12s %zu\n", to_string(cat).c_str(), count);
    }
    man.artifacts.push_back("term_frequency.csv");

    const PolyPair poly = run_stage(man, "refit", [&] { return refit_poly(m, val, cfg.params); });
    save_poly(poly.alice, dir / "poly_alice.poly");
    save_poly(poly.bob, dir / "poly_bob.poly");
    man.artifacts.insert(man.artifacts.end(), {"poly_alice.poly", "poly_bob.poly"});
    man.write(dir / "manifest.txt");
    const auto [fa, fb] = poly_target(poly, cfg.params, cfg.cond)(data.split(Split::test));
    std::printf("polynomial-sine refit on the test split: |rho_ab| %.4f\n", std::abs(pearson(fa, fb).rho));
}

void cmd_keys(const CommonOptions &o, const std::string &features)
{
    const ExperimentConfig cfg = load_config(o);
    std::ifstream is(features);
    if (!is)
        throw std::runtime_error("cannot open " + features);
    RunManifest man = manifest_for("keys " + features, cfg);
    const auto rows = keys_from_features_csv(is, cfg.quant);
    auto os = open_out(o.out);
    write_keys_csv(rows, man, os);
    for (const auto &r : rows)
        std::printf("%-9s %7.2f dBW  KAR_AB %.4f  KAR_AE %.4f  KAR_BE %.4f  AKR %.4f\n", r.scheme.c_str(),
                    r.sigma2_db, r.metrics.kar_ab, r.metrics.kar_ae, r.metrics.kar_be, r.metrics.akr);
}

void cmd_sweep(const CommonOptions &o, const std::string &kind)
{
    const ExperimentConfig cfg = load_config(o);
    if (kind == "mse") {
        for (const auto &r : mse_ablation(cfg, o.out))
            std::printf("%-17s mse %.3g  |rho_ab| %.4f  |rho_am| %.4f  |rho_bm| %.4f\n",
                        to_string(r.loss_kind).c_str(), r.mse_ab, r.held_out.ab, r.held_out.am, r.held_out.bm);
        return;
    }
    bool all_ok = true;
    for (const auto &r : sweep_lambda(cfg, o.out)) {
        if (r.ok)
            std::printf("lambda %.2f  |rho_ab| %.4f  |rho_am| %.4f  |rho_bm| %.4f\n", r.lambda, r.held_out.ab,
                        r.held_out.am, r.held_out.bm);
        else
            std::printf("lambda %.2f  failed: %s\n", r.lambda, r.error.c_str());
        all_ok = all_ok && r.ok;
    }
    if (!all_ok)
        throw std::runtime_error("one or more sweep runs failed");
}

void cmd_run(const CommonOptions &o)
{
    const ExperimentConfig cfg = load_config(o);
    const ScenarioResult res = run_scenario(cfg, o.out);
    for (std::size_t i = 0; i < res.rho.size(); ++i) {
        const auto &r = res.rho[i];
        const auto &k = res.keys[i].metrics;
        std::printf("%-9s %7.2f dBW  rho_ab %.4f  rho_ae %.4f  rho_be %.4f  KAR_AB %.4f  KAR_AE %.4f  AKR %.4f\n",
                    r.scheme.c_str(), r.sigma2_db, r.rho_ab, r.rho_ae, r.rho_be, k.kar_ab, k.kar_ae, k.akr);
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"ris-skg: key generation under man-in-the-middle RIS attacks"};
    app.require_subcommand(1);

    CommonOptions o;
    std::string data_path, models_dir, sweep, features, kind = "lambda";

    auto *gen = app.add_subcommand("gen-data", "Simulate probing rounds and write a dataset file");
    add_common(gen, o, "Dataset file");
    auto *train = app.add_subcommand("train", "Adversarial training of the feature generators");
    add_common(train, o, "Output directory");
    train->add_option("--data", data_path, "Dataset file from gen-data (default: simulate)");
    auto *eve = app.add_subcommand("train-eve", "Train a worst-case Eve against a feature scheme");
    add_common(eve, o, "Output directory");
    eve->add_option("--models", models_dir, "Directory holding the trained generators (default: --out)");
    auto *attack = app.add_subcommand("attack-report", "Correlations of the legacy schemes and their attacks");
    add_common(attack, o, "Output directory");
    auto *skr = app.add_subcommand("skr", "Closed-form mutual-information gap over a noise sweep");
    add_common(skr, o, "CSV file");
    skr->add_option("--sweep", sweep, "sigma2=<lo>:<hi>:<steps> in dBW");
    auto *distill = app.add_subcommand("distill", "Distill trained generators and refit the explicit formula");
    add_common(distill, o, "Output directory");
    distill->add_option("--models", models_dir, "Directory holding the trained generators (default: --out)");
    auto *keys = app.add_subcommand("keys", "Key agreement metrics from a features CSV");
    add_common(keys, o, "CSV file");
    keys->add_option("--features", features, "features.csv from run")->required();
    auto *sw = app.add_subcommand("sweep", "Lambda sweep or MSE-loss ablation");
    add_common(sw, o, "Output directory");
    sw->add_option("--kind", kind, "lambda or mse")->check(CLI::IsMember({"lambda", "mse"}));
    auto *run = app.add_subcommand("run", "Full scenario: data, training, Eve, noise sweep, keys");
    add_common(run, o, "Output directory");

    CLI11_PARSE(app, argc, argv);
    try {
        if (gen->parsed())
            cmd_gen_data(o);
        else if (train->parsed())
            cmd_train(o, data_path);
        else if (eve->parsed())
            cmd_train_eve(o, models_dir);
        else if (attack->parsed())
            cmd_attack_report(o);
        else if (skr->parsed())
            cmd_skr(o, sweep);
        else if (distill->parsed())
            cmd_distill(o, models_dir);
        else if (keys->parsed())
            cmd_keys(o, features);
        else if (sw->parsed())
            cmd_sweep(o, kind);
        else if (run->parsed())
            cmd_run(o);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

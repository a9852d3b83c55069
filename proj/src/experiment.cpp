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

#include "risskg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "risskg/model_io.hpp"

namespace risskg {

namespace {

constexpr std::uint64_t kEvalSeedOffset = 1000003;
constexpr std::uint64_t kEveSeedOffset = 17;

std::string num(double v) { return format_double(v); }

std::ofstream open_out(const std::filesystem::path &path)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    return os;
}

void write_train_log(const std::vector<TrainLogRow> &log, const RunManifest &manifest, const std::filesystem::path &path)
{
    auto os = open_out(path);
    os << manifest.csv_comment() << "epoch,loss_gen,loss_adv,rho_ab,rho_am,rho_bm\n";
    for (const auto &r : log)
        os << r.epoch << ',' << num(r.loss_gen) << ',' << num(r.loss_adv) << ',' << num(r.rho_ab) << ','
           << num(r.rho_am) << ',' << num(r.rho_bm) << '\n';
}

void write_eve_log(const std::vector<EveLogRow> &log, const RunManifest &manifest, const std::filesystem::path &path)
{
    auto os = open_out(path);
    os << manifest.csv_comment() << "epoch,loss,rho_ea,rho_eb\n";
    for (const auto &r : log)
        os << r.epoch << ',' << num(r.loss) << ',' << num(r.rho_ea) << ',' << num(r.rho_eb) << '\n';
}

TrainConfig seeded(TrainConfig t, std::uint64_t seed)
{
    t.seed = seed;
    return t;
}

Dataset eval_rounds(const ExperimentConfig &cfg, double sigma2_db)
{
    SystemParams p = cfg.params;
    p.sigma2 = db_to_linear(sigma2_db);
    return generate_dataset(p, cfg.grid, cfg.eval_rounds, cfg.seed + kEvalSeedOffset, GeometrySampling::uniform);
}

double abs_rho(const Eigen::VectorXd &a, const Eigen::VectorXd &b) { return std::abs(pearson(a, b).rho); }

} // namespace

std::string content_hash(const std::string &bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string RunManifest::input_hash() const
{
    return content_hash(command + "\n" + std::to_string(seed) + "\n" + config_text);
}

std::string RunManifest::csv_comment() const { return "# manifest manifest.txt input_hash=" + input_hash() + "\n"; }

void RunManifest::write(const std::filesystem::path &path) const
{
    auto os = open_out(path);
    os << "# command: " << command << "\n# input_hash: " << input_hash() << '\n';
    for (const auto &[stage, sec] : stage_seconds)
        os << "# stage " << stage << ": " << num(sec) << " s\n";
    for (const auto &a : artifacts)
        os << "# artifact: " << a << '\n';
    os << config_text;
}

SchemeFeatures legacy_features(LegacyScheme scheme, std::span<const ProbeRound> rounds, const SystemParams &params)
{
    const auto n = static_cast<Eigen::Index>(rounds.size());
    SchemeFeatures f{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const ProbeRound &r = rounds[static_cast<std::size_t>(i)];
        const FeaturePair fp = scheme == LegacyScheme::csi ? csi_features(r, params) : crossmult_features(r);
        const EveEstimate fe = scheme == LegacyScheme::csi ? csi_eve(r, params) : crossmult_eve(r);
        f.fa[i] = fp.f_alice.real();
        f.fb[i] = fp.f_bob.real();
        f.fe[i] = fe.f_eve.real();
    }
    return f;
}

PolyPair refit_poly(const AdversarialModels &models, std::span<const ProbeRound> rounds, const SystemParams &params)
{
    const Eigen::MatrixXd in_a = alice_inputs(rounds, params, models.cond);
    const Eigen::MatrixXd in_b = bob_inputs(rounds, params, models.cond);
    return {fit_poly_generator(mlp_pre_features(models.alice, in_a), in_a),
            fit_poly_generator(mlp_pre_features(models.bob, in_b), in_b)};
}

TargetFn poly_target(const PolyPair &poly, const SystemParams &params, const FeatureConditioning &cond)
{
    return [poly, params, cond](std::span<const ProbeRound> rounds) {
        return std::make_pair(poly_features(poly.alice, alice_inputs(rounds, params, cond)),
                              poly_features(poly.bob, bob_inputs(rounds, params, cond)));
    };
}

DistillReport distill_generator(const Mlp &generator, const Eigen::MatrixXd &validation_inputs,
                                const TermLibrary &library, const DistillOptions &opts)
{
    DistillReport report;
    for (const NeuronId &id : select_active_neurons(generator, validation_inputs)) {
        NeuronFit fit = distill_neuron(neuron_outputs(generator, id, validation_inputs), validation_inputs, library, opts);
        fit.neuron = id;
        report.neurons.push_back(std::move(fit));
    }
    return report;
}

TrainConfig eve_train_config(const ExperimentConfig &cfg)
{
    TrainConfig t = cfg.train;
    t.learning_rate = cfg.eve.learning_rate;
    t.adversary_learning_rate = 0.0;
    t.max_epochs = cfg.eve.max_epochs;
    t.adversary_hidden = cfg.eve.hidden;
    t.seed = cfg.seed + kEveSeedOffset;
    return t;
}

ScenarioResult run_scenario(const ExperimentConfig &cfg, const std::filesystem::path &out_dir)
{
    cfg.validate();
    std::filesystem::create_directories(out_dir);
    ScenarioResult res;
    RunManifest &man = res.manifest;
    man.command = "run --scheme " + to_string(cfg.scheme);
    man.config_text = cfg.to_text();
    man.seed = cfg.seed;

    const bool learned = cfg.scheme == Scheme::nn || cfg.scheme == Scheme::poly || cfg.scheme == Scheme::baseline;
    const std::string scheme = to_string(cfg.scheme);
    AdversarialModels models;
    PolyPair poly;
    EveModel eve;
    if (learned) {
        const Dataset data =
            run_stage(man, "gen-data", [&] { return generate_dataset(cfg.params, cfg.grid, cfg.num_rounds, cfg.seed); });
        TrainConfig tc = seeded(cfg.train, cfg.seed);
        if (cfg.scheme == Scheme::baseline)
            tc.lambda = 0.0;
        models = run_stage(man, "train", [&] { return train_adversarial(data, tc, cfg.cond); });
        run_stage(man, "save-models", [&] {
            save_mlp(models.alice, out_dir / "alice.mlp");
            save_mlp(models.bob, out_dir / "bob.mlp");
            save_mlp(models.mallory, out_dir / "mallory.mlp");
            write_train_log(models.log, man, out_dir / "train_log.csv");
        });
        man.artifacts.insert(man.artifacts.end(), {"alice.mlp", "bob.mlp", "mallory.mlp", "train_log.csv"});
        TargetFn target;
        if (cfg.scheme == Scheme::poly) {
            poly = run_stage(man, "refit", [&] { return refit_poly(models, data.split(Split::validation), cfg.params); });
            save_poly(poly.alice, out_dir / "poly_alice.poly");
            save_poly(poly.bob, out_dir / "poly_bob.poly");
            man.artifacts.insert(man.artifacts.end(), {"poly_alice.poly", "poly_bob.poly"});
            target = poly_target(poly, cfg.params, cfg.cond);
        } else {
            target = generator_target(models.alice, models.bob, cfg.params, cfg.cond);
        }
        eve = run_stage(man, "train-eve", [&] {
            return train_eve(target, cfg.params, cfg.grid, cfg.eve.num_rounds, eve_train_config(cfg), cfg.cond);
        });
        save_mlp(eve.eve, out_dir / "eve.mlp");
        write_eve_log(eve.log, man, out_dir / "eve_log.csv");
        man.artifacts.insert(man.artifacts.end(), {"eve.mlp", "eve_log.csv"});
    }

    auto features_os = open_out(out_dir / "features.csv");
    features_os << man.csv_comment() << "scheme,sigma2_dbw,index,f_a,f_b,f_e\n";
    run_stage(man, "evaluate", [&] {
        for (double s2 : cfg.sigma2_db.points()) {
            const Dataset ev = eval_rounds(cfg, s2);
            SchemeFeatures f;
            if (cfg.scheme == Scheme::csi || cfg.scheme == Scheme::crossmult) {
                f = legacy_features(cfg.scheme == Scheme::csi ? LegacyScheme::csi : LegacyScheme::crossmult, ev.rounds,
                                    ev.params);
            } else if (cfg.scheme == Scheme::poly) {
                auto [fa, fb] = poly_target(poly, ev.params, cfg.cond)(ev.rounds);
                f = {fa, fb, eve_features(eve, ev.rounds, ev.params)};
            } else {
                const FeatureSet fs = evaluate_features(models, ev.rounds, ev.params);
                f = {fs.fa, fs.fb, eve_features(eve, ev.rounds, ev.params)};
            }
            res.rho.push_back({scheme, s2, abs_rho(f.fa, f.fb), abs_rho(f.fe, f.fa), abs_rho(f.fe, f.fb)});
            res.keys.push_back({scheme, s2, key_metrics(f.fa, f.fb, f.fe, cfg.quant)});
            for (Eigen::Index i = 0; i < f.fa.size(); ++i)
                features_os << scheme << ',' << num(s2) << ',' << i << ',' << num(f.fa[i]) << ',' << num(f.fb[i])
                            << ',' << num(f.fe[i]) << '\n';
        }
    });
    man.artifacts.push_back("features.csv");

    auto rho_os = open_out(out_dir / "rho_vs_sigma2.csv");
    rho_os << man.csv_comment() << "scheme,sigma2_dbw,rho_ab,rho_ae,rho_be\n";
    for (const auto &r : res.rho)
        rho_os << r.scheme << ',' << num(r.sigma2_db) << ',' << num(r.rho_ab) << ',' << num(r.rho_ae) << ','
               << num(r.rho_be) << '\n';
    auto keys_os = open_out(out_dir / "keys.csv");
    write_keys_csv(res.keys, man, keys_os);
    man.artifacts.insert(man.artifacts.end(), {"rho_vs_sigma2.csv", "keys.csv"});
    man.write(out_dir / "manifest.txt");
    return res;
}

std::vector<LambdaRow> sweep_lambda(const ExperimentConfig &cfg, const std::filesystem::path &out_dir)
{
    cfg.validate();
    std::filesystem::create_directories(out_dir);
    RunManifest man;
    man.command = "sweep";
    man.config_text = cfg.to_text();
    man.seed = cfg.seed;

    const Dataset data =
        run_stage(man, "gen-data", [&] { return generate_dataset(cfg.params, cfg.grid, cfg.num_rounds, cfg.seed); });
    const Dataset held_out = eval_rounds(cfg, linear_to_db(cfg.params.sigma2));

    std::vector<LambdaRow> rows(cfg.lambdas.size());
    std::vector<std::vector<TrainLogRow>> logs(cfg.lambdas.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            LambdaRow &row = rows[i];
            row.lambda = cfg.lambdas[i];
            try {
                TrainConfig tc = seeded(cfg.train, cfg.seed);
                tc.lambda = row.lambda;
                const AdversarialModels m = train_adversarial(data, tc, cfg.cond);
                row.held_out = abs_correlations(evaluate_features(m, held_out.rounds, held_out.params));
                row.final_loss_gen = m.log.empty() ? 0.0 : m.log.back().loss_gen;
                row.final_loss_adv = m.log.empty() ? 0.0 : m.log.back().loss_adv;
                logs[i] = m.log;
                row.ok = true;
            } catch (const std::exception &e) {
                row.error = e.what();
            }
        }
    };
    run_stage(man, "train", [&] {
        const int n = std::max(1, std::min<int>(default_workers(), static_cast<int>(rows.size())));
        std::vector<std::jthread> pool;
        for (int w = 1; w < n; ++w)
            pool.emplace_back(worker);
        worker();
    });

    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].ok)
            continue;
        const std::string name = "train_log_lambda_" + num(rows[i].lambda) + ".csv";
        write_train_log(logs[i], man, out_dir / name);
        man.artifacts.push_back(name);
    }
    auto os = open_out(out_dir / "lambda_sweep.csv");
    os << man.csv_comment() << "lambda,status,rho_ab,rho_am,rho_bm,loss_gen,loss_adv\n";
    for (const auto &r : rows) {
        os << num(r.lambda) << ',' << (r.ok ? "ok" : "failed") << ',' << num(r.held_out.ab) << ','
           << num(r.held_out.am) << ',' << num(r.held_out.bm) << ',' << num(r.final_loss_gen) << ','
           << num(r.final_loss_adv) << '\n';
    }
    man.artifacts.push_back("lambda_sweep.csv");
    man.write(out_dir / "manifest.txt");
    return rows;
}

std::vector<AblationRow> mse_ablation(const ExperimentConfig &cfg, const std::filesystem::path &out_dir)
{
    cfg.validate();
    std::filesystem::create_directories(out_dir);
    RunManifest man;
    man.command = "mse-ablation";
    man.config_text = cfg.to_text();
    man.seed = cfg.seed;

    const Dataset data =
        run_stage(man, "gen-data", [&] { return generate_dataset(cfg.params, cfg.grid, cfg.num_rounds, cfg.seed); });
    const Dataset held_out = eval_rounds(cfg, linear_to_db(cfg.params.sigma2));
    std::vector<AblationRow> rows;
    for (LossKind kind : {LossKind::mse_adversarial, LossKind::corr_adversarial}) {
        TrainConfig tc = seeded(cfg.train, cfg.seed);
        tc.loss_kind = kind;
        const AdversarialModels m = run_stage(man, "train-" + to_string(kind), [&] { return train_adversarial(data, tc, cfg.cond); });
        const FeatureSet f = evaluate_features(m, held_out.rounds, held_out.params);
        AblationRow row;
        row.loss_kind = kind;
        row.mse_ab = mean_squared_error(f.fa, f.fb);
        // A collapsed (constant) feature has no defined correlation; report 0.
        row.held_out = {std::abs(pearson(f.fa, f.fb).rho), std::abs(pearson(f.fa, f.fm).rho),
                        std::abs(pearson(f.fb, f.fm).rho)};
        write_train_log(m.log, man, out_dir / ("train_log_" + to_string(kind) + ".csv"));
        man.artifacts.push_back("train_log_" + to_string(kind) + ".csv");
        rows.push_back(row);
    }
    auto os = open_out(out_dir / "mse_ablation.csv");
    os << man.csv_comment() << "loss_kind,mse_ab,rho_ab,rho_am,rho_bm\n";
    for (const auto &r : rows)
        os << to_string(r.loss_kind) << ',' << num(r.mse_ab) << ',' << num(r.held_out.ab) << ',' << num(r.held_out.am)
           << ',' << num(r.held_out.bm) << '\n';
    man.artifacts.push_back("mse_ablation.csv");
    man.write(out_dir / "manifest.txt");
    return rows;
}

std::vector<AttackRow> attack_report(const ExperimentConfig &cfg, const std::filesystem::path &out_dir)
{
    cfg.validate();
    std::filesystem::create_directories(out_dir);
    RunManifest man;
    man.command = "attack-report";
    man.config_text = cfg.to_text();
    man.seed = cfg.seed;
    std::vector<AttackRow> rows;
    run_stage(man, "evaluate", [&] {
        for (double s2 : cfg.sigma2_db.points()) {
            const Dataset ev = eval_rounds(cfg, s2);
            for (LegacyScheme scheme : {LegacyScheme::csi, LegacyScheme::crossmult}) {
                const auto n = static_cast<Eigen::Index>(ev.rounds.size());
                Eigen::MatrixXcd f(n, 3);
                for (Eigen::Index i = 0; i < n; ++i) {
                    const ProbeRound &r = ev.rounds[static_cast<std::size_t>(i)];
                    const FeaturePair fp = scheme == LegacyScheme::csi ? csi_features(r, ev.params) : crossmult_features(r);
                    f(i, 0) = fp.f_alice;
                    f(i, 1) = fp.f_bob;
                    f(i, 2) = (scheme == LegacyScheme::csi ? csi_eve(r, ev.params) : crossmult_eve(r)).f_eve;
                }
                for (const bool re : {true, false}) {
                    const Eigen::MatrixXd part = re ? Eigen::MatrixXd(f.real()) : Eigen::MatrixXd(f.imag());
                    rows.push_back({scheme == LegacyScheme::csi ? "csi" : "crossmult", s2, re ? "re" : "im",
                                    abs_rho(part.col(0), part.col(1)), abs_rho(part.col(2), part.col(0)),
                                    abs_rho(part.col(2), part.col(1))});
                }
            }
        }
    });
    auto os = open_out(out_dir / "attack_report.csv");
    os << man.csv_comment() << "scheme,sigma2_dbw,part,rho_ab,rho_ea,rho_eb\n";
    for (const auto &r : rows)
        os << r.scheme << ',' << num(r.sigma2_db) << ',' << r.part << ',' << num(r.rho_ab) << ',' << num(r.rho_ea)
           << ',' << num(r.rho_eb) << '\n';
    man.artifacts.push_back("attack_report.csv");
    man.write(out_dir / "manifest.txt");
    return rows;
}

std::vector<SkrRow> skr_sweep(const ExperimentConfig &cfg, const SweepRange &sigma2_db)
{
    cfg.validate();
    const CovarianceModel cov = simulate_covariance(cfg.params, cfg.skr.d_ar, cfg.skr.d_br, cfg.skr.samples, cfg.seed);
    const bool cond_ok = positivity_condition(cfg.params, cfg.skr.d_max, cfg.skr.d_ab).holds;
    std::vector<SkrRow> rows;
    for (double s2 : sigma2_db.points()) {
        SystemParams p = cfg.params;
        p.sigma2 = db_to_linear(s2);
        rows.push_back({s2, skr_gap(cov, p, cfg.skr.d_ar), cond_ok});
    }
    return rows;
}

void write_skr_csv(const std::vector<SkrRow> &rows, const RunManifest &manifest, std::ostream &os)
{
    os << manifest.csv_comment() << "sigma2_dbw,h_yb,h_yra,h_cond_joint,h_cond_pair,gap_bits,condition_ok\n";
    for (const auto &r : rows)
        os << num(r.sigma2_db) << ',' << num(r.breakdown.h_yb) << ',' << num(r.breakdown.h_yra) << ','
           << num(r.breakdown.h_cond_joint) << ',' << num(r.breakdown.h_cond_pair) << ',' << num(r.breakdown.gap)
           << ',' << (r.condition_ok ? 1 : 0) << '\n';
}

void write_keys_csv(const std::vector<KeyRow> &rows, const RunManifest &manifest, std::ostream &os)
{
    os << manifest.csv_comment() << "scheme,sigma2_dbw,kar_ab,kar_ae,kar_be,akr\n";
    for (const auto &r : rows)
        os << r.scheme << ',' << num(r.sigma2_db) << ',' << num(r.metrics.kar_ab) << ',' << num(r.metrics.kar_ae)
           << ',' << num(r.metrics.kar_be) << ',' << num(r.metrics.akr) << '\n';
}

std::vector<KeyRow> keys_from_features_csv(std::istream &is, const QuantizerConfig &quant)
{
    struct Group {
        std::string scheme;
        double sigma2_db;
        std::vector<double> fa, fb, fe;
    };
    std::vector<Group> groups;
    std::map<std::pair<std::string, std::string>, std::size_t> where;
    std::string line;
    bool header = false;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        if (!header) {
            if (line.rfind("scheme,sigma2_dbw,index,f_a,f_b,f_e", 0) != 0)
                throw std::runtime_error("features CSV: unexpected header '" + line + "'");
            header = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (cells.size() != 6)
            throw std::runtime_error("features CSV line " + std::to_string(lineno) + ": expected 6 columns");
        const auto key = std::make_pair(cells[0], cells[1]);
        auto it = where.find(key);
        if (it == where.end()) {
            it = where.emplace(key, groups.size()).first;
            groups.push_back({cells[0], parse_double(cells[1]), {}, {}, {}});
        }
        Group &g = groups[it->second];
        g.fa.push_back(parse_double(cells[3]));
        g.fb.push_back(parse_double(cells[4]));
        g.fe.push_back(parse_double(cells[5]));
    }
    if (!header)
        throw std::runtime_error("features CSV: missing header");
    std::vector<KeyRow> rows;
    for (const auto &g : groups) {
        auto vec = [](const std::vector<double> &v) {
            return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
        };
        rows.push_back({g.scheme, g.sigma2_db, key_metrics(vec(g.fa), vec(g.fb), vec(g.fe), quant)});
    }
    return rows;
}

} // namespace risskg

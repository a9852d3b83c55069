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

#include "risskg/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "risskg/model_io.hpp"

namespace risskg {

namespace {

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        out.push_back(trim(item));
    return out;
}

double to_double(const std::string &key, const std::string &v)
{
    try {
        return parse_double(trim(v));
    } catch (const std::exception &) {
        throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
    }
}

long long to_int(const std::string &key, const std::string &v)
{
    const double d = to_double(key, v);
    if (d != std::floor(d))
        throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + v + "'");
    return static_cast<long long>(d);
}

std::vector<int> to_int_list(const std::string &key, const std::string &v)
{
    std::vector<int> out;
    for (const auto &item : split(v, ','))
        if (!item.empty())
            out.push_back(static_cast<int>(to_int(key, item)));
    return out;
}

std::string list_text(const std::vector<int> &v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string list_text(const std::vector<double> &v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + format_double(v[i]);
    return s;
}

struct Field {
    std::string key;
    std::function<void(const std::string &)> set;
    std::function<std::string()> get; // empty for write-only aliases
};

std::vector<Field> fields(ExperimentConfig &c)
{
    std::vector<Field> f;
    auto num = [&f](const std::string &key, double &ref) {
        f.push_back({key, [&ref, key](const std::string &v) { ref = to_double(key, v); },
                     [&ref] { return format_double(ref); }});
    };
    auto db = [&f](const std::string &key, double &ref) {
        f.push_back({key, [&ref, key](const std::string &v) { ref = db_to_linear(to_double(key, v)); }, {}});
    };
    auto integer = [&f](const std::string &key, auto &ref) {
        f.push_back({key,
                     [&ref, key](const std::string &v) {
                         ref = static_cast<std::remove_reference_t<decltype(ref)>>(to_int(key, v));
                     },
                     [&ref] { return std::to_string(ref); }});
    };
    auto ints = [&f](const std::string &key, std::vector<int> &ref) {
        f.push_back({key, [&ref, key](const std::string &v) { ref = to_int_list(key, v); },
                     [&ref] { return list_text(ref); }});
    };

    num("params.c0", c.params.c0);
    db("params.c0_db", c.params.c0);
    num("params.alpha", c.params.alpha);
    integer("params.num_paths", c.params.num_paths);
    num("params.pt", c.params.pt);
    db("params.pt_db", c.params.pt);
    num("params.sigma2", c.params.sigma2);
    db("params.sigma2_db", c.params.sigma2);
    num("params.amp_ae", c.params.amp_ae);
    db("params.amp_ae_db", c.params.amp_ae);
    integer("params.mx", c.params.mx);
    integer("params.my", c.params.my);
    num("params.wavelength", c.params.wavelength);
    num("params.elem_spacing", c.params.elem_spacing);

    integer("grid.angle_splits", c.grid.angle_splits);
    integer("grid.dist_splits", c.grid.dist_splits);
    num("grid.dist_min", c.grid.dist_min);
    num("grid.dist_max", c.grid.dist_max);

    integer("data.num_rounds", c.num_rounds);
    integer("data.eval_rounds", c.eval_rounds);

    num("train.learning_rate", c.train.learning_rate);
    integer("train.batch_size", c.train.batch_size);
    integer("train.max_epochs", c.train.max_epochs);
    num("train.lambda", c.train.lambda);
    f.push_back({"train.loss_kind", [&c](const std::string &v) { c.train.loss_kind = loss_kind_from_string(trim(v)); },
                 [&c] { return to_string(c.train.loss_kind); }});
    ints("train.generator_hidden", c.train.generator_hidden);
    ints("train.adversary_hidden", c.train.adversary_hidden);
    integer("train.adversary_steps", c.train.adversary_steps);
    num("train.adversary_learning_rate", c.train.adversary_learning_rate);

    integer("eve.max_epochs", c.eve.max_epochs);
    integer("eve.num_rounds", c.eve.num_rounds);
    ints("eve.hidden", c.eve.hidden);
    num("eve.learning_rate", c.eve.learning_rate);

    f.push_back({"features.norm",
                 [&c](const std::string &v) {
                     const std::string s = trim(v);
                     if (s == "agc")
                         c.cond.norm = SignalNorm::agc;
                     else if (s == "none")
                         c.cond.norm = SignalNorm::none;
                     else
                         throw std::invalid_argument("config: features.norm must be agc or none");
                 },
                 [&c] { return std::string(c.cond.norm == SignalNorm::agc ? "agc" : "none"); }});
    f.push_back({"features.ris_layout",
                 [&c](const std::string &v) {
                     const std::string s = trim(v);
                     if (s == "phase_compensated")
                         c.cond.layout = RisLayout::phase_compensated;
                     else if (s == "raw")
                         c.cond.layout = RisLayout::raw;
                     else
                         throw std::invalid_argument("config: features.ris_layout must be phase_compensated or raw");
                 },
                 [&c] { return std::string(c.cond.layout == RisLayout::raw ? "raw" : "phase_compensated"); }});

    num("quant.gamma", c.quant.gamma);
    f.push_back({"quant.spread",
                 [&c](const std::string &v) {
                     const std::string s = trim(v);
                     if (s == "variance")
                         c.quant.spread = SpreadMode::variance;
                     else if (s == "std_dev")
                         c.quant.spread = SpreadMode::std_dev;
                     else
                         throw std::invalid_argument("config: quant.spread must be variance or std_dev");
                 },
                 [&c] { return std::string(c.quant.spread == SpreadMode::variance ? "variance" : "std_dev"); }});

    f.push_back({"sweep.sigma2_db", [&c](const std::string &v) { c.sigma2_db = SweepRange::parse(v); },
                 [&c] {
                     return format_double(c.sigma2_db.lo) + ":" + format_double(c.sigma2_db.hi) + ":" +
                            std::to_string(c.sigma2_db.steps);
                 }});
    f.push_back({"sweep.lambdas",
                 [&c](const std::string &v) {
                     c.lambdas.clear();
                     for (const auto &item : split(v, ','))
                         if (!item.empty())
                             c.lambdas.push_back(to_double("sweep.lambdas", item));
                 },
                 [&c] { return list_text(c.lambdas); }});

    num("skr.d_ar", c.skr.d_ar);
    num("skr.d_br", c.skr.d_br);
    integer("skr.samples", c.skr.samples);
    num("skr.d_max", c.skr.d_max);
    num("skr.d_ab", c.skr.d_ab);

    f.push_back({"scheme", [&c](const std::string &v) { c.scheme = scheme_from_string(trim(v)); },
                 [&c] { return to_string(c.scheme); }});
    integer("seed", c.seed);
    return f;
}

} // namespace

ConfigFile ConfigFile::parse(const std::string &text)
{
    ConfigFile cfg;
    std::stringstream ss(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        cfg.values_[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path &path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open config " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str());
}

std::string to_string(Scheme s)
{
    switch (s) {
    case Scheme::csi:
        return "csi";
    case Scheme::crossmult:
        return "crossmult";
    case Scheme::nn:
        return "nn";
    case Scheme::poly:
        return "poly";
    case Scheme::baseline:
        break;
    }
    return "baseline";
}

Scheme scheme_from_string(const std::string &name)
{
    for (Scheme s : {Scheme::csi, Scheme::crossmult, Scheme::nn, Scheme::poly, Scheme::baseline})
        if (to_string(s) == name)
            return s;
    throw std::invalid_argument("unknown scheme '" + name + "' (csi, crossmult, nn, poly, baseline)");
}

std::vector<double> SweepRange::points() const
{
    if (steps < 1)
        throw std::invalid_argument("SweepRange: steps must be >= 1");
    if (steps == 1)
        return {lo};
    std::vector<double> p(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
        p[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
    p.back() = hi;
    return p;
}

SweepRange SweepRange::parse(const std::string &text)
{
    const auto parts = split(text, ':');
    if (parts.size() != 3)
        throw std::invalid_argument("sweep range '" + text + "' must look like lo:hi:steps");
    SweepRange r{to_double("sweep", parts[0]), to_double("sweep", parts[1]),
                 static_cast<int>(to_int("sweep", parts[2]))};
    if (r.steps < 1)
        throw std::invalid_argument("sweep range needs at least one step");
    return r;
}

ExperimentConfig ExperimentConfig::desk()
{
    ExperimentConfig c;
    c.scale = "desk";
    c.params = SystemParams::desk();
    c.grid.dist_max = 25.0;
    c.num_rounds = 100000;
    c.eval_rounds = 20000;
    c.train.learning_rate = 3e-4;
    c.train.max_epochs = 20000;
    c.train.generator_hidden = {64, 32};
    c.train.adversary_hidden = {128, 64};
    c.train.adversary_steps = 1;
    c.eve = EveSettings{};
    return c;
}

ExperimentConfig ExperimentConfig::paper()
{
    ExperimentConfig c;
    c.scale = "paper";
    c.params = SystemParams::paper();
    c.grid.dist_max = 25.0;
    c.num_rounds = 10000000;
    c.eval_rounds = 100000;
    c.train.learning_rate = 1e-5;
    c.train.max_epochs = 200000;
    c.train.generator_hidden = {512, 128};
    c.train.adversary_hidden = {1024, 512, 128};
    c.train.adversary_steps = 1;
    c.eve.max_epochs = 1500000;
    c.eve.num_rounds = 10000000;
    c.eve.hidden = {2048, 512, 128};
    c.eve.learning_rate = 1e-5;
    return c;
}

ExperimentConfig ExperimentConfig::preset(const std::string &scale)
{
    if (scale == "desk")
        return desk();
    if (scale == "paper")
        return paper();
    throw std::invalid_argument("unknown scale '" + scale + "' (desk, paper)");
}

void ExperimentConfig::apply(const ConfigFile &file)
{
    auto table = fields(*this);
    for (const auto &[key, value] : file.values()) {
        if (key == "scale")
            continue; // selects the preset, handled before apply()
        bool found = false;
        for (auto &f : table)
            if (f.key == key) {
                f.set(value);
                found = true;
                break;
            }
        if (!found)
            throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

void ExperimentConfig::validate() const
{
    params.validate();
    grid.validate();
    train.validate();
    quant.validate();
    if (num_rounds < 10 || eval_rounds < 2)
        throw std::invalid_argument("config: data.num_rounds must be >= 10 and data.eval_rounds >= 2");
    if (eve.max_epochs < 0 || eve.num_rounds < 2 || !(eve.learning_rate > 0))
        throw std::invalid_argument("config: invalid eve settings");
    if (sigma2_db.steps < 1)
        throw std::invalid_argument("config: empty sigma2 sweep");
    if (lambdas.empty())
        throw std::invalid_argument("config: empty lambda list");
    for (double l : lambdas)
        if (!(l >= 0))
            throw std::invalid_argument("config: lambdas must be >= 0");
    if (!(skr.d_ar >= 1) || !(skr.d_br >= 1) || !(skr.d_max >= 1) || !(skr.d_ab >= 1))
        throw std::invalid_argument("config: skr distances must be >= 1 m");
}

std::string ExperimentConfig::to_text() const
{
    auto self = *this;
    std::string out = "scale = " + scale + "\n";
    for (const auto &f : fields(self))
        if (f.get)
            out += f.key + " = " + f.get() + "\n";
    return out;
}

} // namespace risskg

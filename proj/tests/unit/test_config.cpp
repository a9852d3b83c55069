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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "risskg/config.hpp"

namespace risskg {
namespace {

TEST(ConfigFile, SectionsCommentsAndOverrides)
{
    const auto f = ConfigFile::parse("seed = 4   # trailing comment\n"
                                     "# full-line comment\n"
                                     "\n"
                                     "[train]\n"
                                     "lambda = 0.5\n"
                                     "lambda = 0.6\n"
                                     "[ params ]\n"
                                     "  mx=2  \n");
    EXPECT_EQ(f.values().size(), 3u);
    EXPECT_EQ(f.values().at("seed"), "4");
    EXPECT_EQ(f.values().at("train.lambda"), "0.6");
    EXPECT_EQ(f.values().at("params.mx"), "2");
    EXPECT_FALSE(f.has("lambda"));
}

TEST(ConfigFile, MalformedLinesThrow)
{
    EXPECT_THROW(ConfigFile::parse("seed 4\n"), std::invalid_argument);
    EXPECT_THROW(ConfigFile::parse("[train\nlambda = 1\n"), std::invalid_argument);
    EXPECT_THROW(ConfigFile::parse(" = 3\n"), std::invalid_argument);
    EXPECT_THROW(ConfigFile::load("/nonexistent/risskg.cfg"), std::runtime_error);
}

TEST(ConfigFile, LoadFromDisk)
{
    const auto path = std::filesystem::temp_directory_path() / "risskg_config_test.cfg";
    {
        std::ofstream os(path);
        os << "[data]\nnum_rounds = 1234\n";
    }
    const auto f = ConfigFile::load(path);
    EXPECT_EQ(f.values().at("data.num_rounds"), "1234");
    std::filesystem::remove(path);
}

TEST(Scheme, NamesRoundTrip)
{
    for (Scheme s : {Scheme::csi, Scheme::crossmult, Scheme::nn, Scheme::poly, Scheme::baseline})
        EXPECT_EQ(scheme_from_string(to_string(s)), s);
    EXPECT_THROW(scheme_from_string("quantum"), std::invalid_argument);
}

TEST(SweepRange, PointsAreEvenAndEndExactly)
{
    const SweepRange r{-115.0, -90.0, 6};
    const auto p = r.points();
    ASSERT_EQ(p.size(), 6u);
    for (std::size_t i = 0; i < p.size(); ++i)
        EXPECT_NEAR(p[i], -115.0 + 5.0 * static_cast<double>(i), 1e-12);
    EXPECT_EQ(p.front(), -115.0);
    EXPECT_EQ(p.back(), -90.0);
    EXPECT_EQ((SweepRange{-100.0, 0.0, 1}).points(), std::vector<double>{-100.0});
    EXPECT_THROW((SweepRange{0.0, 1.0, 0}).points(), std::invalid_argument);
}

TEST(SweepRange, Parse)
{
    const auto r = SweepRange::parse("-120:-100:3");
    EXPECT_EQ(r.lo, -120.0);
    EXPECT_EQ(r.hi, -100.0);
    EXPECT_EQ(r.steps, 3);
    EXPECT_THROW(SweepRange::parse("-120:-100"), std::invalid_argument);
    EXPECT_THROW(SweepRange::parse("a:b:3"), std::invalid_argument);
    EXPECT_THROW(SweepRange::parse("0:1:0"), std::invalid_argument);
    EXPECT_THROW(SweepRange::parse("0:1:2.5"), std::invalid_argument);
}

TEST(ExperimentConfig, PresetsValidateAndDiffer)
{
    const auto desk = ExperimentConfig::preset("desk");
    const auto paper = ExperimentConfig::preset("paper");
    EXPECT_NO_THROW(desk.validate());
    EXPECT_NO_THROW(paper.validate());
    EXPECT_EQ(desk.scale, "desk");
    EXPECT_EQ(paper.scale, "paper");
    EXPECT_EQ(desk.params.num_elements(), 16);
    EXPECT_EQ(paper.params.num_elements(), 1600);
    EXPECT_EQ(paper.train.generator_hidden, (std::vector<int>{512, 128}));
    EXPECT_EQ(paper.train.adversary_hidden, (std::vector<int>{1024, 512, 128}));
    EXPECT_EQ(paper.eve.hidden, (std::vector<int>{2048, 512, 128}));
    EXPECT_EQ(paper.train.learning_rate, 1e-5);
    EXPECT_LT(desk.num_rounds, paper.num_rounds);
    EXPECT_THROW(ExperimentConfig::preset("huge"), std::invalid_argument);
}

TEST(ExperimentConfig, ApplyOverridesAndConvertsDecibels)
{
    auto c = ExperimentConfig::desk();
    c.apply(ConfigFile::parse("scale = desk\n"
                              "seed = 9\n"
                              "scheme = crossmult\n"
                              "[params]\n"
                              "sigma2_db = -100\n"
                              "amp_ae_db = 30\n"
                              "[train]\n"
                              "lambda = 0.4\n"
                              "generator_hidden = 8, 4\n"
                              "loss_kind = mse_adversarial\n"
                              "[sweep]\n"
                              "sigma2_db = -110:-100:3\n"
                              "lambdas = 0.1,0.9\n"
                              "[quant]\n"
                              "spread = std_dev\n"));
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.scheme, Scheme::crossmult);
    EXPECT_NEAR(c.params.sigma2, 1e-10, 1e-22);
    EXPECT_NEAR(c.params.amp_ae, 1000.0, 1e-9);
    EXPECT_EQ(c.train.lambda, 0.4);
    EXPECT_EQ(c.train.generator_hidden, (std::vector<int>{8, 4}));
    EXPECT_EQ(c.train.loss_kind, LossKind::mse_adversarial);
    EXPECT_EQ(c.sigma2_db.steps, 3);
    EXPECT_EQ(c.lambdas, (std::vector<double>{0.1, 0.9}));
    EXPECT_EQ(c.quant.spread, SpreadMode::std_dev);
}

TEST(ExperimentConfig, ApplyRejectsBadInput)
{
    auto c = ExperimentConfig::desk();
    EXPECT_THROW(c.apply(ConfigFile::parse("train.lamda = 0.4\n")), std::invalid_argument);
    EXPECT_THROW(c.apply(ConfigFile::parse("seed = many\n")), std::invalid_argument);
    EXPECT_THROW(c.apply(ConfigFile::parse("train.batch_size = 6.5\n")), std::invalid_argument);
    EXPECT_THROW(c.apply(ConfigFile::parse("features.norm = loud\n")), std::invalid_argument);
    EXPECT_THROW(c.apply(ConfigFile::parse("scheme = rot13\n")), std::invalid_argument);
}

TEST(ExperimentConfig, ValidateCatchesInconsistentSettings)
{
    auto c = ExperimentConfig::desk();
    c.lambdas.clear();
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = ExperimentConfig::desk();
    c.lambdas = {-0.1};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = ExperimentConfig::desk();
    c.skr.d_ar = 0.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = ExperimentConfig::desk();
    c.num_rounds = 5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(ExperimentConfig, TextRoundTripIsExact)
{
    auto c = ExperimentConfig::desk();
    c.seed = 42;
    c.train.lambda = 0.3;
    c.params.sigma2 = 3.1622776601683794e-12;
    c.lambdas = {0.25, 0.75};
    const std::string text = c.to_text();
    EXPECT_EQ(text.rfind("scale = desk\n", 0), 0u);

    auto back = ExperimentConfig::desk();
    back.apply(ConfigFile::parse(text));
    EXPECT_EQ(back.to_text(), text);
    EXPECT_EQ(back.seed, 42u);
    EXPECT_EQ(back.params.sigma2, c.params.sigma2);
    EXPECT_EQ(back.lambdas, c.lambdas);
}

} // namespace
} // namespace risskg

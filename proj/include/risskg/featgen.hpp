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

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "risskg/core.hpp"
#include "risskg/mlp.hpp"

namespace risskg {

inline constexpr int kPolyTerms = 81;

/// Exponents (m, n, p, q) of Re(x)^m Im(x)^n Re(y)^p Im(y)^q, each in {0,1,2}.
using Exponents = std::array<int, 4>;

/// Nesting of the four exponents from outermost to innermost loop. The
/// default {0,1,2,3} is the lexicographic order with m outermost.
using BasisOrder = std::array<int, 4>;
inline constexpr BasisOrder kLexicographicOrder{0, 1, 2, 3};

Exponents basis_exponents(int index, const BasisOrder &order = kLexicographicOrder);

/// The 81 monomials of (Re x, Im x, Re y, Im y) in basis order.
Eigen::VectorXd poly_basis(Complex x, Complex y, const BasisOrder &order = kLexicographicOrder);

/// N x 81 design matrix, one row per sample.
Eigen::MatrixXd design_matrix(std::span<const Complex> xs, std::span<const Complex> ys,
                              const BasisOrder &order = kLexicographicOrder);

/// strict: a rank-deficient design is an error.
/// minimum_norm: the minimum-norm least-squares solution is returned.
enum class RankPolicy { strict, minimum_norm };

/// Least squares over the 81-column design via column-pivoted Householder QR
/// (strict) or a complete orthogonal decomposition (minimum_norm).
Eigen::VectorXd fit_polynomial(const Eigen::VectorXd &targets, std::span<const Complex> xs,
                               std::span<const Complex> ys, RankPolicy policy = RankPolicy::strict,
                               const BasisOrder &order = kLexicographicOrder);

struct PolyGenerator {
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(kPolyTerms);
    BasisOrder order = kLexicographicOrder;

    /// rho^T z before the sine.
    double pre_feature(Complex x, Complex y) const;
};

/// sin(rho^T poly_basis(x, y)).
double explicit_feature(const PolyGenerator &gen, Complex x, Complex y);

/// Features for a 4 x N batch of (Re x, Im x, Re y, Im y) columns; `pre`
/// selects rho^T z instead of its sine.
Eigen::VectorXd poly_features(const PolyGenerator &gen, const Eigen::MatrixXd &inputs, bool pre = false);

/// Least-squares refit of a generator to pre-activation targets over a
/// 4 x N input batch.
PolyGenerator fit_poly_generator(const Eigen::VectorXd &targets, const Eigen::MatrixXd &inputs,
                                 RankPolicy policy = RankPolicy::minimum_norm);

/// The published 81-coefficient realization, reading order mapped onto the
/// lexicographic basis.
PolyGenerator appendix_d_generator();

/// x - 2 pi floor(x / 2 pi), in [0, 2 pi).
double mod_2pi(double x);

/// Text format: `polyv1 81` then one coefficient per line.
void write_poly(const PolyGenerator &gen, std::ostream &os);
PolyGenerator read_poly(std::istream &is);
void save_poly(const PolyGenerator &gen, const std::filesystem::path &path);
PolyGenerator load_poly(const std::filesystem::path &path);

/// A hidden unit addressed by layer index and row.
struct NeuronId {
    std::size_t layer = 0;
    Eigen::Index unit = 0;
    bool operator==(const NeuronId &) const = default;
};

/// Hidden units (all layers except the output) whose post-activation summed
/// over the validation batch is strictly positive.
std::vector<NeuronId> select_active_neurons(const Mlp &model, const Eigen::MatrixXd &validation_inputs);

/// Post-activation of one hidden unit over a batch.
Eigen::VectorXd neuron_outputs(const Mlp &model, const NeuronId &id, const Eigen::MatrixXd &inputs);

enum class TermCategory { polynomial, exponential, logarithmic, other };

std::string to_string(TermCategory cat);

/// Dictionary of candidate terms over the four real inputs
/// u = (Re x, Im x, Re y, Im y): the constant, the 80 monomials with every
/// exponent <= 2, exp(s u_i) and log(1 + s |u_i|) for a small set of scales.
struct TermLibrary {
    std::vector<double> exp_scales{0.5, 1.0, 2.0};
    std::vector<double> log_scales{0.5, 1.0, 2.0};

    std::size_t size() const;
    std::string descriptor(std::size_t term) const;
    TermCategory category(std::size_t term) const;
    /// Samples x size() matrix of term values; `inputs` is 4 x samples.
    Eigen::MatrixXd evaluate(const Eigen::MatrixXd &inputs) const;
};

struct FittedTerm {
    std::size_t term = 0;
    std::string descriptor;
    TermCategory category = TermCategory::other;
    double coefficient = 0.0;
    double standardized = 0.0;   ///< coefficient * std(term) / std(target)
    double r2_gain = 0.0;        ///< R^2 improvement when the term entered
};

struct NeuronFit {
    NeuronId neuron;
    double intercept = 0.0;
    std::vector<FittedTerm> terms;   ///< in selection order
    double r2 = 0.0;
    /// Index into `terms` of the dominant term, -1 for a constant neuron.
    int dominant = -1;

    TermCategory dominant_category() const;
};

struct DistillOptions {
    std::size_t max_terms = 6;
    double min_r2_gain = 1e-4;
};

/// Greedy forward selection over the library: each step adds the term with
/// the largest R^2 improvement, then all chosen terms are refit jointly. The
/// dominant term has the largest |standardized coefficient|, ties broken by
/// R^2 improvement. Needs at least 10 * library size samples.
NeuronFit distill_neuron(const Eigen::VectorXd &outputs, const Eigen::MatrixXd &inputs, const TermLibrary &library,
                         const DistillOptions &opts = {});

struct DistillReport {
    std::vector<NeuronFit> neurons;
};

/// Counts of dominant-term categories; constant neurons count as polynomial.
std::map<TermCategory, std::size_t> term_frequency(std::span<const DistillReport> reports);

/// CSV rows {neuron_id, term_descriptor, coefficient, r2}.
void write_distill_csv(const DistillReport &report, std::ostream &os);

} // namespace risskg

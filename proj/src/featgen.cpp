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

#include "risskg/featgen.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "risskg/model_io.hpp"

namespace risskg {

Exponents basis_exponents(int index, const BasisOrder &order)
{
    if (index < 0 || index >= kPolyTerms)
        throw std::out_of_range("basis_exponents: index outside [0, 81)");
    Exponents e{};
    for (int k = 3; k >= 0; --k) {
        e[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = index % 3;
        index /= 3;
    }
    return e;
}

Eigen::VectorXd poly_basis(Complex x, Complex y, const BasisOrder &order)
{
    const std::array<double, 4> u{x.real(), x.imag(), y.real(), y.imag()};
    std::array<std::array<double, 3>, 4> pw{};
    for (std::size_t i = 0; i < 4; ++i)
        pw[i] = {1.0, u[i], u[i] * u[i]};
    Eigen::VectorXd z(kPolyTerms);
    for (int t = 0; t < kPolyTerms; ++t) {
        const Exponents e = basis_exponents(t, order);
        z[t] = pw[0][static_cast<std::size_t>(e[0])] * pw[1][static_cast<std::size_t>(e[1])] *
               pw[2][static_cast<std::size_t>(e[2])] * pw[3][static_cast<std::size_t>(e[3])];
    }
    return z;
}

Eigen::MatrixXd design_matrix(std::span<const Complex> xs, std::span<const Complex> ys, const BasisOrder &order)
{
    if (xs.size() != ys.size())
        throw std::invalid_argument("design_matrix: x and y sample counts differ");
    Eigen::MatrixXd d(static_cast<Eigen::Index>(xs.size()), kPolyTerms);
    for (std::size_t i = 0; i < xs.size(); ++i)
        d.row(static_cast<Eigen::Index>(i)) = poly_basis(xs[i], ys[i], order).transpose();
    return d;
}

Eigen::VectorXd fit_polynomial(const Eigen::VectorXd &targets, std::span<const Complex> xs,
                               std::span<const Complex> ys, RankPolicy policy, const BasisOrder &order)
{
    if (xs.size() < static_cast<std::size_t>(kPolyTerms))
        throw std::invalid_argument("fit_polynomial: need at least 81 samples");
    if (targets.size() != static_cast<Eigen::Index>(xs.size()))
        throw std::invalid_argument("fit_polynomial: target count differs from sample count");
    const Eigen::MatrixXd d = design_matrix(xs, ys, order);
    if (policy == RankPolicy::minimum_norm)
        return d.completeOrthogonalDecomposition().solve(targets);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d);
    if (qr.rank() < kPolyTerms)
        throw std::domain_error("fit_polynomial: design matrix is rank deficient (rank " +
                                std::to_string(qr.rank()) + ")");
    return qr.solve(targets);
}

double PolyGenerator::pre_feature(Complex x, Complex y) const
{
    if (coeffs.size() != kPolyTerms)
        throw std::logic_error("PolyGenerator: expected 81 coefficients");
    return coeffs.dot(poly_basis(x, y, order));
}

double explicit_feature(const PolyGenerator &gen, Complex x, Complex y) { return std::sin(gen.pre_feature(x, y)); }

namespace {

void split_inputs(const Eigen::MatrixXd &inputs, std::vector<Complex> &xs, std::vector<Complex> &ys)
{
    if (inputs.rows() != 4)
        throw std::invalid_argument("poly inputs must have 4 rows (Re x, Im x, Re y, Im y)");
    xs.resize(static_cast<std::size_t>(inputs.cols()));
    ys.resize(xs.size());
    for (Eigen::Index i = 0; i < inputs.cols(); ++i) {
        xs[static_cast<std::size_t>(i)] = {inputs(0, i), inputs(1, i)};
        ys[static_cast<std::size_t>(i)] = {inputs(2, i), inputs(3, i)};
    }
}

} // namespace

Eigen::VectorXd poly_features(const PolyGenerator &gen, const Eigen::MatrixXd &inputs, bool pre)
{
    std::vector<Complex> xs, ys;
    split_inputs(inputs, xs, ys);
    Eigen::VectorXd f(inputs.cols());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double v = gen.pre_feature(xs[i], ys[i]);
        f[static_cast<Eigen::Index>(i)] = pre ? v : std::sin(v);
    }
    return f;
}

PolyGenerator fit_poly_generator(const Eigen::VectorXd &targets, const Eigen::MatrixXd &inputs, RankPolicy policy)
{
    std::vector<Complex> xs, ys;
    split_inputs(inputs, xs, ys);
    PolyGenerator gen;
    gen.coeffs = fit_polynomial(targets, xs, ys, policy, gen.order);
    return gen;
}

PolyGenerator appendix_d_generator()
{
    static const double published[kPolyTerms] = {
        0, 0.0330, -0.0104, 0, 0, 0, 0, -0.0207, -0.0531,
        0, -13.0482, 0, -19.6748, 0, 0.0457, -0.0117, -0.0302, 0.0430,
        -0.1009, -0.0136, 0.1295, 0, -0.3157, -0.0161, -0.3361, 0.0172, 0.0366,
        0, -19.7018, 0, 13.1063, 0, -0.0264, -0.0119, 0.0605, 0,
        0, 0, -0.3254, 0.0261, -0.9464, -0.0246, 0.3199, 0, 0,
        0, 0.0301, 0, 0, 0, 0.0106, 0.0128, -0.0469, 0.0153,
        -0.1054, -0.0153, -0.3372, 0, 0.3190, 0.0205, 0.1345, 0, 0.0309,
        0, 0, 0, 0.0102, 0, -0.0250, 0, 0.0298, 0,
        0, 0, 0, -0.0143, 0, 0.0167, 0, 0, -0.0250,
    };
    PolyGenerator gen;
    gen.coeffs = Eigen::Map<const Eigen::VectorXd>(published, kPolyTerms);
    return gen;
}

double mod_2pi(double x)
{
    double r = x - kTwoPi * std::floor(x / kTwoPi);
    // floor can leave r == 2 pi for tiny negative x
    if (r >= kTwoPi)
        r -= kTwoPi;
    return r;
}

void write_poly(const PolyGenerator &gen, std::ostream &os)
{
    if (gen.coeffs.size() != kPolyTerms)
        throw std::invalid_argument("write_poly: expected 81 coefficients");
    os << "polyv1 " << kPolyTerms << '\n';
    for (Eigen::Index i = 0; i < gen.coeffs.size(); ++i)
        os << format_double(gen.coeffs[i]) << '\n';
}

PolyGenerator read_poly(std::istream &is)
{
    std::string magic;
    int count = 0;
    if (!(is >> magic >> count) || magic != "polyv1")
        throw std::runtime_error("read_poly: missing 'polyv1' header");
    if (count != kPolyTerms)
        throw std::runtime_error("read_poly: expected 81 coefficients, header says " + std::to_string(count));
    PolyGenerator gen;
    std::string token;
    for (int i = 0; i < kPolyTerms; ++i) {
        if (!(is >> token))
            throw std::runtime_error("read_poly: truncated file");
        gen.coeffs[i] = parse_double(token);
    }
    return gen;
}

void save_poly(const PolyGenerator &gen, const std::filesystem::path &path)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("save_poly: cannot open " + path.string());
    write_poly(gen, os);
}

PolyGenerator load_poly(const std::filesystem::path &path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("load_poly: cannot open " + path.string());
    return read_poly(is);
}

std::vector<NeuronId> select_active_neurons(const Mlp &model, const Eigen::MatrixXd &validation_inputs)
{
    Mlp::Cache cache;
    model.forward(validation_inputs, cache);
    std::vector<NeuronId> out;
    for (std::size_t l = 0; l + 1 < model.num_layers(); ++l) {
        const Eigen::VectorXd sums = cache.inputs[l + 1].rowwise().sum();
        for (Eigen::Index u = 0; u < sums.size(); ++u)
            if (sums[u] > 0)
                out.push_back({l, u});
    }
    return out;
}

Eigen::VectorXd neuron_outputs(const Mlp &model, const NeuronId &id, const Eigen::MatrixXd &inputs)
{
    if (id.layer + 1 >= model.num_layers())
        throw std::out_of_range("neuron_outputs: not a hidden layer");
    Mlp::Cache cache;
    model.forward(inputs, cache);
    const Eigen::MatrixXd &post = cache.inputs[id.layer + 1];
    if (id.unit < 0 || id.unit >= post.rows())
        throw std::out_of_range("neuron_outputs: unit index out of range");
    return post.row(id.unit).transpose();
}

std::string to_string(TermCategory cat)
{
    switch (cat) {
    case TermCategory::polynomial:
        return "polynomial";
    case TermCategory::exponential:
        return "exponential";
    case TermCategory::logarithmic:
        return "logarithmic";
    case TermCategory::other:
        break;
    }
    return "other";
}

namespace {

const char *const kInputNames[4] = {"re_x", "im_x", "re_y", "im_y"};

std::string scale_text(double s)
{
    std::ostringstream os;
    os << s;
    return os.str();
}

} // namespace

// Term layout: [0] constant, [1, 81) monomials in lexicographic order,
// then exp(s u_i) for each scale and input, then log(1 + s |u_i|).
std::size_t TermLibrary::size() const { return kPolyTerms + 4 * (exp_scales.size() + log_scales.size()); }

std::string TermLibrary::descriptor(std::size_t term) const
{
    if (term >= size())
        throw std::out_of_range("TermLibrary: term index out of range");
    if (term == 0)
        return "1";
    if (term < static_cast<std::size_t>(kPolyTerms)) {
        const Exponents e = basis_exponents(static_cast<int>(term));
        std::string s;
        for (std::size_t i = 0; i < 4; ++i) {
            if (e[i] == 0)
                continue;
            if (!s.empty())
                s += "*";
            s += kInputNames[i];
            if (e[i] == 2)
                s += "^2";
        }
        return s;
    }
    std::size_t k = term - kPolyTerms;
    if (k < 4 * exp_scales.size())
        return "exp(" + scale_text(exp_scales[k / 4]) + "*" + kInputNames[k % 4] + ")";
    k -= 4 * exp_scales.size();
    return "log(1+" + scale_text(log_scales[k / 4]) + "*|" + kInputNames[k % 4] + "|)";
}

TermCategory TermLibrary::category(std::size_t term) const
{
    if (term >= size())
        throw std::out_of_range("TermLibrary: term index out of range");
    if (term < static_cast<std::size_t>(kPolyTerms))
        return TermCategory::polynomial;
    if (term < kPolyTerms + 4 * exp_scales.size())
        return TermCategory::exponential;
    return TermCategory::logarithmic;
}

Eigen::MatrixXd TermLibrary::evaluate(const Eigen::MatrixXd &inputs) const
{
    if (inputs.rows() != 4)
        throw std::invalid_argument("TermLibrary::evaluate: expected 4 input rows");
    const Eigen::Index n = inputs.cols();
    Eigen::MatrixXd t(n, static_cast<Eigen::Index>(size()));
    for (Eigen::Index s = 0; s < n; ++s) {
        const Complex x{inputs(0, s), inputs(1, s)};
        const Complex y{inputs(2, s), inputs(3, s)};
        t.block(s, 0, 1, kPolyTerms) = poly_basis(x, y).transpose();
    }
    Eigen::Index col = kPolyTerms;
    for (double sc : exp_scales)
        for (Eigen::Index i = 0; i < 4; ++i)
            t.col(col++) = (sc * inputs.row(i).transpose().array()).exp();
    for (double sc : log_scales)
        for (Eigen::Index i = 0; i < 4; ++i)
            t.col(col++) = (1.0 + sc * inputs.row(i).transpose().array().abs()).log();
    return t;
}

TermCategory NeuronFit::dominant_category() const
{
    return dominant < 0 ? TermCategory::polynomial : terms[static_cast<std::size_t>(dominant)].category;
}

NeuronFit distill_neuron(const Eigen::VectorXd &outputs, const Eigen::MatrixXd &inputs, const TermLibrary &library,
                         const DistillOptions &opts)
{
    const auto k_lib = static_cast<Eigen::Index>(library.size());
    const Eigen::Index n = outputs.size();
    if (inputs.cols() != n)
        throw std::invalid_argument("distill_neuron: sample counts differ");
    if (n < 10 * k_lib)
        throw std::invalid_argument("distill_neuron: need at least 10x library size samples");

    NeuronFit fit;
    const double mean = outputs.mean();
    const Eigen::VectorXd yc = outputs.array() - mean;
    const double sst = yc.squaredNorm();
    fit.intercept = mean;
    if (!(sst > 1e-24 * static_cast<double>(n) * std::max(1.0, mean * mean))) {
        fit.r2 = 1.0;
        return fit;
    }

    const Eigen::MatrixXd terms = library.evaluate(inputs);
    Eigen::MatrixXd centred = terms.rowwise() - terms.colwise().mean();
    const Eigen::VectorXd col_norm2 = centred.colwise().squaredNorm();
    if (!centred.allFinite())
        throw std::domain_error("distill_neuron: non-finite library term");

    Eigen::MatrixXd q(n, 0);
    Eigen::VectorXd resid = yc;
    std::vector<Eigen::Index> chosen;
    std::vector<double> gains;
    std::vector<bool> used(static_cast<std::size_t>(k_lib), false);
    used[0] = true; // the intercept is always present
    while (chosen.size() < opts.max_terms) {
        Eigen::Index best = -1;
        double best_gain = 0.0;
        Eigen::VectorXd best_v;
        for (Eigen::Index j = 1; j < k_lib; ++j) {
            if (used[static_cast<std::size_t>(j)] || !(col_norm2[j] > 0))
                continue;
            Eigen::VectorXd v = centred.col(j);
            if (q.cols() > 0)
                v -= q * (q.transpose() * v);
            const double nv = v.squaredNorm();
            if (nv < 1e-10 * col_norm2[j])
                continue; // collinear with the terms already chosen
            const double proj = resid.dot(v);
            const double gain = proj * proj / (nv * sst);
            if (gain > best_gain) {
                best_gain = gain;
                best = j;
                best_v = std::move(v);
            }
        }
        if (best < 0 || best_gain < opts.min_r2_gain)
            break;
        if (q.cols() > 0)
            best_v -= q * (q.transpose() * best_v);
        best_v.normalize();
        q.conservativeResize(Eigen::NoChange, q.cols() + 1);
        q.col(q.cols() - 1) = best_v;
        resid -= best_v * best_v.dot(resid);
        used[static_cast<std::size_t>(best)] = true;
        chosen.push_back(best);
        gains.push_back(best_gain);
    }
    if (chosen.empty()) {
        fit.r2 = 0.0;
        return fit;
    }

    Eigen::MatrixXd a(n, static_cast<Eigen::Index>(chosen.size()));
    for (std::size_t c = 0; c < chosen.size(); ++c)
        a.col(static_cast<Eigen::Index>(c)) = centred.col(chosen[c]);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < a.cols())
        throw std::domain_error("distill_neuron: selected terms are rank deficient");
    const Eigen::VectorXd beta = qr.solve(yc);
    fit.r2 = 1.0 - (yc - a * beta).squaredNorm() / sst;
    fit.intercept = mean - terms(Eigen::all, chosen).colwise().mean().dot(beta);

    const double sd_y = std::sqrt(sst / static_cast<double>(n));
    for (std::size_t c = 0; c < chosen.size(); ++c) {
        FittedTerm t;
        t.term = static_cast<std::size_t>(chosen[c]);
        t.descriptor = library.descriptor(t.term);
        t.category = library.category(t.term);
        t.coefficient = beta[static_cast<Eigen::Index>(c)];
        t.standardized = t.coefficient * std::sqrt(col_norm2[chosen[c]] / static_cast<double>(n)) / sd_y;
        t.r2_gain = gains[c];
        fit.terms.push_back(std::move(t));
    }
    fit.dominant = 0;
    for (std::size_t c = 1; c < fit.terms.size(); ++c) {
        const auto &cur = fit.terms[c];
        const auto &top = fit.terms[static_cast<std::size_t>(fit.dominant)];
        const double a_cur = std::abs(cur.standardized);
        const double a_top = std::abs(top.standardized);
        const bool tie = std::abs(a_cur - a_top) <= 1e-9 * std::max(a_cur, a_top);
        if ((!tie && a_cur > a_top) || (tie && cur.r2_gain > top.r2_gain))
            fit.dominant = static_cast<int>(c);
    }
    return fit;
}

std::map<TermCategory, std::size_t> term_frequency(std::span<const DistillReport> reports)
{
    if (reports.empty())
        throw std::invalid_argument("term_frequency: no reports");
    std::map<TermCategory, std::size_t> hist{{TermCategory::polynomial, 0},
                                             {TermCategory::exponential, 0},
                                             {TermCategory::logarithmic, 0},
                                             {TermCategory::other, 0}};
    for (const auto &r : reports)
        for (const auto &nf : r.neurons)
            ++hist[nf.dominant_category()];
    return hist;
}

void write_distill_csv(const DistillReport &report, std::ostream &os)
{
    os << "neuron_id,term_descriptor,coefficient,r2\n";
    for (const auto &nf : report.neurons) {
        const std::string id = std::to_string(nf.neuron.layer) + ":" + std::to_string(nf.neuron.unit);
        os << id << ",1," << format_double(nf.intercept) << ',' << format_double(nf.r2) << '\n';
        for (const auto &t : nf.terms)
            os << id << ',' << t.descriptor << ',' << format_double(t.coefficient) << ',' << format_double(nf.r2)
               << '\n';
    }
}

} // namespace risskg

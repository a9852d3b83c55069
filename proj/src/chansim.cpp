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

#include "risskg/chansim.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <thread>

namespace risskg {

namespace {

constexpr std::size_t kPartitionSize = 1024;
constexpr char kDatasetMagic[8] = {'R', 'S', 'K', 'G', 'D', 'A', 'T', 'A'};

bool in_half_space(double angle) { return angle >= -kPi / 2 && angle <= kPi / 2; }

Complex unit_phase(Rng &rng) { return std::polar(1.0, uniform(rng, 0.0, kTwoPi)); }

ProbeRound make_round(const Eigen::VectorXcd &g_ar, const Eigen::VectorXcd &g_br, const Eigen::VectorXcd &w,
                      const SystemParams &params, Complex x_a, Complex x_b, Rng &rng)
{
    const Eigen::Index m = g_ar.size();
    if (g_br.size() != m || w.size() != m)
        throw std::invalid_argument("sample_probe_round: channel and phase lengths differ");

    ProbeRound r;
    r.x_a = x_a;
    r.x_b = x_b;
    r.g_ab = combined_channel(g_ar, g_br, w);
    r.y_a = r.g_ab * x_b + complex_gaussian(rng, params.sigma2);
    r.y_b = r.g_ab * x_a + complex_gaussian(rng, params.sigma2);
    r.y_r_a.resize(m);
    r.y_r_b.resize(m);
    for (Eigen::Index i = 0; i < m; ++i)
        r.y_r_a[i] = g_ar[i] * x_a + complex_gaussian(rng, params.sigma2);
    for (Eigen::Index i = 0; i < m; ++i)
        r.y_r_b[i] = g_br[i] * x_b + complex_gaussian(rng, params.sigma2);
    r.w = w;
    return r;
}

// Little-endian float64 stream helpers.
void put_f64(std::ostream &os, double v)
{
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big)
        bits = __builtin_bswap64(bits);
    os.write(reinterpret_cast<const char *>(&bits), sizeof bits);
}

double get_f64(std::istream &is)
{
    std::uint64_t bits = 0;
    is.read(reinterpret_cast<char *>(&bits), sizeof bits);
    if constexpr (std::endian::native == std::endian::big)
        bits = __builtin_bswap64(bits);
    return std::bit_cast<double>(bits);
}

template <typename T>
void put_uint(std::ostream &os, T v)
{
    for (std::size_t i = 0; i < sizeof(T); ++i)
        os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <typename T>
T get_uint(std::istream &is)
{
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<T>(static_cast<unsigned char>(is.get())) << (8 * i);
    return v;
}

void put_complex(std::ostream &os, Complex c)
{
    put_f64(os, c.real());
    put_f64(os, c.imag());
}

Complex get_complex(std::istream &is)
{
    const double re = get_f64(is);
    const double im = get_f64(is);
    return {re, im};
}

} // namespace

void SystemParams::validate() const
{
    if (!(c0 > 0))
        throw std::invalid_argument("SystemParams: c0 must be positive");
    if (!(alpha >= 2 && alpha <= 4))
        throw std::invalid_argument("SystemParams: alpha must lie in [2, 4]");
    if (num_paths < 1)
        throw std::invalid_argument("SystemParams: num_paths must be >= 1");
    if (!(pt > 0))
        throw std::invalid_argument("SystemParams: pt must be positive");
    if (!(sigma2 >= 0))
        throw std::invalid_argument("SystemParams: sigma2 must be non-negative");
    if (!(amp_ae >= 1))
        throw std::invalid_argument("SystemParams: amp_ae must be >= 1");
    if (mx < 1 || my < 1)
        throw std::invalid_argument("SystemParams: mx and my must be >= 1");
    if (!(wavelength > 0) || !(elem_spacing > 0))
        throw std::invalid_argument("SystemParams: wavelength and elem_spacing must be positive");
}

SystemParams SystemParams::desk() { return SystemParams{}; }

SystemParams SystemParams::paper()
{
    SystemParams p;
    p.mx = 40;
    p.my = 40;
    return p;
}

void LinkGeometry::validate() const
{
    if (!(distance >= 1.0))
        throw std::invalid_argument("LinkGeometry: distance must be >= 1 m");
    for (const auto &p : paths)
        if (!in_half_space(p.elevation) || !in_half_space(p.azimuth))
            throw std::invalid_argument("LinkGeometry: path angle outside [-pi/2, pi/2]");
}

void GridSpec::validate() const
{
    if (angle_splits < 1 || dist_splits < 1)
        throw std::invalid_argument("GridSpec: splits must be >= 1");
    if (!(dist_min >= 1.0) || !(dist_max >= dist_min))
        throw std::invalid_argument("GridSpec: need 1 <= dist_min <= dist_max");
}

Eigen::VectorXcd steering_vector(double elevation, double azimuth, const SystemParams &params)
{
    if (!in_half_space(elevation) || !in_half_space(azimuth))
        throw std::invalid_argument("steering_vector: angle outside [-pi/2, pi/2]");

    const double k = kTwoPi / params.wavelength;
    // a(eta, beta) = k [sin eta cos beta, sin eta sin beta, cos eta]; the first
    // coordinate of every l_m is zero.
    const double a_y = k * std::sin(elevation) * std::sin(azimuth);
    const double a_z = k * std::cos(elevation);

    // The phase separates into a row and a column term, so two short phasor
    // tables replace M complex exponentials.
    const int m_total = params.num_elements();
    const int rows_z = (m_total - 1) / params.my + 1;
    std::vector<Complex> py(static_cast<std::size_t>(params.mx));
    std::vector<Complex> pz(static_cast<std::size_t>(rows_z));
    for (int i = 0; i < params.mx; ++i)
        py[static_cast<std::size_t>(i)] = std::polar(1.0, a_y * params.elem_spacing * i);
    for (int j = 0; j < rows_z; ++j)
        pz[static_cast<std::size_t>(j)] = std::polar(1.0, a_z * params.elem_spacing * j);
    Eigen::VectorXcd v(m_total);
    for (int m = 0; m < m_total; ++m)
        v[m] = py[static_cast<std::size_t>(m % params.mx)] * pz[static_cast<std::size_t>(m / params.my)];
    return v;
}

Eigen::VectorXcd sample_direct_channel(const SystemParams &params, const LinkGeometry &geom, Rng &rng)
{
    if (geom.paths.empty())
        throw std::invalid_argument("sample_direct_channel: geometry has no paths");
    const double path_var = params.c0 * std::pow(geom.distance, -params.alpha) / static_cast<double>(geom.paths.size());

    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(params.num_elements());
    for (const auto &path : geom.paths) {
        const Complex zeta = complex_gaussian(rng, path_var);
        g += zeta * steering_vector(path.elevation, path.azimuth, params);
    }
    return g;
}

Eigen::VectorXcd sample_ris_phase(const SystemParams &params, Rng &rng)
{
    const double mag = std::sqrt(params.amp_ae);
    Eigen::VectorXcd w(params.num_elements());
    for (Eigen::Index m = 0; m < w.size(); ++m)
        w[m] = mag * unit_phase(rng);
    return w;
}

Complex combined_channel(const Eigen::VectorXcd &g_ar, const Eigen::VectorXcd &g_br, const Eigen::VectorXcd &w)
{
    if (g_ar.size() != g_br.size() || g_ar.size() != w.size())
        throw std::invalid_argument("combined_channel: length mismatch");
    Complex acc{0.0, 0.0};
    for (Eigen::Index m = 0; m < w.size(); ++m)
        acc += w[m] * (g_ar[m] * g_br[m]);
    return acc;
}

ProbeRound sample_probe_round(const Eigen::VectorXcd &g_ar, const Eigen::VectorXcd &g_br, const Eigen::VectorXcd &w,
                              const SystemParams &params, Rng &rng)
{
    const double amp = std::sqrt(params.pt);
    const Complex x_a = amp * unit_phase(rng);
    const Complex x_b = amp * unit_phase(rng);
    return make_round(g_ar, g_br, w, params, x_a, x_b, rng);
}

ProbeRound sample_probe_round(const Eigen::VectorXcd &g_ar, const Eigen::VectorXcd &g_br, const Eigen::VectorXcd &w,
                              const SystemParams &params, Complex x_a, Complex x_b, Rng &rng)
{
    return make_round(g_ar, g_br, w, params, x_a, x_b, rng);
}

LinkGeometry sample_geometry(const SystemParams &params, const GridSpec &grid, GeometrySampling mode, Rng &rng)
{
    LinkGeometry geom;
    geom.paths.resize(static_cast<std::size_t>(params.num_paths));
    if (mode == GeometrySampling::grid) {
        auto grid_point = [&](int splits, double lo, double hi) {
            if (splits == 1)
                return lo;
            const int i = std::uniform_int_distribution<int>(0, splits - 1)(rng);
            if (i == splits - 1)
                return hi;
            return std::min(hi, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(splits - 1));
        };
        geom.distance = grid_point(grid.dist_splits, grid.dist_min, grid.dist_max);
        for (auto &p : geom.paths) {
            p.elevation = grid_point(grid.angle_splits, -kPi / 2, kPi / 2);
            p.azimuth = grid_point(grid.angle_splits, -kPi / 2, kPi / 2);
        }
    } else {
        geom.distance = uniform(rng, grid.dist_min, grid.dist_max);
        for (auto &p : geom.paths) {
            p.elevation = uniform(rng, -kPi / 2, kPi / 2);
            p.azimuth = uniform(rng, -kPi / 2, kPi / 2);
        }
    }
    return geom;
}

std::span<const ProbeRound> Dataset::split(Split which) const
{
    const std::span<const ProbeRound> all(rounds);
    switch (which) {
    case Split::train:
        return all.subspan(0, train_count());
    case Split::validation:
        return all.subspan(train_count(), validation_count());
    case Split::test:
        return all.subspan(train_count() + validation_count());
    }
    return {};
}

Split Dataset::split_of(std::size_t index) const
{
    if (index < train_count())
        return Split::train;
    if (index < train_count() + validation_count())
        return Split::validation;
    return Split::test;
}

int default_workers()
{
    if (const char *env = std::getenv("RIS_SKG_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

Dataset generate_dataset(const SystemParams &params, const GridSpec &grid, std::size_t n, std::uint64_t seed,
                         GeometrySampling mode, int workers)
{
    params.validate();
    grid.validate();
    if (n < 1)
        throw std::invalid_argument("generate_dataset: n must be >= 1");

    Dataset data;
    data.params = params;
    data.rounds.resize(n);

    const std::size_t partitions = (n + kPartitionSize - 1) / kPartitionSize;
    auto fill = [&](std::size_t part) {
        Rng rng = make_rng(seed, part + 1);
        const std::size_t end = std::min(n, (part + 1) * kPartitionSize);
        for (std::size_t i = part * kPartitionSize; i < end; ++i) {
            const LinkGeometry geom_a = sample_geometry(params, grid, mode, rng);
            const LinkGeometry geom_b = sample_geometry(params, grid, mode, rng);
            const Eigen::VectorXcd g_ar = sample_direct_channel(params, geom_a, rng);
            const Eigen::VectorXcd g_br = sample_direct_channel(params, geom_b, rng);
            const Eigen::VectorXcd w = sample_ris_phase(params, rng);
            data.rounds[i] = sample_probe_round(g_ar, g_br, w, params, rng);
        }
    };

    const int n_workers = std::clamp(workers > 0 ? workers : default_workers(), 1, static_cast<int>(partitions));
    if (n_workers == 1) {
        for (std::size_t p = 0; p < partitions; ++p)
            fill(p);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (int t = 0; t < n_workers; ++t)
            pool.emplace_back([&] {
                for (std::size_t p = next++; p < partitions; p = next++)
                    fill(p);
            });
    }
    return data;
}

void write_dataset(const Dataset &data, const std::filesystem::path &path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("write_dataset: cannot open " + path.string());
    const auto &p = data.params;
    const auto m = static_cast<std::uint32_t>(p.num_elements());
    os.write(kDatasetMagic, sizeof kDatasetMagic);
    put_uint<std::uint32_t>(os, kDatasetFormatVersion);
    put_uint<std::uint32_t>(os, m);
    put_uint<std::uint64_t>(os, data.rounds.size());
    for (double v : {p.c0, p.alpha, static_cast<double>(p.num_paths), p.pt, p.sigma2, p.amp_ae,
                     static_cast<double>(p.mx), static_cast<double>(p.my), p.wavelength, p.elem_spacing})
        put_f64(os, v);

    for (const auto &r : data.rounds) {
        if (r.y_r_a.size() != m || r.y_r_b.size() != m || r.w.size() != m)
            throw std::invalid_argument("write_dataset: round vector length differs from M");
        for (Complex c : {r.x_a, r.x_b, r.y_a, r.y_b})
            put_complex(os, c);
        for (const auto *v : {&r.y_r_a, &r.y_r_b, &r.w})
            for (Eigen::Index i = 0; i < v->size(); ++i)
                put_complex(os, (*v)[i]);
        put_complex(os, r.g_ab);
    }
    if (!os)
        throw std::runtime_error("write_dataset: write failed for " + path.string());
}

Dataset read_dataset(const std::filesystem::path &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("read_dataset: cannot open " + path.string());
    char magic[sizeof kDatasetMagic];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kDatasetMagic, sizeof magic) != 0)
        throw std::runtime_error("read_dataset: bad magic in " + path.string());
    const auto version = get_uint<std::uint32_t>(is);
    if (version != kDatasetFormatVersion)
        throw std::runtime_error("read_dataset: unsupported format version " + std::to_string(version));
    const auto m = get_uint<std::uint32_t>(is);
    const auto n = get_uint<std::uint64_t>(is);

    Dataset data;
    auto &p = data.params;
    p.c0 = get_f64(is);
    p.alpha = get_f64(is);
    p.num_paths = static_cast<int>(get_f64(is));
    p.pt = get_f64(is);
    p.sigma2 = get_f64(is);
    p.amp_ae = get_f64(is);
    p.mx = static_cast<int>(get_f64(is));
    p.my = static_cast<int>(get_f64(is));
    p.wavelength = get_f64(is);
    p.elem_spacing = get_f64(is);
    if (static_cast<std::uint32_t>(p.num_elements()) != m)
        throw std::runtime_error("read_dataset: header M disagrees with mx * my");

    data.rounds.resize(n);
    for (auto &r : data.rounds) {
        r.x_a = get_complex(is);
        r.x_b = get_complex(is);
        r.y_a = get_complex(is);
        r.y_b = get_complex(is);
        for (auto *v : {&r.y_r_a, &r.y_r_b, &r.w}) {
            v->resize(m);
            for (Eigen::Index i = 0; i < v->size(); ++i)
                (*v)[i] = get_complex(is);
        }
        r.g_ab = get_complex(is);
    }
    if (!is)
        throw std::runtime_error("read_dataset: truncated file " + path.string());
    return data;
}

} // namespace risskg

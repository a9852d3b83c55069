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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "risskg/core.hpp"

namespace risskg {

/// Physical constants of one RIS-dominated link. Powers are linear (W), the
/// path loss c0 is the linear power ratio at the 1 m reference distance.
struct SystemParams {
    double c0 = 1e-3;             ///< -30 dB at 1 m
    double alpha = 3.0;           ///< path-loss exponent, [2, 4]
    int num_paths = 10;           ///< NLoS Rayleigh paths per link
    double pt = 0.1;              ///< transmit power
    double sigma2 = 3.1622776601683794e-12; ///< receiver noise variance (-115 dBW)
    double amp_ae = 1e4;          ///< RIS amplifying power (40 dB)
    int mx = 4;
    int my = 4;
    double wavelength = 0.1;
    double elem_spacing = 0.025;  ///< wavelength / 4

    int num_elements() const { return mx * my; }

    /// Throws std::invalid_argument on any violated invariant. sigma2 = 0 is
    /// accepted for noiseless diagnostics.
    void validate() const;

    /// 4x4 surface used by the desk-scale experiments.
    static SystemParams desk();
    /// 40x40 surface of the full-scale setup.
    static SystemParams paper();
};

struct PathAngles {
    double elevation = 0.0;
    double azimuth = 0.0;
};

struct LinkGeometry {
    double distance = 1.0; ///< line-of-sight distance to the RIS in meters, >= 1
    std::vector<PathAngles> paths;

    void validate() const;
};

/// One two-way probing exchange inside a coherence block.
struct ProbeRound {
    Complex x_a, x_b;          ///< sent signals, |x| = sqrt(pt)
    Complex y_a, y_b;          ///< legitimate received signals
    Eigen::VectorXcd y_r_a;    ///< RIS received from Alice
    Eigen::VectorXcd y_r_b;    ///< RIS received from Bob
    Eigen::VectorXcd w;        ///< RIS phase vector
    Complex g_ab;              ///< ground-truth combined channel (diagnostics)
};

/// Half-space UPA response: entry m is exp(j a(elev, azim) . l_m).
Eigen::VectorXcd steering_vector(double elevation, double azimuth, const SystemParams &params);

/// Multipath channel from one user to the RIS. The per-path gain variance is
/// c0 * d^-alpha / L so the per-element variance is c0 * d^-alpha.
Eigen::VectorXcd sample_direct_channel(const SystemParams &params, const LinkGeometry &geom, Rng &rng);

/// sqrt(A_E) * exp(j phi_m), phi_m ~ U[0, 2 pi).
Eigen::VectorXcd sample_ris_phase(const SystemParams &params, Rng &rng);

/// g_br^T diag(w) g_ar, summed left to right; swapping the two channels gives
/// a bit-identical result.
Complex combined_channel(const Eigen::VectorXcd &g_ar, const Eigen::VectorXcd &g_br, const Eigen::VectorXcd &w);

/// Two-way probing with private random signals of magnitude sqrt(pt).
ProbeRound sample_probe_round(const Eigen::VectorXcd &g_ar, const Eigen::VectorXcd &g_br, const Eigen::VectorXcd &w,
                              const SystemParams &params, Rng &rng);

/// Same exchange with caller-chosen sent signals (public pilots).
ProbeRound sample_probe_round(const Eigen::VectorXcd &g_ar, const Eigen::VectorXcd &g_br, const Eigen::VectorXcd &w,
                              const SystemParams &params, Complex x_a, Complex x_b, Rng &rng);

/// Geometry grid used to build training data. Angles are the angle_splits
/// evenly spaced points of [-pi/2, pi/2]; distances the dist_splits points of
/// [dist_min, dist_max].
struct GridSpec {
    int angle_splits = 100;
    int dist_splits = 1000;
    double dist_min = 1.0;
    double dist_max = 200.0;

    void validate() const;
};

enum class GeometrySampling { grid, uniform };

LinkGeometry sample_geometry(const SystemParams &params, const GridSpec &grid, GeometrySampling mode, Rng &rng);

enum class Split { train, validation, test };

struct Dataset {
    SystemParams params;
    std::vector<ProbeRound> rounds;

    std::size_t train_count() const { return rounds.size() * 7 / 10; }
    std::size_t validation_count() const { return rounds.size() * 2 / 10; }
    std::size_t test_count() const { return rounds.size() - train_count() - validation_count(); }
    std::span<const ProbeRound> split(Split which) const;
    Split split_of(std::size_t index) const;
};

/// n probing rounds, each with fresh geometry, channels and RIS phase. The
/// index range is cut into fixed partitions seeded by (seed, partition), so
/// the output only depends on (params, grid, n, seed, mode), not on workers.
/// Noise is drawn standardized and scaled, so two calls differing only in
/// params.sigma2 share every channel realization.
Dataset generate_dataset(const SystemParams &params, const GridSpec &grid, std::size_t n, std::uint64_t seed,
                         GeometrySampling mode = GeometrySampling::grid, int workers = 0);

/// Worker cap from RIS_SKG_WORKERS, else hardware concurrency.
int default_workers();

inline constexpr std::uint32_t kDatasetFormatVersion = 1;

void write_dataset(const Dataset &data, const std::filesystem::path &path);
Dataset read_dataset(const std::filesystem::path &path);

} // namespace risskg

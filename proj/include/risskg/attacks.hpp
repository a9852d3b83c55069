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

#include "risskg/chansim.hpp"

namespace risskg {

enum class LegacyScheme { csi, crossmult };

/// Common features computed independently by Alice and Bob.
struct FeaturePair {
    Complex f_alice;
    Complex f_bob;
};

/// What a man-in-the-middle RIS reconstructs from its own observations.
struct EveEstimate {
    Complex f_eve;
    LegacyScheme scheme;
};

/// Pilot-based CSI estimates h_A = y_A x_B^* / Pt and h_B = y_B x_A^* / Pt.
/// The sent signals of the round are taken to be public pilots.
FeaturePair csi_features(const ProbeRound &round, const SystemParams &params);

/// Eve estimates both RIS channels from the pilots and recombines them
/// through her own phase vector.
EveEstimate csi_eve(const ProbeRound &round, const SystemParams &params);

/// phi_A = x_A y_A, phi_B = x_B y_B.
FeaturePair crossmult_features(const ProbeRound &round);

/// phi_E = y_R^(B)^T diag(w) y_R^(A).
EveEstimate crossmult_eve(const ProbeRound &round);

} // namespace risskg

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

#include "risskg/attacks.hpp"

namespace risskg {

FeaturePair csi_features(const ProbeRound &round, const SystemParams &params)
{
    return {round.y_a * std::conj(round.x_b) / params.pt, round.y_b * std::conj(round.x_a) / params.pt};
}

EveEstimate csi_eve(const ProbeRound &round, const SystemParams &params)
{
    const Eigen::VectorXcd g_ar = round.y_r_a * (std::conj(round.x_a) / params.pt);
    const Eigen::VectorXcd g_br = round.y_r_b * (std::conj(round.x_b) / params.pt);
    return {combined_channel(g_ar, g_br, round.w), LegacyScheme::csi};
}

FeaturePair crossmult_features(const ProbeRound &round)
{
    return {round.x_a * round.y_a, round.x_b * round.y_b};
}

EveEstimate crossmult_eve(const ProbeRound &round)
{
    return {combined_channel(round.y_r_a, round.y_r_b, round.w), LegacyScheme::crossmult};
}

} // namespace risskg

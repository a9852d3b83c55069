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

#include <filesystem>
#include <iosfwd>

#include "risskg/mlp.hpp"

namespace risskg {

/// Text format: `mlpv1 <num_layers>`, then per layer `dims <in> <out> <act>`,
/// `out` lines of row-major weights and one line of biases. Values use the
/// shortest representation that round-trips, so save/load is bit-exact.
void write_mlp(const Mlp &net, std::ostream &os);
Mlp read_mlp(std::istream &is);

void save_mlp(const Mlp &net, const std::filesystem::path &path);
Mlp load_mlp(const std::filesystem::path &path);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);
double parse_double(const std::string &token);

} // namespace risskg

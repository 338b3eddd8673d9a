// Copyright 2026 The qpa-readout Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Sweep-spec files (INI):
//
//   [sweep]
//   outputs = Gamma_phi, Gamma_phi_parasitic
//   plot = line            ; line | heatmap | none
//   plot_output = Gamma_phi
//   [axes]                 ; listed outer to inner, the last varies fastest
//   G_QPA_dB = 0, 1, 2, 3
//   Phi = linspace(-pi, pi, 181)

#include <string>
#include <vector>

#include "qpa/sweep.hpp"

namespace qpa::io {

enum class PlotKind { none, line, heatmap };

struct SweepFile {
  sweep::SweepSpec spec;
  PlotKind plot = PlotKind::none;
  std::string plot_output = "Gamma_phi";
  std::string canonical;  // normalized text, hashed into the manifest
};

/// "a, b, c" or "linspace(lo, hi, n)"; entries accept the pi syntax.
std::vector<double> parse_grid(const std::string& text);

SweepFile load_sweep_file(const std::string& path);

}  // namespace qpa::io

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

// Static SVG renderings of exported tables. No analysis happens here.

#include <string>
#include <vector>

namespace qpa::io {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct PlotMeta {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string manifest_hash;  // embedded in <metadata>
};

std::string line_plot(const std::vector<Series>& series, const PlotMeta& meta);

/// z[i][j] is drawn at (x[j], y[i]); NaN cells are left blank.
std::string heatmap(const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<std::vector<double>>& z, const PlotMeta& meta,
                    const std::string& z_label);

}  // namespace qpa::io

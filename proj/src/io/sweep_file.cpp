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

#include "qpa/io/sweep_file.hpp"

#include <fstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qpa/error.hpp"
#include "qpa/io/config.hpp"
#include "qpa/io/csv.hpp"

namespace qpa::io {

std::vector<double> parse_grid(const std::string& text) {
  std::string s = boost::algorithm::trim_copy(text);
  if (s.empty()) return {};
  std::vector<std::string> parts;
  if (boost::algorithm::istarts_with(s, "linspace(")) {
    if (s.back() != ')') throw ValidationError("malformed linspace: '" + s + "'");
    const std::string inner = s.substr(9, s.size() - 10);
    boost::algorithm::split(parts, inner, boost::algorithm::is_any_of(","));
    if (parts.size() != 3) throw ValidationError("linspace needs (lo, hi, n): '" + s + "'");
    const double n = parse_number(parts[2]);
    if (!(n >= 1.0) || n != std::floor(n) || n > 1e7) throw ValidationError("linspace count must be a positive integer");
    return sweep::linspace(parse_number(parts[0]), parse_number(parts[1]), static_cast<std::size_t>(n));
  }
  boost::algorithm::split(parts, s, boost::algorithm::is_any_of(","));
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(parse_number(p));
  return out;
}

SweepFile load_sweep_file(const std::string& path) {
  namespace pt = boost::property_tree;
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open sweep spec '" + path + "'");
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError("sweep spec parse error: " + std::string(e.what()));
  }
  SweepFile f;
  for (const auto& [section, body] : tree) {
    if (section == "axes") {
      for (const auto& [name, leaf] : body) {
        sweep::AxisSpec a;
        a.axis = sweep::parse_axis(name);
        a.values = parse_grid(leaf.data());
        f.spec.axes.push_back(std::move(a));
      }
    } else if (section == "sweep") {
      for (const auto& [key, leaf] : body) {
        const std::string v = boost::algorithm::trim_copy(leaf.data());
        if (key == "outputs") {
          std::vector<std::string> names;
          boost::algorithm::split(names, v, boost::algorithm::is_any_of(","));
          for (auto& n : names) {
            boost::algorithm::trim(n);
            if (!n.empty()) f.spec.outputs.push_back(n);
          }
        } else if (key == "plot") {
          if (v == "line") f.plot = PlotKind::line;
          else if (v == "heatmap") f.plot = PlotKind::heatmap;
          else if (v == "none") f.plot = PlotKind::none;
          else throw ValidationError("plot must be line, heatmap or none");
        } else if (key == "plot_output") {
          f.plot_output = v;
        } else {
          throw ValidationError("unknown sweep key '" + key + "'");
        }
      }
    } else {
      throw ValidationError("unknown sweep-spec section '" + section + "'");
    }
  }
  f.spec = sweep::validate(std::move(f.spec));
  if (std::find(f.spec.outputs.begin(), f.spec.outputs.end(), f.plot_output) == f.spec.outputs.end() &&
      f.plot != PlotKind::none)
    throw ValidationError("plot_output must be one of the requested outputs");
  if (f.plot == PlotKind::heatmap && f.spec.axes.size() != 2) throw ValidationError("heatmap needs exactly 2 axes");
  for (const auto& a : f.spec.axes) {
    f.canonical += std::string(sweep::column(a.axis)) + "=";
    for (double v : a.values) f.canonical += format_number(v) + ";";
    f.canonical += "\n";
  }
  for (const auto& o : f.spec.outputs) f.canonical += "output=" + o + "\n";
  return f;
}

}  // namespace qpa::io

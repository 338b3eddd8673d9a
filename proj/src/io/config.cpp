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

#include "qpa/io/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qpa/error.hpp"

namespace qpa::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double plain_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) throw ValidationError("not a number: '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ValidationError(key + ": expected a non-negative integer, got '" + s + "'");
  return v;
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (v == nullptr) return std::nullopt;
  return std::string(v);
}

double parse_number(const std::string& text) {
  std::string s = trim(text);
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  const auto pos = lower.find("pi");
  if (pos == std::string::npos) return plain_number(s);
  std::string head = trim(lower.substr(0, pos));
  std::string tail = trim(lower.substr(pos + 2));
  double factor = 1.0;
  if (head == "-") {
    factor = -1.0;
  } else if (!head.empty() && head != "+") {
    if (head.back() != '*') throw ValidationError("not a number: '" + s + "'");
    head.pop_back();
    factor = plain_number(trim(head));
  }
  if (!tail.empty()) {
    if (tail.front() != '/') throw ValidationError("not a number: '" + s + "'");
    factor /= plain_number(trim(tail.substr(1)));
  }
  return factor * std::numbers::pi;
}

const std::map<std::string, std::string>& config_schema() {
  static const std::map<std::string, std::string> schema = {
      {"device.kappa_over_2pi_hz", ""},
      {"device.chi_over_2pi_hz", ""},
      {"device.omega_qpa_over_2pi_hz", ""},
      {"device.omega_q_over_2pi_hz", "0"},
      {"device.t1_s", "inf"},
      {"device.t2_s", "inf"},
      {"pump.gain_db", "0"},
      {"pump.pump_phase_rad", "0"},
      {"drive.p_in_dbm", "off"},
      {"drive.phi_rad", "0"},
      {"drive.n_add", "0"},
      {"drive.eta_loss", "1"},
      {"run.seed", "1"},
      {"run.workers", "0"},
      {"trajectory.records", "10000"},
      {"trajectory.t_int_max_s", "280e-9"},
      {"trajectory.t_int_min_s", "60e-9"},
      {"trajectory.samples", "28"},
      {"trajectory.model", "t1_modified"},
  };
  return schema;
}

std::string env_name(const std::string& key) {
  std::string out = "QPA_";
  for (char c : key) out.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

PumpSpec RunConfig::pump() const { return PumpSpec::from_gain_db(gain_db, device.kappa, pump_phase_rad); }

DriveSpec RunConfig::drive() const {
  DriveSpec d;
  d.p_in = p_in_dbm ? units::dbm_to_watt(*p_in_dbm) : 0.0;
  d.phi = phi_rad;
  d.n_add = n_add;
  d.eta_loss = eta_loss;
  return validate(d);
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : values) out += k + "=" + v + "\n";
  return out;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides, const EnvLookup& env) {
  namespace pt = boost::property_tree;
  const auto& schema = config_schema();
  RunConfig cfg;
  cfg.source = path;
  std::map<std::string, std::string>& v = cfg.values;
  for (const auto& [k, def] : schema) {
    if (!def.empty()) v[k] = def;
  }
  auto set = [&](const std::string& key, const std::string& value, const std::string& origin) {
    if (!schema.contains(key)) throw ValidationError(origin + ": unknown key '" + key + "'");
    v[key] = trim(value);
  };

  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    pt::ptree tree;
    try {
      pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ValidationError("config parse error: " + std::string(e.what()));
    }
    for (const auto& [section, body] : tree) {
      if (body.empty()) throw ValidationError(path + ": key '" + section + "' outside a section");
      for (const auto& [key, leaf] : body) set(section + "." + key, leaf.data(), path);
    }
  }
  for (const auto& [k, def] : schema) {
    if (auto e = env(env_name(k))) set(k, *e, env_name(k));
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ValidationError("override must be section.key=value: '" + o + "'");
    set(trim(o.substr(0, eq)), o.substr(eq + 1), "--set");
  }
  for (const auto& [k, def] : schema) {
    if (!v.contains(k) || v[k].empty()) throw ValidationError("missing required config key '" + k + "'");
  }

  auto num = [&](const std::string& key) {
    try {
      return parse_number(v.at(key));
    } catch (const ValidationError& e) {
      throw ValidationError(key + ": " + e.what());
    }
  };
  cfg.device = device_from_hz(num("device.kappa_over_2pi_hz"), num("device.chi_over_2pi_hz"),
                              num("device.omega_qpa_over_2pi_hz"), num("device.omega_q_over_2pi_hz"),
                              num("device.t1_s"), num("device.t2_s"));
  cfg.gain_db = num("pump.gain_db");
  cfg.pump_phase_rad = num("pump.pump_phase_rad");
  if (v["drive.p_in_dbm"] != "off") cfg.p_in_dbm = num("drive.p_in_dbm");
  cfg.phi_rad = num("drive.phi_rad");
  cfg.n_add = num("drive.n_add");
  cfg.eta_loss = num("drive.eta_loss");
  cfg.seed = parse_uint("run.seed", v["run.seed"]);
  cfg.workers = static_cast<unsigned>(parse_uint("run.workers", v["run.workers"]));
  cfg.trajectory.records = static_cast<int>(parse_uint("trajectory.records", v["trajectory.records"]));
  cfg.trajectory.t_int_max_s = num("trajectory.t_int_max_s");
  cfg.trajectory.t_int_min_s = num("trajectory.t_int_min_s");
  cfg.trajectory.samples = static_cast<int>(parse_uint("trajectory.samples", v["trajectory.samples"]));
  cfg.trajectory.model = v["trajectory.model"];
  if (cfg.trajectory.model != "t1_modified" && cfg.trajectory.model != "double_gaussian")
    throw ValidationError("trajectory.model must be t1_modified or double_gaussian");
  if (!std::isfinite(cfg.gain_db) || cfg.gain_db < 0.0) throw ValidationError("pump.gain_db must be >= 0");
  if (cfg.p_in_dbm && !std::isfinite(*cfg.p_in_dbm)) throw ValidationError("drive.p_in_dbm must be finite or off");
  (void)cfg.drive();
  return cfg;
}

}  // namespace qpa::io

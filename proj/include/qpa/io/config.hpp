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

// Run configuration: INI file < QPA_* environment < --set flags.
// Every physical key carries its unit in the name.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpa/params.hpp"

namespace qpa::io {

/// Looks up an environment variable; replaceable in tests.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

std::optional<std::string> process_env(const std::string& name);

struct TrajectoryConfig {
  int records = 10000;         // per qubit state
  double t_int_max_s = 280e-9;
  double t_int_min_s = 60e-9;
  int samples = 28;
  std::string model = "t1_modified";
};

struct RunConfig {
  DeviceParams device;
  double gain_db = 0.0;
  double pump_phase_rad = 0.0;
  std::optional<double> p_in_dbm;  // empty: drive off
  double phi_rad = 0.0;
  double n_add = 0.0;
  double eta_loss = 1.0;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: logical cores
  TrajectoryConfig trajectory;

  std::map<std::string, std::string> values;  // merged "section.key" -> text
  std::string source;                         // file path, empty for defaults

  PumpSpec pump() const;
  DriveSpec drive() const;
  /// Sorted "section.key=value" lines; the config hash is taken over this.
  std::string canonical() const;
};

/// Known keys with their defaults ("" means required).
const std::map<std::string, std::string>& config_schema();

/// Environment variable for a key, e.g. device.t1_s -> QPA_DEVICE_T1_S.
std::string env_name(const std::string& key);

/// Loads and validates a configuration. An empty path uses defaults only.
/// overrides are "section.key=value" strings applied last.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {},
                      const EnvLookup& env = process_env);

/// Parses a double; accepts inf and the token "pi" with an optional
/// numeric factor or divisor ("-pi", "0.5*pi", "pi/2").
double parse_number(const std::string& text);

}  // namespace qpa::io

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

// Subcommand implementations behind the qpa executable. Each returns the
// process exit code and never throws.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qpa::io {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kDomain = 3, kVerification = 4 };

struct CommonArgs {
  std::string config;                // empty: defaults only
  std::vector<std::string> set;      // section.key=value overrides
  std::optional<unsigned> workers;
};

struct RatesArgs : CommonArgs {
  std::optional<double> gain_db;
  std::optional<double> phi;
  std::optional<std::string> pin;    // dBm or "off"
  std::string csv;
};

struct SweepArgs : CommonArgs {
  std::string spec;
  std::string out;                   // CSV path
  std::string plot;                  // SVG path; empty: none
};

struct OracleArgs {
  std::string suite = "quick";
  std::uint64_t seed = 1;
  double corrupt_chi = 1.0;          // mutation hook: scales chi in the oracle only
  std::optional<unsigned> workers;
  std::string out;
};

struct TrajectoryArgs : CommonArgs {
  std::optional<int> records;        // per qubit state
  std::optional<double> tint_max_s;
  std::optional<std::uint64_t> seed;
  std::string out_prefix;            // writes <prefix>_snr.csv, <prefix>_hist.csv
};

struct OptimizeArgs : CommonArgs {
  std::optional<double> nadd;
  std::optional<double> loss;
  std::string bounds = "0,20";       // dB
  std::string out;                   // JSON report path
};

int cmd_rates(const RatesArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_oracle_check(const OracleArgs& args, std::ostream& out, std::ostream& err);
int cmd_trajectories(const TrajectoryArgs& args, std::ostream& out, std::ostream& err);
int cmd_optimize(const OptimizeArgs& args, std::ostream& out, std::ostream& err);

}  // namespace qpa::io

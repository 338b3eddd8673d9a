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

// Run manifests: a JSON sidecar "<output>.manifest.json" next to every file a
// subcommand writes.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qpa::io {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kCsvSchema = "qpa-csv/1";

std::string sha256_hex(const std::string& data);

struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> args;
  std::string config_source;
  std::string config_sha256;
  std::uint64_t seed = 0;
  std::string created_utc;  // SOURCE_DATE_EPOCH when set, else wall clock
  std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256

  std::string json() const;
};

/// Current UTC time in ISO-8601, honouring SOURCE_DATE_EPOCH.
std::string utc_timestamp();

/// Writes text to path and records its hash in the manifest.
void write_output(const std::string& path, const std::string& text, RunManifest& manifest);

/// Writes "<path>.manifest.json" for the first output of the manifest.
void write_manifest(const std::string& path, const RunManifest& manifest);

}  // namespace qpa::io

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

#include "qpa/io/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "qpa/error.hpp"

namespace qpa::io {

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::string out;
  char hex[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(hex, sizeof hex, "%02x", md[i]);
    out += hex;
  }
  return out;
}

std::string utc_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RunManifest::json() const {
  nlohmann::ordered_json j;
  j["tool"] = "qpa";
  j["version"] = kToolVersion;
  j["csv_schema"] = kCsvSchema;
  j["subcommand"] = subcommand;
  j["args"] = args;
  j["config"] = {{"source", config_source}, {"sha256", config_sha256}};
  j["seed"] = seed;
  j["created_utc"] = created_utc;
  auto& outs = j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& [path, hash] : outputs) outs.push_back({{"path", path}, {"sha256", hash}});
  return j.dump(2) + "\n";
}

void write_output(const std::string& path, const std::string& text, RunManifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
  manifest.outputs.emplace_back(path, sha256_hex(text));
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  std::ofstream out(path + ".manifest.json", std::ios::binary);
  if (!out) throw ValidationError("cannot write manifest for '" + path + "'");
  out << manifest.json();
}

}  // namespace qpa::io

// Copyright (c) the Foveate Authors.
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

#include "fovea/manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "fovea/hash.hpp"

namespace fovea {
namespace {

std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(value));
  return buffer;
}

std::uint64_t parse_hex64(const std::string& text) {
  if (text.size() != 16) {
    throw std::invalid_argument("expected a 16-digit hex value: " + text);
  }
  return std::stoull(text, nullptr, 16);
}

}  // namespace

void sort_records(StimulusManifest& manifest) {
  std::sort(manifest.records.begin(), manifest.records.end(),
            [](const ManifestRecord& a, const ManifestRecord& b) {
              return std::tie(a.source, a.operation, a.parameters, a.output) <
                     std::tie(b.source, b.operation, b.parameters, b.output);
            });
}

std::string manifest_to_json(const StimulusManifest& manifest) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = manifest.schema_version;
  doc["config"] = manifest.config;
  doc["records"] = nlohmann::ordered_json::array();
  for (const ManifestRecord& record : manifest.records) {
    nlohmann::ordered_json item;
    item["source"] = record.source;
    item["operation"] = record.operation;
    item["parameters"] = record.parameters;
    item["seed"] = hex64(record.seed);
    item["output"] = record.output;
    item["checksum"] = hex64(record.checksum);
    if (!record.error.empty()) item["error"] = record.error;
    doc["records"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

StimulusManifest manifest_from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  StimulusManifest manifest;
  manifest.schema_version = doc.at("schema_version").get<int>();
  if (manifest.schema_version != 1) {
    throw std::invalid_argument("unsupported manifest schema version " +
                                std::to_string(manifest.schema_version));
  }
  manifest.config = doc.at("config").get<std::string>();
  for (const nlohmann::json& item : doc.at("records")) {
    ManifestRecord record;
    record.source = item.at("source").get<std::string>();
    record.operation = item.at("operation").get<std::string>();
    record.parameters = item.at("parameters").get<std::string>();
    record.seed = parse_hex64(item.at("seed").get<std::string>());
    record.output = item.at("output").get<std::string>();
    record.checksum = parse_hex64(item.at("checksum").get<std::string>());
    if (item.contains("error")) record.error = item.at("error").get<std::string>();
    manifest.records.push_back(std::move(record));
  }
  return manifest;
}

void save_manifest(const StimulusManifest& manifest,
                   const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot write manifest: " + tmp.string());
    }
    out << manifest_to_json(manifest);
    if (!out.flush()) {
      throw std::runtime_error("manifest write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

StimulusManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read manifest: " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return manifest_from_json(text);
}

std::uint64_t file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read file for checksum: " + path.string());
  }
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[65536];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    hash = fnv1a64(buffer, static_cast<std::size_t>(in.gcount()), hash);
    if (in.eof()) break;
  }
  return hash;
}

}  // namespace fovea

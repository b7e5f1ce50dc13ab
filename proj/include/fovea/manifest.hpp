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

#ifndef FOVEA_MANIFEST_HPP
#define FOVEA_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fovea {

struct ManifestRecord {
  std::string source;      // input path relative to the input root
  std::string operation;   // transform or stimulus name
  std::string parameters;  // compact key=value list
  std::uint64_t seed = 0;
  std::string output;      // path relative to the output root
  std::uint64_t checksum = 0;  // content hash of the written file
  std::string error;           // non-empty when the item failed

  friend bool operator==(const ManifestRecord&,
                         const ManifestRecord&) = default;
};

struct StimulusManifest {
  int schema_version = 1;
  std::string config;  // snapshot of the driving configuration
  std::vector<ManifestRecord> records;

  friend bool operator==(const StimulusManifest&,
                         const StimulusManifest&) = default;
};

// Stable record order: by source, then operation, parameters, output.
void sort_records(StimulusManifest& manifest);

std::string manifest_to_json(const StimulusManifest& manifest);
StimulusManifest manifest_from_json(const std::string& text);

// Writes via a temporary file and rename, so a crash never leaves a partial
// manifest behind.
void save_manifest(const StimulusManifest& manifest,
                   const std::filesystem::path& path);
StimulusManifest load_manifest(const std::filesystem::path& path);

// Content hash of a file on disk, as recorded in manifest checksums.
std::uint64_t file_checksum(const std::filesystem::path& path);

}  // namespace fovea

#endif  // FOVEA_MANIFEST_HPP

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

#ifndef FOVEA_PIPELINE_HPP
#define FOVEA_PIPELINE_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "fovea/config.hpp"
#include "fovea/geometry.hpp"
#include "fovea/iqa.hpp"
#include "fovea/manifest.hpp"
#include "fovea/transforms.hpp"

namespace fovea {

// Supported raster files under root, as sorted root-relative paths.
std::vector<std::filesystem::path> list_images(
    const std::filesystem::path& root);

// Fixed-size worker pool; fn(i) runs once for each i in [0, n). Results must
// land in pre-sized slots so scheduling order cannot matter.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

struct PipelineConfig {
  std::filesystem::path input_root;
  std::filesystem::path output_root;
  std::string transform = "reference";
  TessellationConfig tess;     // image dimensions are taken per input file
  double texture_alpha = 1.0;  // strength applied to every peripheral region
  int texture_patch = 4;
  SigmaSchedule schedule;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool resume = false;
  std::string snapshot;  // configuration text recorded in the manifest
};

// Reads top-level input/output/transform/seed/workers/resume keys plus the
// [tessellation], [texture] and [blur] sections.
PipelineConfig pipeline_config_from(const Config& config);

// Renders every input image under cfg.input_root to cfg.output_root,
// mirroring the directory layout, and writes output_root/manifest.json
// atomically. Identical config and seed give byte-identical trees at any
// worker count. Per-file failures become error records; the run continues.
StimulusManifest run_pipeline(const PipelineConfig& cfg);

struct IqaScore {
  std::string file;
  std::string metric;
  double score = 0.0;
};

struct IqaBatch {
  std::vector<IqaScore> rows;
  std::vector<MetricReport> summaries;
  std::vector<std::string> warnings;
};

// Metrics by name (mse, ssim, ms-ssim, mi, nlpd) over filename-matched pairs.
IqaBatch iqa_directories(const std::filesystem::path& ref_dir,
                         const std::filesystem::path& cand_dir,
                         const std::vector<std::string>& metrics);

struct SummaryReport {
  std::string csv;
  std::vector<std::string> warnings;
};

// One row per candidate directory: mean and std of SSIM, MS-SSIM, MSE, MI
// and NLPD against the reference directory.
SummaryReport report_summary(
    const std::filesystem::path& ref_dir,
    const std::vector<std::filesystem::path>& candidates);

}  // namespace fovea

#endif  // FOVEA_PIPELINE_HPP

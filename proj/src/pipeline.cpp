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

#include "fovea/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "fovea/hash.hpp"
#include "fovea/image_io.hpp"

namespace fovea {
namespace {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%g", value);
  return buffer;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ",";
    out += format_double(values[i]);
  }
  return out;
}

// Tessellations shared across workers, one per distinct image size.
class TessellationCache {
 public:
  explicit TessellationCache(const TessellationConfig& base) : base_(base) {}

  const Tessellation& for_size(int width, int height) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(width)) << 32) |
        static_cast<std::uint32_t>(height);
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      TessellationConfig config = base_;
      config.width = static_cast<std::size_t>(width);
      config.height = static_cast<std::size_t>(height);
      it = cache_.emplace(key, build_tessellation(config)).first;
    }
    return it->second;
  }

 private:
  TessellationConfig base_;
  std::mutex mutex_;
  std::map<std::uint64_t, Tessellation> cache_;
};

std::vector<std::filesystem::path> matched_files(
    const std::filesystem::path& ref_dir, const std::filesystem::path& cand_dir,
    std::vector<std::string>& warnings) {
  const std::vector<std::filesystem::path> ref_files = list_images(ref_dir);
  const std::vector<std::filesystem::path> cand_files = list_images(cand_dir);
  std::vector<std::filesystem::path> matched;
  std::set_intersection(ref_files.begin(), ref_files.end(), cand_files.begin(),
                        cand_files.end(), std::back_inserter(matched));
  for (const auto& f : ref_files) {
    if (!std::binary_search(cand_files.begin(), cand_files.end(), f)) {
      warnings.push_back("missing in " + cand_dir.string() + ": " + f.string());
    }
  }
  for (const auto& f : cand_files) {
    if (!std::binary_search(ref_files.begin(), ref_files.end(), f)) {
      warnings.push_back("missing in " + ref_dir.string() + ": " + f.string());
    }
  }
  return matched;
}

double score_pair(const std::string& metric, const ImageBuffer& ref,
                  const ImageBuffer& cand, const ImageBuffer& gray_ref,
                  const ImageBuffer& gray_cand) {
  if (metric == "mse") {
    return ref.channels() == cand.channels() ? mse(ref, cand)
                                             : mse(gray_ref, gray_cand);
  }
  if (metric == "ssim") return ssim(gray_ref, gray_cand);
  if (metric == "ms-ssim") return ms_ssim(gray_ref, gray_cand);
  if (metric == "mi") return mutual_information(gray_ref, gray_cand);
  if (metric == "nlpd") return nlpd(gray_ref, gray_cand);
  throw std::invalid_argument("unknown metric: " + metric);
}

}  // namespace

std::vector<std::filesystem::path> list_images(
    const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) {
    throw std::invalid_argument("not a directory: " + root.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    if (!is_supported_image(entry.path())) continue;
    files.push_back(entry.path().lexically_relative(root));
  }
  std::sort(files.begin(), files.end());
  return files;
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

PipelineConfig pipeline_config_from(const Config& config) {
  PipelineConfig cfg;
  cfg.input_root = config.get_string("input", "");
  cfg.output_root = config.get_string("output", "");
  cfg.transform = config.get_string("transform", "reference");
  cfg.seed = config.get_uint64("seed", 0);
  cfg.workers = static_cast<std::size_t>(
      std::max<std::int64_t>(1, config.get_int("workers", 1)));
  cfg.resume = config.get_bool("resume", false);

  cfg.tess.fovea_radius =
      config.get_double("tessellation.fovea_radius", cfg.tess.fovea_radius);
  cfg.tess.scaling = config.get_double("tessellation.scaling", cfg.tess.scaling);
  cfg.tess.num_sectors = static_cast<std::size_t>(std::max<std::int64_t>(
      1, config.get_int("tessellation.sectors",
                        static_cast<std::int64_t>(cfg.tess.num_sectors))));
  cfg.tess.fixation_x =
      config.get_double("tessellation.fixation_x", cfg.tess.fixation_x);
  cfg.tess.fixation_y =
      config.get_double("tessellation.fixation_y", cfg.tess.fixation_y);

  cfg.texture_alpha = config.get_double("texture.alpha", 1.0);
  cfg.texture_patch =
      static_cast<int>(config.get_int("texture.patch", cfg.texture_patch));

  const std::vector<double> ring_sigmas =
      config.get_double_list("blur.ring_sigmas", {});
  if (!ring_sigmas.empty()) {
    cfg.schedule = SigmaSchedule::make_per_ring(ring_sigmas);
  } else {
    cfg.schedule = SigmaSchedule::make_uniform(config.get_double("blur.sigma", 0.0));
  }

  // The snapshot records what shaped the outputs; executor knobs stay out so
  // runs at different worker counts stay byte-identical.
  std::ostringstream snapshot;
  for (const auto& [key, value] : config.entries()) {
    if (key == "workers" || key == "resume") continue;
    snapshot << key << " = " << value << "\n";
  }
  cfg.snapshot = snapshot.str();
  return cfg;
}

StimulusManifest run_pipeline(const PipelineConfig& cfg) {
  if (cfg.input_root.empty() || !std::filesystem::is_directory(cfg.input_root)) {
    throw std::invalid_argument("input root is not a directory: " +
                                cfg.input_root.string());
  }
  if (cfg.output_root.empty()) {
    throw std::invalid_argument("output root is required");
  }
  const bool known_transform =
      cfg.transform == "reference" || cfg.transform == "foveate-texture" ||
      cfg.transform == "foveate-blur" || cfg.transform == "uniform-blur";
  if (!known_transform) {
    throw std::invalid_argument("unknown transform: " + cfg.transform);
  }
  std::filesystem::create_directories(cfg.output_root);

  const std::vector<std::filesystem::path> files = list_images(cfg.input_root);
  StimulusManifest manifest;
  manifest.config = cfg.snapshot;
  manifest.records.resize(files.size());

  TessellationCache tessellations(cfg.tess);
  std::mutex dir_mutex;

  parallel_for(files.size(), cfg.workers, [&](std::size_t i) {
    const std::filesystem::path& rel = files[i];
    ManifestRecord& record = manifest.records[i];
    record.source = rel.generic_string();
    record.operation = cfg.transform;
    record.seed = derive_seed(cfg.seed, record.source);
    std::filesystem::path out_rel = rel;
    out_rel.replace_extension(".png");
    record.output = out_rel.generic_string();
    if (cfg.transform == "uniform-blur") {
      record.parameters = "sigma=" + format_double(cfg.schedule.sigma);
    } else if (cfg.transform == "foveate-blur") {
      record.parameters = "ring_sigmas=" + join_doubles(cfg.schedule.ring_sigmas);
    } else if (cfg.transform == "foveate-texture") {
      record.parameters = "alpha=" + format_double(cfg.texture_alpha) +
                          ",patch=" + std::to_string(cfg.texture_patch);
    }

    const std::filesystem::path out_path = cfg.output_root / out_rel;
    try {
      if (cfg.resume && std::filesystem::exists(out_path)) {
        record.checksum = file_checksum(out_path);
        return;
      }
      const ImageBuffer img = load_image(cfg.input_root / rel);
      ImageBuffer result;
      if (cfg.transform == "reference") {
        result = reference(img);
      } else if (cfg.transform == "uniform-blur") {
        result = uniform_blur(img, cfg.schedule.sigma);
      } else if (cfg.transform == "foveate-texture") {
        const Tessellation& tess =
            tessellations.for_size(img.width(), img.height());
        TextureParams params;
        params.seed = record.seed;
        params.patch = cfg.texture_patch;
        params.alpha.assign(tess.regions.size(), cfg.texture_alpha);
        result = foveate_texture(img, tess, params);
      } else {
        const Tessellation& tess =
            tessellations.for_size(img.width(), img.height());
        if (cfg.schedule.kind != SigmaSchedule::Kind::per_ring) {
          throw std::invalid_argument(
              "foveate-blur requires a per-ring schedule");
        }
        if (cfg.schedule.ring_sigmas.size() != tess.num_rings()) {
          throw std::invalid_argument(
              "schedule has " + std::to_string(cfg.schedule.ring_sigmas.size()) +
              " entries but the tessellation has " +
              std::to_string(tess.num_rings()) + " rings");
        }
        result = foveate_blur(img, tess, cfg.schedule.ring_sigmas);
      }
      {
        std::lock_guard<std::mutex> lock(dir_mutex);
        std::filesystem::create_directories(out_path.parent_path());
      }
      save_image(out_path, result);
      record.checksum = file_checksum(out_path);
    } catch (const std::exception& e) {
      record.error = e.what();
    }
  });

  sort_records(manifest);
  save_manifest(manifest, cfg.output_root / "manifest.json");
  return manifest;
}

IqaBatch iqa_directories(const std::filesystem::path& ref_dir,
                         const std::filesystem::path& cand_dir,
                         const std::vector<std::string>& metrics) {
  if (metrics.empty()) {
    throw std::invalid_argument("at least one metric is required");
  }
  IqaBatch batch;
  const std::vector<std::filesystem::path> files =
      matched_files(ref_dir, cand_dir, batch.warnings);
  std::vector<std::vector<double>> scores(metrics.size());
  for (const std::filesystem::path& rel : files) {
    const ImageBuffer ref = load_image(ref_dir / rel);
    const ImageBuffer cand = load_image(cand_dir / rel);
    if (ref.width() != cand.width() || ref.height() != cand.height()) {
      batch.warnings.push_back("size mismatch, skipped: " + rel.string());
      continue;
    }
    const ImageBuffer gray_ref = ref.channels() == 1 ? ref : to_grayscale(ref);
    const ImageBuffer gray_cand =
        cand.channels() == 1 ? cand : to_grayscale(cand);
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      const double score =
          score_pair(metrics[m], ref, cand, gray_ref, gray_cand);
      batch.rows.push_back({rel.generic_string(), metrics[m], score});
      scores[m].push_back(score);
    }
  }
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    if (!scores[m].empty()) {
      batch.summaries.push_back(aggregate(metrics[m], scores[m]));
    }
  }
  return batch;
}

SummaryReport report_summary(
    const std::filesystem::path& ref_dir,
    const std::vector<std::filesystem::path>& candidates) {
  static const std::vector<std::string> kMetrics = {"ssim", "ms-ssim", "mse",
                                                    "mi", "nlpd"};
  SummaryReport report;
  std::ostringstream csv;
  csv << "transform";
  for (const std::string& metric : kMetrics) {
    csv << "," << metric << "_mean," << metric << "_std";
  }
  csv << ",n\n";
  for (const std::filesystem::path& cand_dir : candidates) {
    const IqaBatch batch = iqa_directories(ref_dir, cand_dir, kMetrics);
    for (const std::string& w : batch.warnings) report.warnings.push_back(w);
    csv << cand_dir.filename().generic_string();
    std::size_t n = 0;
    for (const std::string& metric : kMetrics) {
      const auto it = std::find_if(batch.summaries.begin(),
                                   batch.summaries.end(),
                                   [&](const MetricReport& r) {
                                     return r.metric == metric;
                                   });
      if (it == batch.summaries.end()) {
        csv << ",,";
        continue;
      }
      char buffer[64];
      std::snprintf(buffer, sizeof(buffer), ",%.6g,%.6g", it->mean,
                    it->std_dev);
      csv << buffer;
      n = it->n;
    }
    csv << "," << n << "\n";
  }
  report.csv = csv.str();
  return report;
}

}  // namespace fovea

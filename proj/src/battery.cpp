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

#include "fovea/battery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "fovea/hash.hpp"
#include "fovea/image_io.hpp"
#include "fovea/pipeline.hpp"

namespace fovea {
namespace {

std::string sigma_token(double sigma) {
  if (std::isinf(sigma)) return "inf";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%g", sigma);
  std::string token = buffer;
  std::replace(token.begin(), token.end(), '.', 'p');
  return token;
}

std::string format_double(double value) {
  if (std::isinf(value)) return "inf";
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

std::string occlusion_kind_name(OcclusionKind kind) {
  switch (kind) {
    case OcclusionKind::left2right: return "left2right";
    case OcclusionKind::top2bottom: return "top2bottom";
    case OcclusionKind::scotoma: return "scotoma";
    case OcclusionKind::glaucoma: return "glaucoma";
  }
  throw std::invalid_argument("unknown occlusion kind");
}

std::filesystem::path with_name(const std::filesystem::path& rel,
                                const std::string& name) {
  return rel.parent_path() / name;
}

// Serializes directory creation; std::filesystem racing itself on shared
// parents is unspecified.
void ensure_parent(std::mutex& mutex, const std::filesystem::path& path) {
  std::lock_guard<std::mutex> lock(mutex);
  std::filesystem::create_directories(path.parent_path());
}

// Mean over every pixel of every channel; the scalar high-pass offset.
double corpus_mean(const std::filesystem::path& input_dir,
                   const std::vector<std::filesystem::path>& files) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& rel : files) {
    ImageBuffer img;
    try {
      img = load_image(input_dir / rel);
    } catch (const std::exception&) {
      continue;  // the per-file render reports the failure
    }
    for (float v : img.data()) sum += v;
    count += img.data().size();
  }
  return count == 0 ? 0.5 : sum / static_cast<double>(count);
}

}  // namespace

std::vector<double> default_fraction_grid() {
  std::vector<double> grid(11);
  for (int i = 0; i <= 10; ++i) grid[static_cast<std::size_t>(i)] = i / 10.0;
  return grid;
}

StimulusManifest frequency_battery(const std::filesystem::path& input_dir,
                                   const std::filesystem::path& output_dir,
                                   const FrequencyBatteryOptions& options) {
  std::vector<double> lp(options.lowpass_sigmas);
  if (lp.empty()) lp.assign(kLowpassSigmas.begin(), kLowpassSigmas.end());
  std::vector<double> hp(options.highpass_sigmas);
  if (hp.empty()) hp.assign(kHighpassSigmas.begin(), kHighpassSigmas.end());
  for (double sigma : lp) {
    if (!(sigma >= 0.0) || std::isinf(sigma)) {
      throw std::invalid_argument("low-pass sigma must be finite and >= 0");
    }
  }
  for (double sigma : hp) {
    if (!(sigma > 0.0)) {
      throw std::invalid_argument("high-pass sigma must be > 0");
    }
  }
  std::filesystem::create_directories(output_dir);

  const std::vector<std::filesystem::path> files = list_images(input_dir);
  const double mean_val = corpus_mean(input_dir, files);
  const std::size_t per_image = (lp.size() + hp.size()) * 2;

  StimulusManifest manifest;
  {
    std::ostringstream config;
    config << "battery = frequency\n"
           << "lowpass_sigmas = " << join_doubles(lp) << "\n"
           << "highpass_sigmas = " << join_doubles(hp) << "\n"
           << "residual_mean = " << format_double(mean_val) << "\n";
    manifest.config = config.str();
  }
  manifest.records.resize(files.size() * per_image);

  std::mutex dir_mutex;
  parallel_for(files.size(), options.workers, [&](std::size_t i) {
    const std::filesystem::path& rel = files[i];
    const std::string stem = rel.stem().string();

    ImageBuffer img;
    std::string load_error;
    try {
      img = load_image(input_dir / rel);
    } catch (const std::exception& e) {
      load_error = e.what();
    }

    std::size_t slot = i * per_image;
    for (int pass = 0; pass < 2; ++pass) {
      const bool is_lowpass = pass == 0;
      const std::vector<double>& sigmas = is_lowpass ? lp : hp;
      for (double sigma : sigmas) {
        for (ColorMode mode : {ColorMode::color, ColorMode::gray}) {
          ManifestRecord& record = manifest.records[slot++];
          record.source = rel.generic_string();
          record.operation = is_lowpass ? "lowpass" : "highpass";
          const std::string mode_name =
              mode == ColorMode::color ? "color" : "gray";
          record.parameters =
              "sigma=" + format_double(sigma) + ",mode=" + mode_name;
          const std::string name = stem + (is_lowpass ? "_lp_s" : "_hp_s") +
                                   sigma_token(sigma) + "_" + mode_name +
                                   ".png";
          record.output = with_name(rel, name).generic_string();
          if (!load_error.empty()) {
            record.error = load_error;
            continue;
          }
          try {
            FrequencySpec spec;
            spec.kind =
                is_lowpass ? FrequencyKind::lowpass : FrequencyKind::highpass;
            spec.sigma = sigma;
            spec.color_mode = mode;
            const int out_channels =
                mode == ColorMode::gray ? 1 : img.channels();
            spec.residual_means.assign(static_cast<std::size_t>(out_channels),
                                       mean_val);
            const ImageBuffer out = is_lowpass ? lowpass(img, spec)
                                               : clamp01(highpass(img, spec));
            const std::filesystem::path out_path = output_dir / record.output;
            ensure_parent(dir_mutex, out_path);
            save_image(out_path, out);
            record.checksum = file_checksum(out_path);
          } catch (const std::exception& e) {
            record.error = e.what();
          }
        }
      }
    }
  });

  sort_records(manifest);
  save_manifest(manifest, output_dir / "manifest.json");
  return manifest;
}

StimulusManifest occlusion_battery(const std::filesystem::path& input_dir,
                                   const std::filesystem::path& output_dir,
                                   const OcclusionBatteryOptions& options) {
  std::vector<OcclusionKind> kinds(options.kinds);
  if (kinds.empty()) {
    kinds = {OcclusionKind::left2right, OcclusionKind::top2bottom,
             OcclusionKind::scotoma, OcclusionKind::glaucoma};
  }
  std::vector<double> fractions(options.fractions);
  if (fractions.empty()) fractions = default_fraction_grid();
  for (double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw std::invalid_argument("fractions must lie in [0, 1]");
    }
  }
  std::filesystem::create_directories(output_dir);

  const std::vector<std::filesystem::path> files = list_images(input_dir);
  const std::size_t per_image = kinds.size() * fractions.size();

  StimulusManifest manifest;
  {
    std::ostringstream config;
    config << "battery = occlusion\nkinds =";
    for (OcclusionKind kind : kinds) config << " " << occlusion_kind_name(kind);
    config << "\nfractions = " << join_doubles(fractions) << "\n";
    manifest.config = config.str();
  }
  manifest.records.resize(files.size() * per_image);

  std::mutex dir_mutex;
  parallel_for(files.size(), options.workers, [&](std::size_t i) {
    const std::filesystem::path& rel = files[i];
    const std::string stem = rel.stem().string();

    ImageBuffer img;
    std::string load_error;
    try {
      img = load_image(input_dir / rel);
    } catch (const std::exception& e) {
      load_error = e.what();
    }

    std::size_t slot = i * per_image;
    for (OcclusionKind kind : kinds) {
      const std::string kind_name = occlusion_kind_name(kind);
      for (double fraction : fractions) {
        ManifestRecord& record = manifest.records[slot++];
        record.source = rel.generic_string();
        record.operation = "occlude";
        record.parameters =
            "kind=" + kind_name + ",fraction=" + format_double(fraction);
        const std::string name = stem + "_" + kind_name + "_f" +
                                 sigma_token(fraction) + ".png";
        record.output = with_name(rel, name).generic_string();
        if (!load_error.empty()) {
          record.error = load_error;
          continue;
        }
        try {
          OcclusionSpec spec;
          spec.kind = kind;
          spec.fraction = fraction;
          spec.fill = options.fill;
          const ImageBuffer out = occlude(img, spec);
          const std::filesystem::path out_path = output_dir / record.output;
          ensure_parent(dir_mutex, out_path);
          save_image(out_path, out);
          record.checksum = file_checksum(out_path);
        } catch (const std::exception& e) {
          record.error = e.what();
        }
      }
    }
  });

  sort_records(manifest);
  save_manifest(manifest, output_dir / "manifest.json");
  return manifest;
}

StimulusManifest cue_conflict_battery(
    const std::filesystem::path& input_dir,
    const std::filesystem::path& output_dir,
    const CueConflictBatteryOptions& options) {
  std::vector<double> ratios(options.ratios);
  if (ratios.empty()) ratios = default_fraction_grid();
  for (double r : ratios) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw std::invalid_argument("ratios must lie in [0, 1]");
    }
  }
  if (!std::filesystem::is_directory(input_dir)) {
    throw std::invalid_argument("not a directory: " + input_dir.string());
  }

  // Top-level subdirectories are the categories.
  std::vector<std::string> categories;
  for (const auto& entry : std::filesystem::directory_iterator(input_dir)) {
    if (entry.is_directory()) {
      categories.push_back(entry.path().filename().string());
    }
  }
  std::sort(categories.begin(), categories.end());
  std::vector<std::vector<std::filesystem::path>> members;
  {
    std::vector<std::string> populated;
    for (const std::string& name : categories) {
      std::vector<std::filesystem::path> images =
          list_images(input_dir / name);
      if (images.empty()) continue;
      populated.push_back(name);
      members.push_back(std::move(images));
    }
    categories = std::move(populated);
  }
  if (categories.size() < 2) {
    throw std::invalid_argument(
        "cue-conflict requires at least two category subdirectories with "
        "images");
  }
  std::filesystem::create_directories(output_dir);

  // One task per inner image; the task renders every ratio.
  struct InnerTask {
    std::size_t category = 0;
    std::size_t index = 0;  // within the category's sorted listing
  };
  std::vector<InnerTask> tasks;
  for (std::size_t c = 0; c < categories.size(); ++c) {
    for (std::size_t i = 0; i < members[c].size(); ++i) {
      tasks.push_back({c, i});
    }
  }

  const bool systematic = options.kind == CueKind::window;
  StimulusManifest manifest;
  {
    std::ostringstream config;
    config << "battery = cue-conflict\n"
           << "kind = " << (systematic ? "window" : "square") << "\n"
           << "ratios = " << join_doubles(ratios) << "\n"
           << "feather = " << format_double(options.feather) << "\n";
    if (!systematic) config << "seed = " << options.seed << "\n";
    manifest.config = config.str();
  }
  manifest.records.resize(tasks.size() * ratios.size());

  std::mutex dir_mutex;
  parallel_for(tasks.size(), options.workers, [&](std::size_t t) {
    const InnerTask& task = tasks[t];
    const std::string inner_class = categories[task.category];
    const std::filesystem::path& inner_rel_path = members[task.category][task.index];
    const std::string inner_rel =
        (std::filesystem::path(inner_class) / inner_rel_path).generic_string();

    // Window: category i draws its partner from category i+1, image index
    // matched modulo the partner's size. Square: both partner category and
    // image drawn uniformly, seeded by the inner image's path.
    std::size_t outer_category;
    std::size_t outer_index;
    std::uint64_t pair_seed = 0;
    if (systematic) {
      outer_category = (task.category + 1) % categories.size();
      outer_index = task.index % members[outer_category].size();
    } else {
      pair_seed = derive_seed(options.seed, inner_rel);
      Rng64 rng(pair_seed);
      outer_category = rng.below(categories.size() - 1);
      if (outer_category >= task.category) ++outer_category;
      outer_index = rng.below(members[outer_category].size());
    }
    const std::string outer_class = categories[outer_category];
    const std::filesystem::path& outer_rel = members[outer_category][outer_index];

    ImageBuffer inner;
    ImageBuffer outer;
    std::string load_error;
    try {
      inner = load_image(input_dir / inner_class / inner_rel_path);
      outer = load_image(input_dir / outer_class / outer_rel);
    } catch (const std::exception& e) {
      load_error = e.what();
    }

    std::size_t slot = t * ratios.size();
    for (double ratio : ratios) {
      ManifestRecord& record = manifest.records[slot++];
      record.source = inner_rel;
      record.operation = "cue-conflict";
      record.parameters = "kind=" +
                          std::string(systematic ? "window" : "square") +
                          ",ratio=" + format_double(ratio) +
                          ",feather=" + format_double(options.feather) +
                          ",inner=" + inner_class + ",outer=" + outer_class +
                          ",outer_source=" +
                          (std::filesystem::path(outer_class) / outer_rel)
                              .generic_string();
      record.seed = pair_seed;
      const std::string name = inner_rel_path.stem().string() + "_vs_" +
                               outer_class + "_" + outer_rel.stem().string() +
                               "_r" + sigma_token(ratio) + ".png";
      record.output =
          (std::filesystem::path(inner_class) / inner_rel_path.parent_path() / name)
              .generic_string();
      if (!load_error.empty()) {
        record.error = load_error;
        continue;
      }
      try {
        CueConflictSpec spec;
        spec.kind = options.kind;
        spec.foveal_ratio = ratio;
        spec.feather = options.feather;
        spec.inner_class = inner_class;
        spec.outer_class = outer_class;
        const ImageBuffer out = cue_conflict(inner, outer, spec);
        const std::filesystem::path out_path = output_dir / record.output;
        ensure_parent(dir_mutex, out_path);
        save_image(out_path, out);
        record.checksum = file_checksum(out_path);
      } catch (const std::exception& e) {
        record.error = e.what();
      }
    }
  });

  sort_records(manifest);
  save_manifest(manifest, output_dir / "manifest.json");
  return manifest;
}

}  // namespace fovea

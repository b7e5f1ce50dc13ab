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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fovea/battery.hpp"
#include "fovea/config.hpp"
#include "fovea/geometry.hpp"
#include "fovea/image_io.hpp"
#include "fovea/iqa.hpp"
#include "fovea/manifest.hpp"
#include "fovea/pipeline.hpp"
#include "fovea/rdopt.hpp"
#include "fovea/stimuli.hpp"
#include "fovea/transforms.hpp"

namespace {

namespace fs = std::filesystem;

std::size_t default_workers() {
  if (const char* env = std::getenv("FOVEATE_WORKERS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value >= 1) {
      return static_cast<std::size_t>(value);
    }
  }
  return 1;
}

std::string format_double(double value) {
  if (std::isinf(value)) return "inf";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

struct TessFlags {
  double fovea_radius = 32.0;
  double scaling = 0.4;
  std::size_t sectors = 16;
  double fixation_x = -1.0;
  double fixation_y = -1.0;
};

void add_tess_flags(CLI::App* cmd, TessFlags& flags) {
  cmd->add_option("--fovea-radius", flags.fovea_radius,
                  "Foveal radius in pixels");
  cmd->add_option("--scaling", flags.scaling,
                  "Pooling-region scaling factor, in (0, 1)");
  cmd->add_option("--sectors", flags.sectors, "Angular sectors per ring");
  cmd->add_option("--fixation-x", flags.fixation_x,
                  "Fixation x in pixels (negative: image center)");
  cmd->add_option("--fixation-y", flags.fixation_y,
                  "Fixation y in pixels (negative: image center)");
}

fovea::TessellationConfig tess_config_for(const TessFlags& flags, int width,
                                          int height) {
  fovea::TessellationConfig config;
  config.width = static_cast<std::size_t>(width);
  config.height = static_cast<std::size_t>(height);
  config.fovea_radius = flags.fovea_radius;
  config.scaling = flags.scaling;
  config.num_sectors = flags.sectors;
  config.fixation_x = flags.fixation_x;
  config.fixation_y = flags.fixation_y;
  return config;
}

fovea::OcclusionKind occlusion_kind_from(const std::string& name) {
  if (name == "left2right") return fovea::OcclusionKind::left2right;
  if (name == "top2bottom") return fovea::OcclusionKind::top2bottom;
  if (name == "scotoma") return fovea::OcclusionKind::scotoma;
  if (name == "glaucoma") return fovea::OcclusionKind::glaucoma;
  throw std::invalid_argument("unknown occlusion kind: " + name);
}

double parse_sigma(const std::string& text) {
  if (text == "inf" || text == "INF" || text == "Inf") {
    return fovea::kInfiniteSigma;
  }
  std::size_t used = 0;
  const double value = std::stod(text, &used);
  if (used != text.size()) {
    throw std::invalid_argument("bad sigma: " + text);
  }
  return value;
}

std::size_t count_errors(const fovea::StimulusManifest& manifest) {
  std::size_t n = 0;
  for (const auto& record : manifest.records) {
    if (!record.error.empty()) ++n;
  }
  return n;
}

int finish_batch(const fovea::StimulusManifest& manifest,
                 const fs::path& output_dir) {
  const std::size_t errors = count_errors(manifest);
  std::cout << manifest.records.size() << " records, " << errors
            << " errors, manifest at "
            << (output_dir / "manifest.json").string() << "\n";
  if (errors > 0) {
    for (const auto& record : manifest.records) {
      if (!record.error.empty()) {
        std::cerr << record.source << ": " << record.error << "\n";
      }
    }
    return 1;
  }
  return 0;
}

nlohmann::ordered_json rdresult_json(const std::string& mode,
                                     const fovea::RdMatchResult& result) {
  nlohmann::ordered_json j;
  j["mode"] = mode;
  j["sigmas"] = result.sigmas;
  j["targets"] = result.targets;
  j["achieved_rates"] = result.achieved_rates;
  j["residuals"] = result.residuals;
  j["iterations"] = result.iterations;
  j["warnings"] = result.warnings;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Foveated image transforms, rate matching, metrics and stimulus "
      "batteries"};
  app.require_subcommand(1);
  int status = 0;

  // ---- tessellate ----
  auto* c_tess = app.add_subcommand(
      "tessellate", "Describe the pooling geometry for a frame size");
  struct {
    int width = 256, height = 256;
    TessFlags tess;
    std::string out = "-";
    std::string masks;
  } a_tess;
  c_tess->add_option("--width", a_tess.width, "Frame width");
  c_tess->add_option("--height", a_tess.height, "Frame height");
  add_tess_flags(c_tess, a_tess.tess);
  c_tess->add_option("--out", a_tess.out, "JSON output path ('-' = stdout)");
  c_tess->add_option("--masks", a_tess.masks,
                     "Directory for per-ring weight-map PNGs");
  c_tess->callback([&] {
    const fovea::Tessellation tess = fovea::build_tessellation(
        tess_config_for(a_tess.tess, a_tess.width, a_tess.height));
    nlohmann::ordered_json j;
    j["width"] = tess.config.width;
    j["height"] = tess.config.height;
    j["fixation"] = {tess.fixation_x, tess.fixation_y};
    j["fovea_radius"] = tess.config.fovea_radius;
    j["scaling"] = tess.config.scaling;
    j["sectors"] = tess.config.num_sectors;
    j["max_eccentricity"] = tess.max_eccentricity;
    j["ring_boundaries"] = tess.ring_boundaries;
    j["rings"] = tess.num_rings();
    nlohmann::ordered_json regions = nlohmann::ordered_json::array();
    for (const auto& region : tess.regions) {
      regions.push_back({{"ring", region.ring_index},
                         {"sector", region.sector_index},
                         {"area", region.area()},
                         {"bbox", {region.x0, region.y0, region.bbox_w,
                                   region.bbox_h}}});
    }
    j["regions"] = std::move(regions);
    write_text(a_tess.out, j.dump(2) + "\n");
    if (!a_tess.masks.empty()) {
      fs::create_directories(a_tess.masks);
      for (std::size_t r = 0; r < tess.num_rings(); ++r) {
        fovea::save_image(
            fs::path(a_tess.masks) / ("ring_" + std::to_string(r) + ".png"),
            fovea::ring_mask(tess, r));
      }
    }
  });

  // ---- single-image transforms ----
  struct {
    std::string in, out;
  } a_ref;
  auto* c_ref = app.add_subcommand("reference",
                                   "Identity transform (round-trip bound)");
  c_ref->add_option("input", a_ref.in, "Input image")
      ->required()
      ->check(CLI::ExistingFile);
  c_ref->add_option("output", a_ref.out, "Output PNG")->required();
  c_ref->callback([&] {
    fovea::save_image(a_ref.out, fovea::reference(fovea::load_image(a_ref.in)));
  });

  struct {
    std::string in, out;
    TessFlags tess;
    double alpha = 1.0;
    int patch = 4;
    std::uint64_t seed = 0;
  } a_tex;
  auto* c_tex = app.add_subcommand("foveate-texture",
                                   "Peripheral texture-scramble transform");
  c_tex->add_option("input", a_tex.in, "Input image")
      ->required()
      ->check(CLI::ExistingFile);
  c_tex->add_option("output", a_tex.out, "Output PNG")->required();
  add_tess_flags(c_tex, a_tex.tess);
  c_tex->add_option("--alpha", a_tex.alpha,
                    "Peripheral perturbation strength in [0, 1]");
  c_tex->add_option("--patch", a_tex.patch, "Scramble tile edge in pixels");
  c_tex->add_option("--seed", a_tex.seed, "Scramble seed");
  c_tex->callback([&] {
    const fovea::ImageBuffer img = fovea::load_image(a_tex.in);
    const fovea::Tessellation tess = fovea::build_tessellation(
        tess_config_for(a_tex.tess, img.width(), img.height()));
    fovea::TextureParams params;
    params.alpha.assign(tess.regions.size(), a_tex.alpha);
    params.patch = a_tex.patch;
    params.seed = a_tex.seed;
    fovea::save_image(a_tex.out, fovea::foveate_texture(img, tess, params));
  });

  struct {
    std::string in, out;
    TessFlags tess;
    std::vector<double> ring_sigmas;
  } a_fblur;
  auto* c_fblur = app.add_subcommand("foveate-blur",
                                     "Per-ring Gaussian blur transform");
  c_fblur->add_option("input", a_fblur.in, "Input image")
      ->required()
      ->check(CLI::ExistingFile);
  c_fblur->add_option("output", a_fblur.out, "Output PNG")->required();
  add_tess_flags(c_fblur, a_fblur.tess);
  c_fblur
      ->add_option("--ring-sigmas", a_fblur.ring_sigmas,
                   "Per-ring sigmas, fovea first (comma separated)")
      ->required()
      ->delimiter(',');
  c_fblur->callback([&] {
    const fovea::ImageBuffer img = fovea::load_image(a_fblur.in);
    const fovea::Tessellation tess = fovea::build_tessellation(
        tess_config_for(a_fblur.tess, img.width(), img.height()));
    const fovea::SigmaSchedule schedule =
        fovea::SigmaSchedule::make_per_ring(a_fblur.ring_sigmas);
    fovea::save_image(a_fblur.out,
                      fovea::foveate_blur(img, tess, schedule.ring_sigmas));
  });

  struct {
    std::string in, out;
    double sigma = 0.0;
  } a_ublur;
  auto* c_ublur =
      app.add_subcommand("uniform-blur", "Spatially uniform Gaussian blur");
  c_ublur->add_option("input", a_ublur.in, "Input image")
      ->required()
      ->check(CLI::ExistingFile);
  c_ublur->add_option("output", a_ublur.out, "Output PNG")->required();
  c_ublur->add_option("--sigma", a_ublur.sigma, "Blur sigma in pixels")
      ->required();
  c_ublur->callback([&] {
    fovea::save_image(
        a_ublur.out,
        fovea::uniform_blur(fovea::load_image(a_ublur.in), a_ublur.sigma));
  });

  // ---- rdmatch ----
  struct {
    std::string corpus;
    std::string mode = "uniform";
    TessFlags tess;
    double alpha = 1.0;
    int patch = 4;
    std::uint64_t seed = 0;
    double sigma_max = 20.0;
    double rate_tol = 1e-3;
    double sigma_tol = 1e-3;
    std::size_t corpus_limit = 250;
    std::string out = "-";
    std::string trace;
  } a_rd;
  auto* c_rd = app.add_subcommand(
      "rdmatch", "Match blur strength to the texture transform's rate");
  c_rd->add_option("--corpus", a_rd.corpus, "Corpus directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  c_rd->add_option("--mode", a_rd.mode, "uniform or per-ring")
      ->check(CLI::IsMember({"uniform", "per-ring"}));
  add_tess_flags(c_rd, a_rd.tess);
  c_rd->add_option("--alpha", a_rd.alpha, "Texture strength defining the target");
  c_rd->add_option("--patch", a_rd.patch, "Texture scramble tile edge");
  c_rd->add_option("--seed", a_rd.seed, "Texture scramble seed");
  c_rd->add_option("--sigma-max", a_rd.sigma_max, "Search upper bound");
  c_rd->add_option("--rate-tol", a_rd.rate_tol, "Rate stopping tolerance");
  c_rd->add_option("--sigma-tol", a_rd.sigma_tol, "Interval stopping tolerance");
  c_rd->add_option("--corpus-limit", a_rd.corpus_limit,
                   "Subsample searches past this corpus size");
  c_rd->add_option("--out", a_rd.out, "Result JSON path ('-' = stdout)");
  c_rd->add_option("--trace", a_rd.trace, "Search trace CSV path");
  c_rd->callback([&] {
    const auto files = fovea::list_images(a_rd.corpus);
    if (files.empty()) {
      throw std::invalid_argument("corpus has no images: " + a_rd.corpus);
    }
    std::vector<fovea::ImageBuffer> corpus;
    corpus.reserve(files.size());
    for (const auto& rel : files) {
      fovea::ImageBuffer img = fovea::load_image(fs::path(a_rd.corpus) / rel);
      if (!corpus.empty() && (img.width() != corpus.front().width() ||
                              img.height() != corpus.front().height())) {
        throw std::invalid_argument(
            "corpus images must share dimensions; offending file: " +
            rel.string());
      }
      corpus.push_back(std::move(img));
    }
    const fovea::Tessellation tess =
        fovea::build_tessellation(tess_config_for(
            a_rd.tess, corpus.front().width(), corpus.front().height()));
    fovea::TextureParams params;
    params.alpha.assign(tess.regions.size(), a_rd.alpha);
    params.patch = a_rd.patch;
    params.seed = a_rd.seed;
    fovea::RdSearchOptions options;
    options.sigma_max = a_rd.sigma_max;
    options.rate_tol = a_rd.rate_tol;
    options.sigma_tol = a_rd.sigma_tol;
    options.corpus_limit = a_rd.corpus_limit;

    fovea::RdMatchResult result;
    if (a_rd.mode == "uniform") {
      const fovea::RdTarget target =
          fovea::compute_target_rate(corpus, tess, params);
      result = fovea::match_uniform(target, corpus, options);
    } else {
      const std::vector<fovea::RdTarget> targets =
          fovea::compute_ring_targets(corpus, tess, params);
      result = fovea::match_per_ring(targets, corpus, tess, options);
    }
    write_text(a_rd.out, rdresult_json(a_rd.mode, result).dump(2) + "\n");
    if (!a_rd.trace.empty()) {
      std::string csv = "ring,sigma,rate\n";
      for (std::size_t ring = 0; ring < result.traces.size(); ++ring) {
        for (const auto& point : result.traces[ring]) {
          csv += std::to_string(ring) + "," + format_double(point.sigma) +
                 "," + format_double(point.rate) + "\n";
        }
      }
      write_text(a_rd.trace, csv);
    }
    for (const std::string& warning : result.warnings) {
      std::cerr << "warning: " << warning << "\n";
    }
  });

  // ---- iqa ----
  struct {
    std::string ref, cand;
    std::vector<std::string> metrics = {"ssim", "ms-ssim", "mse", "mi",
                                        "nlpd"};
    std::string csv;
  } a_iqa;
  auto* c_iqa = app.add_subcommand(
      "iqa", "Quality metrics between two images or two directories");
  c_iqa->add_option("reference", a_iqa.ref, "Reference image or directory")
      ->required()
      ->check(CLI::ExistingPath);
  c_iqa->add_option("candidate", a_iqa.cand, "Candidate image or directory")
      ->required()
      ->check(CLI::ExistingPath);
  c_iqa
      ->add_option("--metrics", a_iqa.metrics,
                   "Any of mse, ssim, ms-ssim, mi, nlpd")
      ->delimiter(',');
  c_iqa->add_option("--csv", a_iqa.csv, "Per-file scores CSV (directories)");
  c_iqa->callback([&] {
    if (fs::is_directory(a_iqa.ref) != fs::is_directory(a_iqa.cand)) {
      throw std::invalid_argument(
          "reference and candidate must both be files or both directories");
    }
    if (fs::is_directory(a_iqa.ref)) {
      const fovea::IqaBatch batch =
          fovea::iqa_directories(a_iqa.ref, a_iqa.cand, a_iqa.metrics);
      for (const auto& summary : batch.summaries) {
        std::cout << summary.metric << "," << format_double(summary.mean)
                  << "," << format_double(summary.std_dev) << ","
                  << summary.n << "\n";
      }
      if (!a_iqa.csv.empty()) {
        std::string csv = "file,metric,score\n";
        for (const auto& row : batch.rows) {
          csv += row.file + "," + row.metric + "," +
                 format_double(row.score) + "\n";
        }
        write_text(a_iqa.csv, csv);
      }
      for (const std::string& warning : batch.warnings) {
        std::cerr << "warning: " << warning << "\n";
      }
      if (!batch.warnings.empty()) status = 1;
      return;
    }
    const fovea::ImageBuffer ref = fovea::load_image(a_iqa.ref);
    const fovea::ImageBuffer cand = fovea::load_image(a_iqa.cand);
    const fovea::ImageBuffer gray_ref =
        ref.channels() == 1 ? ref : fovea::to_grayscale(ref);
    const fovea::ImageBuffer gray_cand =
        cand.channels() == 1 ? cand : fovea::to_grayscale(cand);
    for (const std::string& metric : a_iqa.metrics) {
      double score = 0.0;
      if (metric == "mse") {
        score = ref.channels() == cand.channels()
                    ? fovea::mse(ref, cand)
                    : fovea::mse(gray_ref, gray_cand);
      } else if (metric == "ssim") {
        score = fovea::ssim(gray_ref, gray_cand);
      } else if (metric == "ms-ssim") {
        score = fovea::ms_ssim(gray_ref, gray_cand);
      } else if (metric == "mi") {
        score = fovea::mutual_information(gray_ref, gray_cand);
      } else if (metric == "nlpd") {
        score = fovea::nlpd(gray_ref, gray_cand);
      } else {
        throw std::invalid_argument("unknown metric: " + metric);
      }
      std::cout << metric << "," << format_double(score) << "\n";
    }
  });

  // ---- freq ----
  struct {
    std::string in, out;
    std::string kind = "lowpass";
    std::string sigma = "0";
    bool gray = false;
    double mean = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> lowpass_sigmas;
    std::vector<std::string> highpass_sigmas;
    std::size_t workers = default_workers();
  } a_freq;
  auto* c_freq = app.add_subcommand(
      "freq", "Frequency-filtered stimuli (file: one render; directory: "
              "full battery)");
  c_freq->add_option("input", a_freq.in, "Input image or directory")
      ->required()
      ->check(CLI::ExistingPath);
  c_freq->add_option("output", a_freq.out, "Output PNG or directory")
      ->required();
  c_freq->add_option("--kind", a_freq.kind, "lowpass or highpass (file mode)")
      ->check(CLI::IsMember({"lowpass", "highpass"}));
  c_freq->add_option("--sigma", a_freq.sigma,
                     "Filter sigma; 'inf' = pure mean removal (file mode)");
  c_freq->add_flag("--gray", a_freq.gray, "Render grayscale (file mode)");
  c_freq->add_option("--mean", a_freq.mean,
                     "High-pass residual offset (default: the image mean)");
  c_freq
      ->add_option("--lowpass", a_freq.lowpass_sigmas,
                   "Battery low-pass sigmas (default: stock ladder)")
      ->delimiter(',');
  c_freq
      ->add_option("--highpass", a_freq.highpass_sigmas,
                   "Battery high-pass sigmas, 'inf' allowed")
      ->delimiter(',');
  c_freq->add_option("--workers", a_freq.workers, "Parallel workers");
  c_freq->callback([&] {
    if (fs::is_directory(a_freq.in)) {
      fovea::FrequencyBatteryOptions options;
      options.lowpass_sigmas = a_freq.lowpass_sigmas;
      for (const std::string& s : a_freq.highpass_sigmas) {
        options.highpass_sigmas.push_back(parse_sigma(s));
      }
      options.workers = a_freq.workers;
      status = finish_batch(
          fovea::frequency_battery(a_freq.in, a_freq.out, options),
          a_freq.out);
      return;
    }
    const fovea::ImageBuffer img = fovea::load_image(a_freq.in);
    fovea::FrequencySpec spec;
    spec.kind = a_freq.kind == "lowpass" ? fovea::FrequencyKind::lowpass
                                         : fovea::FrequencyKind::highpass;
    spec.sigma = parse_sigma(a_freq.sigma);
    spec.color_mode =
        a_freq.gray ? fovea::ColorMode::gray : fovea::ColorMode::color;
    if (spec.kind == fovea::FrequencyKind::highpass) {
      const int channels = a_freq.gray ? 1 : img.channels();
      if (std::isnan(a_freq.mean)) {
        double sum = 0.0;
        for (float v : img.data()) sum += v;
        a_freq.mean = sum / static_cast<double>(img.data().size());
      }
      spec.residual_means.assign(static_cast<std::size_t>(channels),
                                 a_freq.mean);
      fovea::save_image(a_freq.out, fovea::clamp01(fovea::highpass(img, spec)));
    } else {
      fovea::save_image(a_freq.out, fovea::lowpass(img, spec));
    }
  });

  // ---- occlude ----
  struct {
    std::string in, out;
    std::string kind = "left2right";
    double fraction = 0.0;
    std::vector<float> fill;
    std::vector<std::string> kinds;
    std::vector<double> fractions;
    std::size_t workers = default_workers();
  } a_occ;
  auto* c_occ = app.add_subcommand(
      "occlude",
      "Occlusion stimuli (file: one render; directory: full battery)");
  c_occ->add_option("input", a_occ.in, "Input image or directory")
      ->required()
      ->check(CLI::ExistingPath);
  c_occ->add_option("output", a_occ.out, "Output PNG or directory")
      ->required();
  c_occ->add_option("--kind", a_occ.kind,
                    "left2right, top2bottom, scotoma or glaucoma (file mode)");
  c_occ->add_option("--fraction", a_occ.fraction,
                    "Occluded fraction in [0, 1] (file mode)");
  c_occ->add_option("--fill", a_occ.fill, "Fill color (default mid-gray)")
      ->delimiter(',');
  c_occ
      ->add_option("--kinds", a_occ.kinds,
                   "Battery kinds (default: all four)")
      ->delimiter(',');
  c_occ
      ->add_option("--fractions", a_occ.fractions,
                   "Battery fractions (default: 0,0.1,...,1)")
      ->delimiter(',');
  c_occ->add_option("--workers", a_occ.workers, "Parallel workers");
  c_occ->callback([&] {
    if (fs::is_directory(a_occ.in)) {
      fovea::OcclusionBatteryOptions options;
      for (const std::string& name : a_occ.kinds) {
        options.kinds.push_back(occlusion_kind_from(name));
      }
      options.fractions = a_occ.fractions;
      options.fill = a_occ.fill;
      options.workers = a_occ.workers;
      status = finish_batch(
          fovea::occlusion_battery(a_occ.in, a_occ.out, options), a_occ.out);
      return;
    }
    fovea::OcclusionSpec spec;
    spec.kind = occlusion_kind_from(a_occ.kind);
    spec.fraction = a_occ.fraction;
    spec.fill = a_occ.fill;
    fovea::save_image(a_occ.out,
                      fovea::occlude(fovea::load_image(a_occ.in), spec));
  });

  // ---- cue-conflict ----
  struct {
    std::string a, b, out;
    std::string kind = "window";
    double ratio = 0.5;
    std::vector<double> ratios;
    double feather = 0.0;
    std::uint64_t seed = 0;
    std::size_t workers = default_workers();
  } a_cue;
  auto* c_cue = app.add_subcommand(
      "cue-conflict",
      "Foveal/peripheral composites (inner outer out: one; dir dir: battery)");
  c_cue->add_option("inner", a_cue.a, "Inner image, or category-tree directory")
      ->required()
      ->check(CLI::ExistingPath);
  c_cue->add_option("outer", a_cue.b, "Outer image, or output directory")
      ->required();
  c_cue->add_option("output", a_cue.out, "Output PNG (single mode)");
  c_cue->add_option("--kind", a_cue.kind, "window or square")
      ->check(CLI::IsMember({"window", "square"}));
  c_cue->add_option("--ratio", a_cue.ratio, "Foveal area ratio (single mode)");
  c_cue
      ->add_option("--ratios", a_cue.ratios,
                   "Battery ratios (default: 0,0.1,...,1)")
      ->delimiter(',');
  c_cue->add_option("--feather", a_cue.feather,
                    "Cross-fade width in pixels (0 = hard edge)");
  c_cue->add_option("--seed", a_cue.seed, "Square-variant pairing seed");
  c_cue->add_option("--workers", a_cue.workers, "Parallel workers");
  c_cue->callback([&] {
    const fovea::CueKind kind = a_cue.kind == "window"
                                    ? fovea::CueKind::window
                                    : fovea::CueKind::square;
    if (fs::is_directory(a_cue.a)) {
      fovea::CueConflictBatteryOptions options;
      options.kind = kind;
      options.ratios = a_cue.ratios;
      options.feather = a_cue.feather;
      options.seed = a_cue.seed;
      options.workers = a_cue.workers;
      status = finish_batch(
          fovea::cue_conflict_battery(a_cue.a, a_cue.b, options), a_cue.b);
      return;
    }
    if (a_cue.out.empty()) {
      throw std::invalid_argument("single mode needs inner outer output");
    }
    fovea::CueConflictSpec spec;
    spec.kind = kind;
    spec.foveal_ratio = a_cue.ratio;
    spec.feather = a_cue.feather;
    fovea::save_image(a_cue.out,
                      fovea::cue_conflict(fovea::load_image(a_cue.a),
                                          fovea::load_image(a_cue.b), spec));
  });

  // ---- crossover ----
  struct {
    std::string predictions;
    std::string curve;
  } a_cross;
  auto* c_cross = app.add_subcommand(
      "crossover", "Foveal/peripheral accuracy curves from predictions CSV");
  c_cross
      ->add_option("predictions", a_cross.predictions,
                   "CSV: path,ratio,inner_class,outer_class,predicted_class")
      ->required()
      ->check(CLI::ExistingFile);
  c_cross->add_option("--curve", a_cross.curve, "Accuracy curve CSV path");
  c_cross->callback([&] {
    std::ifstream in(a_cross.predictions);
    if (!in) {
      throw std::runtime_error("cannot read " + a_cross.predictions);
    }
    const auto records = fovea::parse_predictions_csv(in);
    const fovea::AccuracyCurve curve = fovea::crossover(records);
    std::string csv = "ratio,foveal_acc,peripheral_acc\n";
    for (std::size_t i = 0; i < curve.ratios.size(); ++i) {
      csv += format_double(curve.ratios[i]) + "," +
             format_double(curve.foveal_acc[i]) + "," +
             format_double(curve.peripheral_acc[i]) + "\n";
    }
    if (!a_cross.curve.empty()) {
      write_text(a_cross.curve, csv);
    } else {
      std::cout << csv;
    }
    if (curve.crossover.has_value()) {
      std::cout << "crossover = " << format_double(*curve.crossover) << "\n";
    } else {
      std::cout << "crossover = absent\n";
    }
  });

  // ---- pipeline ----
  struct {
    std::string config;
    std::string input, output, transform, seed, workers, alpha, patch, sigma,
        ring_sigmas, fovea_radius, scaling, sectors, fixation_x, fixation_y;
    bool resume = false;
  } a_pipe;
  auto* c_pipe = app.add_subcommand(
      "pipeline", "Render a directory tree under a config file; flags win");
  c_pipe->add_option("--config", a_pipe.config, "Config file")
      ->check(CLI::ExistingFile);
  auto* o_input = c_pipe->add_option("--input", a_pipe.input, "Input root");
  auto* o_output = c_pipe->add_option("--output", a_pipe.output, "Output root");
  auto* o_transform = c_pipe->add_option(
      "--transform", a_pipe.transform,
      "reference, foveate-texture, foveate-blur or uniform-blur");
  auto* o_seed = c_pipe->add_option("--seed", a_pipe.seed, "Global seed");
  auto* o_workers =
      c_pipe->add_option("--workers", a_pipe.workers, "Parallel workers");
  auto* o_alpha = c_pipe->add_option("--alpha", a_pipe.alpha,
                                     "Texture perturbation strength");
  auto* o_patch =
      c_pipe->add_option("--patch", a_pipe.patch, "Texture tile edge");
  auto* o_sigma =
      c_pipe->add_option("--sigma", a_pipe.sigma, "Uniform blur sigma");
  auto* o_rs = c_pipe->add_option("--ring-sigmas", a_pipe.ring_sigmas,
                                  "Per-ring sigmas, comma separated");
  auto* o_fr = c_pipe->add_option("--fovea-radius", a_pipe.fovea_radius,
                                  "Foveal radius in pixels");
  auto* o_sc =
      c_pipe->add_option("--scaling", a_pipe.scaling, "Scaling factor");
  auto* o_se =
      c_pipe->add_option("--sectors", a_pipe.sectors, "Sectors per ring");
  auto* o_fx = c_pipe->add_option("--fixation-x", a_pipe.fixation_x,
                                  "Fixation x in pixels");
  auto* o_fy = c_pipe->add_option("--fixation-y", a_pipe.fixation_y,
                                  "Fixation y in pixels");
  c_pipe->add_flag("--resume", a_pipe.resume,
                   "Keep existing outputs, render only what is missing");
  c_pipe->callback([&] {
    fovea::Config config;
    if (!a_pipe.config.empty()) config = fovea::Config::parse_file(a_pipe.config);
    const std::pair<const CLI::Option*, std::pair<std::string, std::string*>>
        overrides[] = {
            {o_input, {"input", &a_pipe.input}},
            {o_output, {"output", &a_pipe.output}},
            {o_transform, {"transform", &a_pipe.transform}},
            {o_seed, {"seed", &a_pipe.seed}},
            {o_workers, {"workers", &a_pipe.workers}},
            {o_alpha, {"texture.alpha", &a_pipe.alpha}},
            {o_patch, {"texture.patch", &a_pipe.patch}},
            {o_sigma, {"blur.sigma", &a_pipe.sigma}},
            {o_rs, {"blur.ring_sigmas", &a_pipe.ring_sigmas}},
            {o_fr, {"tessellation.fovea_radius", &a_pipe.fovea_radius}},
            {o_sc, {"tessellation.scaling", &a_pipe.scaling}},
            {o_se, {"tessellation.sectors", &a_pipe.sectors}},
            {o_fx, {"tessellation.fixation_x", &a_pipe.fixation_x}},
            {o_fy, {"tessellation.fixation_y", &a_pipe.fixation_y}},
        };
    for (const auto& [option, kv] : overrides) {
      if (option->count() > 0) config.set(kv.first, *kv.second);
    }
    if (a_pipe.resume) config.set("resume", "true");
    if (!config.has("workers")) {
      config.set("workers", std::to_string(default_workers()));
    }
    const fovea::PipelineConfig cfg = fovea::pipeline_config_from(config);
    const fovea::StimulusManifest manifest = fovea::run_pipeline(cfg);
    status = finish_batch(manifest, cfg.output_root);
  });

  // ---- report ----
  struct {
    std::string ref;
    std::vector<std::string> candidates;
    std::string out = "-";
  } a_rep;
  auto* c_rep = app.add_subcommand(
      "report", "Mean/std metric table for candidate directories");
  c_rep->add_option("reference", a_rep.ref, "Reference directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  c_rep->add_option("candidates", a_rep.candidates, "Candidate directories")
      ->required()
      ->check(CLI::ExistingDirectory);
  c_rep->add_option("--out", a_rep.out, "CSV output path ('-' = stdout)");
  c_rep->callback([&] {
    std::vector<fs::path> candidates(a_rep.candidates.begin(),
                                     a_rep.candidates.end());
    const fovea::SummaryReport report =
        fovea::report_summary(a_rep.ref, candidates);
    write_text(a_rep.out, report.csv);
    for (const std::string& warning : report.warnings) {
      std::cerr << "warning: " << warning << "\n";
    }
    if (!report.warnings.empty()) status = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return status;
}

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

#ifndef FOVEA_BATTERY_HPP
#define FOVEA_BATTERY_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "fovea/manifest.hpp"
#include "fovea/stimuli.hpp"

namespace fovea {

// Fraction/ratio grids for the batteries default to {0, 0.1, ..., 1.0}.
std::vector<double> default_fraction_grid();

struct FrequencyBatteryOptions {
  std::vector<double> lowpass_sigmas;   // empty selects the stock ladder
  std::vector<double> highpass_sigmas;  // empty selects the stock ladder
  std::size_t workers = 1;
};

// Renders every input at every low-pass and high-pass sigma, in color and
// gray, to output_dir. High-pass residual offsets use the corpus mean.
// Unreadable inputs become error records; the run continues.
StimulusManifest frequency_battery(const std::filesystem::path& input_dir,
                                   const std::filesystem::path& output_dir,
                                   const FrequencyBatteryOptions& options);

struct OcclusionBatteryOptions {
  std::vector<OcclusionKind> kinds;  // empty selects all four
  std::vector<double> fractions;     // empty selects the default grid
  std::vector<float> fill;           // empty selects mid-gray
  std::size_t workers = 1;
};

StimulusManifest occlusion_battery(const std::filesystem::path& input_dir,
                                   const std::filesystem::path& output_dir,
                                   const OcclusionBatteryOptions& options);

struct CueConflictBatteryOptions {
  CueKind kind = CueKind::window;
  std::vector<double> ratios;  // empty selects the default grid
  double feather = 0.0;
  std::uint64_t seed = 0;      // drives the square variant's pairing
  std::size_t workers = 1;
};

// input_dir must hold at least two category subdirectories of images. Each
// image is the inner (foveal) content of one composite per ratio; the window
// variant pairs category i with category i+1 cyclically, the square variant
// pairs uniformly at random, seeded per inner image.
StimulusManifest cue_conflict_battery(const std::filesystem::path& input_dir,
                                      const std::filesystem::path& output_dir,
                                      const CueConflictBatteryOptions& options);

}  // namespace fovea

#endif  // FOVEA_BATTERY_HPP

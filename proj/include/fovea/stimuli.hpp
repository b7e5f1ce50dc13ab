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

#ifndef FOVEA_STIMULI_HPP
#define FOVEA_STIMULI_HPP

#include <array>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fovea/image.hpp"

namespace fovea {

enum class FrequencyKind { lowpass, highpass };
enum class ColorMode { color, gray };

// Blur strengths of the two stock filter ladders; kInfiniteSigma marks the
// pure DC-removal high-pass end.
inline constexpr double kInfiniteSigma =
    std::numeric_limits<double>::infinity();
inline constexpr std::array<double, 8> kLowpassSigmas = {0.0,  1.0,  3.0, 5.0,
                                                         7.0, 10.0, 15.0, 40.0};
inline constexpr std::array<double, 8> kHighpassSigmas = {
    kInfiniteSigma, 3.0, 1.5, 1.0, 0.7, 0.55, 0.45, 0.4};

struct FrequencySpec {
  FrequencyKind kind = FrequencyKind::lowpass;
  double sigma = 0.0;
  ColorMode color_mode = ColorMode::color;
  // Per output channel; required for highpass, added back to the residual.
  std::vector<double> residual_means;
};

// Per-channel Gaussian low-pass; gray mode converts first.
ImageBuffer lowpass(const ImageBuffer& img, const FrequencySpec& spec);

// Residual high-pass plus the provided channel means; values may leave [0,1]
// and are only clamped at persistence. Infinite sigma removes the per-channel
// global mean instead of a blurred copy.
ImageBuffer highpass(const ImageBuffer& img, const FrequencySpec& spec);

// Mean intensity per channel over a corpus of same-channel-count images.
std::vector<double> channel_means(const std::vector<ImageBuffer>& corpus);

enum class OcclusionKind { left2right, top2bottom, scotoma, glaucoma };

struct OcclusionSpec {
  OcclusionKind kind = OcclusionKind::left2right;
  double fraction = 0.0;      // occluded visual-field fraction
  std::vector<float> fill;    // per channel; empty selects mid-gray 0.5
};

// Binary map of occluded pixels (1 = occluded). Disc kinds solve the disc
// radius from the exact frame-clipped area.
ImageBuffer occlusion_mask(int width, int height, const OcclusionSpec& spec);

ImageBuffer occlude(const ImageBuffer& img, const OcclusionSpec& spec);

// Disc radius whose frame-clipped area equals fraction of the frame.
double disc_radius_for_fraction(double fraction, int width, int height);

enum class CueKind { window, square };

struct CueConflictSpec {
  CueKind kind = CueKind::window;
  double foveal_ratio = 0.5;  // foveal area over total area
  double feather = 0.0;       // cross-fade width in pixels; 0 is a hard edge
  std::string inner_class;    // optional labels carried into manifests
  std::string outer_class;
};

// Composite with the inner image in a center window (disc or square) whose
// area fraction is foveal_ratio, and the outer image elsewhere.
ImageBuffer cue_conflict(const ImageBuffer& inner, const ImageBuffer& outer,
                         const CueConflictSpec& spec);

struct PredictionRecord {
  std::string path;
  double ratio = 0.0;
  std::string inner_class;
  std::string outer_class;
  std::string predicted_class;
};

struct AccuracyCurve {
  std::vector<double> ratios;
  std::vector<double> foveal_acc;
  std::vector<double> peripheral_acc;
  std::optional<double> crossover;
};

class PredictionParseError : public std::runtime_error {
 public:
  PredictionParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Header: path,ratio,inner_class,outer_class,predicted_class
std::vector<PredictionRecord> parse_predictions_csv(std::istream& in);

// Accuracy curves over sampled ratios and the first interpolated point where
// foveal and peripheral accuracy cross.
AccuracyCurve crossover(const std::vector<PredictionRecord>& records);

}  // namespace fovea

#endif  // FOVEA_STIMULI_HPP

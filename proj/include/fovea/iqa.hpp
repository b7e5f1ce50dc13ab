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

#ifndef FOVEA_IQA_HPP
#define FOVEA_IQA_HPP

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "fovea/image.hpp"

namespace fovea {

struct SsimParams {
  int window_size = 11;
  double window_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

// Mean over all pixels and channels of the squared difference on the 0-255
// scale, so magnitudes line up with 8-bit conventions.
double mse(const ImageBuffer& a, const ImageBuffer& b);

// Single-channel SSIM, mean over the valid-window map (no padding).
double ssim(const ImageBuffer& a, const ImageBuffer& b,
            const SsimParams& params = {});

// Per-pixel SSIM map over valid window positions; output size is
// (w - window + 1) x (h - window + 1).
ImageBuffer ssim_map(const ImageBuffer& a, const ImageBuffer& b,
                     const SsimParams& params = {});

// SSIM aggregated with a per-pixel weight map (same size as the inputs;
// cropped to the valid region). Uniform weights reproduce plain ssim.
double weighted_ssim(const ImageBuffer& a, const ImageBuffer& b,
                     const ImageBuffer& weight, const SsimParams& params = {});

// Per-scale MS-SSIM exponents, finest to coarsest.
inline constexpr std::array<double, 5> kMsSsimExponents = {
    0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

// Five-scale MS-SSIM: contrast-structure at every scale, luminance at the
// coarsest, exponents kMsSsimExponents.
double ms_ssim(const ImageBuffer& a, const ImageBuffer& b);

// Histogram mutual information in bits over 8-bit quantized intensities.
double mutual_information(const ImageBuffer& a, const ImageBuffer& b);

// Shannon entropy in bits of the 8-bit quantized intensity histogram.
double entropy_bits(const ImageBuffer& img);

// Normalized Laplacian pyramid distance: 6 bands, each divisively normalized
// by (0.17 + 3x3 local mean absolute band value); mean over bands of the RMS
// difference.
double nlpd(const ImageBuffer& a, const ImageBuffer& b);

struct MetricReport {
  std::string metric;
  std::vector<double> scores;
  double mean = 0.0;
  double std_dev = 0.0;  // population
  std::size_t n = 0;
};

MetricReport aggregate(const std::string& metric, std::vector<double> scores);

}  // namespace fovea

#endif  // FOVEA_IQA_HPP

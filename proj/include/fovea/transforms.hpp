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

#ifndef FOVEA_TRANSFORMS_HPP
#define FOVEA_TRANSFORMS_HPP

#include <cstdint>
#include <vector>

#include "fovea/geometry.hpp"
#include "fovea/image.hpp"

namespace fovea {

struct TextureParams {
  // Per-region texture blend strengths in region order; empty selects the
  // default of 0 for the fovea and 1 for every peripheral region. The foveal
  // entry is treated as 0 regardless.
  std::vector<double> alpha;
  std::uint64_t seed = 0;
  int patch = 4;  // scramble tile edge in pixels
};

struct SigmaSchedule {
  enum class Kind { uniform, per_ring };
  Kind kind = Kind::uniform;
  double sigma = 0.0;               // uniform form
  std::vector<double> ring_sigmas;  // per-ring form; index 0 is the fovea

  static SigmaSchedule make_uniform(double sigma);
  // Forces the foveal entry to zero.
  static SigmaSchedule make_per_ring(std::vector<double> sigmas);
};

// Identity bound: a value-identical copy.
ImageBuffer reference(const ImageBuffer& img);

// Per-region texture perturbation: each region's content is tile-scrambled
// and re-matched to the region's windowed mean and variance, then blended
// with the original at strength alpha through the region window.
ImageBuffer foveate_texture(const ImageBuffer& img, const Tessellation& tess,
                            const TextureParams& params);

// The scrambled, moment-matched texture content of one region, over its
// bounding box (same channel count as the input).
ImageBuffer texture_scramble_region(const ImageBuffer& img,
                                    const PoolingRegion& region,
                                    std::uint64_t seed, int patch);

// Windowed blend of per-ring blurred copies; ring_sigmas has one entry per
// ring including the fovea.
ImageBuffer foveate_blur(const ImageBuffer& img, const Tessellation& tess,
                         const std::vector<double>& ring_sigmas);

ImageBuffer uniform_blur(const ImageBuffer& img, double sigma);

}  // namespace fovea

#endif  // FOVEA_TRANSFORMS_HPP

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

#ifndef FOVEA_GEOMETRY_HPP
#define FOVEA_GEOMETRY_HPP

#include <cstddef>
#include <vector>

#include "fovea/image.hpp"

namespace fovea {

struct TessellationConfig {
  std::size_t width = 256;
  std::size_t height = 256;
  double fixation_x = -1.0;  // negative: use the image center
  double fixation_y = -1.0;
  double fovea_radius = 32.0;  // pixels; also the first ring boundary
  double scaling = 0.4;        // region width over eccentricity
  std::size_t num_sectors = 16;
};

// One pooling region: dense weight patch over a bounding box.
// Weights are row-major, (bbox_w * bbox_h) entries. Ring 0 is the fovea,
// a single undivided disc; peripheral rings split into sectors.
struct PoolingRegion {
  std::size_t ring_index = 0;
  std::size_t sector_index = 0;
  double radial_inner = 0.0;  // nominal extent; window support extends past
  double radial_outer = 0.0;  // it by the cross-fade width
  double angle_start = 0.0;
  double angle_end = 0.0;
  std::size_t x0 = 0, y0 = 0;
  std::size_t bbox_w = 0, bbox_h = 0;
  std::vector<float> weights;

  float weight_at(std::size_t x, std::size_t y) const {
    if (x < x0 || y < y0 || x >= x0 + bbox_w || y >= y0 + bbox_h) return 0.0f;
    return weights[(y - y0) * bbox_w + (x - x0)];
  }
  double area() const;
};

struct Tessellation {
  TessellationConfig config;
  double fixation_x = 0.0;
  double fixation_y = 0.0;
  double max_eccentricity = 0.0;
  std::vector<double> ring_boundaries;  // inner edges of peripheral rings
  std::vector<PoolingRegion> regions;   // fovea first, then ring-major

  std::size_t num_rings() const { return ring_boundaries.size() + 1; }
  const PoolingRegion& fovea() const { return regions.front(); }
  const PoolingRegion& region(std::size_t ring, std::size_t sector) const;
};

// Log-polar pooling grid: geometric ring boundaries, raised-cosine windows
// overlapping half-way in log-eccentricity and in polar angle, normalized so
// the windows sum to one at every pixel.
Tessellation build_tessellation(const TessellationConfig& config);

// Soft ring weight map: the sum of the ring's sector windows. Ring 0 gives
// the fovea window. Sums to one over all rings at every pixel.
ImageBuffer ring_mask(const Tessellation& tess, std::size_t ring);

}  // namespace fovea

#endif  // FOVEA_GEOMETRY_HPP

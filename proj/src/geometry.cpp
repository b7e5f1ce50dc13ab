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

#include "fovea/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fovea {
namespace {

constexpr double kPi = std::numbers::pi;

// Raised-cosine step from 0 to 1 over [center - half_width, center + half_width].
double rising_step(double u, double center, double half_width) {
  if (u <= center - half_width) return 0.0;
  if (u >= center + half_width) return 1.0;
  const double t = (u - (center - half_width)) / (2.0 * half_width);
  return 0.5 * (1.0 - std::cos(kPi * t));
}

// Plateau of 1 for angular distance below delta/4, cosine fade, zero past
// 3*delta/4. Adjacent sector windows sum to exactly one inside the fade.
double angular_window(double dist, double delta) {
  if (dist <= 0.25 * delta) return 1.0;
  if (dist >= 0.75 * delta) return 0.0;
  const double t = (dist - 0.25 * delta) / (0.5 * delta);
  return 0.5 * (1.0 + std::cos(kPi * t));
}

double wrapped_angle_distance(double a, double b) {
  double d = std::fabs(a - b);
  if (d > kPi) d = 2.0 * kPi - d;
  return d;
}

struct BBox {
  bool any = false;
  std::size_t xmin = 0, xmax = 0, ymin = 0, ymax = 0;

  void include(std::size_t x, std::size_t y) {
    if (!any) {
      any = true;
      xmin = xmax = x;
      ymin = ymax = y;
      return;
    }
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
};

// Raw window values at one pixel before normalization. radial[0] is the
// fovea, radial[n] peripheral ring n.
struct PixelWindows {
  std::vector<double> radial;
  std::vector<double> angular;
};

void evaluate_pixel(const Tessellation& tess, std::size_t x, std::size_t y,
                    PixelWindows& out) {
  const std::size_t num_boundaries = tess.ring_boundaries.size();
  const std::size_t num_sectors = tess.config.num_sectors;
  const double dx = (static_cast<double>(x) + 0.5) - tess.fixation_x;
  const double dy = (static_cast<double>(y) + 0.5) - tess.fixation_y;
  const double ecc = std::hypot(dx, dy);
  const double u = std::log(std::max(ecc, 1e-30));
  const double ratio = (1.0 + 0.5 * tess.config.scaling) /
                       (1.0 - 0.5 * tess.config.scaling);
  const double half_width = 0.25 * std::log(ratio);

  // Telescoping steps: the differences of successive raised-cosine steps
  // partition [0, 1] exactly across the fovea and the rings.
  double prev_step = 1.0;
  for (std::size_t j = 0; j < num_boundaries; ++j) {
    const double step =
        rising_step(u, std::log(tess.ring_boundaries[j]), half_width);
    out.radial[j] = (j == 0 ? 1.0 : prev_step) - step;
    prev_step = step;
  }
  out.radial[num_boundaries] = prev_step;  // outermost ring keeps the tail

  if (num_sectors == 1) {
    out.angular[0] = 1.0;
    return;
  }
  const double delta = 2.0 * kPi / static_cast<double>(num_sectors);
  double theta = std::atan2(dy, dx);
  if (theta < 0.0) theta += 2.0 * kPi;
  for (std::size_t k = 0; k < num_sectors; ++k) {
    const double center = (static_cast<double>(k) + 0.5) * delta;
    out.angular[k] = angular_window(wrapped_angle_distance(theta, center), delta);
  }
}

}  // namespace

double PoolingRegion::area() const {
  double sum = 0.0;
  for (float w : weights) sum += w;
  return sum;
}

const PoolingRegion& Tessellation::region(std::size_t ring,
                                          std::size_t sector) const {
  if (ring >= num_rings() || sector >= (ring == 0 ? 1 : config.num_sectors)) {
    throw std::out_of_range("pooling region index out of range");
  }
  return ring == 0 ? regions[0]
                   : regions[1 + (ring - 1) * config.num_sectors + sector];
}

Tessellation build_tessellation(const TessellationConfig& config) {
  if (config.width == 0 || config.height == 0) {
    throw std::invalid_argument("tessellation requires a non-empty image");
  }
  if (!(config.scaling > 0.0) || !(config.scaling < 1.0)) {
    throw std::invalid_argument("scaling must lie in (0, 1)");
  }
  if (!(config.fovea_radius > 0.0)) {
    throw std::invalid_argument("fovea_radius must be positive");
  }
  if (config.num_sectors == 0) {
    throw std::invalid_argument("num_sectors must be at least 1");
  }

  Tessellation tess;
  tess.config = config;
  const double w = static_cast<double>(config.width);
  const double h = static_cast<double>(config.height);
  tess.fixation_x = config.fixation_x < 0.0 ? 0.5 * w : config.fixation_x;
  tess.fixation_y = config.fixation_y < 0.0 ? 0.5 * h : config.fixation_y;
  if (tess.fixation_x > w || tess.fixation_y > h) {
    throw std::invalid_argument("fixation must lie inside the image");
  }
  const double far_x = std::max(tess.fixation_x, w - tess.fixation_x);
  const double far_y = std::max(tess.fixation_y, h - tess.fixation_y);
  tess.max_eccentricity = std::hypot(far_x, far_y);
  if (config.fovea_radius >= tess.max_eccentricity) {
    throw std::invalid_argument("fovea_radius covers the whole image");
  }

  // Geometric boundary progression; the ratio keeps region width over mean
  // eccentricity equal to the scaling factor.
  const double ratio =
      (1.0 + 0.5 * config.scaling) / (1.0 - 0.5 * config.scaling);
  for (double e = config.fovea_radius; e < tess.max_eccentricity; e *= ratio) {
    tess.ring_boundaries.push_back(e);
  }

  const std::size_t num_boundaries = tess.ring_boundaries.size();
  const std::size_t num_sectors = config.num_sectors;
  const std::size_t num_regions = 1 + num_boundaries * num_sectors;
  const double delta = 2.0 * kPi / static_cast<double>(num_sectors);

  PixelWindows win;
  win.radial.assign(num_boundaries + 1, 0.0);
  win.angular.assign(num_sectors, 0.0);

  std::vector<BBox> boxes(num_regions);
  for (std::size_t y = 0; y < config.height; ++y) {
    for (std::size_t x = 0; x < config.width; ++x) {
      evaluate_pixel(tess, x, y, win);
      if (win.radial[0] > 0.0) boxes[0].include(x, y);
      for (std::size_t j = 0; j < num_boundaries; ++j) {
        if (win.radial[j + 1] <= 0.0) continue;
        for (std::size_t k = 0; k < num_sectors; ++k) {
          if (win.angular[k] > 0.0) boxes[1 + j * num_sectors + k].include(x, y);
        }
      }
    }
  }

  tess.regions.resize(num_regions);
  for (std::size_t i = 0; i < num_regions; ++i) {
    PoolingRegion& region = tess.regions[i];
    if (i == 0) {
      region.ring_index = 0;
      region.sector_index = 0;
      region.radial_inner = 0.0;
      region.radial_outer = tess.ring_boundaries[0];
      region.angle_start = 0.0;
      region.angle_end = 2.0 * kPi;
    } else {
      const std::size_t j = (i - 1) / num_sectors;
      const std::size_t k = (i - 1) % num_sectors;
      region.ring_index = j + 1;
      region.sector_index = k;
      region.radial_inner = tess.ring_boundaries[j];
      region.radial_outer = (j + 1 < num_boundaries) ? tess.ring_boundaries[j + 1]
                                                     : tess.max_eccentricity;
      region.angle_start = static_cast<double>(k) * delta;
      region.angle_end = static_cast<double>(k + 1) * delta;
    }
    if (!boxes[i].any) continue;
    region.x0 = boxes[i].xmin;
    region.y0 = boxes[i].ymin;
    region.bbox_w = boxes[i].xmax - boxes[i].xmin + 1;
    region.bbox_h = boxes[i].ymax - boxes[i].ymin + 1;
    region.weights.assign(region.bbox_w * region.bbox_h, 0.0f);
  }

  for (std::size_t y = 0; y < config.height; ++y) {
    for (std::size_t x = 0; x < config.width; ++x) {
      evaluate_pixel(tess, x, y, win);
      double total = win.radial[0];
      for (std::size_t j = 0; j < num_boundaries; ++j) {
        if (win.radial[j + 1] <= 0.0) continue;
        for (std::size_t k = 0; k < num_sectors; ++k) {
          total += win.radial[j + 1] * win.angular[k];
        }
      }
      if (total <= 0.0) continue;
      const auto deposit = [&](std::size_t index, double value) {
        if (value <= 0.0) return;
        PoolingRegion& region = tess.regions[index];
        const std::size_t row = y - region.y0;
        const std::size_t col = x - region.x0;
        region.weights[row * region.bbox_w + col] =
            static_cast<float>(value / total);
      };
      deposit(0, win.radial[0]);
      for (std::size_t j = 0; j < num_boundaries; ++j) {
        if (win.radial[j + 1] <= 0.0) continue;
        for (std::size_t k = 0; k < num_sectors; ++k) {
          deposit(1 + j * num_sectors + k, win.radial[j + 1] * win.angular[k]);
        }
      }
    }
  }
  return tess;
}

ImageBuffer ring_mask(const Tessellation& tess, std::size_t ring) {
  if (ring >= tess.num_rings()) {
    throw std::invalid_argument("ring index out of range: " +
                                std::to_string(ring));
  }
  ImageBuffer mask(static_cast<int>(tess.config.width),
                   static_cast<int>(tess.config.height), 1);
  const std::size_t num_sectors = ring == 0 ? 1 : tess.config.num_sectors;
  for (std::size_t k = 0; k < num_sectors; ++k) {
    const PoolingRegion& region = tess.region(ring, k);
    for (std::size_t row = 0; row < region.bbox_h; ++row) {
      for (std::size_t col = 0; col < region.bbox_w; ++col) {
        mask.at(0, static_cast<int>(region.x0 + col),
                static_cast<int>(region.y0 + row)) +=
            region.weights[row * region.bbox_w + col];
      }
    }
  }
  return mask;
}

}  // namespace fovea

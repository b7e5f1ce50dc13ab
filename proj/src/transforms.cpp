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

#include "fovea/transforms.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

#include "fovea/hash.hpp"

namespace fovea {
namespace {

void require_matching_tessellation(const ImageBuffer& img,
                                   const Tessellation& tess) {
  if (static_cast<std::size_t>(img.width()) != tess.config.width ||
      static_cast<std::size_t>(img.height()) != tess.config.height) {
    throw std::invalid_argument("tessellation does not match image size");
  }
}

std::vector<double> resolve_alpha(const Tessellation& tess,
                                  const TextureParams& params) {
  std::vector<double> alpha;
  if (params.alpha.empty()) {
    alpha.assign(tess.regions.size(), 1.0);
  } else {
    if (params.alpha.size() != tess.regions.size()) {
      throw std::invalid_argument(
          "alpha list length must equal the region count");
    }
    alpha = params.alpha;
    for (double a : alpha) {
      if (!(a >= 0.0 && a <= 1.0)) {
        throw std::invalid_argument("alpha values must lie in [0, 1]");
      }
    }
  }
  alpha[0] = 0.0;  // the fovea stays untouched
  return alpha;
}

struct WindowedMoments {
  double mean = 0.0;
  double stddev = 0.0;
};

WindowedMoments windowed_moments(const ImageBuffer& patch,
                                 const PoolingRegion& region, int channel) {
  double wsum = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < region.weights.size(); ++i) {
    const double w = region.weights[i];
    wsum += w;
    mean += w * patch.data()[patch.plane_size() * static_cast<std::size_t>(
                                 channel) +
                             i];
  }
  if (wsum <= 0.0) return {};
  mean /= wsum;
  double var = 0.0;
  for (std::size_t i = 0; i < region.weights.size(); ++i) {
    const double w = region.weights[i];
    const double d = patch.data()[patch.plane_size() * static_cast<std::size_t>(
                                      channel) +
                                  i] -
                     mean;
    var += w * d * d;
  }
  return {mean, std::sqrt(var / wsum)};
}

ImageBuffer crop(const ImageBuffer& img, std::size_t x0, std::size_t y0,
                 std::size_t w, std::size_t h) {
  ImageBuffer out(static_cast<int>(w), static_cast<int>(h), img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        out.at(c, static_cast<int>(x), static_cast<int>(y)) =
            img.at(c, static_cast<int>(x0 + x), static_cast<int>(y0 + y));
      }
    }
  }
  return out;
}

}  // namespace

SigmaSchedule SigmaSchedule::make_uniform(double sigma) {
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("blur sigma must be non-negative");
  }
  SigmaSchedule s;
  s.kind = Kind::uniform;
  s.sigma = sigma;
  return s;
}

SigmaSchedule SigmaSchedule::make_per_ring(std::vector<double> sigmas) {
  if (sigmas.empty()) {
    throw std::invalid_argument("per-ring schedule must not be empty");
  }
  for (double s : sigmas) {
    if (!(s >= 0.0)) {
      throw std::invalid_argument("blur sigma must be non-negative");
    }
  }
  SigmaSchedule s;
  s.kind = Kind::per_ring;
  s.ring_sigmas = std::move(sigmas);
  s.ring_sigmas[0] = 0.0;
  return s;
}

ImageBuffer reference(const ImageBuffer& img) { return img; }

ImageBuffer texture_scramble_region(const ImageBuffer& img,
                                    const PoolingRegion& region,
                                    std::uint64_t seed, int patch) {
  if (patch < 1) throw std::invalid_argument("patch size must be positive");
  ImageBuffer content =
      crop(img, region.x0, region.y0, region.bbox_w, region.bbox_h);
  if (region.weights.empty()) return content;

  // Tiles fully inside the bounding box that touch the window support take
  // part in the permutation; trimmed edge tiles stay put.
  const std::size_t p = static_cast<std::size_t>(patch);
  std::vector<std::pair<std::size_t, std::size_t>> tiles;
  for (std::size_t ty = 0; ty + p <= region.bbox_h; ty += p) {
    for (std::size_t tx = 0; tx + p <= region.bbox_w; tx += p) {
      bool touches = false;
      for (std::size_t dy = 0; dy < p && !touches; ++dy) {
        for (std::size_t dx = 0; dx < p; ++dx) {
          if (region.weights[(ty + dy) * region.bbox_w + tx + dx] > 0.0f) {
            touches = true;
            break;
          }
        }
      }
      if (touches) tiles.emplace_back(tx, ty);
    }
  }

  std::vector<std::size_t> order(tiles.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng64 rng(seed);
  rng.shuffle(order.data(), order.size());

  ImageBuffer scrambled = content;
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    const auto [sx, sy] = tiles[order[i]];
    const auto [dx, dy] = tiles[i];
    for (int c = 0; c < img.channels(); ++c) {
      for (std::size_t py = 0; py < p; ++py) {
        for (std::size_t px = 0; px < p; ++px) {
          scrambled.at(c, static_cast<int>(dx + px), static_cast<int>(dy + py)) =
              content.at(c, static_cast<int>(sx + px),
                         static_cast<int>(sy + py));
        }
      }
    }
  }

  // Re-match the windowed first and second moments so the scramble perturbs
  // arrangement, not local statistics.
  for (int c = 0; c < img.channels(); ++c) {
    const WindowedMoments source = windowed_moments(content, region, c);
    const WindowedMoments shuffled = windowed_moments(scrambled, region, c);
    const double gain =
        shuffled.stddev > 1e-12 ? source.stddev / shuffled.stddev : 1.0;
    float* plane = scrambled.plane(c);
    for (std::size_t i = 0; i < scrambled.plane_size(); ++i) {
      plane[i] = static_cast<float>(source.mean +
                                    (plane[i] - shuffled.mean) * gain);
    }
  }
  return scrambled;
}

ImageBuffer foveate_texture(const ImageBuffer& img, const Tessellation& tess,
                            const TextureParams& params) {
  require_matching_tessellation(img, tess);
  const std::vector<double> alpha = resolve_alpha(tess, params);

  // Delta compositing keeps untouched content bit-identical: the output is
  // the input plus window-weighted texture deltas.
  ImageBuffer out = img;
  for (std::size_t i = 1; i < tess.regions.size(); ++i) {
    if (alpha[i] <= 0.0) continue;
    const PoolingRegion& region = tess.regions[i];
    if (region.weights.empty()) continue;
    const std::uint64_t region_seed = mix64(params.seed ^ mix64(i));
    const ImageBuffer texture =
        texture_scramble_region(img, region, region_seed, params.patch);
    for (int c = 0; c < img.channels(); ++c) {
      for (std::size_t y = 0; y < region.bbox_h; ++y) {
        for (std::size_t x = 0; x < region.bbox_w; ++x) {
          const float w = region.weights[y * region.bbox_w + x];
          if (w <= 0.0f) continue;
          const int ix = static_cast<int>(region.x0 + x);
          const int iy = static_cast<int>(region.y0 + y);
          const double q = img.at(c, ix, iy);
          const double t =
              texture.at(c, static_cast<int>(x), static_cast<int>(y));
          out.at(c, ix, iy) += static_cast<float>(w * alpha[i] * (t - q));
        }
      }
    }
  }
  return out;
}

ImageBuffer foveate_blur(const ImageBuffer& img, const Tessellation& tess,
                         const std::vector<double>& ring_sigmas) {
  require_matching_tessellation(img, tess);
  if (ring_sigmas.size() != tess.num_rings()) {
    throw std::invalid_argument("schedule length must equal the ring count");
  }
  for (double s : ring_sigmas) {
    if (!(s >= 0.0)) {
      throw std::invalid_argument("blur sigma must be non-negative");
    }
  }

  ImageBuffer out = img;
  for (std::size_t ring = 0; ring < ring_sigmas.size(); ++ring) {
    if (ring_sigmas[ring] == 0.0) continue;
    const ImageBuffer blurred = gaussian_blur(img, ring_sigmas[ring]);
    const ImageBuffer mask = ring_mask(tess, ring);
    for (int c = 0; c < img.channels(); ++c) {
      const float* m = mask.plane(0);
      const float* b = blurred.plane(c);
      const float* q = img.plane(c);
      float* o = out.plane(c);
      for (std::size_t i = 0; i < img.plane_size(); ++i) {
        if (m[i] <= 0.0f) continue;
        o[i] += static_cast<float>(static_cast<double>(m[i]) * (b[i] - q[i]));
      }
    }
  }
  return out;
}

ImageBuffer uniform_blur(const ImageBuffer& img, double sigma) {
  return gaussian_blur(img, sigma);
}

}  // namespace fovea

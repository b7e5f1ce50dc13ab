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
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fovea/geometry.hpp"
#include "fovea/image.hpp"
#include "fovea/iqa.hpp"
#include "fovea/transforms.hpp"
#include "testutil.hpp"

namespace {

fovea::Tessellation make_tess(std::size_t w, std::size_t h,
                              double fovea_radius = 32.0) {
  fovea::TessellationConfig config;
  config.width = w;
  config.height = h;
  config.fovea_radius = fovea_radius;
  config.scaling = 0.4;
  config.num_sectors = 16;
  return fovea::build_tessellation(config);
}

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
};

// Window-weighted mean/stddev of a bbox-sized patch, single channel.
Moments region_moments(const fovea::ImageBuffer& patch,
                       const fovea::PoolingRegion& region) {
  double wsum = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < region.weights.size(); ++i) {
    wsum += region.weights[i];
    mean += region.weights[i] * patch.data()[i];
  }
  mean /= wsum;
  double var = 0.0;
  for (std::size_t i = 0; i < region.weights.size(); ++i) {
    const double d = patch.data()[i] - mean;
    var += region.weights[i] * d * d;
  }
  return {mean, std::sqrt(var / wsum)};
}

fovea::ImageBuffer crop_box(const fovea::ImageBuffer& img, std::size_t x0,
                            std::size_t y0, std::size_t w, std::size_t h) {
  fovea::ImageBuffer out(static_cast<int>(w), static_cast<int>(h),
                         img.channels());
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

TEST_SUITE("transforms") {

TEST_CASE("reference is a value-identical copy") {
  const fovea::ImageBuffer img = testutil::synth_image(96, 80, 31, 3);
  const fovea::ImageBuffer out = fovea::reference(img);
  CHECK(testutil::bit_identical(img, out));
  CHECK(fovea::mse(img, out) == 0.0);
}

TEST_CASE("zero texture strength leaves the image bit-identical") {
  const fovea::ImageBuffer img = testutil::synth_image(128, 128, 33);
  const fovea::Tessellation tess = make_tess(128, 128);
  fovea::TextureParams params;
  params.alpha.assign(tess.regions.size(), 0.0);
  params.seed = 99;
  const fovea::ImageBuffer out = fovea::foveate_texture(img, tess, params);
  CHECK(testutil::bit_identical(img, out));
}

TEST_CASE("foveal plateau survives texture and blur untouched") {
  const fovea::ImageBuffer img = testutil::synth_image(128, 128, 35);
  const fovea::Tessellation tess = make_tess(128, 128);

  fovea::TextureParams params;  // default: full strength in the periphery
  params.seed = 5;
  const fovea::ImageBuffer textured = fovea::foveate_texture(img, tess, params);

  std::vector<double> sigmas(tess.num_rings(), 3.0);
  sigmas[0] = 0.0;
  const fovea::ImageBuffer blurred = fovea::foveate_blur(img, tess, sigmas);

  const fovea::PoolingRegion& fovea_region = tess.fovea();
  std::size_t plateau_pixels = 0;
  for (std::size_t y = 0; y < 128; ++y) {
    for (std::size_t x = 0; x < 128; ++x) {
      if (fovea_region.weight_at(x, y) != 1.0f) continue;
      ++plateau_pixels;
      const int ix = static_cast<int>(x);
      const int iy = static_cast<int>(y);
      CHECK(textured.at(0, ix, iy) == img.at(0, ix, iy));
      CHECK(blurred.at(0, ix, iy) == img.at(0, ix, iy));
    }
  }
  CHECK(plateau_pixels > 100);
}

TEST_CASE("explicit foveal alpha entries are ignored") {
  const fovea::ImageBuffer img = testutil::synth_image(128, 128, 37);
  const fovea::Tessellation tess = make_tess(128, 128);
  fovea::TextureParams params;
  params.alpha.assign(tess.regions.size(), 1.0);  // including the fovea slot
  params.seed = 7;
  const fovea::ImageBuffer out = fovea::foveate_texture(img, tess, params);
  const fovea::PoolingRegion& fovea_region = tess.fovea();
  for (std::size_t y = 40; y < 88; ++y) {
    for (std::size_t x = 40; x < 88; ++x) {
      if (fovea_region.weight_at(x, y) != 1.0f) continue;
      CHECK(out.at(0, static_cast<int>(x), static_cast<int>(y)) ==
            img.at(0, static_cast<int>(x), static_cast<int>(y)));
    }
  }
}

TEST_CASE("texture output is seed-deterministic") {
  const fovea::ImageBuffer img = testutil::synth_image(128, 128, 39);
  const fovea::Tessellation tess = make_tess(128, 128);
  fovea::TextureParams params;
  params.seed = 1234;
  const fovea::ImageBuffer first = fovea::foveate_texture(img, tess, params);
  const fovea::ImageBuffer second = fovea::foveate_texture(img, tess, params);
  CHECK(testutil::bit_identical(first, second));

  params.seed = 1235;
  const fovea::ImageBuffer other = fovea::foveate_texture(img, tess, params);
  CHECK(testutil::max_abs_diff(first, other) > 0.0);
}

TEST_CASE("scrambled regions keep their windowed moments") {
  const fovea::ImageBuffer img = testutil::synth_image(256, 256, 41);
  const fovea::Tessellation tess = make_tess(256, 256);
  const fovea::PoolingRegion& region = tess.region(2, 3);
  const fovea::ImageBuffer scrambled =
      fovea::texture_scramble_region(img, region, 17, 4);
  const fovea::ImageBuffer original =
      crop_box(img, region.x0, region.y0, region.bbox_w, region.bbox_h);

  const Moments before = region_moments(original, region);
  const Moments after = region_moments(scrambled, region);
  CHECK(after.mean == doctest::Approx(before.mean).epsilon(1e-3));
  CHECK(after.stddev == doctest::Approx(before.stddev).epsilon(1e-3));

  // The arrangement must actually change inside the window support.
  double support_mse = 0.0;
  double support_n = 0.0;
  for (std::size_t i = 0; i < region.weights.size(); ++i) {
    if (region.weights[i] <= 0.0f) continue;
    const double d = scrambled.data()[i] - original.data()[i];
    support_mse += d * d;
    support_n += 1.0;
  }
  CHECK(support_mse / support_n > 1e-5);
}

TEST_CASE("texture distortion only lands inside the selected region") {
  const fovea::ImageBuffer img = testutil::synth_image(256, 256, 43);
  const fovea::Tessellation tess = make_tess(256, 256);
  const std::size_t target = 1 + 1 * 16 + 4;  // ring 2, sector 4
  fovea::TextureParams params;
  params.alpha.assign(tess.regions.size(), 0.0);
  params.alpha[target] = 1.0;
  params.seed = 3;
  const fovea::ImageBuffer out = fovea::foveate_texture(img, tess, params);
  const fovea::PoolingRegion& region = tess.regions[target];
  bool changed_inside = false;
  for (std::size_t y = 0; y < 256; ++y) {
    for (std::size_t x = 0; x < 256; ++x) {
      const float delta = std::fabs(out.at(0, static_cast<int>(x),
                                           static_cast<int>(y)) -
                                    img.at(0, static_cast<int>(x),
                                           static_cast<int>(y)));
      if (region.weight_at(x, y) > 0.0f) {
        changed_inside = changed_inside || delta > 0.0f;
      } else {
        CHECK(delta == 0.0f);
      }
    }
  }
  CHECK(changed_inside);
}

TEST_CASE("raising every alpha degrades mean ssim monotonically") {
  const auto corpus = testutil::synth_corpus(10, 128, 128, 45);
  const fovea::Tessellation tess = make_tess(128, 128);
  double prev = 2.0;
  for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    fovea::TextureParams params;
    params.alpha.assign(tess.regions.size(), a);
    params.seed = 11;
    double mean = 0.0;
    for (const auto& img : corpus) {
      mean += fovea::ssim(img, fovea::foveate_texture(img, tess, params));
    }
    mean /= static_cast<double>(corpus.size());
    CHECK(mean <= prev + 1e-9);
    prev = mean;
  }
}

TEST_CASE("zero blur schedule is the identity") {
  const fovea::ImageBuffer img = testutil::synth_image(128, 128, 47);
  const fovea::Tessellation tess = make_tess(128, 128);
  const std::vector<double> zeros(tess.num_rings(), 0.0);
  CHECK(testutil::bit_identical(img, fovea::foveate_blur(img, tess, zeros)));
}

TEST_CASE("constant per-ring schedule collapses to uniform blur") {
  const fovea::ImageBuffer img = testutil::synth_image(128, 128, 49);
  const fovea::Tessellation tess = make_tess(128, 128);
  const std::vector<double> constant(tess.num_rings(), 2.5);
  const fovea::ImageBuffer ring_blend = fovea::foveate_blur(img, tess, constant);
  const fovea::ImageBuffer uniform = fovea::uniform_blur(img, 2.5);
  CHECK(testutil::max_abs_diff(ring_blend, uniform) < 1e-6);
}

TEST_CASE("blur schedules preserve constant images") {
  fovea::ImageBuffer flat(128, 128, 1);
  std::fill(flat.data().begin(), flat.data().end(), 0.6f);
  const fovea::Tessellation tess = make_tess(128, 128);
  std::vector<double> sigmas = {0.0, 1.0, 2.0, 4.0};
  sigmas.resize(tess.num_rings(), 4.0);
  const fovea::ImageBuffer out = fovea::foveate_blur(flat, tess, sigmas);
  float worst = 0.0f;
  for (float v : out.data()) worst = std::max(worst, std::fabs(v - 0.6f));
  CHECK(worst < 1e-6f);
}

TEST_CASE("gaussian blur composes like a semigroup") {
  const fovea::ImageBuffer img = testutil::synth_image(160, 160, 51);
  const fovea::ImageBuffer twice =
      fovea::uniform_blur(fovea::uniform_blur(img, 1.5), 2.0);
  const fovea::ImageBuffer once = fovea::uniform_blur(img, 2.5);
  float worst = 0.0f;
  for (int y = 16; y < 144; ++y) {
    for (int x = 16; x < 144; ++x) {
      worst = std::max(worst, std::fabs(twice.at(0, x, y) - once.at(0, x, y)));
    }
  }
  CHECK(worst <= 2e-3f);
}

TEST_CASE("uniform blur with zero sigma is the identity") {
  const fovea::ImageBuffer img = testutil::synth_image(64, 64, 53);
  CHECK(testutil::bit_identical(img, fovea::uniform_blur(img, 0.0)));
}

TEST_CASE("schedule constructors validate their inputs") {
  CHECK_THROWS_AS(fovea::SigmaSchedule::make_uniform(-0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(fovea::SigmaSchedule::make_per_ring({}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fovea::SigmaSchedule::make_per_ring({1.0, -2.0}),
                  std::invalid_argument);
  const fovea::SigmaSchedule schedule =
      fovea::SigmaSchedule::make_per_ring({3.0, 2.0, 4.0});
  CHECK(schedule.kind == fovea::SigmaSchedule::Kind::per_ring);
  CHECK(schedule.ring_sigmas[0] == 0.0);
  CHECK(schedule.ring_sigmas[1] == 2.0);
}

TEST_CASE("transform argument validation") {
  const fovea::ImageBuffer img = testutil::synth_image(128, 128, 55);
  const fovea::Tessellation tess = make_tess(128, 128);
  const fovea::Tessellation wrong = make_tess(96, 96);
  fovea::TextureParams params;
  CHECK_THROWS_AS(fovea::foveate_texture(img, wrong, params),
                  std::invalid_argument);

  fovea::TextureParams short_alpha;
  short_alpha.alpha = {0.0, 1.0};
  CHECK_THROWS_AS(fovea::foveate_texture(img, tess, short_alpha),
                  std::invalid_argument);

  fovea::TextureParams out_of_range;
  out_of_range.alpha.assign(tess.regions.size(), 1.5);
  CHECK_THROWS_AS(fovea::foveate_texture(img, tess, out_of_range),
                  std::invalid_argument);

  fovea::TextureParams bad_patch;
  bad_patch.patch = 0;
  CHECK_THROWS_AS(fovea::foveate_texture(img, tess, bad_patch),
                  std::invalid_argument);

  CHECK_THROWS_AS(fovea::foveate_blur(img, tess, {0.0, 1.0}),
                  std::invalid_argument);
  std::vector<double> negative(tess.num_rings(), 1.0);
  negative.back() = -1.0;
  CHECK_THROWS_AS(fovea::foveate_blur(img, tess, negative),
                  std::invalid_argument);
  CHECK_THROWS_AS(fovea::foveate_blur(img, wrong, negative),
                  std::invalid_argument);
}

}  // TEST_SUITE

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
#include <stdexcept>
#include <fstream>
#include <iterator>
#include <numeric>

#include "doctest.h"
#include "fovea/image.hpp"
#include "fovea/image_io.hpp"
#include "testutil.hpp"

namespace {

// Dense 2-D convolution with replicate boundaries: the oracle the separable
// fast path must match.
fovea::ImageBuffer blur_oracle(const fovea::ImageBuffer& img, double sigma) {
  const fovea::GaussianKernel kernel = fovea::make_gaussian_kernel(sigma);
  const int r = kernel.radius();
  fovea::ImageBuffer out(img.width(), img.height(), img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        double acc = 0.0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const int sx = std::clamp(x + dx, 0, img.width() - 1);
            const int sy = std::clamp(y + dy, 0, img.height() - 1);
            acc += kernel.taps[static_cast<std::size_t>(dy + r)] *
                   kernel.taps[static_cast<std::size_t>(dx + r)] *
                   img.at(c, sx, sy);
          }
        }
        out.at(c, x, y) = static_cast<float>(acc);
      }
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("image") {

TEST_CASE("gaussian kernel: unit sum, symmetry, radius") {
  for (double sigma : {0.5, 1.0, 1.5, 3.7, 10.0}) {
    const fovea::GaussianKernel k = fovea::make_gaussian_kernel(sigma);
    CHECK(k.radius() == static_cast<int>(std::ceil(3.0 * sigma)));
    CHECK(k.taps.size() == static_cast<std::size_t>(2 * k.radius() + 1));
    const double sum = std::accumulate(k.taps.begin(), k.taps.end(), 0.0);
    CHECK(std::abs(sum - 1.0) < 1e-12);
    for (int i = 0; i <= k.radius(); ++i) {
      CHECK(k.taps[static_cast<std::size_t>(k.radius() - i)] ==
            doctest::Approx(k.taps[static_cast<std::size_t>(k.radius() + i)])
                .epsilon(1e-15));
    }
  }
  const fovea::GaussianKernel zero = fovea::make_gaussian_kernel(0.0);
  CHECK(zero.taps.size() == 1);
  CHECK(zero.taps[0] == 1.0);
  CHECK_THROWS_AS(fovea::make_gaussian_kernel(-1.0), std::invalid_argument);
}

TEST_CASE("separable blur matches the dense 2-D oracle") {
  const fovea::ImageBuffer img = testutil::synth_image(24, 20, 77, 3);
  for (double sigma : {0.8, 1.7}) {
    const fovea::ImageBuffer fast = fovea::gaussian_blur(img, sigma);
    const fovea::ImageBuffer slow = blur_oracle(img, sigma);
    CHECK(testutil::max_abs_diff(fast, slow) < 1e-6);
  }
}

TEST_CASE("blur of a constant stays that constant") {
  const fovea::ImageBuffer img(33, 21, 1, 0.73f);
  const fovea::ImageBuffer out = fovea::gaussian_blur(img, 4.2);
  CHECK(testutil::max_abs_diff(img, out) < 1e-9);
}

TEST_CASE("blur is linear") {
  const fovea::ImageBuffer a = testutil::synth_image(40, 40, 1);
  const fovea::ImageBuffer b = testutil::synth_image(40, 40, 2);
  fovea::ImageBuffer sum(40, 40, 1);
  for (std::size_t i = 0; i < sum.data().size(); ++i) {
    sum.data()[i] = 0.5f * (a.data()[i] + b.data()[i]);
  }
  const fovea::ImageBuffer lhs = fovea::gaussian_blur(sum, 2.0);
  const fovea::ImageBuffer ba = fovea::gaussian_blur(a, 2.0);
  const fovea::ImageBuffer bb = fovea::gaussian_blur(b, 2.0);
  fovea::ImageBuffer rhs(40, 40, 1);
  for (std::size_t i = 0; i < rhs.data().size(); ++i) {
    rhs.data()[i] = 0.5f * (ba.data()[i] + bb.data()[i]);
  }
  CHECK(testutil::max_abs_diff(lhs, rhs) < 1e-6);
}

TEST_CASE("sigma zero is the identity") {
  const fovea::ImageBuffer img = testutil::synth_image(31, 17, 3);
  CHECK(testutil::bit_identical(fovea::gaussian_blur(img, 0.0), img));
}

TEST_CASE("grayscale uses the 601 weights") {
  fovea::ImageBuffer img(4, 1, 3);
  // pure red / green / blue / white pixels
  img.at(0, 0, 0) = 1.0f;
  img.at(1, 1, 0) = 1.0f;
  img.at(2, 2, 0) = 1.0f;
  img.at(0, 3, 0) = img.at(1, 3, 0) = img.at(2, 3, 0) = 1.0f;
  const fovea::ImageBuffer gray = fovea::to_grayscale(img);
  CHECK(gray.channels() == 1);
  CHECK(gray.at(0, 0, 0) == doctest::Approx(0.299).epsilon(1e-6));
  CHECK(gray.at(0, 1, 0) == doctest::Approx(0.587).epsilon(1e-6));
  CHECK(gray.at(0, 2, 0) == doctest::Approx(0.114).epsilon(1e-6));
  CHECK(gray.at(0, 3, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(fovea::to_grayscale(fovea::ImageBuffer(4, 4, 1)),
                  std::invalid_argument);
}

TEST_CASE("decimation keeps even samples; upsample restores shape") {
  const fovea::ImageBuffer img = testutil::synth_image(25, 14, 4);
  const fovea::ImageBuffer half = fovea::decimate2(img);
  CHECK(half.width() == 12);
  CHECK(half.height() == 7);
  for (int y = 0; y < half.height(); ++y) {
    for (int x = 0; x < half.width(); ++x) {
      CHECK(half.at(0, x, y) == img.at(0, 2 * x, 2 * y));
    }
  }
  const fovea::ImageBuffer up = fovea::upsample(half, 25, 14);
  CHECK(up.width() == 25);
  CHECK(up.height() == 14);
}

TEST_CASE("upsample of a constant is that constant") {
  const fovea::ImageBuffer small(9, 7, 1, 0.31f);
  const fovea::ImageBuffer up = fovea::upsample(small, 20, 23);
  for (float v : up.data()) CHECK(v == doctest::Approx(0.31f).epsilon(1e-6));
}

TEST_CASE("laplacian pyramid reconstructs the input") {
  const fovea::ImageBuffer img = testutil::synth_image(96, 64, 5);
  const fovea::Pyramid pyr =
      fovea::build_pyramid(img, 4, fovea::PyramidKind::laplacian);
  CHECK(pyr.levels.size() == 4);
  const fovea::ImageBuffer back = fovea::reconstruct(pyr);
  CHECK(testutil::max_abs_diff(img, back) < 1e-5);
}

TEST_CASE("pyramid depth guard") {
  const fovea::ImageBuffer img = testutil::synth_image(64, 64, 6);
  CHECK_THROWS_AS(
      fovea::build_pyramid(img, 5, fovea::PyramidKind::gaussian),
      std::invalid_argument);  // 64 >> 4 = 4 < 8
  CHECK_NOTHROW(fovea::build_pyramid(img, 4, fovea::PyramidKind::gaussian));
}

TEST_CASE("quantize8 rounds half up") {
  CHECK(fovea::quantize8(0.0f) == 0);
  CHECK(fovea::quantize8(1.0f) == 255);
  CHECK(fovea::quantize8(-0.5f) == 0);
  CHECK(fovea::quantize8(2.0f) == 255);
  CHECK(fovea::quantize8(0.5f / 255.0f) == 1);
  CHECK(fovea::quantize8(0.49f / 255.0f) == 0);
}

TEST_CASE("png round-trip is exact for 8-bit data") {
  testutil::TempDir dir("png");
  for (int channels : {1, 3}) {
    fovea::ImageBuffer img = testutil::synth_image(37, 21, 9, channels);
    // snap to the 8-bit lattice so the round-trip is lossless
    for (float& v : img.data()) {
      v = static_cast<float>(fovea::quantize8(v)) / 255.0f;
    }
    const auto path = dir / ("rt" + std::to_string(channels) + ".png");
    fovea::save_image(path, img);
    const fovea::ImageBuffer back = fovea::load_image(path);
    CHECK(back.channels() == channels);
    CHECK(testutil::max_abs_diff(img, back) < 1e-9);
  }
}

TEST_CASE("png encoder output is byte-stable") {
  testutil::TempDir dir("pngdet");
  const fovea::ImageBuffer img = testutil::synth_image(40, 40, 10, 3);
  fovea::save_image(dir / "a.png", img);
  fovea::save_image(dir / "b.png", img);
  std::ifstream fa(dir / "a.png", std::ios::binary);
  std::ifstream fb(dir / "b.png", std::ios::binary);
  const std::string ba((std::istreambuf_iterator<char>(fa)), {});
  const std::string bb((std::istreambuf_iterator<char>(fb)), {});
  CHECK(ba == bb);
  CHECK(!ba.empty());
}

TEST_CASE("pnm round-trip") {
  testutil::TempDir dir("pnm");
  fovea::ImageBuffer gray = testutil::synth_image(19, 23, 11, 1);
  fovea::ImageBuffer color = testutil::synth_image(19, 23, 12, 3);
  for (float& v : gray.data()) {
    v = static_cast<float>(fovea::quantize8(v)) / 255.0f;
  }
  for (float& v : color.data()) {
    v = static_cast<float>(fovea::quantize8(v)) / 255.0f;
  }
  fovea::save_image(dir / "g.pgm", gray);
  fovea::save_image(dir / "c.ppm", color);
  CHECK(testutil::max_abs_diff(fovea::load_image(dir / "g.pgm"), gray) < 1e-9);
  CHECK(testutil::max_abs_diff(fovea::load_image(dir / "c.ppm"), color) <
        1e-9);
}

TEST_CASE("loading a missing file throws") {
  CHECK_THROWS(fovea::load_image("/nonexistent/nope.png"));
}

}  // TEST_SUITE

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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fovea/image.hpp"
#include "fovea/iqa.hpp"
#include "testutil.hpp"

namespace {

using fovea::ImageBuffer;
using fovea::SsimParams;

// Dense reference SSIM: every fully contained window scored with explicit
// 2-D Gaussian weights, no separable-pass shortcuts.
double ssim_dense_oracle(const ImageBuffer& a, const ImageBuffer& b,
                         const SsimParams& params = {}) {
  const int r = params.window_size / 2;
  std::vector<double> taps(static_cast<std::size_t>(params.window_size));
  double tap_sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    const double t =
        std::exp(-0.5 * (i * i) / (params.window_sigma * params.window_sigma));
    taps[static_cast<std::size_t>(i + r)] = t;
    tap_sum += t;
  }
  for (double& t : taps) t /= tap_sum;

  const double c1 = params.k1 * params.dynamic_range * params.k1 *
                    params.dynamic_range;
  const double c2 = params.k2 * params.dynamic_range * params.k2 *
                    params.dynamic_range;
  const int out_w = a.width() - 2 * r;
  const int out_h = a.height() - 2 * r;
  double total = 0.0;
  for (int y0 = 0; y0 < out_h; ++y0) {
    for (int x0 = 0; x0 < out_w; ++x0) {
      double ma = 0.0, mb = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
      for (int j = 0; j < params.window_size; ++j) {
        for (int i = 0; i < params.window_size; ++i) {
          const double w = taps[static_cast<std::size_t>(i)] *
                           taps[static_cast<std::size_t>(j)];
          const double va = a.at(0, x0 + i, y0 + j);
          const double vb = b.at(0, x0 + i, y0 + j);
          ma += w * va;
          mb += w * vb;
          aa += w * va * va;
          bb += w * vb * vb;
          ab += w * va * vb;
        }
      }
      const double var_a = aa - ma * ma;
      const double var_b = bb - mb * mb;
      const double cov = ab - ma * mb;
      const double l = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
      const double cs = (2.0 * cov + c2) / (var_a + var_b + c2);
      total += l * cs;
    }
  }
  return total / (static_cast<double>(out_w) * out_h);
}

ImageBuffer sine_image(int w, int h, double base, double amp, double fx,
                       double fy, double phase = 0.0) {
  ImageBuffer img(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(0, x, y) =
          static_cast<float>(base + amp * std::sin(fx * x + fy * y + phase));
    }
  }
  return img;
}

ImageBuffer constant_image(int w, int h, float value, int channels = 1) {
  ImageBuffer img(w, h, channels);
  std::fill(img.data().begin(), img.data().end(), value);
  return img;
}

ImageBuffer add_scalar(const ImageBuffer& img, float c) {
  ImageBuffer out = img;
  for (float& v : out.data()) v += c;
  return out;
}

// Alternating +/-eps pattern; its response under the 11-tap Gaussian window
// is ~1e-4*eps, so both images keep matching local means.
ImageBuffer add_checker(const ImageBuffer& img, float eps) {
  ImageBuffer out = img;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(0, x, y) += ((x + y) % 2 == 0) ? eps : -eps;
    }
  }
  return out;
}

ImageBuffer quantize_levels(const ImageBuffer& img, int levels) {
  ImageBuffer out = img;
  for (float& v : out.data()) {
    const float q = std::floor(v * static_cast<float>(levels));
    v = std::min(q, static_cast<float>(levels - 1)) /
        static_cast<float>(levels - 1);
  }
  return out;
}

}  // namespace

TEST_SUITE("iqa") {

TEST_CASE("identical inputs score at the metric extremes") {
  const ImageBuffer img = testutil::synth_image(256, 256, 11);
  CHECK(fovea::mse(img, img) == 0.0);
  CHECK(fovea::ssim(img, img) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fovea::ms_ssim(img, img) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fovea::nlpd(img, img) == 0.0);
  const double self_mi = fovea::mutual_information(img, img);
  const double entropy = fovea::entropy_bits(img);
  CHECK(self_mi == doctest::Approx(entropy).epsilon(1e-9));
  CHECK(entropy > 6.5);
  CHECK(entropy <= 8.0);
}

TEST_CASE("mse matches hand-computed values") {
  const ImageBuffer zeros = constant_image(16, 16, 0.0f);
  const ImageBuffer ones = constant_image(16, 16, 1.0f);
  CHECK(fovea::mse(zeros, ones) == doctest::Approx(65025.0).epsilon(1e-12));

  ImageBuffer checker(8, 8, 1);
  ImageBuffer inverse(8, 8, 1);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      const float v = ((x + y) % 2 == 0) ? 1.0f : 0.0f;
      checker.at(0, x, y) = v;
      inverse.at(0, x, y) = 1.0f - v;
    }
  }
  CHECK(fovea::mse(checker, inverse) == doctest::Approx(65025.0).epsilon(1e-12));

  const ImageBuffer base = testutil::synth_image(32, 32, 3);
  const ImageBuffer shifted = add_scalar(base, 1.0f / 255.0f);
  CHECK(fovea::mse(base, shifted) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("mse averages over every channel") {
  ImageBuffer a(2, 1, 3);
  ImageBuffer b(2, 1, 3);
  std::fill(a.data().begin(), a.data().end(), 0.0f);
  std::fill(b.data().begin(), b.data().end(), 0.0f);
  b.at(2, 1, 0) = 10.0f / 255.0f;  // one of six samples differs by 10/255
  CHECK(fovea::mse(a, b) == doctest::Approx(100.0 / 6.0).epsilon(1e-6));
}

TEST_CASE("ssim agrees with a dense per-window oracle") {
  ImageBuffer a(32, 24, 1);
  ImageBuffer b(32, 24, 1);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 32; ++x) {
      a.at(0, x, y) = static_cast<float>(0.5 + 0.3 * std::sin(0.7 * x + 0.3 * y) +
                                         0.1 * std::sin(1.7 * x - 0.9 * y));
      b.at(0, x, y) = static_cast<float>(0.5 + 0.28 * std::sin(0.7 * x + 0.35 * y) +
                                         0.12 * std::cos(1.1 * x + 0.5 * y));
    }
  }
  CHECK(fovea::ssim(a, b) ==
        doctest::Approx(ssim_dense_oracle(a, b)).epsilon(1e-9));

  const ImageBuffer map = fovea::ssim_map(a, b);
  CHECK(map.width() == 22);
  CHECK(map.height() == 14);
  double map_mean = 0.0;
  for (float v : map.data()) map_mean += v;
  map_mean /= static_cast<double>(map.data().size());
  // Map entries are float-rounded, so the mean only matches to float grain.
  CHECK(map_mean == doctest::Approx(fovea::ssim(a, b)).epsilon(1e-6));
}

TEST_CASE("contrast inversion drives ssim negative") {
  const ImageBuffer img = sine_image(64, 64, 0.5, 0.4, 0.6, 0.25);
  ImageBuffer inverted = img;
  for (float& v : inverted.data()) v = 1.0f - v;
  CHECK(fovea::ssim(img, inverted) < 0.0);
}

TEST_CASE("ssim decreases strictly with blur strength") {
  const ImageBuffer img = testutil::synth_image(256, 256, 21);
  const double sigmas[] = {0.5, 1.0, 2.0, 4.0, 8.0};
  double prev = 1.0;
  for (double sigma : sigmas) {
    const double score = fovea::ssim(img, fovea::gaussian_blur(img, sigma));
    CHECK(score < prev);
    prev = score;
  }
}

TEST_CASE("similarity metrics are symmetric") {
  const ImageBuffer a = testutil::synth_image(256, 256, 5);
  const ImageBuffer b = fovea::gaussian_blur(testutil::synth_image(256, 256, 6), 1.0);
  CHECK(fovea::ssim(a, b) == doctest::Approx(fovea::ssim(b, a)).epsilon(1e-9));
  CHECK(fovea::ms_ssim(a, b) ==
        doctest::Approx(fovea::ms_ssim(b, a)).epsilon(1e-9));
  CHECK(fovea::mse(a, b) == doctest::Approx(fovea::mse(b, a)).epsilon(1e-9));
  CHECK(fovea::nlpd(a, b) == doctest::Approx(fovea::nlpd(b, a)).epsilon(1e-9));
  CHECK(fovea::mutual_information(a, b) ==
        doctest::Approx(fovea::mutual_information(b, a)).epsilon(1e-9));
}

TEST_CASE("ssim is invariant to a shared constant offset") {
  // The pair keeps matched window means (checker perturbation vanishes under
  // the Gaussian window), so only the offset itself could move the score.
  const ImageBuffer a = sine_image(96, 80, 0.35, 0.25, 0.45, 0.2);
  const ImageBuffer b = add_checker(a, 0.04f);
  const double base = fovea::ssim(a, b);
  for (float c : {0.02f, 0.05f, 0.1f}) {
    const double shifted = fovea::ssim(add_scalar(a, c), add_scalar(b, c));
    CHECK(shifted == doctest::Approx(base).epsilon(1e-6));
  }
}

TEST_CASE("uniform weights reproduce plain ssim") {
  const ImageBuffer a = testutil::synth_image(96, 64, 7);
  const ImageBuffer b = fovea::gaussian_blur(a, 1.5);
  const ImageBuffer w = constant_image(96, 64, 0.37f);
  CHECK(fovea::weighted_ssim(a, b, w) ==
        doctest::Approx(fovea::ssim(a, b)).epsilon(1e-9));
}

TEST_CASE("weighted ssim needs support inside the valid region") {
  const ImageBuffer a = testutil::synth_image(48, 48, 9);
  const ImageBuffer b = fovea::gaussian_blur(a, 1.0);
  const ImageBuffer zero_w = constant_image(48, 48, 0.0f);
  CHECK_THROWS_AS(fovea::weighted_ssim(a, b, zero_w), std::invalid_argument);

  // Weight confined to the 5-pixel border never lands on a valid window
  // centre, so it must be rejected rather than silently ignored.
  ImageBuffer border_w = constant_image(48, 48, 0.0f);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 48; ++x) {
      if (x < 5 || y < 5 || x >= 43 || y >= 43) border_w.at(0, x, y) = 1.0f;
    }
  }
  CHECK_THROWS_AS(fovea::weighted_ssim(a, b, border_w), std::invalid_argument);

  const ImageBuffer small_w = constant_image(24, 48, 1.0f);
  CHECK_THROWS_AS(fovea::weighted_ssim(a, b, small_w), std::invalid_argument);
}

TEST_CASE("ms-ssim scale weights are normalized") {
  const double sum = std::accumulate(fovea::kMsSsimExponents.begin(),
                                     fovea::kMsSsimExponents.end(), 0.0);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("ms-ssim punishes collapsing texture to its mean") {
  const ImageBuffer img = testutil::synth_image(256, 256, 13);
  double mean = 0.0;
  for (float v : img.data()) mean += v;
  mean /= static_cast<double>(img.data().size());
  const ImageBuffer flat = constant_image(256, 256, static_cast<float>(mean));
  CHECK(fovea::ms_ssim(img, flat) < 0.5);
}

TEST_CASE("ms-ssim enforces the five-scale minimum size") {
  const ImageBuffer ok = testutil::synth_image(176, 200, 15);
  CHECK(fovea::ms_ssim(ok, ok) == doctest::Approx(1.0).epsilon(1e-12));
  const ImageBuffer tiny = testutil::synth_image(175, 256, 15);
  CHECK_THROWS_AS(fovea::ms_ssim(tiny, tiny), std::invalid_argument);
}

TEST_CASE("mutual information hits the independence floor") {
  const ImageBuffer img = testutil::synth_image(256, 256, 17);
  const ImageBuffer flat = constant_image(256, 256, 0.42f);
  CHECK(fovea::mutual_information(img, flat) == 0.0);

  // Shuffling destroys spatial correspondence; coarse quantization keeps the
  // finite-sample bias of the 256x256 joint histogram below the tolerance.
  const ImageBuffer coarse = quantize_levels(img, 16);
  ImageBuffer shuffled = coarse;
  std::mt19937_64 rng(12345);
  std::shuffle(shuffled.data().begin(), shuffled.data().end(), rng);
  CHECK(fovea::mutual_information(coarse, shuffled) < 0.05);
}

TEST_CASE("entropy matches hand-built histograms") {
  const ImageBuffer flat = constant_image(32, 32, 0.7f);
  CHECK(fovea::entropy_bits(flat) == 0.0);

  ImageBuffer half(32, 32, 1);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      half.at(0, x, y) = (x < 16) ? 0.0f : 1.0f;
    }
  }
  CHECK(fovea::entropy_bits(half) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(fovea::entropy_bits(ImageBuffer(8, 8, 3)),
                  std::invalid_argument);
}

TEST_CASE("nlpd grows with blur strength") {
  const ImageBuffer img = testutil::synth_image(256, 256, 19);
  double prev = 0.0;
  for (double sigma : {1.0, 3.0, 8.0}) {
    const double score = fovea::nlpd(img, fovea::gaussian_blur(img, sigma));
    CHECK(score > prev);
    prev = score;
  }
}

TEST_CASE("nlpd needs six pyramid levels") {
  const ImageBuffer small = testutil::synth_image(128, 128, 23);
  CHECK_THROWS_AS(fovea::nlpd(small, small), std::invalid_argument);
}

TEST_CASE("metrics reject mismatched inputs") {
  const ImageBuffer a = testutil::synth_image(64, 64, 25);
  const ImageBuffer wrong_size = testutil::synth_image(64, 48, 25);
  const ImageBuffer rgb = testutil::synth_image(64, 64, 25, 3);
  CHECK_THROWS_AS(fovea::mse(a, wrong_size), std::invalid_argument);
  CHECK_THROWS_AS(fovea::ssim(a, wrong_size), std::invalid_argument);
  CHECK_THROWS_AS(fovea::ssim(rgb, rgb), std::invalid_argument);
  CHECK_THROWS_AS(fovea::mutual_information(a, wrong_size),
                  std::invalid_argument);
  CHECK_THROWS_AS(fovea::nlpd(a, wrong_size), std::invalid_argument);
  CHECK_THROWS_AS(fovea::ssim(testutil::synth_image(10, 10, 1),
                              testutil::synth_image(10, 10, 1)),
                  std::invalid_argument);
}

TEST_CASE("aggregate reports mean and population std") {
  const fovea::MetricReport ones = fovea::aggregate("ssim", {1.0, 1.0, 1.0});
  CHECK(ones.metric == "ssim");
  CHECK(ones.n == 3);
  CHECK(ones.mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ones.std_dev == 0.0);

  const fovea::MetricReport pair = fovea::aggregate("mse", {0.0, 1.0});
  CHECK(pair.mean == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pair.std_dev == doctest::Approx(0.5).epsilon(1e-12));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 5.0);
  std::vector<double> scores(100);
  for (double& s : scores) s = dist(rng);
  const fovea::MetricReport report = fovea::aggregate("nlpd", scores);
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(scores.size());
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  var /= static_cast<double>(scores.size());
  CHECK(report.mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(report.std_dev == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  CHECK(report.scores.size() == 100);

  CHECK_THROWS_AS(fovea::aggregate("ssim", {}), std::invalid_argument);
}

}  // TEST_SUITE

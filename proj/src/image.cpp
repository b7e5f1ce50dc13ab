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

#include "fovea/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fovea {

ImageBuffer::ImageBuffer(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  if (width <= 0 || height <= 0 || (channels != 1 && channels != 3)) {
    throw std::invalid_argument("ImageBuffer: bad shape " +
                                std::to_string(width) + "x" +
                                std::to_string(height) + "x" +
                                std::to_string(channels));
  }
  data_.assign(plane_size() * channels, fill);
}

GaussianKernel make_gaussian_kernel(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("gaussian kernel: sigma must be finite and >= 0");
  }
  GaussianKernel k;
  k.sigma = sigma;
  if (sigma == 0.0) {
    k.taps = {1.0};
    return k;
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  k.taps.resize(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k.taps[i + radius] = w;
    sum += w;
  }
  for (double& w : k.taps) w /= sum;
  return k;
}

ImageBuffer to_grayscale(const ImageBuffer& img) {
  if (img.channels() != 3) {
    throw std::invalid_argument("to_grayscale: expected a 3-channel image");
  }
  ImageBuffer out(img.width(), img.height(), 1);
  const float* r = img.plane(0);
  const float* g = img.plane(1);
  const float* b = img.plane(2);
  float* y = out.plane(0);
  const std::size_t n = img.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<float>(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]);
  }
  return out;
}

namespace {

// One separable pass along x. Transposing the roles of width/height gives the
// vertical pass, so the same routine serves both directions.
void convolve_rows(const float* src, float* dst, int width, int height,
                   const std::vector<double>& taps) {
  const int radius = static_cast<int>(taps.size() / 2);
  for (int y = 0; y < height; ++y) {
    const float* row = src + static_cast<std::size_t>(y) * width;
    float* out = dst + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t) {
        const int xi = std::clamp(x + t, 0, width - 1);
        acc += taps[t + radius] * row[xi];
      }
      out[x] = static_cast<float>(acc);
    }
  }
}

void transpose_plane(const float* src, float* dst, int width, int height) {
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      dst[static_cast<std::size_t>(x) * height + y] =
          src[static_cast<std::size_t>(y) * width + x];
    }
  }
}

}  // namespace

ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma) {
  if (!std::isfinite(sigma)) {
    throw std::invalid_argument("gaussian_blur: sigma must be finite");
  }
  if (sigma < 0.0) {
    throw std::invalid_argument("gaussian_blur: sigma must be >= 0");
  }
  if (sigma == 0.0) return img;

  const GaussianKernel kernel = make_gaussian_kernel(sigma);
  const int w = img.width();
  const int h = img.height();
  ImageBuffer out(w, h, img.channels());
  std::vector<float> tmp(img.plane_size());
  std::vector<float> tmp_t(img.plane_size());
  std::vector<float> out_t(img.plane_size());
  for (int c = 0; c < img.channels(); ++c) {
    convolve_rows(img.plane(c), tmp.data(), w, h, kernel.taps);
    transpose_plane(tmp.data(), tmp_t.data(), w, h);
    convolve_rows(tmp_t.data(), out_t.data(), h, w, kernel.taps);
    transpose_plane(out_t.data(), out.plane(c), h, w);
  }
  return out;
}

ImageBuffer decimate2(const ImageBuffer& img) {
  const int w = img.width() / 2;
  const int h = img.height() / 2;
  ImageBuffer out(w, h, img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    const float* src = img.plane(c);
    float* dst = out.plane(c);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        dst[static_cast<std::size_t>(y) * w + x] =
            src[static_cast<std::size_t>(2 * y) * img.width() + 2 * x];
      }
    }
  }
  return out;
}

ImageBuffer upsample(const ImageBuffer& img, int width, int height) {
  ImageBuffer out(width, height, img.channels());
  const int sw = img.width();
  const int sh = img.height();
  const double sx_scale = static_cast<double>(sw) / width;
  const double sy_scale = static_cast<double>(sh) / height;
  for (int c = 0; c < img.channels(); ++c) {
    const float* src = img.plane(c);
    float* dst = out.plane(c);
    for (int y = 0; y < height; ++y) {
      const double fy = (y + 0.5) * sy_scale - 0.5;
      const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, sh - 1);
      const int y1 = std::min(y0 + 1, sh - 1);
      const double ty = std::clamp(fy - y0, 0.0, 1.0);
      for (int x = 0; x < width; ++x) {
        const double fx = (x + 0.5) * sx_scale - 0.5;
        const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, sw - 1);
        const int x1 = std::min(x0 + 1, sw - 1);
        const double tx = std::clamp(fx - x0, 0.0, 1.0);
        const double top = src[static_cast<std::size_t>(y0) * sw + x0] * (1 - tx) +
                           src[static_cast<std::size_t>(y0) * sw + x1] * tx;
        const double bot = src[static_cast<std::size_t>(y1) * sw + x0] * (1 - tx) +
                           src[static_cast<std::size_t>(y1) * sw + x1] * tx;
        dst[static_cast<std::size_t>(y) * width + x] =
            static_cast<float>(top * (1 - ty) + bot * ty);
      }
    }
  }
  return out;
}

Pyramid build_pyramid(const ImageBuffer& img, int levels, PyramidKind kind) {
  if (levels < 1) {
    throw std::invalid_argument("build_pyramid: levels must be >= 1");
  }
  const int min_dim = std::min(img.width(), img.height());
  if ((min_dim >> (levels - 1)) < 8) {
    throw std::invalid_argument("build_pyramid: too many levels for image size");
  }

  Pyramid gauss;
  gauss.kind = PyramidKind::gaussian;
  gauss.levels.push_back(img);
  for (int i = 1; i < levels; ++i) {
    gauss.levels.push_back(decimate2(gaussian_blur(gauss.levels.back(), 1.0)));
  }
  if (kind == PyramidKind::gaussian) return gauss;

  Pyramid lap;
  lap.kind = PyramidKind::laplacian;
  lap.levels.resize(levels);
  for (int i = 0; i < levels - 1; ++i) {
    const ImageBuffer& fine = gauss.levels[i];
    ImageBuffer up = upsample(gauss.levels[i + 1], fine.width(), fine.height());
    ImageBuffer band(fine.width(), fine.height(), fine.channels());
    for (std::size_t j = 0; j < band.data().size(); ++j) {
      band.data()[j] = fine.data()[j] - up.data()[j];
    }
    lap.levels[i] = std::move(band);
  }
  lap.levels[levels - 1] = gauss.levels[levels - 1];
  return lap;
}

ImageBuffer reconstruct(const Pyramid& pyramid) {
  if (pyramid.kind != PyramidKind::laplacian || pyramid.levels.empty()) {
    throw std::invalid_argument("reconstruct: expects a non-empty laplacian pyramid");
  }
  ImageBuffer acc = pyramid.levels.back();
  for (int i = static_cast<int>(pyramid.levels.size()) - 2; i >= 0; --i) {
    const ImageBuffer& band = pyramid.levels[i];
    ImageBuffer up = upsample(acc, band.width(), band.height());
    for (std::size_t j = 0; j < up.data().size(); ++j) {
      up.data()[j] += band.data()[j];
    }
    acc = std::move(up);
  }
  return acc;
}

ImageBuffer clamp01(const ImageBuffer& img) {
  ImageBuffer out = img;
  for (float& v : out.data()) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

std::uint8_t quantize8(float v) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::floor(255.0f * c + 0.5f));
}

}  // namespace fovea

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

#ifndef FOVEA_IMAGE_HPP
#define FOVEA_IMAGE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fovea {

// Planar floating-point raster. Channel c occupies data()[c*plane_size() ..
// (c+1)*plane_size()), row-major within the plane. Intensities live in [0,1]
// except for frequency-residual intermediates, which are clamped on save.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, int channels, float fill = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  float* plane(int c) { return data_.data() + plane_size() * c; }
  const float* plane(int c) const { return data_.data() + plane_size() * c; }
  std::span<float> plane_span(int c) { return {plane(c), plane_size()}; }
  std::span<const float> plane_span(int c) const {
    return {plane(c), plane_size()};
  }

  float& at(int c, int x, int y) {
    return data_[plane_size() * c + static_cast<std::size_t>(y) * width_ + x];
  }
  float at(int c, int x, int y) const {
    return data_[plane_size() * c + static_cast<std::size_t>(y) * width_ + x];
  }

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

  bool same_shape(const ImageBuffer& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

// Odd-length symmetric 1-D sampled Gaussian, truncated at radius ceil(3*sigma)
// and renormalized to unit sum. sigma == 0 yields the single-tap identity.
struct GaussianKernel {
  double sigma = 0.0;
  std::vector<double> taps;

  int radius() const { return static_cast<int>(taps.size() / 2); }
};

GaussianKernel make_gaussian_kernel(double sigma);

// BT.601 luminance: 0.299 R + 0.587 G + 0.114 B. Requires a 3-channel input.
ImageBuffer to_grayscale(const ImageBuffer& img);

// Separable horizontal-then-vertical convolution with replicate boundaries.
// sigma == 0 returns a value-identical copy.
ImageBuffer gaussian_blur(const ImageBuffer& img, double sigma);

// Decimation keeps even-index samples; sizes follow floor division by two.
ImageBuffer decimate2(const ImageBuffer& img);

// Bilinear resampling (half-pixel-center convention, replicate at edges).
ImageBuffer upsample(const ImageBuffer& img, int width, int height);

enum class PyramidKind { gaussian, laplacian };

struct Pyramid {
  PyramidKind kind = PyramidKind::gaussian;
  std::vector<ImageBuffer> levels;
};

// Gaussian kind: blur(sigma=1) + decimate-by-2 chain. Laplacian kind: each
// band is level - upsample(next level), with the residual low-pass on top.
// Requires min(width,height) / 2^(levels-1) >= 8.
Pyramid build_pyramid(const ImageBuffer& img, int levels, PyramidKind kind);

// Recursive upsample-and-add inverse of a laplacian pyramid.
ImageBuffer reconstruct(const Pyramid& pyramid);

ImageBuffer clamp01(const ImageBuffer& img);

// round(255*clamp(v,0,1)) with round-half-up, the persistence quantization.
std::uint8_t quantize8(float v);

}  // namespace fovea

#endif  // FOVEA_IMAGE_HPP

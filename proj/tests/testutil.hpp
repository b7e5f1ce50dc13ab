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

#ifndef FOVEA_TESTS_TESTUTIL_HPP
#define FOVEA_TESTS_TESTUTIL_HPP

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fovea/hash.hpp"
#include "fovea/image.hpp"

namespace testutil {

// Synthetic stand-in for a natural photo: smooth random blobs plus three
// sinusoid octaves (wavelengths ~7, ~19 and ~50 px) and faint noise. The
// octaves keep blur responses changing out to sigma ~15 and the blobs keep
// the 8-bit histogram wide (gray entropy lands in the 6.5-8 bit band).
inline fovea::ImageBuffer synth_image(int width, int height,
                                      std::uint64_t seed, int channels = 1) {
  fovea::Rng64 rng(fovea::mix64(seed ^ 0x9e3779b97f4a7c15ULL));
  struct Blob {
    double x, y, s, a;
  };
  std::vector<Blob> blobs(12);
  for (Blob& b : blobs) {
    b.x = rng.unit() * width;
    b.y = rng.unit() * height;
    b.s = 15.0 + rng.unit() * 45.0;
    b.a = rng.unit() - 0.5;
  }
  const double p1 = rng.unit() * 6.2832;
  const double p2 = rng.unit() * 6.2832;
  const double p3 = rng.unit() * 6.2832;
  fovea::ImageBuffer img(width, height, channels);
  for (int c = 0; c < channels; ++c) {
    const double cp = 0.8 * c;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double v = 0.5;
        for (const Blob& b : blobs) {
          const double d2 = ((x - b.x) * (x - b.x) + (y - b.y) * (y - b.y)) /
                            (2.0 * b.s * b.s);
          if (d2 < 9.0) v += b.a * std::exp(-d2);
        }
        v += 0.05 * std::sin(0.90 * x + 0.30 * y + p1 + cp) +
             0.06 * std::sin(0.33 * x - 0.21 * y + p2) +
             0.07 * std::sin(0.11 * x + 0.17 * y + p3);
        v += (rng.unit() - 0.5) * 0.03;
        img.at(c, x, y) = static_cast<float>(std::clamp(v, 0.01, 0.99));
      }
    }
  }
  return img;
}

inline std::vector<fovea::ImageBuffer> synth_corpus(int n, int width,
                                                    int height,
                                                    std::uint64_t seed,
                                                    int channels = 1) {
  std::vector<fovea::ImageBuffer> corpus;
  corpus.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    corpus.push_back(synth_image(
        width, height, fovea::mix64(seed + static_cast<std::uint64_t>(i)),
        channels));
  }
  return corpus;
}

inline double max_abs_diff(const fovea::ImageBuffer& a,
                           const fovea::ImageBuffer& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    worst = std::max(
        worst, std::abs(static_cast<double>(a.data()[i]) - b.data()[i]));
  }
  return worst;
}

inline bool bit_identical(const fovea::ImageBuffer& a,
                          const fovea::ImageBuffer& b) {
  return a.same_shape(b) && a.data() == b.data();
}

// Unique per-run scratch directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    root_ = std::filesystem::temp_directory_path() /
            ("fovea_test_" + tag + "_" + std::to_string(++counter) + "_" +
             std::to_string(
                 static_cast<std::uint64_t>(::getpid())));
    std::filesystem::remove_all(root_);
    std::filesystem::create_directories(root_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(root_, ec);
  }
  const std::filesystem::path& path() const { return root_; }
  std::filesystem::path operator/(const std::string& leaf) const {
    return root_ / leaf;
  }

 private:
  std::filesystem::path root_;
};

}  // namespace testutil

#endif  // FOVEA_TESTS_TESTUTIL_HPP

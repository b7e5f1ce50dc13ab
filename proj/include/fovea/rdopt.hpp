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

#ifndef FOVEA_RDOPT_HPP
#define FOVEA_RDOPT_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fovea/geometry.hpp"
#include "fovea/image.hpp"
#include "fovea/transforms.hpp"

namespace fovea {

struct RdSearchOptions {
  double sigma_max = 20.0;
  double rate_tol = 1e-3;
  double sigma_tol = 1e-3;
  // Rate evaluations subsample the corpus past this many images (seeded,
  // fixed selection); the final achieved rate is always full-corpus.
  std::size_t corpus_limit = 250;
  std::uint64_t subsample_seed = 0;
};

struct RdTarget {
  double target_rate = 1.0;  // expected SSIM in (0, 1]
  std::vector<double> per_image_rates;
};

struct RdTracePoint {
  double sigma = 0.0;
  double rate = 0.0;
};

// Search outcome; uniform matching fills one entry, per-ring matching one
// entry per ring (index 0 = fovea, fixed at sigma 0).
struct RdMatchResult {
  std::vector<double> sigmas;
  std::vector<double> achieved_rates;
  std::vector<double> targets;
  std::vector<double> residuals;
  std::size_t iterations = 0;  // rate evaluations spent in searches
  std::vector<std::vector<RdTracePoint>> traces;  // sorted by sigma
  std::vector<std::string> warnings;

  double sigma() const { return sigmas.at(0); }
  double achieved_rate() const { return achieved_rates.at(0); }
  double residual() const { return residuals.at(0); }
};

class UnreachableRateError : public std::runtime_error {
 public:
  UnreachableRateError(double target, double floor_rate, int ring);

  double target() const { return target_; }
  double floor_rate() const { return floor_rate_; }
  int ring() const { return ring_; }  // -1 in uniform mode

 private:
  double target_;
  double floor_rate_;
  int ring_;
};

// Expected SSIM between each corpus image and its blurred copy (grayscale;
// color inputs are converted). The monotone curve the searches walk.
double uniform_rate(const std::vector<ImageBuffer>& corpus, double sigma);

// Same, aggregated under a per-pixel weight map.
double ring_rate(const std::vector<ImageBuffer>& corpus,
                 const ImageBuffer& mask, double sigma);

// Expected SSIM of the texture transform against its input over the corpus.
RdTarget compute_target_rate(const std::vector<ImageBuffer>& corpus,
                             const Tessellation& tess,
                             const TextureParams& params);

// Ring-weighted targets; index 0 (fovea) is forced to rate 1.
std::vector<RdTarget> compute_ring_targets(
    const std::vector<ImageBuffer>& corpus, const Tessellation& tess,
    const TextureParams& params);

// Bisection on sigma against the monotone non-increasing uniform rate curve.
RdMatchResult match_uniform(const RdTarget& target,
                            const std::vector<ImageBuffer>& corpus,
                            const RdSearchOptions& options = {});

// Independent bisection per ring against ring-weighted rate curves.
RdMatchResult match_per_ring(const std::vector<RdTarget>& targets,
                             const std::vector<ImageBuffer>& corpus,
                             const Tessellation& tess,
                             const RdSearchOptions& options = {});

}  // namespace fovea

#endif  // FOVEA_RDOPT_HPP

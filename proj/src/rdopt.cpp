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

#include "fovea/rdopt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <utility>

#include "fovea/hash.hpp"
#include "fovea/iqa.hpp"

namespace fovea {
namespace {

ImageBuffer as_gray(const ImageBuffer& img) {
  return img.channels() == 1 ? img : to_grayscale(img);
}

std::vector<ImageBuffer> gray_corpus(const std::vector<ImageBuffer>& corpus) {
  std::vector<ImageBuffer> out;
  out.reserve(corpus.size());
  for (const ImageBuffer& img : corpus) out.push_back(as_gray(img));
  return out;
}

std::vector<std::size_t> select_indices(std::size_t n,
                                        const RdSearchOptions& options) {
  std::vector<std::size_t> indices(n);
  for (std::size_t i = 0; i < n; ++i) indices[i] = i;
  if (n <= options.corpus_limit) return indices;
  Rng64 rng(mix64(options.subsample_seed ^ 0x5b5a31e0d1ceULL));
  rng.shuffle(indices.data(), indices.size());
  indices.resize(options.corpus_limit);
  std::sort(indices.begin(), indices.end());
  return indices;
}

struct SearchOutcome {
  double sigma = 0.0;
  double achieved = 1.0;
  std::size_t iterations = 0;
  std::vector<RdTracePoint> trace;
};

// Bisection against a monotone non-increasing rate curve. rate_fn evaluates
// the (possibly subsampled) corpus; full_rate_fn re-verifies the result.
SearchOutcome bisect_rate(double target, const RdSearchOptions& options,
                          const std::function<double(double)>& rate_fn,
                          const std::function<double(double)>& full_rate_fn,
                          int ring) {
  SearchOutcome out;
  out.trace.push_back({0.0, 1.0});
  if (target >= 1.0) return out;

  double lo = 0.0;
  double hi = options.sigma_max;
  const double floor_rate = rate_fn(hi);
  ++out.iterations;
  out.trace.push_back({hi, floor_rate});
  if (floor_rate > target + options.rate_tol) {
    throw UnreachableRateError(target, floor_rate, ring);
  }

  double sigma = hi;
  bool found = false;
  if (std::fabs(floor_rate - target) <= options.rate_tol) found = true;
  while (!found && hi - lo > options.sigma_tol) {
    const double mid = 0.5 * (lo + hi);
    const double rate = rate_fn(mid);
    ++out.iterations;
    out.trace.push_back({mid, rate});
    if (std::fabs(rate - target) <= options.rate_tol) {
      sigma = mid;
      found = true;
      break;
    }
    if (rate > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!found) sigma = 0.5 * (lo + hi);

  out.sigma = sigma;
  out.achieved = full_rate_fn(sigma);
  ++out.iterations;
  std::sort(out.trace.begin(), out.trace.end(),
            [](const RdTracePoint& a, const RdTracePoint& b) {
              return a.sigma < b.sigma;
            });
  return out;
}

void check_monotone_trace(const std::vector<RdTracePoint>& trace, double tol,
                          std::vector<std::string>& warnings, int ring) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].rate > trace[i - 1].rate + tol) {
      std::ostringstream msg;
      msg << "rate curve not monotone near sigma " << trace[i].sigma;
      if (ring >= 0) msg << " (ring " << ring << ")";
      warnings.push_back(msg.str());
      return;
    }
  }
}

}  // namespace

UnreachableRateError::UnreachableRateError(double target, double floor_rate,
                                           int ring)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "target rate " << target << " unreachable: rate at sigma_max is "
            << floor_rate;
        if (ring >= 0) msg << " (ring " << ring << ")";
        return msg.str();
      }()),
      target_(target),
      floor_rate_(floor_rate),
      ring_(ring) {}

double uniform_rate(const std::vector<ImageBuffer>& corpus, double sigma) {
  if (corpus.empty()) throw std::invalid_argument("rate over an empty corpus");
  double sum = 0.0;
  for (const ImageBuffer& img : corpus) {
    const ImageBuffer gray = as_gray(img);
    sum += ssim(gray, gaussian_blur(gray, sigma));
  }
  return sum / static_cast<double>(corpus.size());
}

double ring_rate(const std::vector<ImageBuffer>& corpus,
                 const ImageBuffer& mask, double sigma) {
  if (corpus.empty()) throw std::invalid_argument("rate over an empty corpus");
  double sum = 0.0;
  for (const ImageBuffer& img : corpus) {
    const ImageBuffer gray = as_gray(img);
    sum += weighted_ssim(gray, gaussian_blur(gray, sigma), mask);
  }
  return sum / static_cast<double>(corpus.size());
}

RdTarget compute_target_rate(const std::vector<ImageBuffer>& corpus,
                             const Tessellation& tess,
                             const TextureParams& params) {
  if (corpus.empty()) {
    throw std::invalid_argument("target rate over an empty corpus");
  }
  RdTarget target;
  target.per_image_rates.reserve(corpus.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    TextureParams per_image = params;
    per_image.seed = mix64(params.seed ^ mix64(i));
    const ImageBuffer textured = foveate_texture(corpus[i], tess, per_image);
    const double rate = ssim(as_gray(corpus[i]), as_gray(textured));
    target.per_image_rates.push_back(rate);
    sum += rate;
  }
  target.target_rate = sum / static_cast<double>(corpus.size());
  return target;
}

std::vector<RdTarget> compute_ring_targets(
    const std::vector<ImageBuffer>& corpus, const Tessellation& tess,
    const TextureParams& params) {
  if (corpus.empty()) {
    throw std::invalid_argument("ring targets over an empty corpus");
  }
  const std::size_t rings = tess.num_rings();
  std::vector<RdTarget> targets(rings);
  targets[0].target_rate = 1.0;
  targets[0].per_image_rates.assign(corpus.size(), 1.0);

  std::vector<ImageBuffer> masks;
  masks.reserve(rings);
  for (std::size_t ring = 1; ring < rings; ++ring) {
    masks.push_back(ring_mask(tess, ring));
  }
  for (std::size_t ring = 1; ring < rings; ++ring) {
    targets[ring].per_image_rates.reserve(corpus.size());
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    TextureParams per_image = params;
    per_image.seed = mix64(params.seed ^ mix64(i));
    const ImageBuffer textured = foveate_texture(corpus[i], tess, per_image);
    const ImageBuffer gray_ref = as_gray(corpus[i]);
    const ImageBuffer gray_tex = as_gray(textured);
    for (std::size_t ring = 1; ring < rings; ++ring) {
      targets[ring].per_image_rates.push_back(
          weighted_ssim(gray_ref, gray_tex, masks[ring - 1]));
    }
  }
  for (std::size_t ring = 1; ring < rings; ++ring) {
    double sum = 0.0;
    for (double r : targets[ring].per_image_rates) sum += r;
    targets[ring].target_rate =
        sum / static_cast<double>(targets[ring].per_image_rates.size());
  }
  return targets;
}

RdMatchResult match_uniform(const RdTarget& target,
                            const std::vector<ImageBuffer>& corpus,
                            const RdSearchOptions& options) {
  if (corpus.empty()) throw std::invalid_argument("match over an empty corpus");
  if (!(target.target_rate > 0.0) || target.target_rate > 1.0) {
    throw std::invalid_argument("target rate must lie in (0, 1]");
  }
  const std::vector<ImageBuffer> gray = gray_corpus(corpus);
  const std::vector<std::size_t> selected =
      select_indices(gray.size(), options);

  const auto rate_over = [&](const std::vector<std::size_t>& indices,
                             double sigma) {
    double sum = 0.0;
    for (std::size_t i : indices) {
      sum += ssim(gray[i], gaussian_blur(gray[i], sigma));
    }
    return sum / static_cast<double>(indices.size());
  };
  std::vector<std::size_t> all(gray.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  SearchOutcome outcome = bisect_rate(
      target.target_rate, options,
      [&](double sigma) { return rate_over(selected, sigma); },
      [&](double sigma) { return rate_over(all, sigma); }, -1);

  RdMatchResult result;
  result.sigmas = {outcome.sigma};
  result.achieved_rates = {outcome.achieved};
  result.targets = {target.target_rate};
  result.residuals = {std::fabs(outcome.achieved - target.target_rate)};
  result.iterations = outcome.iterations;
  result.traces = {std::move(outcome.trace)};
  check_monotone_trace(result.traces[0], options.rate_tol, result.warnings, -1);
  return result;
}

RdMatchResult match_per_ring(const std::vector<RdTarget>& targets,
                             const std::vector<ImageBuffer>& corpus,
                             const Tessellation& tess,
                             const RdSearchOptions& options) {
  if (corpus.empty()) throw std::invalid_argument("match over an empty corpus");
  if (targets.size() != tess.num_rings()) {
    throw std::invalid_argument("one target per ring required");
  }
  const std::vector<ImageBuffer> gray = gray_corpus(corpus);
  const std::vector<std::size_t> selected =
      select_indices(gray.size(), options);
  std::vector<std::size_t> all(gray.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  RdMatchResult result;
  result.sigmas.assign(targets.size(), 0.0);
  result.achieved_rates.assign(targets.size(), 1.0);
  result.residuals.assign(targets.size(), 0.0);
  result.traces.resize(targets.size());
  for (const RdTarget& t : targets) result.targets.push_back(t.target_rate);

  result.traces[0].push_back({0.0, 1.0});  // fovea: identity by construction
  for (std::size_t ring = 1; ring < targets.size(); ++ring) {
    if (!(targets[ring].target_rate > 0.0) || targets[ring].target_rate > 1.0) {
      throw std::invalid_argument("target rate must lie in (0, 1]");
    }
    const ImageBuffer mask = ring_mask(tess, ring);
    const auto rate_over = [&](const std::vector<std::size_t>& indices,
                               double sigma) {
      double sum = 0.0;
      for (std::size_t i : indices) {
        sum += weighted_ssim(gray[i], gaussian_blur(gray[i], sigma), mask);
      }
      return sum / static_cast<double>(indices.size());
    };
    SearchOutcome outcome = bisect_rate(
        targets[ring].target_rate, options,
        [&](double sigma) { return rate_over(selected, sigma); },
        [&](double sigma) { return rate_over(all, sigma); },
        static_cast<int>(ring));
    result.sigmas[ring] = outcome.sigma;
    result.achieved_rates[ring] = outcome.achieved;
    result.residuals[ring] =
        std::fabs(outcome.achieved - targets[ring].target_rate);
    result.iterations += outcome.iterations;
    result.traces[ring] = std::move(outcome.trace);
    check_monotone_trace(result.traces[ring], options.rate_tol,
                         result.warnings, static_cast<int>(ring));
  }
  return result;
}

}  // namespace fovea

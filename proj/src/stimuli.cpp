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

#include "fovea/stimuli.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>

namespace fovea {
namespace {

// Area of the quarter disc x,y >= 0, x^2+y^2 <= r^2 clipped to [0,a] x [0,b].
double quarter_disc_area(double r, double a, double b) {
  if (r <= 0.0 || a <= 0.0 || b <= 0.0) return 0.0;
  const double reach = std::min(a, r);
  const auto antiderivative = [r](double x) {
    const double clamped = std::clamp(x / r, -1.0, 1.0);
    return 0.5 * (x * std::sqrt(std::max(r * r - x * x, 0.0)) +
                  r * r * std::asin(clamped));
  };
  double flat_until = 0.0;
  if (r > b) flat_until = std::min(std::sqrt(r * r - b * b), reach);
  return b * flat_until + antiderivative(reach) - antiderivative(flat_until);
}

// Frame-clipped area of a disc centered on the frame.
double clipped_disc_area(double r, int width, int height) {
  return 4.0 * quarter_disc_area(r, 0.5 * width, 0.5 * height);
}

std::vector<float> resolve_fill(const ImageBuffer& img,
                                const std::vector<float>& fill) {
  if (fill.empty()) {
    return std::vector<float>(static_cast<std::size_t>(img.channels()), 0.5f);
  }
  if (fill.size() != static_cast<std::size_t>(img.channels())) {
    throw std::invalid_argument("fill must provide one value per channel");
  }
  return fill;
}

double feathered_weight(double signed_distance, double feather) {
  if (feather <= 0.0) return signed_distance >= 0.0 ? 1.0 : 0.0;
  if (signed_distance >= 0.5 * feather) return 1.0;
  if (signed_distance <= -0.5 * feather) return 0.0;
  return 0.5 * (1.0 + std::sin(std::numbers::pi * signed_distance / feather));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(current);
  return fields;
}

std::string trimmed(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

ImageBuffer lowpass(const ImageBuffer& img, const FrequencySpec& spec) {
  if (spec.kind != FrequencyKind::lowpass) {
    throw std::invalid_argument("lowpass requires a lowpass spec");
  }
  if (!std::isfinite(spec.sigma) || spec.sigma < 0.0) {
    throw std::invalid_argument("lowpass sigma must be finite and >= 0");
  }
  const ImageBuffer source =
      spec.color_mode == ColorMode::gray && img.channels() != 1
          ? to_grayscale(img)
          : img;
  return gaussian_blur(source, spec.sigma);
}

ImageBuffer highpass(const ImageBuffer& img, const FrequencySpec& spec) {
  if (spec.kind != FrequencyKind::highpass) {
    throw std::invalid_argument("highpass requires a highpass spec");
  }
  if (!(spec.sigma > 0.0)) {
    throw std::invalid_argument("highpass sigma must be positive");
  }
  const ImageBuffer source =
      spec.color_mode == ColorMode::gray && img.channels() != 1
          ? to_grayscale(img)
          : img;
  if (spec.residual_means.size() !=
      static_cast<std::size_t>(source.channels())) {
    throw std::invalid_argument(
        "highpass requires one residual mean per channel");
  }

  ImageBuffer out = source;
  if (std::isinf(spec.sigma)) {
    for (int c = 0; c < source.channels(); ++c) {
      double mean = 0.0;
      const float* p = source.plane(c);
      for (std::size_t i = 0; i < source.plane_size(); ++i) mean += p[i];
      mean /= static_cast<double>(source.plane_size());
      const float offset = static_cast<float>(
          spec.residual_means[static_cast<std::size_t>(c)] - mean);
      float* o = out.plane(c);
      for (std::size_t i = 0; i < out.plane_size(); ++i) o[i] += offset;
    }
    return out;
  }

  const ImageBuffer blurred = gaussian_blur(source, spec.sigma);
  for (int c = 0; c < source.channels(); ++c) {
    const float mean_val =
        static_cast<float>(spec.residual_means[static_cast<std::size_t>(c)]);
    const float* b = blurred.plane(c);
    float* o = out.plane(c);
    for (std::size_t i = 0; i < out.plane_size(); ++i) {
      o[i] = o[i] - b[i] + mean_val;
    }
  }
  return out;
}

std::vector<double> channel_means(const std::vector<ImageBuffer>& corpus) {
  if (corpus.empty()) {
    throw std::invalid_argument("channel means over an empty corpus");
  }
  const int channels = corpus.front().channels();
  std::vector<double> means(static_cast<std::size_t>(channels), 0.0);
  std::size_t total = 0;
  for (const ImageBuffer& img : corpus) {
    if (img.channels() != channels) {
      throw std::invalid_argument("corpus images must share channel count");
    }
    for (int c = 0; c < channels; ++c) {
      const float* p = img.plane(c);
      double sum = 0.0;
      for (std::size_t i = 0; i < img.plane_size(); ++i) sum += p[i];
      means[static_cast<std::size_t>(c)] +=
          sum;  // normalized by total pixels below
    }
    total += img.plane_size();
  }
  for (double& m : means) m /= static_cast<double>(total);
  return means;
}

double disc_radius_for_fraction(double fraction, int width, int height) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("area fraction must lie in [0, 1]");
  }
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("frame must be non-empty");
  }
  const double frame_area = static_cast<double>(width) * height;
  const double target = fraction * frame_area;
  double lo = 0.0;
  double hi = std::hypot(0.5 * width, 0.5 * height);
  if (fraction >= 1.0) return hi;
  if (fraction <= 0.0) return 0.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-12 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (clipped_disc_area(mid, width, height) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ImageBuffer occlusion_mask(int width, int height, const OcclusionSpec& spec) {
  if (!(spec.fraction >= 0.0 && spec.fraction <= 1.0)) {
    throw std::invalid_argument("occlusion fraction must lie in [0, 1]");
  }
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("frame must be non-empty");
  }
  ImageBuffer mask(width, height, 1);
  switch (spec.kind) {
    case OcclusionKind::left2right: {
      const long cols = std::lround(spec.fraction * width);
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < cols; ++x) mask.at(0, x, y) = 1.0f;
      }
      break;
    }
    case OcclusionKind::top2bottom: {
      const long rows = std::lround(spec.fraction * height);
      for (int y = 0; y < rows; ++y) {
        for (int x = 0; x < width; ++x) mask.at(0, x, y) = 1.0f;
      }
      break;
    }
    case OcclusionKind::scotoma:
    case OcclusionKind::glaucoma: {
      // Glaucoma occludes everything outside the disc that preserves the
      // complementary fraction, so scotoma(f) and glaucoma(1-f) share a
      // radius and partition the frame exactly.
      const double disc_fraction = spec.kind == OcclusionKind::scotoma
                                       ? spec.fraction
                                       : 1.0 - spec.fraction;
      const double radius = disc_radius_for_fraction(disc_fraction, width, height);
      const double cx = 0.5 * width;
      const double cy = 0.5 * height;
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          const double dist = std::hypot(x + 0.5 - cx, y + 0.5 - cy);
          const bool inside_disc = dist <= radius;
          const bool occluded =
              spec.kind == OcclusionKind::scotoma ? inside_disc : !inside_disc;
          if (occluded) mask.at(0, x, y) = 1.0f;
        }
      }
      break;
    }
  }
  return mask;
}

ImageBuffer occlude(const ImageBuffer& img, const OcclusionSpec& spec) {
  if (img.empty()) throw std::invalid_argument("occlude on an empty image");
  const std::vector<float> fill = resolve_fill(img, spec.fill);
  const ImageBuffer mask = occlusion_mask(img.width(), img.height(), spec);
  ImageBuffer out = img;
  for (int c = 0; c < img.channels(); ++c) {
    const float* m = mask.plane(0);
    float* o = out.plane(c);
    const float v = fill[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < out.plane_size(); ++i) {
      if (m[i] > 0.0f) o[i] = v;
    }
  }
  return out;
}

ImageBuffer cue_conflict(const ImageBuffer& inner, const ImageBuffer& outer,
                         const CueConflictSpec& spec) {
  if (!inner.same_shape(outer)) {
    throw std::invalid_argument("cue-conflict inputs must share dimensions");
  }
  if (!(spec.foveal_ratio >= 0.0 && spec.foveal_ratio <= 1.0)) {
    throw std::invalid_argument("foveal ratio must lie in [0, 1]");
  }
  if (!spec.inner_class.empty() && spec.inner_class == spec.outer_class) {
    throw std::invalid_argument("inner and outer class must differ");
  }
  const int width = inner.width();
  const int height = inner.height();
  const double cx = 0.5 * width;
  const double cy = 0.5 * height;

  double disc_radius = 0.0;
  double half_side = 0.0;
  if (spec.kind == CueKind::window) {
    disc_radius = disc_radius_for_fraction(spec.foveal_ratio, width, height);
  } else {
    half_side = 0.5 * std::sqrt(spec.foveal_ratio *
                                static_cast<double>(width) * height);
  }

  ImageBuffer out = inner;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double px = x + 0.5 - cx;
      const double py = y + 0.5 - cy;
      double signed_distance;
      if (spec.kind == CueKind::window) {
        signed_distance = disc_radius - std::hypot(px, py);
      } else {
        signed_distance =
            std::min(half_side - std::fabs(px), half_side - std::fabs(py));
      }
      const double weight = feathered_weight(signed_distance, spec.feather);
      for (int c = 0; c < inner.channels(); ++c) {
        if (weight >= 1.0) {
          out.at(c, x, y) = inner.at(c, x, y);
        } else if (weight <= 0.0) {
          out.at(c, x, y) = outer.at(c, x, y);
        } else {
          out.at(c, x, y) = static_cast<float>(weight * inner.at(c, x, y) +
                                               (1.0 - weight) *
                                                   outer.at(c, x, y));
        }
      }
    }
  }
  return out;
}

PredictionParseError::PredictionParseError(std::size_t line,
                                           const std::string& what)
    : std::runtime_error("predictions line " + std::to_string(line) + ": " +
                         what),
      line_(line) {}

std::vector<PredictionRecord> parse_predictions_csv(std::istream& in) {
  std::string line;
  std::size_t line_number = 0;
  if (!std::getline(in, line)) {
    throw PredictionParseError(1, "missing header");
  }
  ++line_number;
  if (trimmed(line) != "path,ratio,inner_class,outer_class,predicted_class") {
    throw PredictionParseError(line_number, "unexpected header: " + line);
  }

  std::vector<PredictionRecord> records;
  while (std::getline(in, line)) {
    ++line_number;
    if (trimmed(line).empty()) continue;
    const std::vector<std::string> fields = split_csv_line(trimmed(line));
    if (fields.size() != 5) {
      throw PredictionParseError(line_number,
                                 "expected 5 fields, found " +
                                     std::to_string(fields.size()));
    }
    PredictionRecord record;
    record.path = fields[0];
    try {
      std::size_t consumed = 0;
      record.ratio = std::stod(fields[1], &consumed);
      if (consumed != fields[1].size()) {
        throw std::invalid_argument(fields[1]);
      }
    } catch (const std::exception&) {
      throw PredictionParseError(line_number,
                                 "unparsable ratio: " + fields[1]);
    }
    if (!(record.ratio >= 0.0 && record.ratio <= 1.0)) {
      throw PredictionParseError(line_number, "ratio outside [0, 1]");
    }
    record.inner_class = fields[2];
    record.outer_class = fields[3];
    record.predicted_class = fields[4];
    if (record.inner_class == record.outer_class) {
      throw PredictionParseError(line_number,
                                 "inner and outer class must differ");
    }
    records.push_back(std::move(record));
  }
  return records;
}

AccuracyCurve crossover(const std::vector<PredictionRecord>& records) {
  std::map<double, std::array<std::size_t, 3>> buckets;  // foveal, peripheral, n
  for (const PredictionRecord& record : records) {
    auto& bucket = buckets[record.ratio];
    if (record.predicted_class == record.inner_class) ++bucket[0];
    if (record.predicted_class == record.outer_class) ++bucket[1];
    ++bucket[2];
  }
  if (buckets.size() < 2) {
    throw std::invalid_argument(
        "crossover requires at least two distinct ratios");
  }

  AccuracyCurve curve;
  for (const auto& [ratio, bucket] : buckets) {
    curve.ratios.push_back(ratio);
    curve.foveal_acc.push_back(static_cast<double>(bucket[0]) /
                               static_cast<double>(bucket[2]));
    curve.peripheral_acc.push_back(static_cast<double>(bucket[1]) /
                                   static_cast<double>(bucket[2]));
  }

  for (std::size_t i = 0; i + 1 < curve.ratios.size(); ++i) {
    const double d0 = curve.foveal_acc[i] - curve.peripheral_acc[i];
    const double d1 = curve.foveal_acc[i + 1] - curve.peripheral_acc[i + 1];
    if (d0 == 0.0) {
      curve.crossover = curve.ratios[i];
      break;
    }
    if (d0 * d1 < 0.0) {
      const double t = d0 / (d0 - d1);
      curve.crossover =
          curve.ratios[i] + t * (curve.ratios[i + 1] - curve.ratios[i]);
      break;
    }
    if (i + 2 == curve.ratios.size() && d1 == 0.0) {
      curve.crossover = curve.ratios[i + 1];
    }
  }
  return curve;
}

}  // namespace fovea

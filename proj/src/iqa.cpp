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

#include "fovea/iqa.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace fovea {
namespace {

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("metric inputs must share dimensions");
  }
}

void require_single_channel(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b);
  if (a.channels() != 1) {
    throw std::invalid_argument("metric inputs must be single-channel");
  }
}

struct Field {
  std::vector<double> values;
  int width = 0;
  int height = 0;

  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

Field from_plane(const ImageBuffer& img) {
  Field f;
  f.width = img.width();
  f.height = img.height();
  f.values.assign(img.plane(0), img.plane(0) + img.plane_size());
  return f;
}

Field product(const Field& a, const Field& b) {
  Field out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= b.values[i];
  return out;
}

// Separable filtering over fully contained windows only; output shrinks by
// (taps-1) in each dimension.
Field filter_valid(const Field& src, const std::vector<double>& taps) {
  const int r = static_cast<int>(taps.size() / 2);
  Field mid;
  mid.width = src.width - 2 * r;
  mid.height = src.height;
  mid.values.assign(static_cast<std::size_t>(mid.width) * mid.height, 0.0);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < mid.width; ++x) {
      double acc = 0.0;
      for (std::size_t t = 0; t < taps.size(); ++t) {
        acc += taps[t] * src.at(x + static_cast<int>(t), y);
      }
      mid.at(x, y) = acc;
    }
  }
  Field out;
  out.width = mid.width;
  out.height = src.height - 2 * r;
  out.values.assign(static_cast<std::size_t>(out.width) * out.height, 0.0);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      double acc = 0.0;
      for (std::size_t t = 0; t < taps.size(); ++t) {
        acc += taps[t] * mid.at(x, y + static_cast<int>(t));
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

std::vector<double> ssim_window(const SsimParams& params) {
  if (params.window_size < 1 || params.window_size % 2 == 0) {
    throw std::invalid_argument("ssim window size must be odd and positive");
  }
  if (!(params.k1 > 0.0) || !(params.k2 > 0.0)) {
    throw std::invalid_argument("ssim stabilizers must be positive");
  }
  const int r = params.window_size / 2;
  std::vector<double> taps(static_cast<std::size_t>(params.window_size));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    const double t = std::exp(-0.5 * (i * i) /
                              (params.window_sigma * params.window_sigma));
    taps[static_cast<std::size_t>(i + r)] = t;
    sum += t;
  }
  for (double& t : taps) t /= sum;
  return taps;
}

struct SsimFields {
  Field luminance;           // per-window luminance comparison
  Field contrast_structure;  // per-window contrast*structure comparison
};

SsimFields ssim_fields(const ImageBuffer& a, const ImageBuffer& b,
                       const SsimParams& params) {
  require_single_channel(a, b);
  if (a.width() < params.window_size || a.height() < params.window_size) {
    throw std::invalid_argument("image smaller than the ssim window");
  }
  const std::vector<double> taps = ssim_window(params);
  const Field fa = from_plane(a);
  const Field fb = from_plane(b);
  const Field mu_a = filter_valid(fa, taps);
  const Field mu_b = filter_valid(fb, taps);
  const Field raw_aa = filter_valid(product(fa, fa), taps);
  const Field raw_bb = filter_valid(product(fb, fb), taps);
  const Field raw_ab = filter_valid(product(fa, fb), taps);

  const double c1 = params.k1 * params.dynamic_range * params.k1 *
                    params.dynamic_range;
  const double c2 = params.k2 * params.dynamic_range * params.k2 *
                    params.dynamic_range;

  SsimFields out;
  out.luminance = mu_a;
  out.contrast_structure = mu_a;
  for (std::size_t i = 0; i < mu_a.values.size(); ++i) {
    const double ma = mu_a.values[i];
    const double mb = mu_b.values[i];
    const double var_a = raw_aa.values[i] - ma * ma;
    const double var_b = raw_bb.values[i] - mb * mb;
    const double cov = raw_ab.values[i] - ma * mb;
    out.luminance.values[i] =
        (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
    out.contrast_structure.values[i] =
        (2.0 * cov + c2) / (var_a + var_b + c2);
  }
  return out;
}

double field_mean(const Field& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v;
  return sum / static_cast<double>(f.values.size());
}

Field box_halve(const Field& src) {
  Field out;
  out.width = src.width / 2;
  out.height = src.height / 2;
  if (out.width == 0 || out.height == 0) {
    throw std::invalid_argument("image too small to downsample");
  }
  out.values.assign(static_cast<std::size_t>(out.width) * out.height, 0.0);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      out.at(x, y) = 0.25 * (src.at(2 * x, 2 * y) + src.at(2 * x + 1, 2 * y) +
                             src.at(2 * x, 2 * y + 1) +
                             src.at(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

ImageBuffer field_to_image(const Field& f) {
  ImageBuffer img(f.width, f.height, 1);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    img.data()[i] = static_cast<float>(f.values[i]);
  }
  return img;
}

std::array<std::size_t, 256 * 256> joint_histogram(const ImageBuffer& a,
                                                   const ImageBuffer& b) {
  std::array<std::size_t, 256 * 256> counts{};
  const float* pa = a.plane(0);
  const float* pb = b.plane(0);
  for (std::size_t i = 0; i < a.plane_size(); ++i) {
    const std::size_t qa = quantize8(pa[i]);
    const std::size_t qb = quantize8(pb[i]);
    ++counts[qa * 256 + qb];
  }
  return counts;
}

double local_abs_mean3x3(const Field& band, int x, int y) {
  double acc = 0.0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int cx = std::clamp(x + dx, 0, band.width - 1);
      const int cy = std::clamp(y + dy, 0, band.height - 1);
      acc += std::fabs(band.at(cx, cy));
    }
  }
  return acc / 9.0;
}

Field normalize_band(const ImageBuffer& band) {
  constexpr double kNormConstant = 0.17;
  Field f = from_plane(band);
  Field out = f;
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) {
      out.at(x, y) = f.at(x, y) / (kNormConstant + local_abs_mean3x3(f, x, y));
    }
  }
  return out;
}

}  // namespace

double mse(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b);
  if (a.empty()) throw std::invalid_argument("mse of empty images");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = 255.0 * (static_cast<double>(a.data()[i]) - b.data()[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(a.data().size());
}

double ssim(const ImageBuffer& a, const ImageBuffer& b,
            const SsimParams& params) {
  const SsimFields fields = ssim_fields(a, b, params);
  double sum = 0.0;
  for (std::size_t i = 0; i < fields.luminance.values.size(); ++i) {
    sum += fields.luminance.values[i] * fields.contrast_structure.values[i];
  }
  return sum / static_cast<double>(fields.luminance.values.size());
}

ImageBuffer ssim_map(const ImageBuffer& a, const ImageBuffer& b,
                     const SsimParams& params) {
  SsimFields fields = ssim_fields(a, b, params);
  for (std::size_t i = 0; i < fields.luminance.values.size(); ++i) {
    fields.luminance.values[i] *= fields.contrast_structure.values[i];
  }
  return field_to_image(fields.luminance);
}

double weighted_ssim(const ImageBuffer& a, const ImageBuffer& b,
                     const ImageBuffer& weight, const SsimParams& params) {
  if (weight.width() != a.width() || weight.height() != a.height() ||
      weight.channels() != 1) {
    throw std::invalid_argument("weight map must match image dimensions");
  }
  const SsimFields fields = ssim_fields(a, b, params);
  const int offset = params.window_size / 2;
  double weighted_sum = 0.0;
  double weight_sum = 0.0;
  for (int y = 0; y < fields.luminance.height; ++y) {
    for (int x = 0; x < fields.luminance.width; ++x) {
      const double w = weight.at(0, x + offset, y + offset);
      weighted_sum += w * fields.luminance.at(x, y) *
                      fields.contrast_structure.at(x, y);
      weight_sum += w;
    }
  }
  if (weight_sum <= 0.0) {
    throw std::invalid_argument(
        "weight support does not intersect the valid ssim region");
  }
  return weighted_sum / weight_sum;
}

double ms_ssim(const ImageBuffer& a, const ImageBuffer& b) {
  require_single_channel(a, b);
  const auto& kExponents = kMsSsimExponents;
  const int min_dim = std::min(a.width(), a.height());
  if (min_dim < 11 * (1 << (kExponents.size() - 1))) {
    throw std::invalid_argument("image too small for 5-scale ms-ssim");
  }
  const SsimParams params;
  Field fa = from_plane(a);
  Field fb = from_plane(b);
  double score = 1.0;
  for (std::size_t scale = 0; scale < kExponents.size(); ++scale) {
    const SsimFields fields =
        ssim_fields(field_to_image(fa), field_to_image(fb), params);
    double term;
    if (scale + 1 < kExponents.size()) {
      term = field_mean(fields.contrast_structure);
      fa = box_halve(fa);
      fb = box_halve(fb);
    } else {
      term = field_mean(product(fields.luminance, fields.contrast_structure));
    }
    score *= std::pow(std::max(term, 0.0), kExponents[scale]);
  }
  return score;
}

double mutual_information(const ImageBuffer& a, const ImageBuffer& b) {
  require_single_channel(a, b);
  if (a.empty()) throw std::invalid_argument("mutual information of empty images");
  const auto joint = joint_histogram(a, b);
  std::array<double, 256> pa{};
  std::array<double, 256> pb{};
  const double n = static_cast<double>(a.plane_size());
  for (std::size_t i = 0; i < 256; ++i) {
    for (std::size_t j = 0; j < 256; ++j) {
      const double p = static_cast<double>(joint[i * 256 + j]) / n;
      pa[i] += p;
      pb[j] += p;
    }
  }
  double mi = 0.0;
  for (std::size_t i = 0; i < 256; ++i) {
    if (pa[i] <= 0.0) continue;
    for (std::size_t j = 0; j < 256; ++j) {
      const double p = static_cast<double>(joint[i * 256 + j]) / n;
      if (p <= 0.0 || pb[j] <= 0.0) continue;
      mi += p * std::log2(p / (pa[i] * pb[j]));
    }
  }
  return std::max(mi, 0.0);
}

double entropy_bits(const ImageBuffer& img) {
  if (img.channels() != 1 || img.empty()) {
    throw std::invalid_argument("entropy expects a non-empty grayscale image");
  }
  std::array<std::size_t, 256> counts{};
  const float* p = img.plane(0);
  for (std::size_t i = 0; i < img.plane_size(); ++i) ++counts[quantize8(p[i])];
  const double n = static_cast<double>(img.plane_size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p_c = static_cast<double>(c) / n;
    h -= p_c * std::log2(p_c);
  }
  return h;
}

double nlpd(const ImageBuffer& a, const ImageBuffer& b) {
  require_single_channel(a, b);
  constexpr int kLevels = 6;
  const Pyramid pa = build_pyramid(a, kLevels, PyramidKind::laplacian);
  const Pyramid pb = build_pyramid(b, kLevels, PyramidKind::laplacian);
  double acc = 0.0;
  for (int level = 0; level < kLevels; ++level) {
    const Field na = normalize_band(pa.levels[static_cast<std::size_t>(level)]);
    const Field nb = normalize_band(pb.levels[static_cast<std::size_t>(level)]);
    double sq = 0.0;
    for (std::size_t i = 0; i < na.values.size(); ++i) {
      const double d = na.values[i] - nb.values[i];
      sq += d * d;
    }
    acc += std::sqrt(sq / static_cast<double>(na.values.size()));
  }
  return acc / kLevels;
}

MetricReport aggregate(const std::string& metric, std::vector<double> scores) {
  if (scores.empty()) {
    throw std::invalid_argument("aggregate requires at least one score");
  }
  MetricReport report;
  report.metric = metric;
  report.n = scores.size();
  double sum = 0.0;
  for (double s : scores) sum += s;
  report.mean = sum / static_cast<double>(scores.size());
  double sq = 0.0;
  for (double s : scores) {
    const double d = s - report.mean;
    sq += d * d;
  }
  report.std_dev = std::sqrt(sq / static_cast<double>(scores.size()));
  report.scores = std::move(scores);
  return report;
}

}  // namespace fovea

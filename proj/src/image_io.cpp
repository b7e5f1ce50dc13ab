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

#include "fovea/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

namespace fovea {

namespace {

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

ImageBuffer from_interleaved8(const std::vector<unsigned char>& bytes, int w,
                              int h, int channels) {
  ImageBuffer img(w, h, channels);
  const std::size_t n = img.plane_size();
  for (int c = 0; c < channels; ++c) {
    float* plane = img.plane(c);
    for (std::size_t i = 0; i < n; ++i) {
      plane[i] = bytes[i * channels + c] / 255.0f;
    }
  }
  return img;
}

std::vector<unsigned char> to_interleaved8(const ImageBuffer& img) {
  const std::size_t n = img.plane_size();
  std::vector<unsigned char> bytes(n * img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    const float* plane = img.plane(c);
    for (std::size_t i = 0; i < n; ++i) {
      bytes[i * img.channels() + c] = quantize8(plane[i]);
    }
  }
  return bytes;
}

ImageBuffer load_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw std::runtime_error("cannot open " + path.string());

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("failed to decode PNG " + path.string());
  }

  png_init_io(png, fp.get());
  png_read_info(png, info);

  // Normalize every source layout to 8-bit gray or RGB.
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  const png_byte color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  png_read_update_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("unsupported PNG channel count in " + path.string());
  }

  std::vector<unsigned char> bytes(static_cast<std::size_t>(w) * h * channels);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) {
    rows[y] = bytes.data() + static_cast<std::size_t>(y) * w * channels;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return from_interleaved8(bytes, w, h, channels);
}

void save_png(const std::filesystem::path& path, const ImageBuffer& img) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot write " + path.string());

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("failed to encode PNG " + path.string());
  }

  png_init_io(png, fp.get());
  // Fixed encoder settings keep output bytes reproducible across runs.
  png_set_compression_level(png, 6);
  png_set_filter(png, 0, PNG_FILTER_NONE);
  png_set_IHDR(png, info, img.width(), img.height(), 8,
               img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<unsigned char> bytes = to_interleaved8(img);
  std::vector<png_bytep> rows(img.height());
  for (int y = 0; y < img.height(); ++y) {
    rows[y] = bytes.data() +
              static_cast<std::size_t>(y) * img.width() * img.channels();
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

ImageBuffer load_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P6") {
    throw std::runtime_error("unsupported PNM magic in " + path.string());
  }
  const int channels = magic == "P6" ? 3 : 1;

  auto next_int = [&in, &path]() {
    // Skips whitespace and '#' comment lines between header tokens.
    for (;;) {
      int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    int value = 0;
    if (!(in >> value)) {
      throw std::runtime_error("truncated PNM header in " + path.string());
    }
    return value;
  };

  const int w = next_int();
  const int h = next_int();
  const int maxval = next_int();
  if (maxval != 255) {
    throw std::runtime_error("only 8-bit PNM supported: " + path.string());
  }
  in.get();  // single whitespace byte before raster

  std::vector<unsigned char> bytes(static_cast<std::size_t>(w) * h * channels);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw std::runtime_error("truncated PNM raster in " + path.string());
  }
  return from_interleaved8(bytes, w, h, channels);
}

void save_pnm(const std::filesystem::path& path, const ImageBuffer& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << (img.channels() == 3 ? "P6" : "P5") << "\n"
      << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> bytes = to_interleaved8(img);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

}  // namespace

ImageBuffer load_image(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".png") return load_png(path);
  if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return load_pnm(path);
  throw std::runtime_error("unsupported image format: " + path.string());
}

void save_image(const std::filesystem::path& path, const ImageBuffer& img) {
  if (img.empty()) throw std::invalid_argument("save_image: empty image");
  const std::string ext = lower_ext(path);
  if (ext == ".png") {
    save_png(path, img);
  } else if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
    save_pnm(path, img);
  } else {
    throw std::runtime_error("unsupported image format: " + path.string());
  }
}

bool is_supported_image(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

}  // namespace fovea

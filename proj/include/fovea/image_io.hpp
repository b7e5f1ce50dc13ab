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

#ifndef FOVEA_IMAGE_IO_HPP
#define FOVEA_IMAGE_IO_HPP

#include <filesystem>
#include <string>

#include "fovea/image.hpp"

namespace fovea {

// 8-bit PNG (stored values taken as-is, no color management) with binary
// PPM/PGM as the fallback container; format selected by extension.
ImageBuffer load_image(const std::filesystem::path& path);

// Persists with round(255*clamp(v,0,1)) quantization.
void save_image(const std::filesystem::path& path, const ImageBuffer& img);

bool is_supported_image(const std::filesystem::path& path);

}  // namespace fovea

#endif  // FOVEA_IMAGE_IO_HPP

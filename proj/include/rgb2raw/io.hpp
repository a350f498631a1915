// Copyright 2026 The rgb2raw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>

#include "rgb2raw/image.hpp"

namespace rgb2raw {

/// 16-bit little-endian unsigned, row-major, no header. Dimensions and levels
/// travel in the dataset manifest.
void write_raw16(const std::filesystem::path& path, const RawMosaic& mosaic);
RawMosaic read_raw16(const std::filesystem::path& path, int height, int width, const SensorProfile& profile);

/// Loads an 8- or 16-bit PNG as RGB in [0,1]; gray and alpha are expanded/stripped.
RgbImage read_png(const std::filesystem::path& path);

/// Writes RGB in [0,1] as an 8- or 16-bit PNG (values rounded to nearest code).
void write_png(const std::filesystem::path& path, const RgbImage& image, int bit_depth = 8);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace rgb2raw

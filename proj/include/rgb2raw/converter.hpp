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
#include <vector>

#include "rgb2raw/checkpoint.hpp"
#include "rgb2raw/image.hpp"
#include "rgb2raw/model.hpp"

namespace rgb2raw {

/// Output tile side in packed pixels and the matching RGB footprint.
inline constexpr int kTileRawSide = 32;
inline constexpr int kTileRgbSide = 2 * kTileRawSide;  // 64

struct ConversionNotes {
    bool cropped = false;
    int source_height = 0;
    int source_width = 0;
    int tiles = 0;
};

/// Runs the model over the whole frame with a fixed 32x32-output tile grid.
/// The image must be even-sized and at least one tile footprint (64x64); when
/// a side is not a multiple of 64 the last tile is shifted inward. A 1-pixel
/// reflected ring supplies the context of boundary tiles. `context` goes to
/// the global encoders and must already be context_side square.
Image convert_tiles(const ReRawModel& model, const RgbImage& rgb, const RgbImage& context);

/// Full conversion: the frame is cropped right/bottom to whole 64 px tiles so
/// tiles never overlap (130x130 gives a 64x64x4 result), and the context is
/// the plain 128x128 downscale of the kept area (resized again when the model
/// uses a different context_side). Sides below 66 are rejected
/// with ErrorKind::Input.
PackedRawImage convert_image(const ReRawModel& model, const RgbImage& rgb, const SensorProfile& profile,
                             ConversionNotes* notes = nullptr);

struct ConversionEntry {
    std::string source;
    std::string output;
    int height = 0;  // mosaic rows written
    int width = 0;
    double seconds = 0.0;
    bool cropped = false;
};

struct SkippedInput {
    std::string source;
    std::string reason;
};

struct ConversionReport {
    std::string checkpoint_hash;
    std::vector<ConversionEntry> converted;
    std::vector<SkippedInput> skipped;
};

/// Converts every readable PNG to a 16-bit RAW mosaic in `output_dir` and
/// writes `conversion_manifest.json`. Per-image failures are recorded, not thrown.
ConversionReport convert_batch(const std::filesystem::path& checkpoint_path,
                               const std::vector<std::filesystem::path>& images,
                               const std::filesystem::path& output_dir, const SensorProfile& profile);

}  // namespace rgb2raw

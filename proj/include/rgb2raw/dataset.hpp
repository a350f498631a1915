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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rgb2raw/image.hpp"
#include "rgb2raw/sampling.hpp"

namespace rgb2raw {

inline constexpr int kManifestVersion = 1;
inline constexpr int kPatchIndexVersion = 1;
inline constexpr double kTestFraction = 0.2;

struct ImagePairEntry {
    std::string id;
    std::filesystem::path rgb;  // PNG
    std::filesystem::path raw;  // 16-bit LE mosaic
    int height = 0;             // mosaic (and RGB) rows
    int width = 0;
    std::string split;          // "train", "test" or empty until assigned
};

/// Versioned JSON description of paired RGB/RAW images from one sensor.
/// Relative paths resolve against the manifest's directory.
struct DatasetManifest {
    int version = kManifestVersion;
    SensorProfile sensor;
    std::uint64_t split_seed = 0;
    std::vector<ImagePairEntry> pairs;
    std::filesystem::path base_dir;

    static DatasetManifest load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// Image-level train/test split. Entries that already carry a split keep it.
    void assign_splits(std::uint64_t seed, double test_fraction = kTestFraction);

    std::filesystem::path resolve(const std::filesystem::path& p) const;
};

struct LoadedPair {
    RgbImage rgb;
    PackedRawImage raw;
};

/// Reads and validates one pair (RGB must match the mosaic resolution).
LoadedPair load_pair(const DatasetManifest& manifest, const ImagePairEntry& entry);

/// Sampled patches plus the provenance written to the index.
struct PatchDataset {
    SamplingMethod method = SamplingMethod::Stratified;
    std::uint64_t seed = 0;
    int bins = kDefaultBins;
    int patches_per_image = kDefaultPatchesPerImage;
    SensorProfile sensor;
    std::vector<PatchPair> pairs;
};

/// Writes `index.json`, `contexts.bin` and `patches-NNN.bin` shards (float32 LE).
void save_patch_dataset(const std::filesystem::path& dir, const PatchDataset& dataset);
PatchDataset load_patch_dataset(const std::filesystem::path& dir);

}  // namespace rgb2raw

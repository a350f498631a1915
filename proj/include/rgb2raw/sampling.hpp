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

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rgb2raw/image.hpp"

namespace rgb2raw {

/// Training patch geometry: 68x68 RGB crops around a 64x64 interior that maps
/// onto a 32x32 packed RAW patch; the network consumes the central 66x66.
inline constexpr int kRawPatchSide = 32;
inline constexpr int kRgbPatchSide = 68;
inline constexpr int kRgbPatchBorder = (kRgbPatchSide - 2 * kRawPatchSide) / 2;  // 2
inline constexpr int kNetworkInputSide = 2 * kRawPatchSide + 2;                  // 66
inline constexpr int kContextSide = 128;
inline constexpr int kDefaultBins = 10;
inline constexpr int kDefaultPatchesPerImage = 6;
inline constexpr double kContextCropArea = 0.9;

struct PatchOrigin {
    int row = 0;
    int col = 0;
    friend bool operator==(const PatchOrigin&, const PatchOrigin&) = default;
};

struct PatchGrid {
    std::vector<PatchOrigin> origins;
    std::vector<std::string> warnings;
};

/// Even-aligned grid of `side` x `side` windows at `stride`, with the last row
/// and column pulled inward so every window fits. Returns no origins (and a
/// warning) when the image is smaller than one window.
PatchGrid enumerate_patches(const RgbImage& rgb, const PackedRawImage& raw, int side, int stride);
PatchGrid enumerate_patches(int height, int width, int side, int stride);

std::array<double, 3> compute_channel_brightness(const RgbImage& rgb_patch);

/// bins[channel][bin] lists candidate indices whose channel mean falls in
/// [bin / n, (bin + 1) / n), with 1.0 placed in the last bin.
struct BrightnessBins {
    int bin_count = kDefaultBins;
    std::array<std::vector<std::vector<std::size_t>>, 3> bins;

    static int bin_of(double mean, int bin_count);
    std::size_t candidate_count() const;
};

BrightnessBins bin_by_brightness(const std::vector<std::array<double, 3>>& channel_means, int bin_count);

/// Stream seed for one image, so parallel and serial dataset builds agree.
std::uint64_t derive_seed(std::uint64_t global_seed, const std::string& image_id);

/// Indices into the candidate list, one per draw: uniform channel, uniform
/// non-empty bin in that channel, uniform member of that bin.
std::vector<std::size_t> stratified_sample(const BrightnessBins& bins, int count, std::uint64_t seed);

/// Uniform draws with replacement over `candidate_count` candidates.
std::vector<std::size_t> random_sample(std::size_t candidate_count, int count, std::uint64_t seed);

enum class SamplingMethod { Random, Stratified };
SamplingMethod parse_sampling_method(const std::string& text);
std::string to_string(SamplingMethod method);

/// Aligned training sample. `rgb_patch` is 68x68; `raw_patch` covers its
/// central 64x64 interior; `context` is the deterministic 128x128 downscale of
/// the full image, shared between patches of one image.
struct PatchPair {
    RgbImage rgb_patch;
    Image raw_patch;
    std::shared_ptr<const RgbImage> context;
    std::string source_image_id;
    PatchOrigin origin;
};

/// Extracts the patch whose 68x68 RGB window starts at `origin`.
PatchPair extract_patch_pair(const RgbImage& rgb, const PackedRawImage& raw, PatchOrigin origin,
                             std::shared_ptr<const RgbImage> context, const std::string& image_id);

/// Evaluation context: plain resize to 128x128.
RgbImage build_context(const RgbImage& rgb_full);

/// Training context: random crop of 0.9 of the area of the 128x128 downscale,
/// resized back to 128x128. Deterministic given `seed`.
RgbImage build_context(const RgbImage& rgb_full, std::uint64_t seed);

/// Side of the square crop that keeps `kContextCropArea` of a 128 image: 121.
int context_crop_side();

/// Applies the training crop to an already downscaled context image.
RgbImage crop_context(const RgbImage& context, std::uint64_t seed);

struct ImageSampling {
    std::vector<PatchPair> pairs;
    std::vector<std::string> warnings;
};

/// Samples `count` patch pairs from one RGB/RAW image pair.
ImageSampling sample_image_pair(const RgbImage& rgb, const PackedRawImage& raw, const std::string& image_id,
                                SamplingMethod method, int count, int bin_count, std::uint64_t global_seed);

}  // namespace rgb2raw

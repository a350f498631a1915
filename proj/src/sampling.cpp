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

#include "rgb2raw/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rgb2raw/error.hpp"
#include "rgb2raw/resize.hpp"

namespace rgb2raw {

namespace {

std::vector<int> axis_origins(int extent, int side, int stride) {
    std::vector<int> out;
    if (extent < side) return out;
    int pos = 0;
    for (; pos + side <= extent; pos += stride) out.push_back(pos);
    const int last = ((extent - side) / 2) * 2;
    if (out.back() != last) out.push_back(last);
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace

PatchGrid enumerate_patches(int height, int width, int side, int stride) {
    if (side <= 0 || stride <= 0 || side % 2 != 0 || stride % 2 != 0) {
        fail(ErrorKind::Parameter, "patch side and stride must be positive and even");
    }
    PatchGrid grid;
    if (height < side || width < side) {
        grid.warnings.push_back("image " + std::to_string(height) + "x" + std::to_string(width) +
                                " is smaller than patch side " + std::to_string(side));
        return grid;
    }
    const auto rows = axis_origins(height, side, stride);
    const auto cols = axis_origins(width, side, stride);
    for (int r : rows) {
        for (int c : cols) grid.origins.push_back({r, c});
    }
    return grid;
}

PatchGrid enumerate_patches(const RgbImage& rgb, const PackedRawImage& raw, int side, int stride) {
    if (raw.data.height() * 2 != rgb.height() || raw.data.width() * 2 != rgb.width()) {
        fail(ErrorKind::Dimension, "packed RAW must be exactly half the RGB resolution");
    }
    return enumerate_patches(rgb.height(), rgb.width(), side, stride);
}

std::array<double, 3> compute_channel_brightness(const RgbImage& rgb_patch) {
    if (rgb_patch.channels() != kRgbChannels || rgb_patch.empty()) {
        fail(ErrorKind::Shape, "channel brightness needs a non-empty 3-channel patch");
    }
    std::array<double, 3> sum{0.0, 0.0, 0.0};
    const auto data = rgb_patch.data();
    for (std::size_t i = 0; i < data.size(); i += 3) {
        sum[0] += data[i];
        sum[1] += data[i + 1];
        sum[2] += data[i + 2];
    }
    const double n = static_cast<double>(data.size() / 3);
    return {sum[0] / n, sum[1] / n, sum[2] / n};
}

int BrightnessBins::bin_of(double mean, int bin_count) {
    const int bin = static_cast<int>(std::floor(mean * bin_count));
    return std::clamp(bin, 0, bin_count - 1);
}

std::size_t BrightnessBins::candidate_count() const {
    std::size_t n = 0;
    for (const auto& bin : bins[0]) n += bin.size();
    return n;
}

BrightnessBins bin_by_brightness(const std::vector<std::array<double, 3>>& channel_means, int bin_count) {
    if (bin_count < 1) fail(ErrorKind::Parameter, "bin count must be >= 1");
    BrightnessBins out;
    out.bin_count = bin_count;
    for (auto& channel : out.bins) channel.assign(bin_count, {});
    for (std::size_t i = 0; i < channel_means.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            out.bins[c][BrightnessBins::bin_of(channel_means[i][c], bin_count)].push_back(i);
        }
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t global_seed, const std::string& image_id) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (unsigned char ch : image_id) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return splitmix64(global_seed ^ splitmix64(h));
}

std::vector<std::size_t> stratified_sample(const BrightnessBins& bins, int count, std::uint64_t seed) {
    std::array<std::vector<const std::vector<std::size_t>*>, 3> non_empty;
    bool any = false;
    for (int c = 0; c < 3; ++c) {
        for (const auto& bin : bins.bins[c]) {
            if (!bin.empty()) non_empty[c].push_back(&bin);
        }
        any = any || !non_empty[c].empty();
    }
    if (!any) fail(ErrorKind::Dataset, "stratified sampling found no non-empty bin");

    std::vector<int> channels;
    for (int c = 0; c < 3; ++c) {
        if (!non_empty[c].empty()) channels.push_back(c);
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> picks;
    picks.reserve(std::max(count, 0));
    for (int i = 0; i < count; ++i) {
        const int channel = channels[uniform_index(rng, channels.size())];
        const auto& bin = *non_empty[channel][uniform_index(rng, non_empty[channel].size())];
        picks.push_back(bin[uniform_index(rng, bin.size())]);
    }
    return picks;
}

std::vector<std::size_t> random_sample(std::size_t candidate_count, int count, std::uint64_t seed) {
    if (candidate_count == 0) fail(ErrorKind::Dataset, "random sampling over an empty candidate list");
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> picks;
    picks.reserve(std::max(count, 0));
    for (int i = 0; i < count; ++i) picks.push_back(uniform_index(rng, candidate_count));
    return picks;
}

SamplingMethod parse_sampling_method(const std::string& text) {
    if (text == "random") return SamplingMethod::Random;
    if (text == "stratified") return SamplingMethod::Stratified;
    fail(ErrorKind::Parameter, "unknown sampling method '" + text + "' (expected random or stratified)");
}

std::string to_string(SamplingMethod method) {
    return method == SamplingMethod::Random ? "random" : "stratified";
}

PatchPair extract_patch_pair(const RgbImage& rgb, const PackedRawImage& raw, PatchOrigin origin,
                             std::shared_ptr<const RgbImage> context, const std::string& image_id) {
    if (origin.row % 2 != 0 || origin.col % 2 != 0) {
        fail(ErrorKind::Parameter, "patch origin must be even to stay on an R site");
    }
    PatchPair pair;
    pair.rgb_patch = rgb.crop(origin.row, origin.col, kRgbPatchSide, kRgbPatchSide);
    pair.raw_patch = raw.data.crop((origin.row + kRgbPatchBorder) / 2, (origin.col + kRgbPatchBorder) / 2,
                                   kRawPatchSide, kRawPatchSide);
    pair.context = std::move(context);
    pair.source_image_id = image_id;
    pair.origin = origin;
    return pair;
}

int context_crop_side() {
    return static_cast<int>(std::lround(kContextSide * std::sqrt(kContextCropArea)));
}

RgbImage build_context(const RgbImage& rgb_full) {
    return resize_bilinear(rgb_full, kContextSide, kContextSide);
}

RgbImage crop_context(const RgbImage& context, std::uint64_t seed) {
    const int side = context_crop_side();
    std::mt19937_64 rng(seed);
    const int y0 = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(context.height() - side + 1)));
    const int x0 = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(context.width() - side + 1)));
    return resize_bilinear(context.crop(y0, x0, side, side), kContextSide, kContextSide);
}

RgbImage build_context(const RgbImage& rgb_full, std::uint64_t seed) {
    return crop_context(build_context(rgb_full), seed);
}

ImageSampling sample_image_pair(const RgbImage& rgb, const PackedRawImage& raw, const std::string& image_id,
                                SamplingMethod method, int count, int bin_count, std::uint64_t global_seed) {
    ImageSampling out;
    const PatchGrid grid = enumerate_patches(rgb, raw, kRgbPatchSide, 2 * kRawPatchSide);
    out.warnings = grid.warnings;
    if (grid.origins.empty()) return out;

    const std::uint64_t seed = derive_seed(global_seed, image_id);
    std::vector<std::size_t> picks;
    if (method == SamplingMethod::Random) {
        picks = random_sample(grid.origins.size(), count, seed);
    } else {
        std::vector<std::array<double, 3>> means;
        means.reserve(grid.origins.size());
        for (const auto& o : grid.origins) {
            means.push_back(compute_channel_brightness(rgb.crop(o.row, o.col, kRgbPatchSide, kRgbPatchSide)));
        }
        picks = stratified_sample(bin_by_brightness(means, bin_count), count, seed);
    }

    auto context = std::make_shared<const RgbImage>(build_context(rgb));
    out.pairs.reserve(picks.size());
    for (std::size_t idx : picks) {
        out.pairs.push_back(extract_patch_pair(rgb, raw, grid.origins[idx], context, image_id));
    }
    return out;
}

}  // namespace rgb2raw

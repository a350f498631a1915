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
#include <span>
#include <string>
#include <vector>

#include "rgb2raw/error.hpp"

namespace rgb2raw {

/// Dense interleaved (height x width x channels) image of doubles.
class Image {
public:
    Image() = default;
    Image(int height, int width, int channels, double fill = 0.0);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    int channels() const noexcept { return channels_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& at(int y, int x, int c) noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    double at(int y, int x, int c) const noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    /// Copies the (h x w) window whose top-left corner is (y0, x0).
    Image crop(int y0, int x0, int h, int w) const;

    bool same_shape(const Image& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

enum class BayerPattern { RGGB };

struct SensorProfile {
    std::string name = "sensor";
    int black_level = 0;
    int white_level = 65535;
    BayerPattern bayer_pattern = BayerPattern::RGGB;

    /// Throws ErrorKind::Parameter unless 0 <= black < white <= 65535.
    void validate() const;

    double range() const noexcept { return static_cast<double>(white_level - black_level); }

    friend bool operator==(const SensorProfile&, const SensorProfile&) = default;
};

/// Parses "RGGB"; every other Bayer layout is rejected.
BayerPattern parse_bayer_pattern(const std::string& text);

/// Single-channel Bayer readout in sensor ADU.
struct RawMosaic {
    int height = 0;
    int width = 0;
    std::vector<std::uint16_t> data;
    SensorProfile profile;

    std::uint16_t at(int y, int x) const noexcept {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    std::uint16_t& at(int y, int x) noexcept { return data[static_cast<std::size_t>(y) * width + x]; }

    friend bool operator==(const RawMosaic&, const RawMosaic&) = default;
};

/// Half-resolution 4-plane view of a mosaic, channels [R, G1, G2, B], normalized to [0,1].
struct PackedRawImage {
    Image data;
    SensorProfile profile;
};

/// Processed counterpart of a RAW frame, 3 channels in [0,1].
using RgbImage = Image;

inline constexpr int kRawChannels = 4;
inline constexpr int kRgbChannels = 3;

/// Mosaic offsets (dy, dx) of the packed channels in RGGB order.
inline constexpr int kBayerDy[kRawChannels] = {0, 0, 1, 1};
inline constexpr int kBayerDx[kRawChannels] = {0, 1, 0, 1};

}  // namespace rgb2raw

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

#include "rgb2raw/bayer.hpp"

#include <algorithm>
#include <cmath>

namespace rgb2raw {

double normalize_adu(double value, const SensorProfile& profile) noexcept {
    return std::clamp((value - profile.black_level) / profile.range(), 0.0, 1.0);
}

std::uint16_t denormalize_adu(double value, const SensorProfile& profile) noexcept {
    const double v = std::clamp(value, 0.0, 1.0) * profile.range() + profile.black_level;
    return static_cast<std::uint16_t>(std::lround(v));
}

PackedRawImage pack_rggb(const RawMosaic& mosaic) {
    mosaic.profile.validate();
    if (mosaic.height % 2 != 0 || mosaic.width % 2 != 0) {
        fail(ErrorKind::Dimension, "mosaic " + std::to_string(mosaic.height) + "x" + std::to_string(mosaic.width) +
                                       " is not even in both dimensions");
    }
    if (mosaic.data.size() != static_cast<std::size_t>(mosaic.height) * mosaic.width) {
        fail(ErrorKind::Dimension, "mosaic buffer does not match its extent");
    }
    PackedRawImage packed{Image(mosaic.height / 2, mosaic.width / 2, kRawChannels), mosaic.profile};
    for (int y = 0; y < mosaic.height / 2; ++y) {
        for (int x = 0; x < mosaic.width / 2; ++x) {
            for (int c = 0; c < kRawChannels; ++c) {
                const int v = mosaic.at(2 * y + kBayerDy[c], 2 * x + kBayerDx[c]);
                if (v > mosaic.profile.white_level) {
                    fail(ErrorKind::Range, "mosaic value " + std::to_string(v) + " at (" +
                                               std::to_string(2 * y + kBayerDy[c]) + "," +
                                               std::to_string(2 * x + kBayerDx[c]) + ") exceeds white level " +
                                               std::to_string(mosaic.profile.white_level));
                }
                packed.data.at(y, x, c) = normalize_adu(v, mosaic.profile);
            }
        }
    }
    return packed;
}

RawMosaic unpack_rggb(const PackedRawImage& packed) {
    packed.profile.validate();
    if (packed.data.channels() != kRawChannels) {
        fail(ErrorKind::Shape, "packed image must have 4 channels");
    }
    RawMosaic mosaic;
    mosaic.height = packed.data.height() * 2;
    mosaic.width = packed.data.width() * 2;
    mosaic.profile = packed.profile;
    mosaic.data.assign(static_cast<std::size_t>(mosaic.height) * mosaic.width, 0);
    for (int y = 0; y < packed.data.height(); ++y) {
        for (int x = 0; x < packed.data.width(); ++x) {
            for (int c = 0; c < kRawChannels; ++c) {
                mosaic.at(2 * y + kBayerDy[c], 2 * x + kBayerDx[c]) =
                    denormalize_adu(packed.data.at(y, x, c), packed.profile);
            }
        }
    }
    return mosaic;
}

}  // namespace rgb2raw

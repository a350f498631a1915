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

#include "rgb2raw/image.hpp"

namespace rgb2raw {

/// Maps an ADU value into [0,1] using the profile's black/white levels.
/// Values below black level clamp to 0.
double normalize_adu(double value, const SensorProfile& profile) noexcept;

/// Inverse of normalize_adu, rounded to the nearest integer ADU.
std::uint16_t denormalize_adu(double value, const SensorProfile& profile) noexcept;

/// Splits an RGGB mosaic into four normalized half-resolution planes.
/// Throws ErrorKind::Dimension for odd sizes and ErrorKind::Range for
/// values above the white level.
PackedRawImage pack_rggb(const RawMosaic& mosaic);

/// Reassembles a mosaic from packed planes; values are clamped to [0,1]
/// before denormalization.
RawMosaic unpack_rggb(const PackedRawImage& packed);

}  // namespace rgb2raw

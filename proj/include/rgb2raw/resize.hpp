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

/// Bilinear resampling with pixel-center alignment (sample centers at
/// (i + 0.5) * scale - 0.5, edges replicated). Resizing to the source size
/// returns an exact copy.
Image resize_bilinear(const Image& src, int out_height, int out_width);

/// Pads every side by `pad` pixels, mirroring about the edge pixel
/// (..., 2, 1 | 0, 1, 2, ...).
Image reflect_pad(const Image& src, int pad);

}  // namespace rgb2raw

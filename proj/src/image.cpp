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

#include "rgb2raw/image.hpp"

#include <algorithm>

namespace rgb2raw {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Dimension: return "dimension";
        case ErrorKind::Range: return "range";
        case ErrorKind::Parameter: return "parameter";
        case ErrorKind::Shape: return "shape";
        case ErrorKind::Dataset: return "dataset";
        case ErrorKind::Input: return "input";
        case ErrorKind::Checkpoint: return "checkpoint";
        case ErrorKind::Config: return "config";
        case ErrorKind::Numerical: return "numerical";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

Image::Image(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
    if (height < 0 || width < 0 || channels < 0) {
        fail(ErrorKind::Dimension, "negative image extent");
    }
    data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

Image Image::crop(int y0, int x0, int h, int w) const {
    if (y0 < 0 || x0 < 0 || h < 0 || w < 0 || y0 + h > height_ || x0 + w > width_) {
        fail(ErrorKind::Dimension, "crop window (" + std::to_string(y0) + "," + std::to_string(x0) + ") " +
                                       std::to_string(h) + "x" + std::to_string(w) + " outside " +
                                       std::to_string(height_) + "x" + std::to_string(width_) + " image");
    }
    Image out(h, w, channels_);
    const std::size_t row = static_cast<std::size_t>(w) * channels_;
    for (int y = 0; y < h; ++y) {
        const double* src = &data_[(static_cast<std::size_t>(y0 + y) * width_ + x0) * channels_];
        std::copy(src, src + row, &out.data_[static_cast<std::size_t>(y) * row]);
    }
    return out;
}

void SensorProfile::validate() const {
    if (black_level < 0 || black_level >= white_level || white_level > 65535) {
        fail(ErrorKind::Parameter, "sensor '" + name + "' needs 0 <= black_level < white_level <= 65535, got " +
                                       std::to_string(black_level) + "/" + std::to_string(white_level));
    }
}

BayerPattern parse_bayer_pattern(const std::string& text) {
    if (text == "RGGB" || text == "rggb") {
        return BayerPattern::RGGB;
    }
    fail(ErrorKind::Parameter, "unsupported Bayer pattern '" + text + "' (only RGGB)");
}

}  // namespace rgb2raw

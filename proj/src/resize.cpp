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

#include "rgb2raw/resize.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rgb2raw {

Image resize_bilinear(const Image& src, int out_height, int out_width) {
    if (src.empty() || out_height <= 0 || out_width <= 0) {
        fail(ErrorKind::Dimension, "resize of empty image or to empty extent");
    }
    if (out_height == src.height() && out_width == src.width()) {
        return src;
    }
    struct Tap {
        int i0, i1;
        double w1;
    };
    auto taps = [](int in, int out) {
        std::vector<Tap> t(out);
        const double scale = static_cast<double>(in) / out;
        for (int i = 0; i < out; ++i) {
            const double s = std::clamp((i + 0.5) * scale - 0.5, 0.0, static_cast<double>(in - 1));
            const int i0 = static_cast<int>(std::floor(s));
            const int i1 = std::min(i0 + 1, in - 1);
            t[i] = {i0, i1, s - i0};
        }
        return t;
    };
    const auto ty = taps(src.height(), out_height);
    const auto tx = taps(src.width(), out_width);
    const int channels = src.channels();
    Image out(out_height, out_width, channels);
    for (int y = 0; y < out_height; ++y) {
        const auto& a = ty[y];
        for (int x = 0; x < out_width; ++x) {
            const auto& b = tx[x];
            for (int c = 0; c < channels; ++c) {
                const double top = src.at(a.i0, b.i0, c) * (1.0 - b.w1) + src.at(a.i0, b.i1, c) * b.w1;
                const double bottom = src.at(a.i1, b.i0, c) * (1.0 - b.w1) + src.at(a.i1, b.i1, c) * b.w1;
                out.at(y, x, c) = top * (1.0 - a.w1) + bottom * a.w1;
            }
        }
    }
    return out;
}

Image reflect_pad(const Image& src, int pad) {
    if (pad < 0 || pad >= src.height() || pad >= src.width()) {
        fail(ErrorKind::Dimension, "reflection pad of " + std::to_string(pad) + " too large for image");
    }
    auto mirror = [](int i, int n) {
        if (i < 0) return -i;
        if (i >= n) return 2 * (n - 1) - i;
        return i;
    };
    Image out(src.height() + 2 * pad, src.width() + 2 * pad, src.channels());
    for (int y = 0; y < out.height(); ++y) {
        const int sy = mirror(y - pad, src.height());
        for (int x = 0; x < out.width(); ++x) {
            const int sx = mirror(x - pad, src.width());
            for (int c = 0; c < src.channels(); ++c) {
                out.at(y, x, c) = src.at(sy, sx, c);
            }
        }
    }
    return out;
}

}  // namespace rgb2raw

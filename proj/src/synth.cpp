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

#include "rgb2raw/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "rgb2raw/bayer.hpp"
#include "rgb2raw/error.hpp"
#include "rgb2raw/io.hpp"
#include "rgb2raw/sampling.hpp"

namespace rgb2raw {

namespace fs = std::filesystem;

namespace {

struct Blob {
    double cy, cx, radius;
    std::array<double, 3> color;
};

int bayer_color(int y, int x) {
    // RGGB: 0 = R, 1 = G, 2 = B
    if (y % 2 == 0) return x % 2 == 0 ? 0 : 1;
    return x % 2 == 0 ? 1 : 2;
}

int mirror(int i, int n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * (n - 1) - i;
    return i;
}

}  // namespace

RawMosaic synthesize_mosaic(const SynthConfig& cfg, std::uint64_t seed) {
    cfg.sensor.validate();
    if (cfg.height % 2 != 0 || cfg.width % 2 != 0 || cfg.height < 4 || cfg.width < 4) {
        fail(ErrorKind::Dimension, "synthetic frames must be even-sized and at least 4x4");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double h = cfg.height;
    const double w = cfg.width;

    const double exposure =
        std::exp(std::log(cfg.min_exposure) + unit(rng) * (std::log(cfg.max_exposure) - std::log(cfg.min_exposure)));

    std::vector<Blob> surfaces(6);
    for (auto& b : surfaces) {
        b = {unit(rng) * h, unit(rng) * w, (0.1 + 0.3 * unit(rng)) * std::min(h, w),
             {0.2 + 0.8 * unit(rng), 0.2 + 0.8 * unit(rng), 0.2 + 0.8 * unit(rng)}};
    }
    const int light_count = static_cast<int>(unit(rng) * (cfg.max_lights + 1));
    std::vector<Blob> lights(light_count);
    for (auto& b : lights) {
        const double warm = unit(rng);
        const double gain = 2.0 + 6.0 * unit(rng);
        b = {unit(rng) * h, unit(rng) * w, 2.0 + 0.04 * unit(rng) * std::min(h, w),
             {gain * (0.6 + 0.4 * warm), gain * 0.8, gain * (1.0 - 0.6 * warm)}};
    }
    const std::array<double, 3> gradient{unit(rng) * 0.3, unit(rng) * 0.3, unit(rng) * 0.3};

    RawMosaic mosaic;
    mosaic.height = cfg.height;
    mosaic.width = cfg.width;
    mosaic.profile = cfg.sensor;
    mosaic.data.resize(static_cast<std::size_t>(cfg.height) * cfg.width);
    for (int y = 0; y < cfg.height; ++y) {
        for (int x = 0; x < cfg.width; ++x) {
            const int c = bayer_color(y, x);
            double base = 0.05 + gradient[c] * (y / h);
            for (const auto& b : surfaces) {
                const double d2 = ((y - b.cy) * (y - b.cy) + (x - b.cx) * (x - b.cx)) / (b.radius * b.radius);
                base += b.color[c] * std::exp(-0.5 * d2);
            }
            double light = 0.0;
            for (const auto& b : lights) {
                const double d2 = ((y - b.cy) * (y - b.cy) + (x - b.cx) * (x - b.cx)) / (b.radius * b.radius);
                light += b.color[c] * std::exp(-0.5 * d2);
            }
            const double linear = std::clamp((exposure * base + light) / cfg.wb_gains[c], 0.0, 1.0);
            mosaic.at(y, x) = denormalize_adu(linear, cfg.sensor);
        }
    }
    return mosaic;
}

RgbImage demosaic_bilinear(const RawMosaic& mosaic) {
    const PackedRawImage packed = pack_rggb(mosaic);
    auto value = [&](int y, int x) { return packed.data.at(y / 2, x / 2, (y % 2) * 2 + (x % 2)); };
    RgbImage rgb(mosaic.height, mosaic.width, kRgbChannels);
    for (int y = 0; y < mosaic.height; ++y) {
        for (int x = 0; x < mosaic.width; ++x) {
            double sum[3] = {0.0, 0.0, 0.0};
            int count[3] = {0, 0, 0};
            const int own = bayer_color(y, x);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int sy = mirror(y + dy, mosaic.height);
                    const int sx = mirror(x + dx, mosaic.width);
                    const int c = bayer_color(sy, sx);
                    if (c == own) continue;
                    sum[c] += value(sy, sx);
                    ++count[c];
                }
            }
            for (int c = 0; c < 3; ++c) {
                rgb.at(y, x, c) = c == own ? value(y, x) : sum[c] / count[c];
            }
        }
    }
    return rgb;
}

RgbImage simple_isp(const RawMosaic& mosaic, const SynthConfig& cfg) {
    RgbImage rgb = demosaic_bilinear(mosaic);
    const double inv_gamma = 1.0 / cfg.display_gamma;
    for (int y = 0; y < rgb.height(); ++y) {
        for (int x = 0; x < rgb.width(); ++x) {
            for (int c = 0; c < 3; ++c) {
                double v = std::clamp(rgb.at(y, x, c) * cfg.wb_gains[c], 0.0, 1.0);
                v = std::pow(v, inv_gamma);
                if (cfg.quantize_rgb) v = std::round(v * 255.0) / 255.0;
                rgb.at(y, x, c) = v;
            }
        }
    }
    return rgb;
}

SynthPair make_synthetic_pair(const SynthConfig& cfg, std::uint64_t seed) {
    SynthPair pair;
    pair.mosaic = synthesize_mosaic(cfg, seed);
    pair.rgb = simple_isp(pair.mosaic, cfg);
    return pair;
}

DatasetManifest write_synthetic_dataset(const fs::path& dir, int count, const SynthConfig& cfg, std::uint64_t seed) {
    fs::create_directories(dir / "rgb");
    fs::create_directories(dir / "raw");
    DatasetManifest manifest;
    manifest.sensor = cfg.sensor;
    manifest.base_dir = dir;
    for (int i = 0; i < count; ++i) {
        char id[32];
        std::snprintf(id, sizeof(id), "synth_%04d", i);
        const SynthPair pair = make_synthetic_pair(cfg, derive_seed(seed, id));
        ImagePairEntry entry;
        entry.id = id;
        entry.rgb = fs::path("rgb") / (std::string(id) + ".png");
        entry.raw = fs::path("raw") / (std::string(id) + ".raw");
        entry.height = cfg.height;
        entry.width = cfg.width;
        write_png(dir / entry.rgb, pair.rgb, 8);
        write_raw16(dir / entry.raw, pair.mosaic);
        manifest.pairs.push_back(std::move(entry));
    }
    manifest.assign_splits(seed);
    manifest.save(dir / "manifest.json");
    return manifest;
}

}  // namespace rgb2raw

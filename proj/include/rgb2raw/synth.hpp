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
#include <filesystem>

#include "rgb2raw/dataset.hpp"
#include "rgb2raw/image.hpp"

namespace rgb2raw {

/// Test fixture: a toy forward ISP (bilinear demosaic, white balance, display
/// gamma, 8-bit quantization) applied to procedurally generated, mostly dark
/// scenes. It is not a camera model; it only provides aligned RGB/RAW pairs
/// with realistic intensity skew for tests and demos.
struct SynthConfig {
    int height = 256;
    int width = 256;
    SensorProfile sensor{"synthetic", 64, 1023, BayerPattern::RGGB};
    std::array<double, 3> wb_gains{2.0, 1.0, 1.6};
    double display_gamma = 2.2;
    double min_exposure = 0.03;
    double max_exposure = 0.5;
    int max_lights = 4;
    bool quantize_rgb = true;
};

struct SynthPair {
    RgbImage rgb;
    RawMosaic mosaic;
};

/// Linear-light sensor readout of a random scene.
RawMosaic synthesize_mosaic(const SynthConfig& cfg, std::uint64_t seed);

/// Bilinear RGGB demosaic of a normalized mosaic (full resolution, 3 channels).
RgbImage demosaic_bilinear(const RawMosaic& mosaic);

/// demosaic -> white balance -> clip -> display gamma -> optional 8-bit quantization.
RgbImage simple_isp(const RawMosaic& mosaic, const SynthConfig& cfg);

SynthPair make_synthetic_pair(const SynthConfig& cfg, std::uint64_t seed);

/// Writes `count` pairs (rgb/*.png, raw/*.raw) and a manifest with an 80/20
/// image-level split into `dir`; returns the manifest.
DatasetManifest write_synthetic_dataset(const std::filesystem::path& dir, int count, const SynthConfig& cfg,
                                        std::uint64_t seed);

}  // namespace rgb2raw

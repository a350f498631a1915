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
#include <string>
#include <vector>

#include "rgb2raw/dataset.hpp"
#include "rgb2raw/image.hpp"

namespace rgb2raw {

/// Intensity statistics of one patch population.
struct PopulationSummary {
    std::string name;
    std::size_t patches = 0;
    std::array<std::vector<double>, 3> pixel_histogram;       // RGB intensities, `pixel_bins` bins over [0,1]
    std::array<std::vector<double>, 3> brightness_histogram;  // per-patch channel means, `bins` bins
    std::array<double, 3> brightness_entropy{};               // bits
    double mean_brightness_entropy = 0.0;
};

PopulationSummary summarize_population(const std::string& name, const std::vector<const RgbImage*>& patches,
                                       int bins, int pixel_bins);

struct PopulationOptions {
    int patches_per_image = 6;
    int bins = 10;
    int pixel_bins = 64;
    std::uint64_t seed = 0;
};

/// Full candidate grid versus random and stratified draws over the images of
/// a dataset manifest, in that order.
std::vector<PopulationSummary> compare_populations(const DatasetManifest& manifest, const PopulationOptions& options);

/// Writes `<stem>.csv` (population, channel, histogram, bin, count)
/// and one `<stem>-<channel>.svg` pixel histogram per channel.
void write_population_report(const std::filesystem::path& dir, const std::string& stem,
                             const std::vector<PopulationSummary>& populations);

}  // namespace rgb2raw

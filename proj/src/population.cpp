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

#include "rgb2raw/population.hpp"

#include <algorithm>
#include <fstream>

#include "rgb2raw/error.hpp"
#include "rgb2raw/metrics.hpp"
#include "rgb2raw/sampling.hpp"

namespace rgb2raw {

namespace fs = std::filesystem;

namespace {

constexpr const char* kChannelNames[3] = {"red", "green", "blue"};

}  // namespace

PopulationSummary summarize_population(const std::string& name, const std::vector<const RgbImage*>& patches,
                                       int bins, int pixel_bins) {
    PopulationSummary s;
    s.name = name;
    s.patches = patches.size();
    std::array<std::vector<double>, 3> means;
    for (int c = 0; c < 3; ++c) s.pixel_histogram[c].assign(static_cast<std::size_t>(pixel_bins), 0.0);
    for (const RgbImage* p : patches) {
        const auto m = compute_channel_brightness(*p);
        for (int c = 0; c < 3; ++c) means[c].push_back(m[c]);
        for (int y = 0; y < p->height(); ++y) {
            for (int x = 0; x < p->width(); ++x) {
                for (int c = 0; c < 3; ++c) {
                    const double v = p->at(y, x, c);
                    const int b = std::clamp(static_cast<int>(v * pixel_bins), 0, pixel_bins - 1);
                    s.pixel_histogram[c][static_cast<std::size_t>(b)] += 1.0;
                }
            }
        }
    }
    double total = 0.0;
    for (int c = 0; c < 3; ++c) {
        // Same bin assignment as the sampler.
        s.brightness_histogram[c].assign(static_cast<std::size_t>(bins), 0.0);
        for (double m : means[c]) s.brightness_histogram[c][static_cast<std::size_t>(BrightnessBins::bin_of(m, bins))] += 1.0;
        s.brightness_entropy[c] = entropy_bits(s.brightness_histogram[c]);
        total += s.brightness_entropy[c];
    }
    s.mean_brightness_entropy = total / 3.0;
    return s;
}

std::vector<PopulationSummary> compare_populations(const DatasetManifest& manifest, const PopulationOptions& options) {
    if (options.bins < 1 || options.pixel_bins < 1 || options.patches_per_image < 1) {
        fail(ErrorKind::Parameter, "population statistics need positive bins and patch counts");
    }
    std::vector<RgbImage> full, random, stratified;
    for (const auto& entry : manifest.pairs) {
        const LoadedPair pair = load_pair(manifest, entry);
        const PatchGrid grid = enumerate_patches(pair.rgb, pair.raw, kRgbPatchSide, 2 * kRawPatchSide);
        for (const auto& o : grid.origins) full.push_back(pair.rgb.crop(o.row, o.col, kRgbPatchSide, kRgbPatchSide));
        for (auto method : {SamplingMethod::Random, SamplingMethod::Stratified}) {
            auto& dst = method == SamplingMethod::Random ? random : stratified;
            for (auto& p : sample_image_pair(pair.rgb, pair.raw, entry.id, method, options.patches_per_image,
                                             options.bins, options.seed)
                               .pairs) {
                dst.push_back(std::move(p.rgb_patch));
            }
        }
    }
    auto pointers = [](const std::vector<RgbImage>& v) {
        std::vector<const RgbImage*> out;
        for (const auto& img : v) out.push_back(&img);
        return out;
    };
    return {summarize_population("full", pointers(full), options.bins, options.pixel_bins),
            summarize_population("random", pointers(random), options.bins, options.pixel_bins),
            summarize_population("stratified", pointers(stratified), options.bins, options.pixel_bins)};
}

void write_population_report(const fs::path& dir, const std::string& stem,
                             const std::vector<PopulationSummary>& populations) {
    fs::create_directories(dir);
    std::ofstream csv(dir / (stem + ".csv"), std::ios::trunc);
    if (!csv) fail(ErrorKind::Io, "cannot write statistics into " + dir.string());
    csv << "population,channel,histogram,bin,count\n";
    for (const auto& p : populations) {
        for (int c = 0; c < 3; ++c) {
            for (std::size_t b = 0; b < p.pixel_histogram[c].size(); ++b)
                csv << p.name << ',' << kChannelNames[c] << ",pixel," << b << ',' << p.pixel_histogram[c][b] << '\n';
            for (std::size_t b = 0; b < p.brightness_histogram[c].size(); ++b)
                csv << p.name << ',' << kChannelNames[c] << ",brightness," << b << ',' << p.brightness_histogram[c][b]
                    << '\n';
        }
    }
    for (int c = 0; c < 3; ++c) {
        std::vector<HistogramSeries> series;
        for (const auto& p : populations) {
            // Normalize so populations of different sizes share one axis.
            double total = 0.0;
            for (double v : p.pixel_histogram[c]) total += v;
            HistogramSeries s{p.name, p.pixel_histogram[c]};
            if (total > 0.0)
                for (double& v : s.values) v /= total;
            series.push_back(std::move(s));
        }
        write_histogram_svg(dir / (stem + "-" + kChannelNames[c] + ".svg"),
                            std::string(kChannelNames[c]) + " pixel intensity", 0.0, 1.0, series);
    }
}

}  // namespace rgb2raw

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

#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rgb2raw/image.hpp"

namespace rgb2raw {

/// psnr() of identical inputs.
inline constexpr double kPsnrInfinite = std::numeric_limits<double>::infinity();
/// Value written to reports in place of an infinite PSNR.
inline constexpr double kPsnrDisplayCap = 100.0;

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

/// Peak 1.0. Shape mismatch throws ErrorKind::Shape.
double psnr(const Image& pred, const Image& target);
double display_psnr(double db);

struct SsimResult {
    double value = 0.0;
    int window = kSsimWindow;  // side actually used
    std::vector<std::string> warnings;
};

/// Gaussian-window SSIM per channel over the fully covered ("valid") window
/// positions, averaged over channels. Images smaller than the window shrink it
/// to the largest odd side that fits and report a warning.
SsimResult ssim_detailed(const Image& pred, const Image& target);
double ssim(const Image& pred, const Image& target);

struct ImageScore {
    std::string image_id;
    double psnr_db = 0.0;  // may be kPsnrInfinite
    double ssim = 0.0;
};

struct EvaluationReport {
    std::vector<ImageScore> images;  // sorted by image_id
    double mean_psnr = 0.0;          // arithmetic mean of dB, infinite if any image is
    double mean_psnr_display = 0.0;  // arithmetic mean of display_psnr values
    double mean_ssim = 0.0;
    std::vector<std::string> warnings;
};

/// Scores (id, prediction, target) triples; `workers` > 1 evaluates in parallel
/// with results reduced in id order.
EvaluationReport evaluate_images(const std::vector<std::pair<std::string, std::pair<Image, Image>>>& items,
                                 int workers = 1);

/// Mosaic dimensions for headerless RAW files, keyed by file stem.
using FrameSizes = std::map<std::string, std::pair<int, int>>;

/// Reads `conversion_manifest.json` (converter output) or `manifest.json`
/// (dataset) from `dir` if present.
FrameSizes frame_sizes_from_dir(const std::filesystem::path& dir);

struct EvaluateOptions {
    SensorProfile profile;
    FrameSizes sizes;
    std::optional<std::pair<int, int>> default_size;  // for stems missing from `sizes`
    int workers = 1;
    FrameSizes target_sizes;  // reference frames, when they differ from `sizes`
};

/// Pairs `*.raw` files by stem across the two directories and scores them on
/// the normalized packed representation. A reference larger than its
/// prediction is cropped right/bottom to match, as the converter does.
/// Unpaired or unreadable files become warnings and are excluded.
EvaluationReport evaluate_dataset(const std::filesystem::path& pred_dir, const std::filesystem::path& target_dir,
                                  const EvaluateOptions& options);

/// Columns image_id, psnr_db, ssim; last row is the "mean" summary.
void write_report_csv(const std::filesystem::path& path, const EvaluationReport& report);

struct HistogramSeries {
    std::string label;
    std::vector<double> values;  // one per bin
};

/// Minimal bar/line chart; every series shares the bin edges [lo, hi].
void write_histogram_svg(const std::filesystem::path& path, const std::string& title, double lo, double hi,
                         const std::vector<HistogramSeries>& series);

/// Counts of `values` in `bins` equal-width bins over [lo, hi] (hi inclusive).
std::vector<double> histogram(const std::vector<double>& values, int bins, double lo, double hi);

/// Shannon entropy in bits of a count histogram.
double entropy_bits(const std::vector<double>& counts);

}  // namespace rgb2raw

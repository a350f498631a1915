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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include <boost/math/distributions/chi_squared.hpp>

#include "rgb2raw/image.hpp"
#include "rgb2raw/bayer.hpp"
#include "rgb2raw/model.hpp"
#include "rgb2raw/sampling.hpp"
#include "rgb2raw/synth.hpp"

namespace testing {

inline rgb2raw::Image random_image(int h, int w, int c, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    rgb2raw::Image img(h, w, c);
    for (double& v : img.data()) v = u(rng);
    return img;
}

/// Same stream as tests/fixtures/make_ssim_reference.py: splitmix64, top 53 bits.
inline std::vector<double> splitmix_stream(std::uint64_t seed, std::size_t n) {
    std::vector<double> out(n);
    std::uint64_t state = seed;
    for (double& v : out) {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z ^= z >> 31;
        v = static_cast<double>(z >> 11) * 0x1.0p-53;
    }
    return out;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("rgb2raw-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Small network used wherever the architecture, not its capacity, is under test.
inline rgb2raw::ReRawConfig tiny_config(int heads = 3) {
    rgb2raw::ReRawConfig c;
    c.with_heads(heads);
    c.trunk_width = 8;
    c.context_dim = 8;
    c.stem_channels = 6;
    c.n_residual_blocks = 1;
    c.encoder_width = 4;
    c.encoder_blocks = 2;
    c.context_side = 16;
    return c;
}

/// Patch pairs sampled from freshly synthesized images.
inline std::vector<rgb2raw::PatchPair> synthetic_patches(int images, int per_image, std::uint64_t seed, int side = 160) {
    rgb2raw::SynthConfig cfg;
    cfg.height = side;
    cfg.width = side;
    std::vector<rgb2raw::PatchPair> out;
    for (int i = 0; i < images; ++i) {
        const auto pair = rgb2raw::make_synthetic_pair(cfg, seed + i);
        auto s = rgb2raw::sample_image_pair(pair.rgb, rgb2raw::pack_rggb(pair.mosaic), "img" + std::to_string(i),
                                            rgb2raw::SamplingMethod::Stratified, per_image, 10, seed);
        for (auto& p : s.pairs) out.push_back(std::move(p));
    }
    return out;
}

/// Upper-tail probability of Pearson's statistic for observed counts against
/// equal expected counts.
inline double chi_square_uniform_pvalue(const std::vector<double>& counts) {
    double total = 0.0;
    for (double c : counts) total += c;
    const double expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (double c : counts) stat += (c - expected) * (c - expected) / expected;
    boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

/// Two-sample Kolmogorov-Smirnov statistic and its asymptotic p-value.
struct KsResult {
    double statistic = 0.0;
    double pvalue = 0.0;
};

inline double kolmogorov_q(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-12) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double sq = std::sqrt(ne);
    return {d, kolmogorov_q((sq + 0.12 + 0.11 / sq) * d)};
}

}  // namespace testing

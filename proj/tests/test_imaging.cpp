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

#include <doctest.h>

#include <cmath>
#include <random>

#include "rgb2raw/bayer.hpp"
#include "rgb2raw/error.hpp"
#include "rgb2raw/gamma.hpp"
#include "rgb2raw/resize.hpp"
#include "support.hpp"

using namespace rgb2raw;

namespace {

RawMosaic make_mosaic(int h, int w, const SensorProfile& p, std::uint64_t seed) {
    RawMosaic m{h, w, std::vector<std::uint16_t>(static_cast<std::size_t>(h) * w), p};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> u(0, p.white_level);
    for (auto& v : m.data) v = static_cast<std::uint16_t>(u(rng));
    return m;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an rgb2raw::Error");
    return ErrorKind::Io;
}

}  // namespace

TEST_CASE("sensor profile invariants") {
    CHECK_NOTHROW(SensorProfile{"s", 0, 1, BayerPattern::RGGB}.validate());
    CHECK(kind_of([] { SensorProfile{"s", 10, 10, BayerPattern::RGGB}.validate(); }) == ErrorKind::Parameter);
    CHECK(kind_of([] { SensorProfile{"s", -1, 10, BayerPattern::RGGB}.validate(); }) == ErrorKind::Parameter);
    CHECK(parse_bayer_pattern("RGGB") == BayerPattern::RGGB);
    CHECK(kind_of([] { parse_bayer_pattern("BGGR"); }) == ErrorKind::Parameter);
}

TEST_CASE("black level packs to zero and white level to one") {
    const SensorProfile p{"s", 64, 1023, BayerPattern::RGGB};
    RawMosaic black{2, 2, {64, 64, 64, 64}, p};
    RawMosaic white{2, 2, {1023, 1023, 1023, 1023}, p};
    const auto zero = pack_rggb(black);
    const auto one = pack_rggb(white);
    REQUIRE(zero.data.height() == 1);
    REQUIRE(zero.data.width() == 1);
    REQUIRE(zero.data.channels() == 4);
    for (int c = 0; c < 4; ++c) {
        CHECK(zero.data.at(0, 0, c) == 0.0);
        CHECK(one.data.at(0, 0, c) == 1.0);
    }
}

TEST_CASE("pack_rggb matches an index-by-index oracle") {
    const SensorProfile p{"s", 100, 4000, BayerPattern::RGGB};
    RawMosaic m{4, 4, {}, p};
    for (int i = 0; i < 16; ++i) m.data.push_back(static_cast<std::uint16_t>(200 + 37 * i));
    const auto packed = pack_rggb(m);
    REQUIRE(packed.data.height() == 2);
    REQUIRE(packed.data.width() == 2);
    // R at even/even, G1 at even/odd, G2 at odd/even, B at odd/odd.
    const int dy[4] = {0, 0, 1, 1};
    const int dx[4] = {0, 1, 0, 1};
    for (int y = 0; y < 2; ++y) {
        for (int x = 0; x < 2; ++x) {
            for (int c = 0; c < 4; ++c) {
                const double raw = m.data[static_cast<std::size_t>((2 * y + dy[c]) * 4 + 2 * x + dx[c])];
                const double expect = std::clamp((raw - 100.0) / 3900.0, 0.0, 1.0);
                CHECK(packed.data.at(y, x, c) == doctest::Approx(expect).epsilon(1e-15));
            }
        }
    }
}

TEST_CASE("pack_rggb clamps sub-black values and rejects bad mosaics") {
    const SensorProfile p{"s", 64, 1023, BayerPattern::RGGB};
    RawMosaic dark{2, 2, {0, 10, 63, 64}, p};
    for (int c = 0; c < 4; ++c) CHECK(pack_rggb(dark).data.at(0, 0, c) == 0.0);

    RawMosaic odd{3, 2, std::vector<std::uint16_t>(6, 100), p};
    CHECK(kind_of([&] { pack_rggb(odd); }) == ErrorKind::Dimension);
    RawMosaic hot{2, 2, {100, 1024, 100, 100}, p};
    CHECK(kind_of([&] { pack_rggb(hot); }) == ErrorKind::Range);
}

TEST_CASE("unpack of constant planes gives black and white level") {
    const SensorProfile p{"s", 64, 1023, BayerPattern::RGGB};
    const auto zeros = unpack_rggb({Image(3, 2, 4, 0.0), p});
    const auto ones = unpack_rggb({Image(3, 2, 4, 1.0), p});
    CHECK(zeros.height == 6);
    CHECK(zeros.width == 4);
    for (auto v : zeros.data) CHECK(v == 64);
    for (auto v : ones.data) CHECK(v == 1023);
}

TEST_CASE("pack/unpack round trip is lossless at matching bit depth") {
    for (const SensorProfile& p : {SensorProfile{"a", 0, 65535, BayerPattern::RGGB},
                                   SensorProfile{"b", 64, 1023, BayerPattern::RGGB},
                                   SensorProfile{"c", 512, 16383, BayerPattern::RGGB}}) {
        RawMosaic m = make_mosaic(16, 22, p, 11);
        for (auto& v : m.data) v = std::max<std::uint16_t>(v, static_cast<std::uint16_t>(p.black_level));
        const RawMosaic back = unpack_rggb(pack_rggb(m));
        CHECK(back == m);
    }
}

TEST_CASE("pack/unpack through 16-bit storage stays within half a quantization step") {
    // Store the normalized planes at k = 16 bits, then decode.
    const SensorProfile p{"s", 64, 1023, BayerPattern::RGGB};
    RawMosaic m = make_mosaic(8, 8, p, 3);
    for (auto& v : m.data) v = std::max<std::uint16_t>(v, 64);
    PackedRawImage packed = pack_rggb(m);
    for (double& v : packed.data.data()) v = std::round(v * 65535.0) / 65535.0;
    const RawMosaic back = unpack_rggb(packed);
    const double bound = 0.5 * (p.white_level - p.black_level) / 65536.0;
    for (std::size_t i = 0; i < m.data.size(); ++i) {
        // Rounding to integer ADU on top of the storage error.
        CHECK(std::abs(static_cast<double>(back.data[i]) - m.data[i]) <= std::max(bound, 0.5));
    }
}

TEST_CASE("normalization preserves the per-channel argmax") {
    const SensorProfile p{"s", 64, 4095, BayerPattern::RGGB};
    const RawMosaic m = make_mosaic(20, 20, p, 8);
    const auto packed = pack_rggb(m);
    for (int c = 0; c < 4; ++c) {
        int best_raw = -1, best_packed = -1;
        double max_raw = -1, max_packed = -1;
        for (int y = 0; y < 10; ++y) {
            for (int x = 0; x < 10; ++x) {
                const double r = m.at(2 * y + kBayerDy[c], 2 * x + kBayerDx[c]);
                if (r > max_raw) max_raw = r, best_raw = y * 10 + x;
                if (packed.data.at(y, x, c) > max_packed) max_packed = packed.data.at(y, x, c), best_packed = y * 10 + x;
            }
        }
        CHECK(best_raw == best_packed);
    }
}

TEST_CASE("gamma examples and fixed points") {
    CHECK(gamma_correct(0.25, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(degamma(0.5, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
    for (double g : default_gamma_ladder(10)) {
        CHECK(gamma_correct(0.0, g) == 0.0);
        CHECK(gamma_correct(1.0, g) == 1.0);
        CHECK(degamma(0.0, g) == 0.0);
        CHECK(degamma(1.0, g) == 1.0);
    }
    const Image img = testing::random_image(5, 7, 3, 1);
    CHECK(gamma_correct(img, 1.0) == img);
    CHECK(degamma(img, 1.0) == img);
}

TEST_CASE("gamma rejects non-positive exponents") {
    CHECK(kind_of([] { gamma_correct(0.5, 0.0); }) == ErrorKind::Parameter);
    CHECK(kind_of([] { degamma(0.5, -0.1); }) == ErrorKind::Parameter);
    CHECK(kind_of([] { gamma_correct(0.5, std::nan("")); }) == ErrorKind::Parameter);
}

TEST_CASE("gamma round trip and monotonicity on random values") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double g : default_gamma_ladder(10)) {
        for (int i = 0; i < 2000; ++i) {
            const double x = u(rng), y = u(rng);
            CHECK(std::abs(degamma(gamma_correct(x, g), g) - x) <= 1e-6);
            if (x < y) {
                CHECK(degamma(x, g) < degamma(y, g));
                CHECK(gamma_correct(x, g) < gamma_correct(y, g));
            }
            CHECK(degamma(x, g) >= 0.0);
            CHECK(degamma(x, g) <= 1.0);
        }
    }
}

TEST_CASE("span and image overloads agree with the scalar form") {
    const Image img = testing::random_image(3, 4, 2, 9);
    const auto v = gamma_correct(img.data(), 0.3);
    const Image im = degamma(img, 0.3);
    for (std::size_t i = 0; i < img.size(); ++i) {
        CHECK(v[i] == gamma_correct(img.data()[i], 0.3));
        CHECK(im.data()[i] == degamma(img.data()[i], 0.3));
    }
}

TEST_CASE("default gamma ladder is evenly spaced") {
    const auto g = default_gamma_ladder(10);
    REQUIRE(g.size() == 10);
    for (int i = 0; i < 10; ++i) CHECK(g[i] == doctest::Approx((i + 1) / 10.0));
    CHECK(default_gamma_ladder(1) == std::vector<double>{1.0});
    CHECK(default_gamma_ladder(2) == std::vector<double>{0.5, 1.0});
}

TEST_CASE("bilinear resize keeps same-size images and constants") {
    const Image img = testing::random_image(9, 11, 3, 2);
    CHECK(resize_bilinear(img, 9, 11) == img);
    const Image flat(40, 30, 3, 0.37);
    const Image small = resize_bilinear(flat, 7, 5);
    for (double v : small.data()) CHECK(v == doctest::Approx(0.37).epsilon(1e-14));
}

TEST_CASE("bilinear 2x downscale averages 2x2 blocks") {
    // Pixel-centre alignment puts every output sample midway between four inputs.
    const Image img = testing::random_image(8, 6, 1, 4);
    const Image half = resize_bilinear(img, 4, 3);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 3; ++x) {
            const double mean = (img.at(2 * y, 2 * x, 0) + img.at(2 * y + 1, 2 * x, 0) + img.at(2 * y, 2 * x + 1, 0) +
                                 img.at(2 * y + 1, 2 * x + 1, 0)) / 4.0;
            CHECK(half.at(y, x, 0) == doctest::Approx(mean).epsilon(1e-12));
        }
    }
}

TEST_CASE("reflection padding mirrors without repeating the edge") {
    const Image img = testing::random_image(4, 5, 2, 6);
    const Image pad = reflect_pad(img, 1);
    REQUIRE(pad.height() == 6);
    REQUIRE(pad.width() == 7);
    auto reflect = [](int i, int n) { return i < 0 ? -i : (i >= n ? 2 * n - 2 - i : i); };
    for (int y = -1; y <= 4; ++y)
        for (int x = -1; x <= 5; ++x)
            for (int c = 0; c < 2; ++c) CHECK(pad.at(y + 1, x + 1, c) == img.at(reflect(y, 4), reflect(x, 5), c));
    CHECK(kind_of([&] { reflect_pad(img, 4); }) == ErrorKind::Dimension);
}

TEST_CASE("crop bounds are enforced") {
    const Image img(4, 4, 1);
    CHECK(img.crop(1, 1, 3, 3).height() == 3);
    CHECK(kind_of([&] { img.crop(2, 2, 3, 3); }) == ErrorKind::Dimension);
}

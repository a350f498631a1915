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
#include <fstream>
#include <set>

#include "rgb2raw/bayer.hpp"
#include "rgb2raw/dataset.hpp"
#include "rgb2raw/error.hpp"
#include "rgb2raw/io.hpp"
#include "rgb2raw/synth.hpp"
#include "support.hpp"

using namespace rgb2raw;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an rgb2raw::Error");
    return ErrorKind::Io;
}

const SensorProfile kProfile{"s", 64, 1023, BayerPattern::RGGB};

}  // namespace

TEST_CASE("raw16 files round trip and carry no header") {
    testing::TempDir dir("io");
    RawMosaic m{6, 8, {}, kProfile};
    for (int i = 0; i < 48; ++i) m.data.push_back(static_cast<std::uint16_t>(64 + 19 * i));
    write_raw16(dir / "m.raw", m);
    CHECK(std::filesystem::file_size(dir / "m.raw") == 96);
    {
        std::ifstream in(dir / "m.raw", std::ios::binary);
        unsigned char b[2];
        in.read(reinterpret_cast<char*>(b), 2);
        CHECK(b[0] + 256 * b[1] == 64);  // little endian
    }
    CHECK(read_raw16(dir / "m.raw", 6, 8, kProfile) == m);
    CHECK(kind_of([&] { read_raw16(dir / "m.raw", 8, 8, kProfile); }) == ErrorKind::Input);
    CHECK(kind_of([&] { read_raw16(dir / "none.raw", 6, 8, kProfile); }) == ErrorKind::Input);
}

TEST_CASE("PNG round trip at 8 and 16 bits") {
    testing::TempDir dir("png");
    const RgbImage img = testing::random_image(9, 13, 3, 1);
    for (int depth : {8, 16}) {
        const auto path = dir / ("x" + std::to_string(depth) + ".png");
        write_png(path, img, depth);
        const RgbImage back = read_png(path);
        REQUIRE(back.same_shape(img));
        const double step = 1.0 / ((1 << depth) - 1);
        for (std::size_t k = 0; k < img.size(); ++k) {
            CHECK(std::abs(back.data()[k] - img.data()[k]) <= 0.5 * step + 1e-12);
            // Values are exact codes after one round trip.
            CHECK(std::abs(back.data()[k] / step - std::round(back.data()[k] / step)) <= 1e-9);
        }
        write_png(dir / "again.png", back, depth);
        CHECK(read_png(dir / "again.png") == back);
    }
    CHECK(kind_of([&] { write_png(dir / "bad.png", img, 12); }) == ErrorKind::Parameter);
    CHECK(kind_of([&] { read_png(dir / "missing.png"); }) == ErrorKind::Input);
}

TEST_CASE("sha256 of known content") {
    testing::TempDir dir("sha");
    std::ofstream(dir / "abc") << "abc";
    CHECK(sha256_file(dir / "abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    std::ofstream(dir / "empty").flush();
    CHECK(sha256_file(dir / "empty") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("manifest save/load and image-level split") {
    testing::TempDir dir("manifest");
    DatasetManifest m;
    m.sensor = kProfile;
    for (int i = 0; i < 10; ++i) m.pairs.push_back({"p" + std::to_string(i), "rgb/p.png", "raw/p.raw", 64, 64, ""});
    m.pairs[3].split = "test";
    m.assign_splits(5);
    int tests = 0;
    for (const auto& p : m.pairs) {
        CHECK((p.split == "train" || p.split == "test"));
        tests += p.split == "test";
    }
    // 20% of the nine unassigned entries, plus the one fixed in advance.
    CHECK(tests == 3);
    CHECK(m.pairs[3].split == "test");
    DatasetManifest again = m;
    for (auto& p : again.pairs) p.split.clear();
    again.pairs[3].split = "test";
    again.assign_splits(5);
    for (std::size_t i = 0; i < m.pairs.size(); ++i) CHECK(again.pairs[i].split == m.pairs[i].split);

    m.save(dir / "manifest.json");
    const DatasetManifest back = DatasetManifest::load(dir / "manifest.json");
    CHECK(back.sensor == kProfile);
    REQUIRE(back.pairs.size() == 10);
    CHECK(back.pairs[7].id == "p7");
    CHECK(back.pairs[7].split == m.pairs[7].split);
    CHECK(back.resolve("rgb/p.png") == dir / "rgb/p.png");

    std::ofstream(dir / "broken.json") << "{\"version\": 1, \"pairs\": 3}";
    CHECK_THROWS_AS(DatasetManifest::load(dir / "broken.json"), Error);
    CHECK(kind_of([&] { DatasetManifest::load(dir / "nothing.json"); }) == ErrorKind::Input);
}

TEST_CASE("synthetic dataset is well formed and dark-skewed") {
    testing::TempDir dir("synth");
    SynthConfig cfg;
    cfg.height = 96;
    cfg.width = 128;
    const DatasetManifest m = write_synthetic_dataset(dir.path(), 5, cfg, 3);
    REQUIRE(m.pairs.size() == 5);
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    int tests = 0;
    double mean = 0.0;
    for (const auto& e : m.pairs) {
        tests += e.split == "test";
        const LoadedPair p = load_pair(m, e);
        CHECK(p.rgb.height() == 96);
        CHECK(p.raw.data.height() == 48);
        CHECK(p.raw.data.channels() == 4);
        for (double v : p.rgb.data()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        for (double v : p.raw.data.data()) mean += v / static_cast<double>(p.raw.data.size() * 5);
    }
    CHECK(tests == 1);
    MESSAGE("mean normalized RAW level " << mean);
    CHECK(mean < 0.25);

    // Same seed, same bytes.
    testing::TempDir other("synth2");
    write_synthetic_dataset(other.path(), 5, cfg, 3);
    for (const auto& e : m.pairs) CHECK(sha256_file(m.resolve(e.raw)) == sha256_file(other / e.raw.string()));

    ImagePairEntry bad = m.pairs[0];
    bad.height = 50;
    CHECK_THROWS_AS(load_pair(m, bad), Error);
}

TEST_CASE("patch datasets round trip through float32 shards") {
    testing::TempDir dir("patches");
    PatchDataset ds;
    ds.sensor = kProfile;
    ds.seed = 9;
    ds.patches_per_image = 3;
    ds.pairs = testing::synthetic_patches(3, 3, 12);
    REQUIRE(ds.pairs.size() == 9);
    save_patch_dataset(dir.path(), ds);
    CHECK(std::filesystem::exists(dir / "index.json"));
    const PatchDataset back = load_patch_dataset(dir.path());
    CHECK(back.method == ds.method);
    CHECK(back.seed == 9);
    CHECK(back.sensor == kProfile);
    REQUIRE(back.pairs.size() == 9);
    std::set<const RgbImage*> contexts;
    for (std::size_t i = 0; i < 9; ++i) {
        const auto& a = ds.pairs[i];
        const auto& b = back.pairs[i];
        CHECK(b.source_image_id == a.source_image_id);
        CHECK(b.origin == a.origin);
        for (std::size_t k = 0; k < a.rgb_patch.size(); ++k)
            CHECK(b.rgb_patch.data()[k] == static_cast<double>(static_cast<float>(a.rgb_patch.data()[k])));
        for (std::size_t k = 0; k < a.raw_patch.size(); ++k)
            CHECK(b.raw_patch.data()[k] == static_cast<double>(static_cast<float>(a.raw_patch.data()[k])));
        CHECK(b.context->height() == 128);
        contexts.insert(b.context.get());
    }
    // One stored context per source image.
    CHECK(contexts.size() == 3);
    CHECK(kind_of([&] { load_patch_dataset(dir / "nothing"); }) == ErrorKind::Input);
}

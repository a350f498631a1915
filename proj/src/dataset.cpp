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

#include "rgb2raw/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include <json.hpp>

#include "rgb2raw/bayer.hpp"
#include "rgb2raw/error.hpp"
#include "rgb2raw/io.hpp"

namespace rgb2raw {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "float shards assume a little-endian host");

namespace {

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Input, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::Input, path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

json sensor_to_json(const SensorProfile& s) {
    return {{"name", s.name}, {"black_level", s.black_level}, {"white_level", s.white_level}, {"bayer_pattern", "RGGB"}};
}

SensorProfile sensor_from_json(const json& j) {
    SensorProfile s;
    s.name = j.value("name", s.name);
    s.black_level = j.at("black_level").get<int>();
    s.white_level = j.at("white_level").get<int>();
    s.bayer_pattern = parse_bayer_pattern(j.value("bayer_pattern", std::string("RGGB")));
    s.validate();
    return s;
}

constexpr int kPatchesPerShard = 256;
constexpr std::size_t kRgbFloats = static_cast<std::size_t>(kRgbPatchSide) * kRgbPatchSide * kRgbChannels;
constexpr std::size_t kRawFloats = static_cast<std::size_t>(kRawPatchSide) * kRawPatchSide * kRawChannels;
constexpr std::size_t kContextFloats = static_cast<std::size_t>(kContextSide) * kContextSide * kRgbChannels;

void append_floats(std::vector<float>& out, std::span<const double> values) {
    for (double v : values) out.push_back(static_cast<float>(v));
}

void write_floats(const fs::path& path, const std::vector<float>& values) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(float)));
}

std::vector<float> read_floats(const fs::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) fail(ErrorKind::Dataset, "missing shard " + path.string());
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes % sizeof(float) != 0) fail(ErrorKind::Dataset, path.string() + " has a truncated float record");
    std::vector<float> values(bytes / sizeof(float));
    in.seekg(0);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(bytes));
    return values;
}

Image image_from_floats(const std::vector<float>& src, std::size_t offset, int h, int w, int c) {
    Image img(h, w, c);
    auto dst = img.data();
    if (offset + dst.size() > src.size()) fail(ErrorKind::Dataset, "shard shorter than its index claims");
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[offset + i];
    return img;
}

}  // namespace

// --- Manifest --------------------------------------------------------------

DatasetManifest DatasetManifest::load(const fs::path& path) {
    const json j = read_json(path);
    DatasetManifest m;
    try {
        m.version = j.at("version").get<int>();
        if (m.version != kManifestVersion) {
            fail(ErrorKind::Input, "unsupported manifest version " + std::to_string(m.version));
        }
        m.sensor = sensor_from_json(j.at("sensor"));
        m.split_seed = j.value("split_seed", std::uint64_t{0});
        for (const auto& p : j.at("pairs")) {
            ImagePairEntry e;
            e.id = p.at("id").get<std::string>();
            e.rgb = p.at("rgb").get<std::string>();
            e.raw = p.at("raw").get<std::string>();
            e.height = p.at("height").get<int>();
            e.width = p.at("width").get<int>();
            e.split = p.value("split", std::string());
            m.pairs.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::Input, path.string() + ": " + e.what());
    }
    m.base_dir = path.parent_path();
    return m;
}

void DatasetManifest::save(const fs::path& path) const {
    json pairs_json = json::array();
    for (const auto& e : pairs) {
        pairs_json.push_back({{"id", e.id},
                              {"rgb", e.rgb.generic_string()},
                              {"raw", e.raw.generic_string()},
                              {"height", e.height},
                              {"width", e.width},
                              {"split", e.split}});
    }
    write_json(path, {{"version", version}, {"sensor", sensor_to_json(sensor)}, {"split_seed", split_seed},
                      {"pairs", pairs_json}});
}

void DatasetManifest::assign_splits(std::uint64_t seed, double test_fraction) {
    std::vector<std::size_t> unassigned;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].split.empty()) unassigned.push_back(i);
    }
    if (unassigned.empty()) return;
    split_seed = seed;
    std::mt19937_64 rng(seed);
    std::shuffle(unassigned.begin(), unassigned.end(), rng);
    const auto test_count = static_cast<std::size_t>(std::lround(test_fraction * unassigned.size()));
    for (std::size_t k = 0; k < unassigned.size(); ++k) {
        pairs[unassigned[k]].split = k < test_count ? "test" : "train";
    }
}

fs::path DatasetManifest::resolve(const fs::path& p) const { return p.is_absolute() ? p : base_dir / p; }

LoadedPair load_pair(const DatasetManifest& manifest, const ImagePairEntry& entry) {
    LoadedPair out;
    out.rgb = read_png(manifest.resolve(entry.rgb));
    const RawMosaic mosaic = read_raw16(manifest.resolve(entry.raw), entry.height, entry.width, manifest.sensor);
    if (out.rgb.height() != entry.height || out.rgb.width() != entry.width) {
        fail(ErrorKind::Input, "pair '" + entry.id + "': RGB is " + std::to_string(out.rgb.height()) + "x" +
                                   std::to_string(out.rgb.width()) + " but RAW is " + std::to_string(entry.height) +
                                   "x" + std::to_string(entry.width));
    }
    out.raw = pack_rggb(mosaic);
    return out;
}

// --- Patch dataset ---------------------------------------------------------

void save_patch_dataset(const fs::path& dir, const PatchDataset& dataset) {
    fs::create_directories(dir);

    std::vector<std::string> image_ids;
    std::map<const RgbImage*, std::size_t> context_slot;
    std::vector<float> contexts;
    for (const auto& p : dataset.pairs) {
        if (!p.context) fail(ErrorKind::Dataset, "patch without context image");
        if (context_slot.emplace(p.context.get(), image_ids.size()).second) {
            image_ids.push_back(p.source_image_id);
            append_floats(contexts, p.context->data());
        }
    }
    write_floats(dir / "contexts.bin", contexts);

    json shards = json::array();
    json patches = json::array();
    for (std::size_t start = 0; start < dataset.pairs.size(); start += kPatchesPerShard) {
        const std::size_t end = std::min(dataset.pairs.size(), start + kPatchesPerShard);
        char name[32];
        std::snprintf(name, sizeof(name), "patches-%03zu.bin", shards.size());
        std::vector<float> values;
        values.reserve((end - start) * (kRgbFloats + kRawFloats));
        for (std::size_t i = start; i < end; ++i) {
            const auto& p = dataset.pairs[i];
            if (p.rgb_patch.size() != kRgbFloats || p.raw_patch.size() != kRawFloats) {
                fail(ErrorKind::Dataset, "patch " + std::to_string(i) + " has unexpected geometry");
            }
            append_floats(values, p.rgb_patch.data());
            append_floats(values, p.raw_patch.data());
            patches.push_back({{"image", p.source_image_id},
                               {"context", context_slot.at(p.context.get())},
                               {"row", p.origin.row},
                               {"col", p.origin.col},
                               {"shard", shards.size()},
                               {"slot", i - start}});
        }
        write_floats(dir / name, values);
        shards.push_back(name);
    }

    write_json(dir / "index.json", {{"version", kPatchIndexVersion},
                                    {"sampling", to_string(dataset.method)},
                                    {"seed", dataset.seed},
                                    {"bins", dataset.bins},
                                    {"patches_per_image", dataset.patches_per_image},
                                    {"sensor", sensor_to_json(dataset.sensor)},
                                    {"rgb_patch_side", kRgbPatchSide},
                                    {"raw_patch_side", kRawPatchSide},
                                    {"context_side", kContextSide},
                                    {"images", image_ids},
                                    {"shards", shards},
                                    {"patches", patches}});
}

PatchDataset load_patch_dataset(const fs::path& dir) {
    const json index = read_json(dir / "index.json");
    PatchDataset ds;
    try {
        if (index.at("version").get<int>() != kPatchIndexVersion) {
            fail(ErrorKind::Dataset, "unsupported patch index version");
        }
        if (index.at("rgb_patch_side").get<int>() != kRgbPatchSide ||
            index.at("raw_patch_side").get<int>() != kRawPatchSide ||
            index.at("context_side").get<int>() != kContextSide) {
            fail(ErrorKind::Dataset, "patch geometry in " + dir.string() + " does not match this build");
        }
        ds.method = parse_sampling_method(index.at("sampling").get<std::string>());
        ds.seed = index.at("seed").get<std::uint64_t>();
        ds.bins = index.at("bins").get<int>();
        ds.patches_per_image = index.at("patches_per_image").get<int>();
        ds.sensor = sensor_from_json(index.at("sensor"));

        const auto context_values = read_floats(dir / "contexts.bin");
        const auto image_count = index.at("images").size();
        if (context_values.size() != image_count * kContextFloats) {
            fail(ErrorKind::Dataset, "contexts.bin does not match the image list");
        }
        std::vector<std::shared_ptr<const RgbImage>> contexts;
        for (std::size_t i = 0; i < image_count; ++i) {
            contexts.push_back(std::make_shared<const RgbImage>(
                image_from_floats(context_values, i * kContextFloats, kContextSide, kContextSide, kRgbChannels)));
        }
        std::vector<std::vector<float>> shards;
        for (const auto& name : index.at("shards")) shards.push_back(read_floats(dir / name.get<std::string>()));

        for (const auto& p : index.at("patches")) {
            const auto shard = p.at("shard").get<std::size_t>();
            const auto slot = p.at("slot").get<std::size_t>();
            const auto ctx = p.at("context").get<std::size_t>();
            if (shard >= shards.size() || ctx >= contexts.size()) fail(ErrorKind::Dataset, "dangling patch reference");
            const std::size_t offset = slot * (kRgbFloats + kRawFloats);
            PatchPair pair;
            pair.rgb_patch = image_from_floats(shards[shard], offset, kRgbPatchSide, kRgbPatchSide, kRgbChannels);
            pair.raw_patch =
                image_from_floats(shards[shard], offset + kRgbFloats, kRawPatchSide, kRawPatchSide, kRawChannels);
            pair.context = contexts[ctx];
            pair.source_image_id = p.at("image").get<std::string>();
            pair.origin = {p.at("row").get<int>(), p.at("col").get<int>()};
            ds.pairs.push_back(std::move(pair));
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::Dataset, dir.string() + "/index.json: " + e.what());
    }
    return ds;
}

}  // namespace rgb2raw

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

#include "rgb2raw/converter.hpp"

#include <chrono>
#include <fstream>

#include <json.hpp>

#include "rgb2raw/bayer.hpp"
#include "rgb2raw/error.hpp"
#include "rgb2raw/io.hpp"
#include "rgb2raw/resize.hpp"
#include "rgb2raw/sampling.hpp"

namespace rgb2raw {

namespace fs = std::filesystem;

namespace {

std::vector<int> tile_origins(int extent) {
    std::vector<int> out;
    for (int pos = 0; pos + kTileRgbSide <= extent; pos += kTileRgbSide) out.push_back(pos);
    if (out.back() + kTileRgbSide < extent) out.push_back(extent - kTileRgbSide);
    return out;
}

}  // namespace

Image convert_tiles(const ReRawModel& model, const RgbImage& rgb, const RgbImage& context) {
    if (rgb.channels() != kRgbChannels) fail(ErrorKind::Input, "conversion needs a 3-channel RGB image");
    if (rgb.height() % 2 != 0 || rgb.width() % 2 != 0) fail(ErrorKind::Input, "tiled conversion needs even sides");
    if (rgb.height() < kTileRgbSide || rgb.width() < kTileRgbSide) {
        fail(ErrorKind::Input, "image " + std::to_string(rgb.height()) + "x" + std::to_string(rgb.width()) +
                                   " is smaller than one " + std::to_string(kTileRgbSide) + " px tile");
    }
    const RgbImage padded = reflect_pad(rgb, 1);
    const GlobalCodes globals = model.encode_globals(context);
    Image out(rgb.height() / 2, rgb.width() / 2, kRawChannels);
    const int input_side = input_side_for(kTileRawSide);

    // One tile per forward call keeps every evaluation the same shape, so a
    // tile's output depends only on its own pixels and the global codes.
    for (int oy : tile_origins(rgb.height())) {
        for (int ox : tile_origins(rgb.width())) {
            const Image tile = padded.crop(oy, ox, input_side, input_side);
            const ForwardResult r = model.forward(std::span<const Image>(&tile, 1), globals);
            for (int y = 0; y < kTileRawSide; ++y) {
                for (int x = 0; x < kTileRawSide; ++x) {
                    for (int c = 0; c < kRawChannels; ++c) {
                        out.at(oy / 2 + y, ox / 2 + x, c) = r.final(y * kTileRawSide + x, c);
                    }
                }
            }
        }
    }
    return out;
}

PackedRawImage convert_image(const ReRawModel& model, const RgbImage& rgb, const SensorProfile& profile,
                             ConversionNotes* notes) {
    const int min_side = input_side_for(kTileRawSide);
    if (rgb.height() < min_side || rgb.width() < min_side) {
        fail(ErrorKind::Input, "image " + std::to_string(rgb.height()) + "x" + std::to_string(rgb.width()) +
                                   " is smaller than one " + std::to_string(min_side) + " px tile");
    }
    // Whole tiles only, cut from the right and bottom so the Bayer phase and
    // the top-left origin are preserved.
    const int h = rgb.height() - rgb.height() % kTileRgbSide;
    const int w = rgb.width() - rgb.width() % kTileRgbSide;
    const bool cropped = h != rgb.height() || w != rgb.width();
    const RgbImage kept = cropped ? rgb.crop(0, 0, h, w) : rgb;
    if (notes) {
        notes->cropped = cropped;
        notes->source_height = rgb.height();
        notes->source_width = rgb.width();
        notes->tiles = static_cast<int>(tile_origins(h).size() * tile_origins(w).size());
    }
    RgbImage context = build_context(kept);
    const int cs = model.config().context_side;
    if (cs != context.height()) context = resize_bilinear(context, cs, cs);
    return {convert_tiles(model, kept, context), profile};
}

ConversionReport convert_batch(const fs::path& checkpoint_path, const std::vector<fs::path>& images,
                               const fs::path& output_dir, const SensorProfile& profile) {
    profile.validate();
    ConversionReport report;
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    const ReRawModel model = model_from_checkpoint(ckpt);
    report.checkpoint_hash = sha256_file(checkpoint_path);
    fs::create_directories(output_dir);

    nlohmann::json rows = nlohmann::json::array();
    for (const auto& src : images) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const RgbImage rgb = read_png(src);
            ConversionNotes notes;
            const PackedRawImage packed = convert_image(model, rgb, profile, &notes);
            const RawMosaic mosaic = unpack_rggb(packed);
            const fs::path out_path = output_dir / (src.stem().string() + ".raw");
            write_raw16(out_path, mosaic);
            ConversionEntry e;
            e.source = src.string();
            e.output = out_path.string();
            e.height = mosaic.height;
            e.width = mosaic.width;
            e.cropped = notes.cropped;
            e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            rows.push_back({{"source", e.source},
                            {"output", out_path.filename().string()},
                            {"id", src.stem().string()},
                            {"height", e.height},
                            {"width", e.width},
                            {"source_height", notes.source_height},
                            {"source_width", notes.source_width},
                            {"cropped", e.cropped},
                            {"seconds", e.seconds}});
            report.converted.push_back(std::move(e));
        } catch (const std::exception& e) {
            report.skipped.push_back({src.string(), e.what()});
        }
    }

    nlohmann::json skipped = nlohmann::json::array();
    for (const auto& s : report.skipped) skipped.push_back({{"source", s.source}, {"reason", s.reason}});
    const nlohmann::json manifest{
        {"version", 1},
        {"checkpoint", checkpoint_path.string()},
        {"checkpoint_sha256", report.checkpoint_hash},
        {"sensor",
         {{"name", profile.name}, {"black_level", profile.black_level}, {"white_level", profile.white_level},
          {"bayer_pattern", "RGGB"}}},
        {"images", rows},
        {"skipped", skipped}};
    std::ofstream out(output_dir / "conversion_manifest.json", std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write conversion manifest in " + output_dir.string());
    out << manifest.dump(2) << '\n';
    return report;
}

}  // namespace rgb2raw

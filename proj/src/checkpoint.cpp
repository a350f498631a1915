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

#include "rgb2raw/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

#include "rgb2raw/error.hpp"

namespace rgb2raw {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "checkpoint arrays assume a little-endian host");

namespace {

constexpr char kMagic[] = "RGB2RAW-CHECKPOINT v1\n";
constexpr std::size_t kMagicSize = sizeof(kMagic) - 1;

void write_array(std::ofstream& out, const std::vector<double>& values) {
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
}

std::vector<double> read_array(std::ifstream& in, std::size_t count, const fs::path& path) {
    std::vector<double> values(count);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(count * sizeof(double))) {
        fail(ErrorKind::Checkpoint, path.string() + " is truncated");
    }
    return values;
}

}  // namespace

void save_checkpoint(const fs::path& path, const Checkpoint& ckpt) {
    json header{{"config", ckpt.config}, {"weight_count", ckpt.weights.size()}};
    if (ckpt.training) {
        const auto& t = *ckpt.training;
        if (t.first_moment.size() != ckpt.weights.size() || t.second_moment.size() != ckpt.weights.size()) {
            fail(ErrorKind::Checkpoint, "optimizer moments do not match the weight count");
        }
        header["training"] = {{"epoch", t.epoch}, {"step", t.step}, {"adam_step", t.adam_step},
                              {"train_config", t.train_config}};
    }
    const std::string text = header.dump();
    const std::uint64_t length = text.size();

    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out.write(kMagic, static_cast<std::streamsize>(kMagicSize));
    out.write(reinterpret_cast<const char*>(&length), sizeof(length));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    write_array(out, ckpt.weights);
    if (ckpt.training) {
        write_array(out, ckpt.training->first_moment);
        write_array(out, ckpt.training->second_moment);
    }
    if (!out) fail(ErrorKind::Io, "short write to " + path.string());
}

Checkpoint load_checkpoint(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Checkpoint, "cannot open checkpoint " + path.string());
    std::string magic(kMagicSize, '\0');
    in.read(magic.data(), static_cast<std::streamsize>(kMagicSize));
    if (magic != kMagic) fail(ErrorKind::Checkpoint, path.string() + " is not a checkpoint");
    std::uint64_t length = 0;
    in.read(reinterpret_cast<char*>(&length), sizeof(length));
    if (!in || length > (1u << 24)) fail(ErrorKind::Checkpoint, path.string() + " has a corrupt header");
    std::string text(length, '\0');
    in.read(text.data(), static_cast<std::streamsize>(length));

    Checkpoint ckpt;
    std::size_t weight_count = 0;
    try {
        const json header = json::parse(text);
        ckpt.config = header.at("config").get<ReRawConfig>();
        weight_count = header.at("weight_count").get<std::size_t>();
        if (header.contains("training")) {
            const auto& t = header.at("training");
            TrainingState state;
            state.epoch = t.at("epoch").get<int>();
            state.step = t.at("step").get<long long>();
            state.adam_step = t.at("adam_step").get<long long>();
            state.train_config = t.at("train_config");
            ckpt.training = std::move(state);
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::Checkpoint, path.string() + ": " + e.what());
    }
    ckpt.weights = read_array(in, weight_count, path);
    if (ckpt.training) {
        ckpt.training->first_moment = read_array(in, weight_count, path);
        ckpt.training->second_moment = read_array(in, weight_count, path);
    }
    return ckpt;
}

Checkpoint make_checkpoint(const ReRawModel& model) { return {model.config(), model.flatten_weights(), {}}; }

ReRawModel model_from_checkpoint(const Checkpoint& ckpt) {
    try {
        ckpt.config.validate();
    } catch (const Error& e) {
        fail(ErrorKind::Checkpoint, std::string("invalid config in checkpoint: ") + e.what());
    }
    ReRawModel model(ckpt.config);
    model.load_weights(ckpt.weights);
    return model;
}

}  // namespace rgb2raw
